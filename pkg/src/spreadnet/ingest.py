"""Parsers for the raw JSONL event logs.

Four streams feed the pipeline: mention tweets, like/retweet
interactions, paper metadata, and user records. Each parser is a pure
function from an iterable of JSON lines to typed records plus an
:class:`IngestStats` tally, so the same code path serves both the raw
input files and the normalized artifacts the pipeline writes back out.

Malformed lines are skipped and counted unless ``strict=True``, in
which case the first one raises :class:`IngestError` with its line
number. For every parser the counters satisfy
``accepted + rejected + duplicates == total``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Iterable, Iterator

__all__ = [
    "ArxivRecord",
    "IngestError",
    "IngestStats",
    "InteractionEvent",
    "MentionEvent",
    "UserRecord",
    "normalize_arxiv_id",
    "parse_arxiv_metadata",
    "parse_interaction_stream",
    "parse_mention_stream",
    "parse_user_records",
    "split_native_retweets",
]

INTERACTION_KINDS = ("like", "retweet")

# One kind of interaction hitting a single tweet this many times is
# suspicious enough to flag (typical crawler feeds stay well below it).
TARGET_CAP = 100

_LANG_RE = re.compile(r"[a-z]{2}")

# New-style identifiers: 4-digit ym block, 4 or 5 digit sequence.
_NEW_ID_RE = re.compile(r"(\d{4}\.\d{4,5})(?:v\d+)?")
# Old-style identifiers: archive, optional subject class, 7-digit ym+sequence.
_OLD_ID_RE = re.compile(r"([a-z][a-z-]*(?:\.[A-Z]{2})?/\d{7})(?:v\d+)?")
_HOST_RE = re.compile(r"(?:[a-z0-9-]+\.)*arxiv\.org", re.IGNORECASE)


class IngestError(ValueError):
    """Raised in strict mode when a line cannot be parsed."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


@dataclass
class IngestStats:
    """Counters for one parsed stream.

    ``rejected`` covers malformed lines and, for interactions parsed
    against a known-tweet set, events whose target is absent from it
    (the latter are also tallied in ``unknown_target``).
    """

    total: int = 0
    accepted: int = 0
    rejected: int = 0
    duplicates: int = 0
    native_retweets: int = 0
    unknown_target: int = 0
    likes: int = 0
    retweets: int = 0
    targets_at_cap: int = 0
    cap_warning: bool = False
    reject_reasons: dict[str, int] = field(default_factory=dict)

    def _reject(self, reason: str) -> None:
        self.rejected += 1
        self.reject_reasons[reason] = self.reject_reasons.get(reason, 0) + 1

    def check(self) -> None:
        if self.accepted + self.rejected + self.duplicates != self.total:
            raise AssertionError("ingest counters out of balance")


@dataclass(frozen=True)
class MentionEvent:
    """One tweet that mentions at least one paper.

    ``paper_ids`` holds normalized identifiers in first-seen order with
    duplicates removed. ``is_retweet_of`` is set when the record is a
    native retweet of another mention tweet; such events act as
    interactions, not as original mentions (see
    :func:`split_native_retweets`).
    """

    tweet_id: str
    user_id: str
    timestamp: datetime
    paper_ids: tuple[str, ...]
    lang_code: str = "UD"
    is_retweet_of: str | None = None


@dataclass(frozen=True)
class InteractionEvent:
    """A like or retweet pointed at a mention tweet."""

    kind: str
    actor_user_id: str
    target_tweet_id: str


@dataclass(frozen=True)
class ArxivRecord:
    """Paper metadata; ``categories`` keeps the listing order."""

    paper_id: str
    categories: tuple[str, ...]
    submitted: date
    title: str = ""


@dataclass(frozen=True)
class UserRecord:
    """Account-level data. ``lang_override`` of ``"UD"`` means none."""

    user_id: str
    screen_name: str = ""
    profile_text: str = ""
    lang_override: str = "UD"


def normalize_arxiv_id(raw: str) -> str | None:
    """Reduce a paper URL or identifier to canonical form.

    Accepts bare identifiers (optionally prefixed with ``arXiv:``) and
    arxiv.org URLs in ``/abs/`` or ``/pdf/`` form. Version suffixes,
    trailing ``.pdf``, query strings and fragments are stripped. Both
    the new ``NNNN.NNNNN`` scheme and the old ``archive/NNNNNNN`` one
    are recognized. Returns ``None`` for anything else, including URLs
    on non-arXiv hosts; rejection is a value, not an exception.

    >>> normalize_arxiv_id("https://arxiv.org/abs/1810.04805v2")
    '1810.04805'
    >>> normalize_arxiv_id("arxiv.org/pdf/hep-th/9901001.pdf")
    'hep-th/9901001'
    """
    if not isinstance(raw, str):
        return None
    text = raw.strip()
    if not text:
        return None
    if "://" in text:
        scheme, _, text = text.partition("://")
        if scheme.lower() not in ("http", "https"):
            return None
    text = text.split("#", 1)[0].split("?", 1)[0]
    if text[:6].lower() == "arxiv:":
        return _match_id(text[6:])

    candidate = _match_id(text)
    if candidate is not None:
        return candidate

    host, _, path = text.partition("/")
    if not _HOST_RE.fullmatch(host):
        return None
    path = path.strip("/")
    for prefix in ("abs/", "pdf/"):
        if path.startswith(prefix):
            path = path[len(prefix):]
            break
    else:
        return None
    if path.endswith(".pdf"):
        path = path[: -len(".pdf")]
    return _match_id(path)


def _match_id(text: str) -> str | None:
    for pattern in (_NEW_ID_RE, _OLD_ID_RE):
        match = pattern.fullmatch(text)
        if match:
            return match.group(1)
    return None


def _iter_json_lines(lines: Iterable[str]) -> Iterator[tuple[int, object | None]]:
    """Yield (line_number, parsed-or-None); blank lines are skipped."""
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield number, json.loads(line)
        except json.JSONDecodeError:
            yield number, None


def _clean_lang(value: object) -> str:
    """Two-letter lowercase code, or the "UD" sentinel.

    "ud"/"UD" and the ISO "und" tag all mean undetermined; everything
    that is not a plain two-letter code joins them.
    """
    if isinstance(value, str):
        code = value.lower()
        if code in ("ud", "und"):
            return "UD"
        if _LANG_RE.fullmatch(code):
            return code
    return "UD"


def _require_str(record: dict, key: str) -> str | None:
    value = record.get(key)
    if isinstance(value, str) and value:
        return value
    return None


def _parse_timestamp(value: object) -> datetime | None:
    if not isinstance(value, str) or not value:
        return None
    text = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError:
        return None
    if stamp.tzinfo is None:
        return None
    return stamp.astimezone(timezone.utc).replace(microsecond=0)


def parse_mention_stream(
    lines: Iterable[str], strict: bool = False
) -> tuple[list[MentionEvent], IngestStats]:
    """Parse mention tweets.

    A line is accepted when it carries a tweet id, user id, an RFC 3339
    timestamp with an offset, and at least one URL that normalizes to a
    paper identifier. Repeated tweet ids keep the first occurrence.
    """
    events: list[MentionEvent] = []
    stats = IngestStats()
    seen: set[str] = set()
    for number, record in _iter_json_lines(lines):
        stats.total += 1
        reason = None
        if not isinstance(record, dict):
            reason = "bad json"
        else:
            tweet_id = _require_str(record, "tweet_id")
            user_id = _require_str(record, "user_id")
            stamp = _parse_timestamp(record.get("timestamp"))
            urls = record.get("urls")
            if tweet_id is None or user_id is None:
                reason = "missing id"
            elif stamp is None:
                reason = "bad timestamp"
            elif not isinstance(urls, list):
                reason = "missing urls"
            else:
                paper_ids: list[str] = []
                for url in urls:
                    pid = normalize_arxiv_id(url) if isinstance(url, str) else None
                    if pid is not None and pid not in paper_ids:
                        paper_ids.append(pid)
                if not paper_ids:
                    reason = "no paper url"
        if reason is not None:
            if strict:
                raise IngestError(number, reason)
            stats._reject(reason)
            continue
        if tweet_id in seen:
            stats.duplicates += 1
            continue
        seen.add(tweet_id)
        retweet_of = record.get("retweeted_tweet_id")
        if not (isinstance(retweet_of, str) and retweet_of):
            retweet_of = None
        else:
            stats.native_retweets += 1
        events.append(
            MentionEvent(
                tweet_id=tweet_id,
                user_id=user_id,
                timestamp=stamp,
                paper_ids=tuple(paper_ids),
                lang_code=_clean_lang(record.get("lang")),
                is_retweet_of=retweet_of,
            )
        )
        stats.accepted += 1
    stats.check()
    return events, stats


def split_native_retweets(
    events: Iterable[MentionEvent],
) -> tuple[list[MentionEvent], list[InteractionEvent]]:
    """Separate original mentions from native retweets.

    Native retweets carry the paper URLs of the tweet they repeat, so
    keeping them as mentions would double-count the papers and credit
    the wrong author. They come back as retweet interactions on the
    original tweet instead.
    """
    originals: list[MentionEvent] = []
    derived: list[InteractionEvent] = []
    for event in events:
        if event.is_retweet_of is None:
            originals.append(event)
        else:
            derived.append(
                InteractionEvent(
                    kind="retweet",
                    actor_user_id=event.user_id,
                    target_tweet_id=event.is_retweet_of,
                )
            )
    return originals, derived


def parse_interaction_stream(
    lines: Iterable[str],
    known_tweets: set[str] | None = None,
    strict: bool = False,
) -> tuple[list[InteractionEvent], IngestStats]:
    """Parse like/retweet events.

    When ``known_tweets`` is given, events whose target is not in the
    set are dropped and tallied under ``unknown_target`` (they count as
    rejected, not as errors, even in strict mode: an unmatched target
    is a property of the pair of files, not of the line). Exact
    (kind, actor, target) repeats count as duplicates. Any single
    target collecting ``TARGET_CAP`` or more events of one kind flips
    ``cap_warning``.
    """
    events: list[InteractionEvent] = []
    stats = IngestStats()
    seen: set[tuple[str, str, str]] = set()
    per_target: dict[tuple[str, str], int] = {}
    for number, record in _iter_json_lines(lines):
        stats.total += 1
        reason = None
        if not isinstance(record, dict):
            reason = "bad json"
        else:
            kind = record.get("kind")
            actor = _require_str(record, "actor_user_id")
            target = _require_str(record, "target_tweet_id")
            if kind not in INTERACTION_KINDS:
                reason = "bad kind"
            elif actor is None or target is None:
                reason = "missing id"
        if reason is not None:
            if strict:
                raise IngestError(number, reason)
            stats._reject(reason)
            continue
        if known_tweets is not None and target not in known_tweets:
            stats.unknown_target += 1
            stats._reject("unknown target")
            continue
        key = (kind, actor, target)
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        events.append(InteractionEvent(kind=kind, actor_user_id=actor, target_tweet_id=target))
        stats.accepted += 1
        if kind == "like":
            stats.likes += 1
        else:
            stats.retweets += 1
        per_target[(target, kind)] = per_target.get((target, kind), 0) + 1
    stats.targets_at_cap = sum(1 for count in per_target.values() if count >= TARGET_CAP)
    stats.cap_warning = stats.targets_at_cap > 0
    stats.check()
    return events, stats


def parse_arxiv_metadata(
    lines: Iterable[str], strict: bool = False
) -> tuple[dict[str, ArxivRecord], IngestStats]:
    """Parse paper metadata keyed by normalized identifier.

    ``categories`` may be a list or a single space-separated string
    (both shapes occur in metadata dumps); it must name at least one
    category. ``submitted`` must be an ISO date. First record per
    identifier wins.
    """
    records: dict[str, ArxivRecord] = {}
    stats = IngestStats()
    for number, record in _iter_json_lines(lines):
        stats.total += 1
        reason = None
        if not isinstance(record, dict):
            reason = "bad json"
        else:
            paper_id = normalize_arxiv_id(record.get("id", ""))
            categories = record.get("categories")
            if isinstance(categories, str):
                categories = categories.split()
            if paper_id is None:
                reason = "bad id"
            elif not (
                isinstance(categories, list)
                and categories
                and all(isinstance(c, str) and c for c in categories)
            ):
                reason = "bad categories"
            else:
                submitted = None
                raw_date = record.get("submitted")
                if isinstance(raw_date, str):
                    try:
                        submitted = date.fromisoformat(raw_date)
                    except ValueError:
                        pass
                if submitted is None:
                    reason = "bad date"
        if reason is not None:
            if strict:
                raise IngestError(number, reason)
            stats._reject(reason)
            continue
        if paper_id in records:
            stats.duplicates += 1
            continue
        title = record.get("title")
        records[paper_id] = ArxivRecord(
            paper_id=paper_id,
            categories=tuple(categories),
            submitted=submitted,
            title=title if isinstance(title, str) else "",
        )
        stats.accepted += 1
    stats.check()
    return records, stats


def parse_user_records(
    lines: Iterable[str], strict: bool = False
) -> tuple[dict[str, UserRecord], IngestStats]:
    """Parse account records keyed by user id; first record wins."""
    records: dict[str, UserRecord] = {}
    stats = IngestStats()
    for number, record in _iter_json_lines(lines):
        stats.total += 1
        reason = None
        if not isinstance(record, dict):
            reason = "bad json"
        else:
            user_id = _require_str(record, "user_id")
            if user_id is None:
                reason = "missing id"
        if reason is not None:
            if strict:
                raise IngestError(number, reason)
            stats._reject(reason)
            continue
        if user_id in records:
            stats.duplicates += 1
            continue
        screen_name = record.get("screen_name")
        profile_text = record.get("profile_text")
        records[user_id] = UserRecord(
            user_id=user_id,
            screen_name=screen_name if isinstance(screen_name, str) else "",
            profile_text=profile_text if isinstance(profile_text, str) else "",
            lang_override=_clean_lang(record.get("lang")),
        )
        stats.accepted += 1
    stats.check()
    return records, stats
