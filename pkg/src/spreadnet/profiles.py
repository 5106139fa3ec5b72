"""User and community profiling: categories, languages, activity spans.

Two category profiles exist per user. The spread profile looks at the
papers a user mentioned; the collect profile looks at the papers
behind the tweets they liked or retweeted. Both reduce to the modal
main category (first category listed on the paper), with ties going to
the lexicographically smallest code so reruns agree.

Languages are two-letter lowercase codes with "UD" for undetermined.
The communication language is the modal tweet language unless the user
record carries an explicit override; the profile language is detected
from the profile text after URLs are stripped, through a pluggable
detector (the bundled one just looks at Unicode scripts).
"""

from __future__ import annotations

import re
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from spreadnet.ingest import ArxivRecord, InteractionEvent, MentionEvent, UserRecord

__all__ = [
    "CommunityProfile",
    "ProfileStats",
    "UserProfile",
    "build_user_profiles",
    "communication_language",
    "community_profiles",
    "main_category",
    "mention_period",
    "mention_time_series",
    "profile_language",
    "rollup_category",
    "script_language",
    "user_category",
]

# Archives whose papers all land in the physics* bucket at archive level.
PHYSICS_FAMILY = ("gr-qc", "nlin", "nucl-ex", "nucl-th", "physics", "quant-ph")

# Current top-level arXiv archives. Anything else rolls up to "other".
KNOWN_ARCHIVES = frozenset(
    PHYSICS_FAMILY
    + (
        "astro-ph",
        "cond-mat",
        "cs",
        "econ",
        "eess",
        "hep-ex",
        "hep-lat",
        "hep-ph",
        "hep-th",
        "math",
        "math-ph",
        "q-bio",
        "q-fin",
        "stat",
    )
)

_LANG_CODE_RE = re.compile(r"[a-z]{2}")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+")

Detector = Callable[[str], "str | None"]


def main_category(record: ArxivRecord) -> str:
    """The paper's primary category: first in the listing."""
    return record.categories[0]


def rollup_category(category: str, level: str = "archive") -> str:
    """Map a category code onto a display group.

    ``archive`` strips the subcategory and folds the physics-family
    archives into ``physics*``; codes from unknown archives come back
    as ``other`` so the mapping is total. ``subcategory`` keeps the
    code as is.
    """
    if level == "subcategory":
        return category
    if level != "archive":
        raise ValueError(f"unknown rollup level {level!r}")
    archive = category.split(".", 1)[0]
    if archive in PHYSICS_FAMILY:
        return "physics*"
    if archive in KNOWN_ARCHIVES:
        return archive
    return "other"


def _modal(counter: Counter) -> str | None:
    """Most common key; ties resolved to the smallest key."""
    if not counter:
        return None
    return min(counter.items(), key=lambda item: (-item[1], item[0]))[0]


def user_category(
    user_id: str,
    mentions: Sequence[MentionEvent],
    interactions: Sequence[InteractionEvent],
    metadata: Mapping[str, ArxivRecord],
    mode: str = "spread",
) -> str | None:
    """Modal main category of one user's papers.

    ``spread`` counts papers across the user's own mention tweets;
    ``collect`` counts papers behind the tweets the user liked or
    retweeted (per interaction, so engaging twice counts twice).
    Papers without metadata are skipped. ``None`` means there was
    nothing to count.
    """
    if mode not in ("spread", "collect"):
        raise ValueError(f"mode must be 'spread' or 'collect', got {mode!r}")
    counter: Counter = Counter()
    if mode == "spread":
        for event in mentions:
            if event.user_id != user_id:
                continue
            for paper_id in event.paper_ids:
                record = metadata.get(paper_id)
                if record is not None:
                    counter[main_category(record)] += 1
    else:
        papers_of = {event.tweet_id: event.paper_ids for event in mentions}
        for event in interactions:
            if event.actor_user_id != user_id:
                continue
            for paper_id in papers_of.get(event.target_tweet_id, ()):
                record = metadata.get(paper_id)
                if record is not None:
                    counter[main_category(record)] += 1
    return _modal(counter)


def communication_language(
    user_id: str,
    mentions: Sequence[MentionEvent],
    override: str = "UD",
) -> str:
    """Modal tweet language of the user, unless an override is given.

    "UD" codes never participate in the vote; a user whose tweets are
    all undetermined stays "UD". An override of "UD" means no override.
    """
    if override != "UD":
        return override
    counter: Counter = Counter(
        event.lang_code
        for event in mentions
        if event.user_id == user_id and event.lang_code != "UD"
    )
    return _modal(counter) or "UD"


def profile_language(text: str, detector: Detector) -> str:
    """Language of a profile text, "UD" when nothing can be said.

    URLs are stripped first so link-only profiles do not get classified
    by their slugs. The detector may return anything; only a two-letter
    lowercase code is trusted, everything else (including a raised
    exception) collapses to "UD".
    """
    stripped = _URL_RE.sub(" ", text or "").strip()
    if not stripped:
        return "UD"
    try:
        code = detector(stripped)
    except Exception:
        return "UD"
    if isinstance(code, str) and _LANG_CODE_RE.fullmatch(code):
        return code
    return "UD"


_SCRIPTS = (
    ("kana", ((0x3040, 0x30FF),)),
    ("hangul", ((0x1100, 0x11FF), (0xAC00, 0xD7AF))),
    ("han", ((0x3400, 0x4DBF), (0x4E00, 0x9FFF))),
    ("cyrillic", ((0x0400, 0x04FF),)),
    ("arabic", ((0x0600, 0x06FF),)),
    ("hebrew", ((0x0590, 0x05FF),)),
    ("greek", ((0x0370, 0x03FF),)),
    ("thai", ((0x0E00, 0x0E7F),)),
    ("devanagari", ((0x0900, 0x097F),)),
    ("latin", ((0x0041, 0x005A), (0x0061, 0x007A), (0x00C0, 0x024F),)),
)

_SCRIPT_LANG = {
    "kana": "ja",
    "hangul": "ko",
    "han": "zh",
    "cyrillic": "ru",
    "arabic": "ar",
    "hebrew": "he",
    "greek": "el",
    "thai": "th",
    "devanagari": "hi",
    "latin": "en",
}


def script_language(text: str) -> str | None:
    """Crude script-counting language guess; the default detector.

    Counts letters per Unicode script and maps the winner to a
    representative language. Kana or hangul anywhere force ja/ko even
    under a han majority, since Japanese and Korean text freely mixes
    in ideographs. This is deliberately simple; swap in a real detector
    through the ``detector`` arguments if you have one.
    """
    counts = Counter()
    for char in text:
        point = ord(char)
        for script, ranges in _SCRIPTS:
            if any(low <= point <= high for low, high in ranges):
                counts[script] += 1
                break
    if not counts:
        return None
    if counts["kana"]:
        return "ja"
    if counts["hangul"]:
        return "ko"
    winner = min(counts.items(), key=lambda item: (-item[1], item[0]))[0]
    return _SCRIPT_LANG[winner]


def mention_period(user_id: str, mentions: Sequence[MentionEvent]) -> int | None:
    """Whole days between the user's first and last mention tweet.

    Undefined (None) with fewer than two mentions. The difference is
    floored, so two tweets 47 hours apart count as a period of 1 day.
    """
    stamps = [event.timestamp for event in mentions if event.user_id == user_id]
    if len(stamps) < 2:
        return None
    span = max(stamps) - min(stamps)
    return int(span.total_seconds() // 86400)


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    spread_category: str | None = None
    collect_category: str | None = None
    communication_lang: str = "UD"
    profile_lang: str = "UD"
    mention_period_days: int | None = None


@dataclass
class ProfileStats:
    """Side counts from a profiling run."""

    users: int = 0
    missing_paper_refs: int = 0


def build_user_profiles(
    mentions: Sequence[MentionEvent],
    interactions: Sequence[InteractionEvent],
    metadata: Mapping[str, ArxivRecord],
    users: Mapping[str, UserRecord] | None = None,
    detector: Detector = script_language,
    universe: Iterable[str] | None = None,
) -> tuple[dict[str, UserProfile], ProfileStats]:
    """Profile every user in one pass over the event streams.

    Equivalent to calling the per-user helpers for each member of
    ``universe`` (default: everyone appearing in the events), just not
    quadratic. Paper references without metadata are skipped and
    tallied in the returned stats.
    """
    users = users or {}
    stats = ProfileStats()

    spread: dict[str, Counter] = defaultdict(Counter)
    collect: dict[str, Counter] = defaultdict(Counter)
    langs: dict[str, Counter] = defaultdict(Counter)
    first_last: dict[str, tuple] = {}
    papers_of: dict[str, tuple[str, ...]] = {}

    def categories_for(paper_ids: tuple[str, ...]) -> list[str]:
        found = []
        for paper_id in paper_ids:
            record = metadata.get(paper_id)
            if record is None:
                stats.missing_paper_refs += 1
            else:
                found.append(main_category(record))
        return found

    for event in mentions:
        papers_of[event.tweet_id] = event.paper_ids
        spread[event.user_id].update(categories_for(event.paper_ids))
        if event.lang_code != "UD":
            langs[event.user_id][event.lang_code] += 1
        window = first_last.get(event.user_id)
        if window is None:
            first_last[event.user_id] = (event.timestamp, event.timestamp, 1)
        else:
            first_last[event.user_id] = (
                min(window[0], event.timestamp),
                max(window[1], event.timestamp),
                window[2] + 1,
            )

    for event in interactions:
        paper_ids = papers_of.get(event.target_tweet_id)
        if paper_ids:
            collect[event.actor_user_id].update(categories_for(paper_ids))

    if universe is None:
        ids = set(spread) | {event.actor_user_id for event in interactions}
    else:
        ids = set(universe)

    profiles: dict[str, UserProfile] = {}
    for user_id in sorted(ids):
        record = users.get(user_id)
        window = first_last.get(user_id)
        period = None
        if window is not None and window[2] >= 2:
            period = int((window[1] - window[0]).total_seconds() // 86400)
        profiles[user_id] = UserProfile(
            user_id=user_id,
            spread_category=_modal(spread.get(user_id, Counter())),
            collect_category=_modal(collect.get(user_id, Counter())),
            communication_lang=communication_language_from_counter(
                langs.get(user_id, Counter()),
                record.lang_override if record else "UD",
            ),
            profile_lang=profile_language(record.profile_text if record else "", detector),
            mention_period_days=period,
        )
    stats.users = len(profiles)
    return profiles, stats


def communication_language_from_counter(counter: Counter, override: str = "UD") -> str:
    if override != "UD":
        return override
    return _modal(counter) or "UD"


@dataclass(frozen=True)
class CommunityProfile:
    """Aggregate view of one community, paper-table style."""

    community: int
    user_count: int
    top_spread: tuple[tuple[str, int], ...]
    top_collect: tuple[tuple[str, int], ...]
    top_comm_lang: tuple[tuple[str, int], ...]
    top_profile_lang: tuple[tuple[str, int], ...]
    period_mean: float | None = None
    period_median: float | None = None
    period_max: int | None = None
    period_std: float | None = None


def _top3(counter: Counter) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(counter.items(), key=lambda item: (-item[1], item[0]))[:3])


def community_profiles(
    assignment: Mapping[str, int],
    profiles: Mapping[str, UserProfile],
) -> list[CommunityProfile]:
    """Per-community tabulations, ordered by community id.

    Users without a spread (or collect) category simply do not vote in
    that tabulation, and "UD" languages are counted like any other
    code. Period statistics cover members with a defined mention
    period; the standard deviation is the population form. Communities
    where no member has a defined period report None for all four.
    """
    members: dict[int, list[str]] = defaultdict(list)
    for user_id in sorted(assignment):
        members[assignment[user_id]].append(user_id)

    result: list[CommunityProfile] = []
    for community in sorted(members):
        spread: Counter = Counter()
        collect: Counter = Counter()
        comm_lang: Counter = Counter()
        profile_lang: Counter = Counter()
        periods: list[int] = []
        for user_id in members[community]:
            profile = profiles.get(user_id)
            if profile is None:
                profile = UserProfile(user_id=user_id)
            if profile.spread_category is not None:
                spread[profile.spread_category] += 1
            if profile.collect_category is not None:
                collect[profile.collect_category] += 1
            comm_lang[profile.communication_lang] += 1
            profile_lang[profile.profile_lang] += 1
            if profile.mention_period_days is not None:
                periods.append(profile.mention_period_days)
        result.append(
            CommunityProfile(
                community=community,
                user_count=len(members[community]),
                top_spread=_top3(spread),
                top_collect=_top3(collect),
                top_comm_lang=_top3(comm_lang),
                top_profile_lang=_top3(profile_lang),
                period_mean=statistics.fmean(periods) if periods else None,
                period_median=float(statistics.median(periods)) if periods else None,
                period_max=max(periods) if periods else None,
                period_std=statistics.pstdev(periods) if periods else None,
            )
        )
    return result


def mention_time_series(
    mentions: Sequence[MentionEvent],
    metadata: Mapping[str, ArxivRecord],
    group_by: str = "archive",
    partition: Mapping[str, int] | None = None,
) -> list[tuple[int, object, int]]:
    """Yearly mention counts in long format: (year, group, count).

    Grouping by ``archive`` or ``subcategory`` buckets each tweet by
    the categories of the papers it mentions; when one tweet cites
    several papers from the same group, the group still counts once for
    that tweet. Papers without metadata contribute nothing. Grouping
    by ``community`` buckets tweets by their author's community and
    needs ``partition``; tweets from unpartitioned authors are skipped.
    """
    counts: dict[tuple[int, object], int] = defaultdict(int)
    if group_by == "community":
        if partition is None:
            raise ValueError("community grouping needs a partition")
        for event in mentions:
            community = partition.get(event.user_id)
            if community is None:
                continue
            counts[(event.timestamp.year, community)] += 1
    elif group_by in ("archive", "subcategory"):
        for event in mentions:
            groups = set()
            for paper_id in event.paper_ids:
                record = metadata.get(paper_id)
                if record is not None:
                    groups.add(rollup_category(main_category(record), level=group_by))
            for group in groups:
                counts[(event.timestamp.year, group)] += 1
    else:
        raise ValueError(f"unknown grouping {group_by!r}")
    return [
        (year, group, counts[(year, group)])
        for year, group in sorted(counts, key=lambda key: (key[0], str(key[1])))
    ]
