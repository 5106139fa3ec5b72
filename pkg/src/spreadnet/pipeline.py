"""Persisted, stage-wise execution of the whole analysis.

Each stage reads the artifacts of the stages it depends on, never
in-memory state, so any stage can be rerun or resumed later. A stage
directory under the output root holds its artifacts plus a
``manifest.json`` recording the config, input hashes and output
hashes. Manifests carry no timestamps: rerunning a stage on the same
inputs with the same config reproduces every byte, manifest included.

Artifacts are written through a temp file and renamed into place, so a
crashed run never leaves a half-written file, and the manifest is
written last, so its presence marks the stage as complete.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from spreadnet.centrality import betweenness, rank_key_people
from spreadnet.communities import connected_components, louvain
from spreadnet.diffusion import (
    DiffusionGraph,
    UserIndex,
    build_diffusion_graph,
    dataset_summary,
)
from spreadnet.export import export_graphml
from spreadnet.graphs import UndirectedGraph
from spreadnet.hits import HitsScores, classify_roles, compute_hits, score_ranks
from spreadnet.ingest import (
    IngestStats,
    InteractionEvent,
    MentionEvent,
    parse_arxiv_metadata,
    parse_interaction_stream,
    parse_mention_stream,
    parse_user_records,
    split_native_retweets,
)
from spreadnet.profiles import (
    UserProfile,
    build_user_profiles,
    community_profiles,
    mention_time_series,
)
from spreadnet.spreaders import build_spreader_network, collector_sets

__all__ = ["PipelineConfig", "StageError", "STAGES", "run_all", "run_stage"]

STAGES = (
    "ingest",
    "graph",
    "hits",
    "spreader-net",
    "communities",
    "centrality",
    "profile",
    "report",
    "export",
)

_REQUIRES = {
    "ingest": (),
    "graph": ("ingest",),
    "hits": ("graph",),
    "spreader-net": ("graph", "hits"),
    "communities": ("spreader-net",),
    "centrality": ("spreader-net",),
    "profile": ("ingest", "graph"),
    "report": ("ingest", "graph", "hits", "spreader-net", "communities", "centrality", "profile"),
    "export": ("graph", "hits", "spreader-net", "communities", "centrality", "profile"),
}

OUT_DIR_ENV = "SPREADNET_OUT"


class StageError(RuntimeError):
    """A stage cannot run: missing inputs, missing upstream artifacts."""


@dataclass
class PipelineConfig:
    """Everything a run needs; one of these is echoed into each manifest."""

    mentions_path: str | None = None
    interactions_path: str | None = None
    metadata_path: str | None = None
    users_path: str | None = None
    out_dir: str = "spreadnet-out"
    threshold: float = 0.5
    hits_tolerance: float = 1e-10
    hits_max_iterations: int = 1000
    hits_norm: str = "l2"
    zero_epsilon: float = 1e-15
    louvain_resolution: float = 1.0
    louvain_seed: int = 0
    louvain_weighted: bool = True
    betweenness_normalized: bool = True
    top_k: int = 20
    strict_ingest: bool = False

    def validate(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.hits_tolerance <= 0.0:
            raise ValueError("hits_tolerance must be positive")
        if self.hits_max_iterations < 1:
            raise ValueError("hits_max_iterations must be at least 1")
        if self.hits_norm not in ("l2", "l1"):
            raise ValueError(f"hits_norm must be 'l2' or 'l1', got {self.hits_norm!r}")
        if self.zero_epsilon < 0.0:
            raise ValueError("zero_epsilon must not be negative")
        if self.louvain_resolution <= 0.0:
            raise ValueError("louvain_resolution must be positive")
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")
        if not self.out_dir:
            raise ValueError("out_dir must be set")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)


# --------------------------------------------------------------------------
# artifact plumbing


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(dir=path.parent, delete=False)
    try:
        handle.write(data)
        handle.close()
        os.replace(handle.name, path)
    except BaseException:
        handle.close()
        os.unlink(handle.name)
        raise


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _csv_bytes(header: Sequence[str], rows: Iterable[Sequence]) -> tuple[bytes, int]:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow(row)
        count += 1
    return buffer.getvalue().encode("utf-8"), count


def _json_bytes(payload) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")


def _jsonl_bytes(records: Iterable[dict]) -> tuple[bytes, int]:
    lines = []
    for record in records:
        lines.append(json.dumps(record, sort_keys=True))
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8"), len(lines)


class _StageIO:
    """Tracks what a stage reads and writes, then emits its manifest."""

    def __init__(self, stage: str, config: PipelineConfig):
        self.stage = stage
        self.config = config
        self.directory = Path(config.out_dir) / stage
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, dict] = {}

    def track_input(self, path: Path) -> Path:
        if not path.is_file():
            raise StageError(f"{self.stage}: required input {path} does not exist")
        self.inputs[str(path)] = _sha256_file(path)
        return path

    def upstream(self, stage: str, name: str) -> Path:
        return self.track_input(Path(self.config.out_dir) / stage / name)

    def write(self, name: str, data: bytes, rows: int | None = None) -> None:
        _write_atomic(self.directory / name, data)
        entry: dict = {"sha256": hashlib.sha256(data).hexdigest()}
        if rows is not None:
            entry["rows"] = rows
        self.outputs[name] = entry

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        data, count = _csv_bytes(header, rows)
        self.write(name, data, rows=count)

    def write_json(self, name: str, payload) -> None:
        self.write(name, _json_bytes(payload), rows=1)

    def finish(self) -> dict:
        manifest = {
            "stage": self.stage,
            "config": self.config.to_dict(),
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        _write_atomic(self.directory / "manifest.json", _json_bytes(manifest))
        return manifest


def _check_upstream(config: PipelineConfig, stage: str) -> None:
    for needed in _REQUIRES[stage]:
        manifest = Path(config.out_dir) / needed / "manifest.json"
        if not manifest.is_file():
            raise StageError(
                f"stage '{stage}' needs artifacts from stage '{needed}'; "
                f"run `spreadnet run {needed}` first (looked in {manifest.parent})"
            )


def _read_lines(path: Path) -> list[str]:
    return path.read_text(encoding="utf-8").splitlines()


# --------------------------------------------------------------------------
# loaders for persisted artifacts


def _load_mentions(config: PipelineConfig) -> list[MentionEvent]:
    path = Path(config.out_dir) / "ingest" / "mentions.jsonl"
    events, _ = parse_mention_stream(_read_lines(path))
    return events


def _load_interactions(config: PipelineConfig) -> list[InteractionEvent]:
    path = Path(config.out_dir) / "ingest" / "interactions.jsonl"
    events, _ = parse_interaction_stream(_read_lines(path))
    return events


def _load_papers(config: PipelineConfig):
    path = Path(config.out_dir) / "ingest" / "papers.jsonl"
    records, _ = parse_arxiv_metadata(_read_lines(path))
    return records


def _load_users(config: PipelineConfig):
    path = Path(config.out_dir) / "ingest" / "users.jsonl"
    records, _ = parse_user_records(_read_lines(path))
    return records


def _read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def _load_graph(config: PipelineConfig) -> DiffusionGraph:
    base = Path(config.out_dir) / "graph"
    user_rows = _read_csv(base / "users.csv")
    users = UserIndex(row["user_id"] for row in user_rows)
    mention_counts = np.zeros(len(users), dtype=np.int64)
    for row in user_rows:
        mention_counts[users.index_of(row["user_id"])] = int(row["mention_tweets"])

    rows, cols, retweets, likes = [], [], [], []
    for row in _read_csv(base / "edges.csv"):
        rows.append(users.index_of(row["collector"]))
        cols.append(users.index_of(row["spreader"]))
        retweets.append(int(row["retweets"]))
        likes.append(int(row["likes"]))
    n = len(users)
    shape = (n, n)

    def build(values) -> sp.csr_matrix:
        matrix = sp.coo_matrix(
            (np.asarray(values, dtype=np.float64), (rows, cols)), shape=shape
        ).tocsr()
        matrix.eliminate_zeros()
        return matrix

    if rows:
        matrix = build(np.ones(len(rows)))
        retweet_counts = build(retweets)
        like_counts = build(likes)
    else:
        matrix = sp.csr_matrix(shape)
        retweet_counts = sp.csr_matrix(shape)
        like_counts = sp.csr_matrix(shape)

    summary = json.loads((base / "summary.json").read_text(encoding="utf-8"))
    return DiffusionGraph(
        users=users,
        matrix=matrix,
        retweet_counts=retweet_counts,
        like_counts=like_counts,
        mention_tweets=mention_counts,
        tweets_liked=summary["tweets_liked"],
        tweets_retweeted=summary["tweets_retweeted"],
        mentioned_papers=summary["mentioned_papers"],
        dropped_interactions=summary["dropped_interactions"],
    )


def _load_scores(config: PipelineConfig) -> tuple[list[str], HitsScores]:
    base = Path(config.out_dir) / "hits"
    meta = json.loads((base / "hits.json").read_text(encoding="utf-8"))
    ids: list[str] = []
    authority: list[float] = []
    hub: list[float] = []
    for row in _read_csv(base / "scores.csv"):
        ids.append(row["user_id"])
        authority.append(float(row["authority"]))
        hub.append(float(row["hub"]))
    scores = HitsScores(
        authority=np.asarray(authority),
        hub=np.asarray(hub),
        iterations=meta["iterations"],
        residual=meta["residual"],
        converged=meta["converged"],
        norm=meta["norm"],
        norm_drift=meta["norm_drift"],
    )
    return ids, scores


def _load_network(config: PipelineConfig) -> UndirectedGraph:
    base = Path(config.out_dir) / "spreader-net"
    graph = UndirectedGraph(row["user_id"] for row in _read_csv(base / "nodes.csv"))
    for row in _read_csv(base / "edges.csv"):
        graph.add_edge(row["source"], row["target"], float(row["coefficient"]))
    return graph


def _load_partition(config: PipelineConfig) -> dict[str, int]:
    base = Path(config.out_dir) / "communities"
    return {row["user_id"]: int(row["community"]) for row in _read_csv(base / "partition.csv")}


def _load_betweenness(config: PipelineConfig) -> dict[str, float]:
    base = Path(config.out_dir) / "centrality"
    return {
        row["user_id"]: float(row["betweenness"])
        for row in _read_csv(base / "betweenness.csv")
    }


def _load_profiles(config: PipelineConfig) -> dict[str, UserProfile]:
    base = Path(config.out_dir) / "profile"
    profiles: dict[str, UserProfile] = {}
    for row in _read_csv(base / "user_profiles.csv"):
        period = row["mention_period_days"]
        profiles[row["user_id"]] = UserProfile(
            user_id=row["user_id"],
            spread_category=row["spread_category"] or None,
            collect_category=row["collect_category"] or None,
            communication_lang=row["communication_lang"],
            profile_lang=row["profile_lang"],
            mention_period_days=int(period) if period else None,
        )
    return profiles


# --------------------------------------------------------------------------
# stages


def _stage_ingest(config: PipelineConfig) -> dict:
    io_ = _StageIO("ingest", config)
    if not config.mentions_path or not config.interactions_path:
        raise StageError("ingest needs mentions_path and interactions_path")
    mentions_file = io_.track_input(Path(config.mentions_path))
    interactions_file = io_.track_input(Path(config.interactions_path))

    raw_mentions, mention_stats = parse_mention_stream(
        _read_lines(mentions_file), strict=config.strict_ingest
    )
    originals, derived = split_native_retweets(raw_mentions)
    known = {event.tweet_id for event in originals}
    parsed, interaction_stats = parse_interaction_stream(
        _read_lines(interactions_file), known_tweets=known, strict=config.strict_ingest
    )

    derived_kept = [event for event in derived if event.target_tweet_id in known]
    merged: list[InteractionEvent] = []
    seen: set[tuple[str, str, str]] = set()
    merged_duplicates = 0
    for event in parsed + derived_kept:
        key = (event.kind, event.actor_user_id, event.target_tweet_id)
        if key in seen:
            merged_duplicates += 1
            continue
        seen.add(key)
        merged.append(event)

    if config.metadata_path:
        papers, paper_stats = parse_arxiv_metadata(
            _read_lines(io_.track_input(Path(config.metadata_path))),
            strict=config.strict_ingest,
        )
    else:
        papers, paper_stats = {}, IngestStats()
    if config.users_path:
        users, user_stats = parse_user_records(
            _read_lines(io_.track_input(Path(config.users_path))),
            strict=config.strict_ingest,
        )
    else:
        users, user_stats = {}, IngestStats()

    mention_data, mention_rows = _jsonl_bytes(
        {
            "tweet_id": event.tweet_id,
            "user_id": event.user_id,
            "timestamp": event.timestamp.isoformat(),
            "urls": [f"https://arxiv.org/abs/{paper_id}" for paper_id in event.paper_ids],
            "lang": event.lang_code,
        }
        for event in originals
    )
    io_.write("mentions.jsonl", mention_data, rows=mention_rows)

    interaction_data, interaction_rows = _jsonl_bytes(
        {
            "kind": event.kind,
            "actor_user_id": event.actor_user_id,
            "target_tweet_id": event.target_tweet_id,
        }
        for event in merged
    )
    io_.write("interactions.jsonl", interaction_data, rows=interaction_rows)

    paper_data, paper_rows = _jsonl_bytes(
        {
            "id": record.paper_id,
            "categories": list(record.categories),
            "submitted": record.submitted.isoformat(),
            "title": record.title,
        }
        for _, record in sorted(papers.items())
    )
    io_.write("papers.jsonl", paper_data, rows=paper_rows)

    user_data, user_rows = _jsonl_bytes(
        {
            "user_id": record.user_id,
            "screen_name": record.screen_name,
            "profile_text": record.profile_text,
            "lang": record.lang_override,
        }
        for _, record in sorted(users.items())
    )
    io_.write("users.jsonl", user_data, rows=user_rows)

    io_.write_json(
        "stats.json",
        {
            "mentions": asdict(mention_stats),
            "interactions": asdict(interaction_stats),
            "papers": asdict(paper_stats),
            "users": asdict(user_stats),
            "native_retweets": len(derived),
            "native_retweets_kept": len(derived_kept),
            "merged_interactions": len(merged),
            "merged_duplicates": merged_duplicates,
        },
    )
    return io_.finish()


def _stage_graph(config: PipelineConfig) -> dict:
    io_ = _StageIO("graph", config)
    io_.upstream("ingest", "mentions.jsonl")
    io_.upstream("ingest", "interactions.jsonl")
    mentions = _load_mentions(config)
    interactions = _load_interactions(config)
    graph = build_diffusion_graph(mentions, interactions)
    summary = dataset_summary(graph, mentions)

    io_.write_csv(
        "users.csv",
        ("user_id", "mention_tweets"),
        (
            (graph.users.id_of(i), int(graph.mention_tweets[i]))
            for i in range(len(graph.users))
        ),
    )
    io_.write_csv(
        "edges.csv",
        ("collector", "spreader", "retweets", "likes"),
        graph.edge_records(),
    )
    io_.write_json(
        "summary.json",
        {
            "users": summary.users,
            "edges": graph.number_of_edges(),
            "mention_tweets": summary.mention_tweets,
            "mentioned_papers": summary.mentioned_papers,
            "tweets_liked": summary.tweets_liked,
            "tweets_retweeted": summary.tweets_retweeted,
            "mentioning_users": summary.mentioning_users,
            "dropped_interactions": graph.dropped_interactions,
        },
    )
    return io_.finish()


def _stage_hits(config: PipelineConfig) -> dict:
    io_ = _StageIO("hits", config)
    io_.upstream("graph", "users.csv")
    io_.upstream("graph", "edges.csv")
    io_.upstream("graph", "summary.json")
    graph = _load_graph(config)
    scores = compute_hits(
        graph,
        tolerance=config.hits_tolerance,
        max_iterations=config.hits_max_iterations,
        norm=config.hits_norm,
    )
    authority_rank = score_ranks(scores.authority)
    hub_rank = score_ranks(scores.hub)
    roles = classify_roles(scores, config.zero_epsilon)

    io_.write_csv(
        "scores.csv",
        ("user_id", "authority", "hub", "authority_rank", "hub_rank"),
        (
            (
                graph.users.id_of(i),
                repr(float(scores.authority[i])),
                repr(float(scores.hub[i])),
                int(authority_rank[i]),
                int(hub_rank[i]),
            )
            for i in range(len(graph.users))
        ),
    )
    io_.write_json(
        "hits.json",
        {
            "iterations": scores.iterations,
            "residual": scores.residual,
            "converged": scores.converged,
            "norm": scores.norm,
            "norm_drift": scores.norm_drift,
        },
    )
    io_.write_json(
        "roles.json",
        {
            "counts": {
                "total": roles.total,
                "spreaders": roles.spreaders,
                "collectors": roles.collectors,
                "dual": roles.dual,
                "spread_only": roles.spread_only,
                "collect_only": roles.collect_only,
            },
            "percentages": roles.percentages(),
        },
    )
    return io_.finish()


def _stage_spreader_net(config: PipelineConfig) -> dict:
    io_ = _StageIO("spreader-net", config)
    io_.upstream("graph", "users.csv")
    io_.upstream("graph", "edges.csv")
    io_.upstream("graph", "summary.json")
    io_.upstream("hits", "scores.csv")
    io_.upstream("hits", "hits.json")
    graph = _load_graph(config)
    _, scores = _load_scores(config)
    sets = collector_sets(graph, scores, config.zero_epsilon)
    network = build_spreader_network(sets, config.threshold)

    io_.write_csv(
        "nodes.csv",
        ("user_id", "audience_size"),
        (
            (graph.users.id_of(index), len(sets[index]))
            for index in network.graph.nodes()
        ),
    )
    io_.write_csv(
        "edges.csv",
        ("source", "target", "coefficient"),
        (
            (graph.users.id_of(u), graph.users.id_of(v), repr(float(w)))
            for u, v, w in network.graph.edges()
        ),
    )
    return io_.finish()


def _stage_communities(config: PipelineConfig) -> dict:
    io_ = _StageIO("communities", config)
    io_.upstream("spreader-net", "nodes.csv")
    io_.upstream("spreader-net", "edges.csv")
    network = _load_network(config)
    partition, quality = louvain(
        network,
        resolution=config.louvain_resolution,
        seed=config.louvain_seed,
        weighted=config.louvain_weighted,
    )
    report = connected_components(network, partition)

    io_.write_csv(
        "partition.csv",
        ("user_id", "community", "component"),
        (
            (user_id, partition.of(user_id), report.labels[user_id])
            for user_id in network.nodes()
        ),
    )
    io_.write_json(
        "communities.json",
        {
            "modularity": quality,
            "community_count": partition.community_count,
            "sizes": partition.sizes(),
        },
    )
    io_.write_csv(
        "components.csv",
        ("component", "nodes", "edges", "node_pct", "edge_pct", "communities"),
        (
            (
                info.index,
                info.nodes,
                info.edges,
                repr(info.node_pct),
                repr(info.edge_pct),
                info.communities,
            )
            for info in report.components
        ),
    )
    return io_.finish()


def _stage_centrality(config: PipelineConfig) -> dict:
    io_ = _StageIO("centrality", config)
    io_.upstream("spreader-net", "nodes.csv")
    io_.upstream("spreader-net", "edges.csv")
    network = _load_network(config)
    scores = betweenness(network, normalized=config.betweenness_normalized)
    io_.write_csv(
        "betweenness.csv",
        ("user_id", "betweenness"),
        ((user_id, repr(scores.values[user_id])) for user_id in network.nodes()),
    )
    return io_.finish()


def _stage_profile(config: PipelineConfig) -> dict:
    io_ = _StageIO("profile", config)
    io_.upstream("ingest", "mentions.jsonl")
    io_.upstream("ingest", "interactions.jsonl")
    io_.upstream("ingest", "papers.jsonl")
    io_.upstream("ingest", "users.jsonl")
    io_.upstream("graph", "users.csv")
    mentions = _load_mentions(config)
    interactions = _load_interactions(config)
    papers = _load_papers(config)
    users = _load_users(config)
    universe = [
        row["user_id"]
        for row in _read_csv(Path(config.out_dir) / "graph" / "users.csv")
    ]
    profiles, stats = build_user_profiles(
        mentions, interactions, papers, users, universe=universe
    )
    io_.write_csv(
        "user_profiles.csv",
        (
            "user_id",
            "spread_category",
            "collect_category",
            "communication_lang",
            "profile_lang",
            "mention_period_days",
        ),
        (
            (
                profile.user_id,
                profile.spread_category or "",
                profile.collect_category or "",
                profile.communication_lang,
                profile.profile_lang,
                "" if profile.mention_period_days is None else profile.mention_period_days,
            )
            for profile in profiles.values()
        ),
    )
    io_.write_json(
        "profile_stats.json",
        {"users": stats.users, "missing_paper_refs": stats.missing_paper_refs},
    )
    return io_.finish()


def _format_top3(entries: tuple[tuple[str, int], ...]) -> list[str]:
    cells = [f"{code} ({count})" for code, count in entries]
    return cells + [""] * (3 - len(cells))


def _stage_report(config: PipelineConfig) -> dict:
    io_ = _StageIO("report", config)
    summary_path = io_.upstream("graph", "summary.json")
    roles_path = io_.upstream("hits", "roles.json")
    io_.upstream("hits", "scores.csv")
    io_.upstream("ingest", "mentions.jsonl")
    io_.upstream("ingest", "papers.jsonl")
    io_.upstream("ingest", "users.jsonl")
    io_.upstream("communities", "partition.csv")
    io_.upstream("centrality", "betweenness.csv")
    io_.upstream("profile", "user_profiles.csv")

    summary = json.loads(summary_path.read_text(encoding="utf-8"))
    io_.write_csv(
        "dataset.csv",
        ("item", "count", "percent"),
        (
            ("papers mentioned", summary["mentioned_papers"], ""),
            ("mention tweets", summary["mention_tweets"], 100.0),
            (
                "mention tweets liked",
                summary["tweets_liked"],
                _pct1(summary["tweets_liked"], summary["mention_tweets"]),
            ),
            (
                "mention tweets retweeted",
                summary["tweets_retweeted"],
                _pct1(summary["tweets_retweeted"], summary["mention_tweets"]),
            ),
            ("users", summary["users"], 100.0),
            (
                "users mentioning papers",
                summary["mentioning_users"],
                _pct1(summary["mentioning_users"], summary["users"]),
            ),
        ),
    )

    roles = json.loads(roles_path.read_text(encoding="utf-8"))["counts"]
    io_.write_csv(
        "roles.csv",
        ("role", "count", "percent"),
        (
            ("spreaders", roles["spreaders"], _pct1(roles["spreaders"], roles["total"])),
            ("dual role", roles["dual"], _pct1(roles["dual"], roles["total"])),
            ("spread only", roles["spread_only"], _pct1(roles["spread_only"], roles["total"])),
            ("collectors", roles["collectors"], _pct1(roles["collectors"], roles["total"])),
            ("users", roles["total"], 100.0),
        ),
    )

    partition = _load_partition(config)
    profiles = _load_profiles(config)
    groups = community_profiles(partition, profiles)

    io_.write_csv(
        "community_categories.csv",
        (
            "community",
            "users",
            "spread_1",
            "spread_2",
            "spread_3",
            "collect_1",
            "collect_2",
            "collect_3",
        ),
        (
            [group.community, group.user_count]
            + _format_top3(group.top_spread)
            + _format_top3(group.top_collect)
            for group in groups
        ),
    )
    io_.write_csv(
        "community_languages.csv",
        ("community", "users", "cl_1", "cl_2", "cl_3", "pl_1", "pl_2", "pl_3"),
        (
            [group.community, group.user_count]
            + _format_top3(group.top_comm_lang)
            + _format_top3(group.top_profile_lang)
            for group in groups
        ),
    )
    io_.write_csv(
        "community_periods.csv",
        ("community", "users", "mean_days", "median_days", "max_days", "std_days"),
        (
            (
                group.community,
                group.user_count,
                "" if group.period_mean is None else round(group.period_mean, 2),
                "" if group.period_median is None else round(group.period_median, 2),
                "" if group.period_max is None else group.period_max,
                "" if group.period_std is None else round(group.period_std, 2),
            )
            for group in groups
        ),
    )

    ids, scores = _load_scores(config)
    authority = {uid: float(a) for uid, a in zip(ids, scores.authority)}
    hub = {uid: float(h) for uid, h in zip(ids, scores.hub)}
    central = _load_betweenness(config)
    users = _load_users(config)
    screen_names = {uid: record.screen_name for uid, record in users.items()}
    comm_langs = {uid: profile.communication_lang for uid, profile in profiles.items()}
    profile_langs = {uid: profile.profile_lang for uid, profile in profiles.items()}

    def _table_rows(rows):
        for row in rows:
            yield (
                row.rank,
                row.user_id,
                row.screen_name,
                "" if row.community is None else row.community,
                row.communication_lang,
                row.profile_lang,
                repr(row.value),
                "" if row.cross_value is None else repr(row.cross_value),
                "" if row.cross_rank is None else row.cross_rank,
            )

    spreader_rows = rank_key_people(
        authority,
        cross_values=hub,
        partition=partition,
        screen_names=screen_names,
        communication_langs=comm_langs,
        profile_langs=profile_langs,
        k=config.top_k,
    )
    io_.write_csv(
        "top_spreaders.csv",
        (
            "rank",
            "user_id",
            "screen_name",
            "community",
            "communication_lang",
            "profile_lang",
            "authority",
            "hub",
            "hub_rank",
        ),
        _table_rows(spreader_rows),
    )

    broker_rows = rank_key_people(
        central,
        cross_values=authority,
        partition=partition,
        screen_names=screen_names,
        communication_langs=comm_langs,
        profile_langs=profile_langs,
        k=config.top_k,
    )
    io_.write_csv(
        "top_brokers.csv",
        (
            "rank",
            "user_id",
            "screen_name",
            "community",
            "communication_lang",
            "profile_lang",
            "betweenness",
            "authority",
            "authority_rank",
        ),
        _table_rows(broker_rows),
    )

    mentions = _load_mentions(config)
    papers = _load_papers(config)
    io_.write_csv(
        "time_series_archive.csv",
        ("year", "group", "mention_tweets"),
        mention_time_series(mentions, papers, group_by="archive"),
    )
    io_.write_csv(
        "time_series_community.csv",
        ("year", "community", "mention_tweets"),
        mention_time_series(mentions, papers, group_by="community", partition=partition),
    )
    return io_.finish()


def _pct1(part: int, whole: int) -> float:
    return round(100.0 * part / whole, 1) if whole else 0.0


def _stage_export(config: PipelineConfig) -> dict:
    io_ = _StageIO("export", config)
    io_.upstream("spreader-net", "nodes.csv")
    io_.upstream("spreader-net", "edges.csv")
    io_.upstream("hits", "scores.csv")
    io_.upstream("communities", "partition.csv")
    io_.upstream("centrality", "betweenness.csv")
    io_.upstream("profile", "user_profiles.csv")

    network = _load_network(config)
    ids, scores = _load_scores(config)
    authority = {uid: float(a) for uid, a in zip(ids, scores.authority)}
    hub = {uid: float(h) for uid, h in zip(ids, scores.hub)}
    partition = _load_partition(config)
    central = _load_betweenness(config)
    profiles = _load_profiles(config)

    data = export_graphml(
        network,
        authority=authority,
        hub=hub,
        betweenness=central,
        community=partition,
        communication_lang={uid: p.communication_lang for uid, p in profiles.items()},
        profile_lang={uid: p.profile_lang for uid, p in profiles.items()},
    )
    io_.write("spreaders.graphml", data, rows=network.number_of_nodes())
    return io_.finish()


_STAGE_FUNCS = {
    "ingest": _stage_ingest,
    "graph": _stage_graph,
    "hits": _stage_hits,
    "spreader-net": _stage_spreader_net,
    "communities": _stage_communities,
    "centrality": _stage_centrality,
    "profile": _stage_profile,
    "report": _stage_report,
    "export": _stage_export,
}


def run_stage(stage: str, config: PipelineConfig) -> dict:
    """Run one stage against the artifacts in ``config.out_dir``.

    Returns the manifest that was written. Raises :class:`StageError`
    when the stage is unknown or upstream artifacts are missing, and
    ``ValueError`` when the config itself is invalid.
    """
    if stage not in _STAGE_FUNCS:
        raise StageError(f"unknown stage {stage!r}; stages are: {', '.join(STAGES)}")
    config.validate()
    _check_upstream(config, stage)
    return _STAGE_FUNCS[stage](config)


def run_all(config: PipelineConfig) -> list[dict]:
    """Run every stage in order; returns their manifests."""
    return [run_stage(stage, config) for stage in STAGES]
