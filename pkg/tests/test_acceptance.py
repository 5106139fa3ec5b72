"""Acceptance suite: one test per release criterion.

Each test is self-contained and pinned to explicit tolerances; the
session summary (see conftest) prints a PASS/FAIL line per criterion.
Timed criteria measure only the algorithm under test, not fixture
construction.
"""

import csv
import time
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
import scipy.sparse as sp

import corpus
from oracles import (
    adjusted_rand_index,
    best_partition_exhaustive,
    betweenness_by_path_enumeration,
    hits_by_eigensolver,
    mention_period_brute,
    overlap_edges_brute,
)
from spreadnet.centrality import betweenness
from spreadnet.communities import louvain, modularity
from spreadnet.graphs import UndirectedGraph
from spreadnet.hits import RoleBreakdown, classify_roles, compute_hits
from spreadnet.pipeline import PipelineConfig, run_all
from spreadnet.profiles import (
    KNOWN_ARCHIVES,
    PHYSICS_FAMILY,
    build_user_profiles,
    community_profiles,
    rollup_category,
    UserProfile,
)
from spreadnet.spreaders import build_spreader_network
from spreadnet.ingest import MentionEvent


def _random_binary(rng, n, density):
    matrix = sp.random(n, n, density=density, random_state=rng, format="csr")
    matrix.data[:] = 1.0
    matrix.setdiag(0)
    matrix.eliminate_zeros()
    return matrix


# --------------------------------------------------------------- criterion 1


def test_criterion_1_hits_against_eigensolver():
    rng = np.random.default_rng(42)
    spent = 0.0
    for _ in range(100):
        while True:
            n = int(rng.integers(20, 201))
            matrix = _random_binary(rng, n, density=float(rng.uniform(0.02, 0.1)))
            if matrix.nnz:
                break
        started = time.perf_counter()
        scores = compute_hits(matrix, tolerance=1e-10, max_iterations=1000)
        spent += time.perf_counter() - started
        assert scores.converged, f"HITS failed to converge on a {n}-node graph"
        authority, hub = hits_by_eigensolver(matrix.toarray())
        assert float(np.dot(scores.authority, authority)) > 1 - 1e-8
        assert float(np.dot(scores.hub, hub)) > 1 - 1e-8
    assert spent < 5.0, f"100 HITS runs took {spent:.2f}s"


# --------------------------------------------------------------- criterion 2


def test_criterion_2_hits_at_scale():
    n, target = 500_000, 3_000_000
    rng = np.random.default_rng(7)
    pairs = rng.integers(0, n, size=(int(target * 1.1), 2), dtype=np.int64)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    codes = np.unique(pairs[:, 0] * n + pairs[:, 1])[:target]
    assert codes.shape[0] == target
    matrix = sp.csr_matrix(
        (np.ones(target), (codes // n, codes % n)), shape=(n, n)
    )

    started = time.perf_counter()
    scores = compute_hits(matrix, tolerance=1e-10, max_iterations=1000)
    elapsed = time.perf_counter() - started

    assert scores.converged, "HITS did not converge at scale"
    assert elapsed < 60.0, f"scale run took {elapsed:.1f}s"
    # Norms stayed pinned to 1 at every iteration checkpoint.
    assert scores.norm_drift <= 1e-12


# --------------------------------------------------------------- criterion 3


def test_criterion_3_role_accounting():
    rng = np.random.default_rng(11)
    for _ in range(20):
        matrix = _random_binary(rng, int(rng.integers(10, 150)), density=0.05)
        if matrix.nnz == 0:
            continue
        scores = compute_hits(matrix)
        roles = classify_roles(scores)
        assert roles.dual + roles.spread_only == roles.spreaders
        assert roles.dual + roles.collect_only == roles.collectors
        assert roles.total == matrix.shape[0]

    published = RoleBreakdown(
        total=586_999,
        spreaders=64_490,
        collectors=566_367,
        dual=43_858,
        spread_only=20_632,
        collect_only=522_509,
    )
    rounded = {key: round(value, 1) for key, value in published.percentages().items()}
    assert rounded == {
        "spreaders": 11.0,
        "collectors": 96.5,
        "dual": 7.5,
        "spread_only": 3.5,
        "collect_only": 89.0,
    }


# --------------------------------------------------------------- criterion 4


def test_criterion_4_overlap_network_oracle():
    rng = np.random.default_rng(404)
    for instance in range(50):
        spreader_count = int(rng.integers(2, 501))
        universe = max(31, spreader_count * 2)
        sets = {}
        for spreader in range(spreader_count):
            size = int(rng.integers(1, 31))
            members = rng.choice(universe, size=size, replace=False)
            sets[spreader] = frozenset(int(m) for m in members)
        threshold = float(rng.choice([0.3, 0.5, 0.7]))

        network = build_spreader_network(sets, threshold=threshold)
        actual = {(u, v): w for u, v, w in network.graph.edges()}
        expected = overlap_edges_brute(sets, threshold)
        assert set(actual) == set(expected), f"edge set differs on instance {instance}"
        for pair, weight in expected.items():
            assert abs(actual[pair] - weight) <= 1e-12
        assert sorted(network.graph.nodes()) == sorted(sets)

    # Monotonicity: raising the threshold only ever removes edges.
    for _ in range(5):
        sets = {
            spreader: frozenset(int(m) for m in rng.choice(40, size=int(rng.integers(1, 16)), replace=False))
            for spreader in range(30)
        }
        previous = None
        for tenths in range(1, 11):
            edges = {
                (u, v)
                for u, v, _ in build_spreader_network(sets, threshold=tenths / 10).graph.edges()
            }
            if previous is not None:
                assert edges <= previous
            previous = edges


# --------------------------------------------------------------- criterion 5


def _planted_two_block(seed, n=60, p_in=0.9, p_out=0.05):
    rng = np.random.default_rng(seed)
    graph = UndirectedGraph(range(n))
    half = n // 2
    for u in range(n):
        for v in range(u + 1, n):
            p = p_in if (u < half) == (v < half) else p_out
            if rng.random() < p:
                graph.add_edge(u, v)
    planted = {node: 0 if node < half else 1 for node in range(n)}
    return graph, planted


def test_criterion_5_louvain_quality():
    # Never below the all-singletons baseline.
    rng = np.random.default_rng(55)
    for _ in range(20):
        n = int(rng.integers(3, 40))
        graph = UndirectedGraph(range(n))
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < 0.15:
                    graph.add_edge(u, v)
        _, quality = louvain(graph)
        singletons = {node: i for i, node in enumerate(graph.nodes())}
        assert quality >= modularity(graph, singletons) - 1e-12

    # Planted bisections come back exactly, 20 seeds out of 20.
    for seed in range(20):
        graph, planted = _planted_two_block(seed)
        partition, _ = louvain(graph)
        ari = adjusted_rand_index(partition.assignment, planted)
        assert ari == pytest.approx(1.0), f"seed {seed}: ARI {ari}"

    # Two cliques and a bridge: agrees with the exhaustive search.
    graph = UndirectedGraph()
    for block in (range(4), range(4, 8)):
        block = list(block)
        for i, u in enumerate(block):
            for v in block[i + 1:]:
                graph.add_edge(u, v)
    graph.add_edge(3, 4)
    partition, quality = louvain(graph)
    oracle_assignment, oracle_quality = best_partition_exhaustive(
        list(graph.nodes()), [(u, v, w) for u, v, w in graph.edges()]
    )
    assert partition.community_count == 2
    assert quality == pytest.approx(oracle_quality, abs=1e-12)
    assert adjusted_rand_index(partition.assignment, oracle_assignment) == pytest.approx(1.0)


# --------------------------------------------------------------- criterion 6


def test_criterion_6_betweenness_oracle():
    # Exact agreement with path enumeration on 200 small random graphs.
    rng = np.random.default_rng(66)
    for _ in range(200):
        n = int(rng.integers(2, 31))
        edges = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < 0.15
        ]
        graph = UndirectedGraph(range(n))
        for u, v in edges:
            graph.add_edge(u, v)
        scores = betweenness(graph, normalized=False)
        expected = betweenness_by_path_enumeration(list(range(n)), edges)
        for node in range(n):
            assert abs(scores.values[node] - expected[node]) <= 1e-9

    # Articulation fixtures at normalized 1.0.
    path = UndirectedGraph()
    path.add_edge(0, 1)
    path.add_edge(1, 2)
    assert betweenness(path).values[1] == pytest.approx(1.0)
    star = UndirectedGraph()
    for leaf in range(1, 7):
        star.add_edge(0, leaf)
    assert betweenness(star).values[0] == pytest.approx(1.0)

    # Scale: 5,000 nodes / 20,000 edges inside the time budget.
    n, target = 5_000, 20_000
    pairs = rng.integers(0, n, size=(target * 2, 2))
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)[:target]
    assert pairs.shape[0] == target
    big = UndirectedGraph(range(n))
    for u, v in pairs:
        big.add_edge(int(u), int(v))
    started = time.perf_counter()
    scores = betweenness(big)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"betweenness on 5k/20k took {elapsed:.1f}s"
    assert len(scores.values) == n


# --------------------------------------------------------------- criterion 7


def test_criterion_7_end_to_end_communities(pipeline_run):
    # The corpus really does plant what the criterion demands: audience
    # overlap at least 0.8 inside a group, none across groups.
    assert not set(corpus.COLLECTORS_A) & set(corpus.COLLECTORS_B)
    within = corpus.expected_network_edges().values()
    assert min(within) >= 0.8

    rows = list(csv.DictReader(
        (pipeline_run.out_dir / "communities" / "partition.csv")
        .open(encoding="utf-8")
    ))
    assignment = {row["user_id"]: int(row["community"]) for row in rows}
    assert len(set(assignment.values())) == 2
    assert adjusted_rand_index(assignment, corpus.EXPECTED_ASSIGNMENT) == pytest.approx(1.0)

    report_dir = pipeline_run.out_dir / "report"

    def rows_of(name):
        with (report_dir / name).open(encoding="utf-8") as handle:
            return list(csv.DictReader(handle))

    # Dataset table: internally consistent counts and shares.
    dataset = {row["item"]: row for row in rows_of("dataset.csv")}
    tweets = int(dataset["mention tweets"]["count"])
    liked = int(dataset["mention tweets liked"]["count"])
    users = int(dataset["users"]["count"])
    mentioning = int(dataset["users mentioning papers"]["count"])
    assert liked <= tweets and mentioning <= users
    assert float(dataset["mention tweets liked"]["percent"]) == round(100 * liked / tweets, 1)
    assert float(dataset["users mentioning papers"]["percent"]) == round(100 * mentioning / users, 1)

    # Role table adds up against its own total.
    roles = {row["role"]: row for row in rows_of("roles.csv")}
    total = int(roles["users"]["count"])
    spreaders = int(roles["spreaders"]["count"])
    assert int(roles["dual role"]["count"]) + int(roles["spread only"]["count"]) == spreaders
    assert spreaders <= total
    assert float(roles["spreaders"]["percent"]) == round(100 * spreaders / total, 1)

    # Community tables cover every spreader exactly once.
    categories = rows_of("community_categories.csv")
    assert sum(int(row["users"]) for row in categories) == len(assignment)
    languages = rows_of("community_languages.csv")
    assert [row["users"] for row in languages] == [row["users"] for row in categories]
    periods = rows_of("community_periods.csv")
    assert [row["community"] for row in periods] == [row["community"] for row in categories]

    # Key-user tables rank without gaps.
    spreader_table = rows_of("top_spreaders.csv")
    assert [int(row["rank"]) for row in spreader_table] == list(range(1, len(spreader_table) + 1))
    broker_table = rows_of("top_brokers.csv")
    assert [int(row["rank"]) for row in broker_table] == list(range(1, len(broker_table) + 1))

    # Time series totals stay inside the tweet count.
    archive_rows = rows_of("time_series_archive.csv")
    assert sum(int(row["mention_tweets"]) for row in archive_rows) <= tweets
    community_rows = rows_of("time_series_community.csv")
    assert sum(int(row["mention_tweets"]) for row in community_rows) <= tweets


# --------------------------------------------------------------- criterion 8


def test_criterion_8_profiling():
    # Periods: bulk profiling equals the brute-force pairwise scan for
    # ten thousand randomized users.
    rng = np.random.default_rng(88)
    epoch = datetime(2019, 1, 1, tzinfo=timezone.utc)
    mentions = []
    stamps_of = {}
    for i in range(10_000):
        user_id = f"u{i:05d}"
        count = int(rng.integers(0, 6))
        stamps = [
            epoch + timedelta(seconds=int(offset))
            for offset in rng.integers(0, 3 * 365 * 86_400, size=count)
        ]
        stamps_of[user_id] = stamps
        for j, stamp in enumerate(stamps):
            mentions.append(MentionEvent(
                tweet_id=f"t{i:05d}-{j}",
                user_id=user_id,
                timestamp=stamp,
                paper_ids=("2001.10000",),
            ))
    profiles, _ = build_user_profiles(mentions, [], {}, universe=list(stamps_of))
    for user_id, stamps in stamps_of.items():
        assert profiles[user_id].mention_period_days == mention_period_brute(stamps)

    # Period statistics over a community, population standard deviation.
    assignment = {f"p{i}": 0 for i in range(3)}
    fixed = {
        f"p{i}": UserProfile(user_id=f"p{i}", mention_period_days=days)
        for i, days in enumerate((10, 20, 60))
    }
    (group,) = community_profiles(assignment, fixed)
    assert group.period_mean == pytest.approx(30.0)
    assert group.period_median == pytest.approx(20.0)
    assert group.period_max == 60
    assert group.period_std == pytest.approx(21.60, abs=5e-3)

    # Rollup: every physics-family code lands in physics*, and the
    # mapping is total over arbitrary input.
    for archive in PHYSICS_FAMILY:
        assert rollup_category(archive) == "physics*"
        assert rollup_category(f"{archive}.XX") == "physics*"
    for archive in sorted(KNOWN_ARCHIVES):
        expected = "physics*" if archive in PHYSICS_FAMILY else archive
        assert rollup_category(f"{archive}.AB") == expected
    for junk in ("", "q-alg", "chao-dyn", "not a code", "CS.LG", "123", "..."):
        assert isinstance(rollup_category(junk), str)


# --------------------------------------------------------------- criterion 9


def test_criterion_9_determinism(corpus_paths, tmp_path):
    out_dir = tmp_path / "artifacts"
    config = PipelineConfig(
        mentions_path=str(corpus_paths["mentions"]),
        interactions_path=str(corpus_paths["interactions"]),
        metadata_path=str(corpus_paths["papers"]),
        users_path=str(corpus_paths["users"]),
        out_dir=str(out_dir),
    )

    def snapshot():
        return {
            str(path.relative_to(out_dir)): path.read_bytes()
            for path in sorted(out_dir.rglob("*"))
            if path.is_file()
        }

    run_all(config)
    first = snapshot()
    run_all(config)
    second = snapshot()

    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], f"{name} changed between runs"
    assert any(name.endswith("manifest.json") for name in first)
