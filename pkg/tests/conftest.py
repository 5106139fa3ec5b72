"""Shared fixtures: the synthetic corpus and a completed pipeline run.

Also prints a one-line verdict per acceptance criterion at the end of
the session so the acceptance status is readable without scrolling
through the full test listing.
"""

import sys
from pathlib import Path
from types import SimpleNamespace

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from corpus import write_corpus  # noqa: E402
from spreadnet.pipeline import PipelineConfig, run_all  # noqa: E402


@pytest.fixture(scope="session")
def corpus_paths(tmp_path_factory):
    """The planted two-group corpus written out as JSONL files."""
    return write_corpus(tmp_path_factory.mktemp("corpus"))


@pytest.fixture(scope="session")
def pipeline_run(corpus_paths, tmp_path_factory):
    """A full pipeline run over the corpus, shared by read-only tests."""
    out_dir = tmp_path_factory.mktemp("artifacts")
    config = PipelineConfig(
        mentions_path=str(corpus_paths["mentions"]),
        interactions_path=str(corpus_paths["interactions"]),
        metadata_path=str(corpus_paths["papers"]),
        users_path=str(corpus_paths["users"]),
        out_dir=str(out_dir),
    )
    manifests = run_all(config)
    return SimpleNamespace(config=config, out_dir=out_dir, manifests=manifests)


_CRITERIA = {
    "test_criterion_1_hits_against_eigensolver":
        "HITS matches dense eigensolver on 100 random graphs",
    "test_criterion_2_hits_at_scale":
        "HITS converges on 500k users / 3M edges inside 60 s",
    "test_criterion_3_role_accounting":
        "role splits add up; published-scale counts reproduce",
    "test_criterion_4_overlap_network_oracle":
        "overlap network matches brute force; monotone in threshold",
    "test_criterion_5_louvain_quality":
        "Louvain beats singletons, recovers planted and exhaustive partitions",
    "test_criterion_6_betweenness_oracle":
        "betweenness exact vs path enumeration; fixtures and scale hold",
    "test_criterion_7_end_to_end_communities":
        "planted spreader groups come back as exactly two communities",
    "test_criterion_8_profiling":
        "mention periods, period statistics and category rollups check out",
    "test_criterion_9_determinism":
        "a repeated run is byte-identical, manifests included",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, ()):
            name = report.nodeid.split("::")[-1]
            if name in _CRITERIA:
                outcomes[name] = "PASS" if status == "passed" else "FAIL"
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for index, (name, label) in enumerate(sorted(_CRITERIA.items()), start=1):
        verdict = outcomes.get(name, "NOT RUN")
        terminalreporter.write_line(f"criterion {index}: {verdict} - {label}")
