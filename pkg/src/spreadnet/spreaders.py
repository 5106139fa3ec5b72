"""Linking spreaders whose audiences overlap.

Candidate nodes are the dual-role users (positive authority and hub
score). Each one owns an audience: the set of collectors pointing at
it in the diffusion graph. Two spreaders are connected when the
overlap coefficient of their audiences

    overlap(A, B) = |A & B| / min(|A|, |B|)

reaches the threshold; the coefficient becomes the edge weight. Nodes
whose audience overlaps nobody's stay in the network as isolates.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Set

import numpy as np

from spreadnet.diffusion import DiffusionGraph
from spreadnet.graphs import UndirectedGraph
from spreadnet.hits import ZERO_EPSILON, HitsScores, dual_role_mask

__all__ = ["SpreaderNetwork", "build_spreader_network", "collector_sets", "overlap_coefficient"]


def overlap_coefficient(a: Set, b: Set) -> float:
    """Overlap coefficient of two non-empty sets; 1.0 iff one contains the other."""
    if not a or not b:
        raise ValueError("overlap coefficient is undefined for empty sets")
    if len(a) > len(b):
        a, b = b, a
    return len(a & b) / len(a)


def collector_sets(
    graph: DiffusionGraph,
    scores: HitsScores,
    zero_epsilon: float = ZERO_EPSILON,
) -> dict[int, frozenset[int]]:
    """Audience of every dual-role user, keyed by user index.

    The audience of spreader j is the set of row indices i with a
    diffusion edge i -> j. Positive authority guarantees at least one
    collector, so audiences are never empty.
    """
    mask = dual_role_mask(scores, zero_epsilon)
    csc = graph.matrix.tocsc()
    sets: dict[int, frozenset[int]] = {}
    for j in np.flatnonzero(mask):
        j = int(j)
        collectors = frozenset(int(i) for i in csc.indices[csc.indptr[j]:csc.indptr[j + 1]])
        if not collectors:
            raise ValueError(f"user index {j} has positive authority but no collectors")
        sets[j] = collectors
    return sets


@dataclass
class SpreaderNetwork:
    """Undirected audience-overlap network over spreader user indices."""

    graph: UndirectedGraph
    threshold: float


def build_spreader_network(
    sets: Mapping[int, frozenset[int]],
    threshold: float = 0.5,
) -> SpreaderNetwork:
    """Connect spreaders whose audience overlap reaches ``threshold``.

    The threshold must lie in (0, 1] and the comparison is inclusive.
    Pairs are enumerated through an inverted collector-to-spreaders
    index, so only pairs sharing at least one collector are ever
    scored; everything else has overlap 0 and cannot clear any valid
    threshold.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    graph = UndirectedGraph(sets)

    by_collector: dict[int, list[int]] = defaultdict(list)
    for spreader in sorted(sets):
        for collector in sets[spreader]:
            by_collector[collector].append(spreader)

    shared: dict[tuple[int, int], int] = defaultdict(int)
    for spreaders in by_collector.values():
        for pos, a in enumerate(spreaders):
            for b in spreaders[pos + 1:]:
                shared[(a, b)] += 1

    for (a, b), count in shared.items():
        coefficient = count / min(len(sets[a]), len(sets[b]))
        if coefficient >= threshold:
            graph.add_edge(a, b, coefficient)

    return SpreaderNetwork(graph=graph, threshold=threshold)
