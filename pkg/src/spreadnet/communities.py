"""Community detection and component structure of the spreader network.

Louvain is implemented directly rather than pulled in as a dependency
because the behaviour here is pinned down tighter than library
implementations guarantee: node visit order is ascending node id
(shuffled only for a nonzero seed), ties between candidate communities
go to the first one in sorted order, and finished communities are
renumbered by descending size with the smallest member node breaking
ties. Runs are therefore bit-reproducible for a given seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Hashable, Mapping

from spreadnet.graphs import UndirectedGraph

Node = Hashable

__all__ = [
    "ComponentInfo",
    "ComponentReport",
    "Partition",
    "connected_components",
    "louvain",
    "modularity",
]

# A move must improve modularity by more than this to count; guards
# against cycling on float noise.
_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class Partition:
    """Dense community assignment: ids run 0..K-1, 0 is the largest."""

    assignment: dict[Node, int]
    community_count: int

    def of(self, node: Node) -> int:
        return self.assignment[node]

    def communities(self) -> list[list[Node]]:
        """Members per community id, each list sorted."""
        groups: list[list[Node]] = [[] for _ in range(self.community_count)]
        for node in sorted(self.assignment):
            groups[self.assignment[node]].append(node)
        return groups

    def sizes(self) -> list[int]:
        counts = [0] * self.community_count
        for community in self.assignment.values():
            counts[community] += 1
        return counts


def _edge_weight(weight: float, weighted: bool) -> float:
    return weight if weighted else 1.0


def modularity(
    graph: UndirectedGraph,
    assignment: Mapping[Node, int],
    weighted: bool = True,
    resolution: float = 1.0,
) -> float:
    """Newman modularity of a node-to-community mapping.

    Every node must be assigned. An edgeless graph scores 0.0 by
    definition (the null model has no mass to compare against).
    """
    for node in graph.nodes():
        if node not in assignment:
            raise ValueError(f"node {node!r} missing from the partition")
    total = 0.0
    internal: dict[int, float] = {}
    strength: dict[int, float] = {}
    for u, v, w in graph.edges():
        w = _edge_weight(w, weighted)
        total += w
        cu, cv = assignment[u], assignment[v]
        strength[cu] = strength.get(cu, 0.0) + w
        strength[cv] = strength.get(cv, 0.0) + w
        if cu == cv:
            internal[cu] = internal.get(cu, 0.0) + w
    if total == 0.0:
        return 0.0
    score = 0.0
    for community, degree_sum in strength.items():
        score += internal.get(community, 0.0) / total
        score -= resolution * (degree_sum / (2.0 * total)) ** 2
    return score


class _LevelGraph:
    """Aggregated working graph for one Louvain level."""

    def __init__(self, adjacency: list[dict[int, float]], self_loops: list[float]):
        self.adjacency = adjacency
        self.self_loops = self_loops
        self.n = len(adjacency)
        self.strength = [
            sum(nbrs.values()) + 2.0 * self_loops[i]
            for i, nbrs in enumerate(adjacency)
        ]
        self.total = sum(self.strength) / 2.0

    @classmethod
    def from_graph(cls, graph: UndirectedGraph, order: list[Node], weighted: bool) -> "_LevelGraph":
        position = {node: i for i, node in enumerate(order)}
        adjacency: list[dict[int, float]] = [dict() for _ in order]
        for u, v, w in graph.edges():
            w = _edge_weight(w, weighted)
            adjacency[position[u]][position[v]] = w
            adjacency[position[v]][position[u]] = w
        return cls(adjacency, [0.0] * len(order))


def _one_level(level: _LevelGraph, resolution: float, rng: random.Random | None) -> list[int]:
    """Greedy node moving; returns the node-to-community map for this level."""
    n = level.n
    community = list(range(n))
    tot = list(level.strength)
    two_m = 2.0 * level.total

    visit = list(range(n))
    if rng is not None:
        rng.shuffle(visit)

    improved = True
    while improved:
        improved = False
        for node in visit:
            k = level.strength[node]
            old = community[node]
            neighbor_weight: dict[int, float] = {}
            for nbr, w in level.adjacency[node].items():
                c = community[nbr]
                neighbor_weight[c] = neighbor_weight.get(c, 0.0) + w

            tot[old] -= k
            best = old
            best_gain = neighbor_weight.get(old, 0.0) - resolution * tot[old] * k / two_m
            for c in sorted(neighbor_weight):
                if c == old:
                    continue
                gain = neighbor_weight[c] - resolution * tot[c] * k / two_m
                if gain > best_gain + _MIN_GAIN:
                    best = c
                    best_gain = gain
            tot[best] += k
            if best != old:
                community[node] = best
                improved = True
    return community


def _aggregate(level: _LevelGraph, community: list[int]) -> tuple[_LevelGraph, list[int]]:
    """Collapse communities into single nodes, keeping intra-weight as self-loops."""
    labels = sorted(set(community))
    relabel = {c: i for i, c in enumerate(labels)}
    dense = [relabel[c] for c in community]
    k = len(labels)
    adjacency: list[dict[int, float]] = [dict() for _ in range(k)]
    self_loops = [0.0] * k
    for node, nbrs in enumerate(level.adjacency):
        cu = dense[node]
        self_loops[cu] += level.self_loops[node]
        for nbr, w in nbrs.items():
            if nbr < node:
                continue
            cv = dense[nbr]
            if cu == cv:
                self_loops[cu] += w
            else:
                adjacency[cu][cv] = adjacency[cu].get(cv, 0.0) + w
                adjacency[cv][cu] = adjacency[cv].get(cu, 0.0) + w
    return _LevelGraph(adjacency, self_loops), dense


def louvain(
    graph: UndirectedGraph,
    resolution: float = 1.0,
    seed: int = 0,
    weighted: bool = True,
) -> tuple[Partition, float]:
    """Louvain community detection.

    Returns the partition and its modularity on the input graph.
    ``seed=0`` keeps the canonical ascending visit order; any other
    seed shuffles it per level through ``random.Random(seed)``.
    """
    order = graph.nodes()
    n = len(order)
    if n == 0:
        return Partition(assignment={}, community_count=0), 0.0

    rng = random.Random(seed) if seed != 0 else None
    level = _LevelGraph.from_graph(graph, order, weighted)
    membership = list(range(n))  # original node position -> current level node

    if level.total > 0.0:
        while True:
            community = _one_level(level, resolution, rng)
            if all(community[i] == i for i in range(level.n)):
                break
            level, dense = _aggregate(level, community)
            membership = [dense[m] for m in membership]
            if level.n == 1:
                break

    raw = {order[i]: membership[i] for i in range(n)}
    assignment = _renumber(raw)
    quality = modularity(graph, assignment, weighted=weighted, resolution=resolution)
    return Partition(assignment=assignment, community_count=len(set(assignment.values()))), quality


def _renumber(raw: Mapping[Node, int]) -> dict[Node, int]:
    """Relabel communities: biggest first, ties to the smallest member node."""
    members: dict[int, list[Node]] = {}
    for node, community in raw.items():
        members.setdefault(community, []).append(node)
    ordered = sorted(members.values(), key=lambda group: (-len(group), min(group)))
    assignment: dict[Node, int] = {}
    for new_id, group in enumerate(ordered):
        for node in group:
            assignment[node] = new_id
    return assignment


@dataclass(frozen=True)
class ComponentInfo:
    """One connected component, sized against the whole network."""

    index: int
    nodes: int
    edges: int
    node_pct: float
    edge_pct: float
    communities: int | None = None


@dataclass(frozen=True)
class ComponentReport:
    components: list[ComponentInfo]
    labels: dict[Node, int] = field(default_factory=dict)
    total_nodes: int = 0
    total_edges: int = 0

    def largest(self) -> ComponentInfo:
        return self.components[0]


def connected_components(
    graph: UndirectedGraph,
    partition: Partition | None = None,
) -> ComponentReport:
    """Component table, largest first, with optional per-component community counts."""
    total_nodes = graph.number_of_nodes()
    total_edges = graph.number_of_edges()
    infos: list[ComponentInfo] = []
    labels: dict[Node, int] = {}
    for index, members in enumerate(graph.connected_components()):
        edges = sum(graph.degree(u) for u in members) // 2
        communities = None
        if partition is not None:
            communities = len({partition.of(node) for node in members})
        for node in members:
            labels[node] = index
        infos.append(
            ComponentInfo(
                index=index,
                nodes=len(members),
                edges=edges,
                node_pct=100.0 * len(members) / total_nodes if total_nodes else 0.0,
                edge_pct=100.0 * edges / total_edges if total_edges else 0.0,
                communities=communities,
            )
        )
    return ComponentReport(
        components=infos,
        labels=labels,
        total_nodes=total_nodes,
        total_edges=total_edges,
    )
