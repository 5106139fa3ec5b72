"""A small undirected weighted graph used by the spreader-side analyses.

Nodes are arbitrary sortable hashables (user indices in practice).
Iteration orders are always sorted so downstream algorithms are
deterministic without extra bookkeeping.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Iterator

Node = Hashable

__all__ = ["UndirectedGraph"]


class UndirectedGraph:
    """Adjacency-map graph; parallel edges collapse, self-loops are rejected."""

    def __init__(self, nodes: Iterable[Node] = ()):
        self._adj: dict[Node, dict[Node, float]] = {}
        for node in nodes:
            self.add_node(node)

    def add_node(self, node: Node) -> None:
        self._adj.setdefault(node, {})

    def add_edge(self, u: Node, v: Node, weight: float = 1.0) -> None:
        if u == v:
            raise ValueError(f"self-loop on {u!r}")
        self.add_node(u)
        self.add_node(v)
        self._adj[u][v] = weight
        self._adj[v][u] = weight

    def has_node(self, node: Node) -> bool:
        return node in self._adj

    def has_edge(self, u: Node, v: Node) -> bool:
        return u in self._adj and v in self._adj[u]

    def weight(self, u: Node, v: Node) -> float:
        return self._adj[u][v]

    def neighbors(self, node: Node) -> dict[Node, float]:
        return self._adj[node]

    def nodes(self) -> list[Node]:
        return sorted(self._adj)

    def edges(self) -> Iterator[tuple[Node, Node, float]]:
        """Yield each edge once as (u, v, w) with u < v, sorted."""
        for u in self.nodes():
            for v in sorted(self._adj[u]):
                if u < v:
                    yield u, v, self._adj[u][v]

    def number_of_nodes(self) -> int:
        return len(self._adj)

    def number_of_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def degree(self, node: Node) -> int:
        return len(self._adj[node])

    def strength(self, node: Node) -> float:
        """Sum of incident edge weights."""
        return sum(self._adj[node].values())

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges())

    def subgraph(self, keep: Iterable[Node]) -> "UndirectedGraph":
        keep = set(keep)
        sub = UndirectedGraph(keep & set(self._adj))
        for u, v, w in self.edges():
            if u in keep and v in keep:
                sub.add_edge(u, v, w)
        return sub

    def connected_components(self) -> list[list[Node]]:
        """Components as sorted node lists, largest first (ties: smallest node)."""
        seen: set[Node] = set()
        components: list[list[Node]] = []
        for start in self.nodes():
            if start in seen:
                continue
            queue = deque([start])
            seen.add(start)
            members = [start]
            while queue:
                current = queue.popleft()
                for nbr in self._adj[current]:
                    if nbr not in seen:
                        seen.add(nbr)
                        members.append(nbr)
                        queue.append(nbr)
            components.append(sorted(members))
        components.sort(key=lambda nodes: (-len(nodes), nodes[0]))
        return components
