"""HITS scoring of the diffusion graph and the role split it induces.

Spreading ability is the authority score of a column (being collected
from), collecting ability is the hub score of a row (collecting from
good spreaders). Scores come from plain power iteration on the binary
matrix: starting from all-ones vectors, alternate

    a <- D^T h,   h <- D a

normalizing after every half-step. Iteration stops when the largest
absolute change across both vectors falls under ``tolerance``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "HitsScores",
    "RoleBreakdown",
    "classify_roles",
    "compute_hits",
    "dual_role_mask",
    "score_ranks",
]

ZERO_EPSILON = 1e-15

_NORMS = ("l2", "l1")


@dataclass
class HitsScores:
    """Converged score vectors plus iteration diagnostics.

    ``norm_drift`` is the largest deviation of a post-normalization
    vector norm from 1.0 observed anywhere in the run; it should sit at
    rounding-error level regardless of graph size.
    """

    authority: np.ndarray
    hub: np.ndarray
    iterations: int
    residual: float
    converged: bool
    norm: str = "l2"
    norm_drift: float = 0.0


def _norm(vector: np.ndarray, kind: str) -> float:
    if kind == "l1":
        return float(np.sum(np.abs(vector)))
    return float(np.linalg.norm(vector))


def compute_hits(
    graph,
    tolerance: float = 1e-10,
    max_iterations: int = 1000,
    norm: str = "l2",
) -> HitsScores:
    """Run HITS on a diffusion graph (or a raw sparse/dense matrix).

    Raises ``ValueError`` for an edgeless graph, a non-square matrix,
    or an unknown norm. Non-convergence within ``max_iterations`` is
    reported through the ``converged`` flag, not an exception.
    """
    if norm not in _NORMS:
        raise ValueError(f"unknown norm {norm!r}")
    matrix = getattr(graph, "matrix", graph)
    matrix = sp.csr_matrix(matrix, dtype=np.float64)
    rows, cols = matrix.shape
    if rows != cols:
        raise ValueError("diffusion matrix must be square")
    if matrix.nnz == 0:
        raise ValueError("diffusion graph has no edges")
    transpose = matrix.T.tocsr()

    n = rows
    authority = np.ones(n)
    hub = np.ones(n)
    authority /= _norm(authority, norm)
    hub /= _norm(hub, norm)

    drift = 0.0
    residual = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        new_authority = transpose @ hub
        new_authority /= _norm(new_authority, norm)
        new_hub = matrix @ new_authority
        new_hub /= _norm(new_hub, norm)
        drift = max(
            drift,
            abs(_norm(new_authority, norm) - 1.0),
            abs(_norm(new_hub, norm) - 1.0),
        )
        residual = max(
            float(np.max(np.abs(new_authority - authority))),
            float(np.max(np.abs(new_hub - hub))),
        )
        authority, hub = new_authority, new_hub
        if residual < tolerance:
            converged = True
            break

    return HitsScores(
        authority=authority,
        hub=hub,
        iterations=iterations,
        residual=residual,
        converged=converged,
        norm=norm,
        norm_drift=drift,
    )


@dataclass(frozen=True)
class RoleBreakdown:
    """Counts of users by score positivity.

    ``dual`` users have both scores above the zero threshold; they are
    the candidate set for the spreader network. Construction checks
    that the subgroup counts add up.
    """

    total: int
    spreaders: int
    collectors: int
    dual: int
    spread_only: int
    collect_only: int

    def __post_init__(self):
        if self.dual + self.spread_only != self.spreaders:
            raise ValueError("spreader subgroup counts do not add up")
        if self.dual + self.collect_only != self.collectors:
            raise ValueError("collector subgroup counts do not add up")

    def percentages(self) -> dict[str, float]:
        """Share of the user universe per role, in percent."""
        base = self.total
        return {
            "spreaders": 100.0 * self.spreaders / base if base else 0.0,
            "collectors": 100.0 * self.collectors / base if base else 0.0,
            "dual": 100.0 * self.dual / base if base else 0.0,
            "spread_only": 100.0 * self.spread_only / base if base else 0.0,
            "collect_only": 100.0 * self.collect_only / base if base else 0.0,
        }


def classify_roles(scores: HitsScores, zero_epsilon: float = ZERO_EPSILON) -> RoleBreakdown:
    """Split the universe by which HITS scores are (numerically) positive.

    Power iteration leaves structurally-zero entries at values like
    1e-17 instead of exact zeros, so positivity is tested against
    ``zero_epsilon`` rather than 0.
    """
    spread_mask = scores.authority > zero_epsilon
    collect_mask = scores.hub > zero_epsilon
    dual = int(np.count_nonzero(spread_mask & collect_mask))
    spreaders = int(np.count_nonzero(spread_mask))
    collectors = int(np.count_nonzero(collect_mask))
    return RoleBreakdown(
        total=int(scores.authority.shape[0]),
        spreaders=spreaders,
        collectors=collectors,
        dual=dual,
        spread_only=spreaders - dual,
        collect_only=collectors - dual,
    )


def dual_role_mask(scores: HitsScores, zero_epsilon: float = ZERO_EPSILON) -> np.ndarray:
    return (scores.authority > zero_epsilon) & (scores.hub > zero_epsilon)


def score_ranks(values: np.ndarray) -> np.ndarray:
    """Ordinal 1-based ranks, highest value first, ties by index order.

    Index order is user-id order everywhere in this package, so ties
    resolve to the lexicographically smaller user id.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    order = np.lexsort((np.arange(n), -values))
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(1, n + 1)
    return ranks
