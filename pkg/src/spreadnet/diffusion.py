"""The collector-to-spreader diffusion graph.

Every user who authored a mention tweet or interacted with one becomes
a node. A directed edge runs from collector i to spreader j when i
liked or retweeted at least one of j's mention tweets; the adjacency is
a binary CSR matrix with rows as collectors and columns as spreaders.
Raw like/retweet counts per edge are kept alongside for reporting, but
all scoring works on the binary matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from spreadnet.ingest import InteractionEvent, MentionEvent

__all__ = ["DatasetSummary", "DiffusionGraph", "UserIndex", "build_diffusion_graph", "dataset_summary"]


class UserIndex:
    """Bidirectional mapping between user ids and dense row/column indices.

    Ids are sorted, so index order is stable across runs and identical
    for rows and columns of the diffusion matrix.
    """

    def __init__(self, user_ids: Iterable[str]):
        self.ids: tuple[str, ...] = tuple(sorted(set(user_ids)))
        self._pos = {user_id: i for i, user_id in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, user_id: str) -> bool:
        return user_id in self._pos

    def __iter__(self) -> Iterator[str]:
        return iter(self.ids)

    def index_of(self, user_id: str) -> int:
        return self._pos[user_id]

    def id_of(self, index: int) -> str:
        return self.ids[index]


@dataclass
class DiffusionGraph:
    """Binary diffusion matrix plus the side tallies reports need.

    ``matrix`` is n-by-n CSR over ``users``; ``retweet_counts`` and
    ``like_counts`` share its shape and carry raw event counts.
    ``mention_tweets`` counts original mention tweets per user (indexed
    like the matrix). ``tweets_liked``/``tweets_retweeted`` count
    distinct mention tweets that drew at least one such interaction,
    and ``mentioned_papers`` counts distinct papers over all mentions.
    """

    users: UserIndex
    matrix: sp.csr_matrix
    retweet_counts: sp.csr_matrix
    like_counts: sp.csr_matrix
    mention_tweets: np.ndarray
    tweets_liked: int = 0
    tweets_retweeted: int = 0
    mentioned_papers: int = 0
    dropped_interactions: int = 0

    def number_of_users(self) -> int:
        return len(self.users)

    def number_of_edges(self) -> int:
        return int(self.matrix.nnz)

    def edge_records(self) -> Iterator[tuple[str, str, int, int]]:
        """Yield (collector_id, spreader_id, retweets, likes) in row-major order."""

        def as_map(counts: sp.csr_matrix) -> dict[tuple[int, int], int]:
            coo = counts.tocoo()
            return {
                (int(i), int(j)): int(v)
                for i, j, v in zip(coo.row, coo.col, coo.data)
            }

        retweets = as_map(self.retweet_counts)
        likes = as_map(self.like_counts)
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            key = (int(coo.row[k]), int(coo.col[k]))
            yield (
                self.users.id_of(key[0]),
                self.users.id_of(key[1]),
                retweets.get(key, 0),
                likes.get(key, 0),
            )


def build_diffusion_graph(
    mentions: Sequence[MentionEvent],
    interactions: Sequence[InteractionEvent],
) -> DiffusionGraph:
    """Assemble the diffusion graph from parsed events.

    ``mentions`` must hold original mentions only (native retweets
    already split off). Interactions aimed at tweets outside the
    mention set are dropped and counted; self-interactions (author
    engaging with their own tweet) never create an edge, so the
    diagonal stays empty. The user universe is everyone who authored a
    mention or performed a kept interaction.
    """
    author_of: dict[str, str] = {}
    mention_counts: dict[str, int] = {}
    papers: set[str] = set()
    for event in mentions:
        author_of[event.tweet_id] = event.user_id
        mention_counts[event.user_id] = mention_counts.get(event.user_id, 0) + 1
        papers.update(event.paper_ids)

    kept: list[tuple[str, str, str]] = []
    dropped = 0
    for event in interactions:
        author = author_of.get(event.target_tweet_id)
        if author is None:
            dropped += 1
            continue
        kept.append((event.kind, event.actor_user_id, event.target_tweet_id))

    users = UserIndex(
        list(mention_counts) + [actor for _, actor, _ in kept]
    )
    n = len(users)

    rows: list[int] = []
    cols: list[int] = []
    kinds: list[bool] = []  # True for retweet
    liked_tweets: set[str] = set()
    retweeted_tweets: set[str] = set()
    for kind, actor, target in kept:
        author = author_of[target]
        if kind == "like":
            liked_tweets.add(target)
        else:
            retweeted_tweets.add(target)
        if actor == author:
            continue
        rows.append(users.index_of(actor))
        cols.append(users.index_of(author))
        kinds.append(kind == "retweet")

    shape = (n, n)
    if rows:
        row_arr = np.asarray(rows, dtype=np.int64)
        col_arr = np.asarray(cols, dtype=np.int64)
        kind_arr = np.asarray(kinds, dtype=bool)
        retweet_counts = sp.coo_matrix(
            (kind_arr.astype(np.float64), (row_arr, col_arr)), shape=shape
        ).tocsr()
        like_counts = sp.coo_matrix(
            ((~kind_arr).astype(np.float64), (row_arr, col_arr)), shape=shape
        ).tocsr()
        retweet_counts.eliminate_zeros()
        like_counts.eliminate_zeros()
        total = sp.coo_matrix(
            (np.ones(len(row_arr)), (row_arr, col_arr)), shape=shape
        ).tocsr()
        matrix = total.copy()
        matrix.data = np.ones_like(matrix.data)
    else:
        matrix = sp.csr_matrix(shape)
        retweet_counts = sp.csr_matrix(shape)
        like_counts = sp.csr_matrix(shape)

    mention_arr = np.zeros(n, dtype=np.int64)
    for user_id, count in mention_counts.items():
        mention_arr[users.index_of(user_id)] = count

    return DiffusionGraph(
        users=users,
        matrix=matrix,
        retweet_counts=retweet_counts,
        like_counts=like_counts,
        mention_tweets=mention_arr,
        tweets_liked=len(liked_tweets),
        tweets_retweeted=len(retweeted_tweets),
        mentioned_papers=len(papers),
        dropped_interactions=dropped,
    )


def _pct(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


@dataclass(frozen=True)
class DatasetSummary:
    """Headline counts with shares of their base populations."""

    mentioned_papers: int
    mention_tweets: int
    tweets_liked: int
    tweets_retweeted: int
    users: int
    mentioning_users: int

    @property
    def tweets_liked_pct(self) -> float:
        return _pct(self.tweets_liked, self.mention_tweets)

    @property
    def tweets_retweeted_pct(self) -> float:
        return _pct(self.tweets_retweeted, self.mention_tweets)

    @property
    def mentioning_users_pct(self) -> float:
        return _pct(self.mentioning_users, self.users)

    def rows(self) -> list[tuple[str, int, float]]:
        """(label, count, percent) rows in report order."""
        return [
            ("papers mentioned", self.mentioned_papers, 100.0),
            ("mention tweets", self.mention_tweets, 100.0),
            ("mention tweets liked", self.tweets_liked, self.tweets_liked_pct),
            ("mention tweets retweeted", self.tweets_retweeted, self.tweets_retweeted_pct),
            ("users", self.users, 100.0),
            ("users mentioning papers", self.mentioning_users, self.mentioning_users_pct),
        ]


def dataset_summary(graph: DiffusionGraph, mentions: Sequence[MentionEvent]) -> DatasetSummary:
    return DatasetSummary(
        mentioned_papers=graph.mentioned_papers,
        mention_tweets=len(mentions),
        tweets_liked=graph.tweets_liked,
        tweets_retweeted=graph.tweets_retweeted,
        users=graph.number_of_users(),
        mentioning_users=int(np.count_nonzero(graph.mention_tweets)),
    )
