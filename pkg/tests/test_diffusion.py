from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spreadnet.diffusion import UserIndex, build_diffusion_graph, dataset_summary
from spreadnet.ingest import InteractionEvent, MentionEvent


def _ts(day=1):
    return datetime(2020, 1, day, tzinfo=timezone.utc)


def _mention(tweet_id, user_id, papers=("2001.10000",), day=1):
    return MentionEvent(tweet_id=tweet_id, user_id=user_id,
                        timestamp=_ts(day), paper_ids=tuple(papers))


# ------------------------------------------------------------------ UserIndex


def test_user_index_is_sorted_and_bidirectional():
    index = UserIndex(["carol", "alice", "bob", "alice"])
    assert list(index) == ["alice", "bob", "carol"]
    assert len(index) == 3
    assert "bob" in index and "dave" not in index
    for position, user_id in enumerate(index):
        assert index.index_of(user_id) == position
        assert index.id_of(position) == user_id


def test_user_index_rejects_unknown():
    index = UserIndex(["a"])
    with pytest.raises(KeyError):
        index.index_of("b")


# ------------------------------------------------------------- worked example


@pytest.fixture
def small_graph():
    mentions = [
        _mention("t1", "alice", papers=("2001.10000", "2001.10001")),
        _mention("t2", "bob", papers=("2001.10000",), day=2),
    ]
    interactions = [
        InteractionEvent("like", "carol", "t1"),
        InteractionEvent("retweet", "carol", "t1"),
        InteractionEvent("like", "carol", "t2"),
        InteractionEvent("retweet", "dan", "t2"),
        InteractionEvent("like", "alice", "t1"),      # self interaction
        InteractionEvent("like", "bob", "t-missing"),  # dropped
    ]
    return build_diffusion_graph(mentions, interactions)


def test_small_graph_population(small_graph):
    # Universe: mention authors plus actors of kept interactions.
    assert list(small_graph.users) == ["alice", "bob", "carol", "dan"]
    assert small_graph.number_of_users() == 4
    assert small_graph.dropped_interactions == 1


def test_small_graph_edges(small_graph):
    records = list(small_graph.edge_records())
    # (collector, spreader, retweets, likes); no alice->alice self edge.
    assert records == [
        ("carol", "alice", 1, 1),
        ("carol", "bob", 0, 1),
        ("dan", "bob", 1, 0),
    ]
    assert small_graph.number_of_edges() == 3


def test_small_graph_matrix_is_binary(small_graph):
    matrix = small_graph.matrix
    assert matrix.shape == (4, 4)
    assert matrix.dtype == np.float64
    assert set(matrix.data.tolist()) == {1.0}
    carol = small_graph.users.index_of("carol")
    alice = small_graph.users.index_of("alice")
    assert matrix[carol, alice] == 1.0
    assert matrix[alice, carol] == 0.0


def test_small_graph_tweet_tallies(small_graph):
    # Self interactions leave no edge but still mark the tweet as touched.
    assert small_graph.tweets_liked == 2
    assert small_graph.tweets_retweeted == 2
    assert small_graph.mentioned_papers == 2
    users = small_graph.users
    counts = small_graph.mention_tweets
    assert counts[users.index_of("alice")] == 1
    assert counts[users.index_of("bob")] == 1
    assert counts[users.index_of("carol")] == 0


def test_summary_percentages(small_graph):
    mentions = [
        _mention("t1", "alice", papers=("2001.10000", "2001.10001")),
        _mention("t2", "bob", papers=("2001.10000",), day=2),
    ]
    summary = dataset_summary(small_graph, mentions)
    assert summary.mentioned_papers == 2
    assert summary.mention_tweets == 2
    assert summary.users == 4
    assert summary.mentioning_users == 2
    assert summary.tweets_liked_pct == 100.0
    assert summary.mentioning_users_pct == 50.0
    rows = summary.rows()
    assert rows[0] == ("papers mentioned", 2, 100.0)
    assert len(rows) == 6


def test_summary_zero_division_guard():
    graph = build_diffusion_graph([], [])
    summary = dataset_summary(graph, [])
    assert summary.tweets_liked_pct == 0.0
    assert summary.tweets_retweeted_pct == 0.0
    assert summary.mentioning_users_pct == 0.0


def test_empty_graph():
    graph = build_diffusion_graph([], [])
    assert graph.number_of_users() == 0
    assert graph.number_of_edges() == 0
    assert list(graph.edge_records()) == []


def test_duplicate_edges_collapse_to_binary():
    mentions = [_mention("t1", "a"), _mention("t2", "a", day=2)]
    interactions = [
        InteractionEvent("like", "b", "t1"),
        InteractionEvent("like", "b", "t2"),
        InteractionEvent("retweet", "b", "t1"),
    ]
    graph = build_diffusion_graph(mentions, interactions)
    assert list(graph.edge_records()) == [("b", "a", 1, 2)]
    assert graph.matrix.sum() == 1.0


@given(st.permutations(list(range(6))))
def test_input_order_does_not_matter(order):
    mentions = [_mention(f"t{i}", f"author{i % 3}", day=i + 1) for i in range(6)]
    interactions = [
        InteractionEvent("like", f"fan{i % 4}", f"t{i}") for i in range(6)
    ]
    baseline = build_diffusion_graph(mentions, interactions)
    shuffled = build_diffusion_graph(
        [mentions[i] for i in order], [interactions[i] for i in order]
    )
    assert list(shuffled.users) == list(baseline.users)
    assert (shuffled.matrix != baseline.matrix).nnz == 0
    assert (shuffled.retweet_counts != baseline.retweet_counts).nnz == 0
    assert (shuffled.like_counts != baseline.like_counts).nnz == 0
