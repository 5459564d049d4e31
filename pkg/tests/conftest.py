from datetime import datetime, timedelta, timezone

import pytest

from engdyn.model import PostRecord, TopicSeries

EPOCH = datetime(2018, 1, 1, tzinfo=timezone.utc)


def make_post(topic_id="t", day=0.0, likes=1, shares=0, comments=0, love=0,
              angry=0, post_id=None):
    stamp = EPOCH + timedelta(days=day)
    return PostRecord(
        post_id=post_id or f"{topic_id}-{day}",
        topic_id=topic_id,
        timestamp=stamp,
        likes=likes, shares=shares, comments=comments,
        love=love, angry=angry,
    )


def series_from_curve(times, fractions, topic_id="s", n_posts=100,
                      total=1000) -> TopicSeries:
    """Wrap raw (t, y) samples as a series for fitter-level tests."""
    times = tuple(float(t) for t in times)
    fractions = tuple(float(y) for y in fractions)
    return TopicSeries(
        topic_id=topic_id,
        t0=EPOCH,
        times=times,
        fractions=fractions,
        total_engagement=total,
        n_posts=n_posts,
        horizon_days=times[-1],
    )


@pytest.fixture
def two_clique_graph():
    from engdyn.topicgraph import TermGraph
    edges = {("a", "b"): 1, ("a", "c"): 1, ("b", "c"): 1,
             ("x", "y"): 1, ("x", "z"): 1, ("y", "z"): 1,
             ("c", "x"): 1}
    return TermGraph(nodes=("a", "b", "c", "x", "y", "z"), edges=edges)
