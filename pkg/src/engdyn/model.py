"""Domain types, post parsing, and normalized cumulative engagement curves.

A post stream (JSON lines) is turned into per-topic series of daily bins
holding the cumulative fraction of total engagement, the raw material for
the growth-curve fit.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientData, InvalidInput, ZeroEngagement

SECONDS_PER_DAY = 86400.0

POST_FIELDS = ("post_id", "topic_id", "timestamp", "likes", "shares",
               "comments", "love", "angry")

CATEGORIES = (
    "Art_Culture_Sport",
    "Economy",
    "Environment",
    "Human_Rights",
    "Labor",
    "Politics",
    "Religion",
    "Social",
    "Tech_Sci",
    "Health",
)


@dataclass(frozen=True)
class PostRecord:
    """One social post with its interaction and reaction counts."""

    post_id: str
    topic_id: str
    timestamp: datetime
    likes: int
    shares: int
    comments: int
    love: int
    angry: int

    @property
    def engagement(self) -> int:
        """Likes + shares + comments; the quantity the curves accumulate."""
        return self.likes + self.shares + self.comments


@dataclass(frozen=True)
class TopicSeries:
    """A topic's time-binned, normalized cumulative engagement curve.

    ``times`` are days since the topic's first post (first entry 0.0,
    strictly increasing); ``fractions`` are the matching cumulative shares
    of total engagement, ending exactly at 1.0 for series built by
    :func:`build_series`.
    """

    topic_id: str
    t0: datetime
    times: tuple[float, ...]
    fractions: tuple[float, ...]
    total_engagement: int
    n_posts: int
    horizon_days: float

    def validate(self) -> None:
        """Check the structural invariants; raises AssertionError on drift."""
        t = np.asarray(self.times)
        y = np.asarray(self.fractions)
        assert len(t) == len(y) >= 2
        assert t[0] == 0.0
        assert np.all(np.diff(t) > 0)
        assert np.all((y >= 0.0) & (y <= 1.0))
        assert np.all(np.diff(y) >= 0.0)
        assert y[-1] == 1.0
        assert self.horizon_days == t[-1] > 0
        assert self.total_engagement > 0 and self.n_posts > 0


@dataclass(frozen=True)
class CategoryAssignment:
    """Hand-assigned category labels for one topic."""

    topic_id: str
    categories: frozenset[str]

    def __post_init__(self):
        if not self.categories:
            raise InvalidInput(f"topic {self.topic_id!r} has no categories")
        unknown = self.categories - set(CATEGORIES)
        if unknown:
            raise InvalidInput(
                f"topic {self.topic_id!r} has unknown categories {sorted(unknown)}")


@dataclass(frozen=True)
class ParseResult:
    records: tuple[PostRecord, ...]
    rejects: tuple[tuple[int, str], ...]  # (1-based line number, reason)

    @property
    def n_rejected(self) -> int:
        return len(self.rejects)


def _parse_timestamp(raw) -> datetime:
    if not isinstance(raw, str):
        raise ValueError("timestamp must be a string")
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError("timestamp lacks a UTC offset")
    return ts.astimezone(timezone.utc)


def _parse_count(obj, field) -> int:
    value = obj[field]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{field} must be an integer")
    if value < 0:
        raise ValueError(f"{field} is negative")
    return value


def parse_post_line(line: str) -> PostRecord:
    """Parse one JSON-lines record; raises ValueError with a reason."""
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    missing = [f for f in POST_FIELDS if f not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    for field in ("post_id", "topic_id"):
        if not isinstance(obj[field], str) or not obj[field]:
            raise ValueError(f"{field} must be a non-empty string")
    return PostRecord(
        post_id=obj["post_id"],
        topic_id=obj["topic_id"],
        timestamp=_parse_timestamp(obj["timestamp"]),
        likes=_parse_count(obj, "likes"),
        shares=_parse_count(obj, "shares"),
        comments=_parse_count(obj, "comments"),
        love=_parse_count(obj, "love"),
        angry=_parse_count(obj, "angry"),
    )


def parse_posts(stream: Iterable[str]) -> ParseResult:
    """Parse a line-delimited post stream, keeping valid records.

    Malformed lines are reported with their 1-based line number instead of
    aborting the whole stream; blank lines are skipped silently.
    """
    records: list[PostRecord] = []
    rejects: list[tuple[int, str]] = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            records.append(parse_post_line(line))
        except (ValueError, json.JSONDecodeError) as exc:
            rejects.append((lineno, str(exc)))
    return ParseResult(tuple(records), tuple(rejects))


def load_posts(path: str | Path) -> ParseResult:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_posts(fh)


def build_series(posts: Sequence[PostRecord], topic_id: str,
                 bin_width: float = 1.0) -> TopicSeries:
    """Bin a topic's posts into a normalized cumulative engagement curve.

    Engagement lands in bin ``floor((timestamp - t0) / bin_width)`` with t0
    the topic's earliest post; empty bins carry the running cumulative value
    forward, and the final bin is exactly 1.0 after division by the total.
    The trailing period after the last post is truncated, so the horizon is
    the last post's bin.
    """
    if bin_width <= 0:
        raise InvalidInput("bin_width must be positive")
    selected = [p for p in posts if p.topic_id == topic_id]
    if len(selected) < 2:
        raise InsufficientData(
            f"topic {topic_id!r} has {len(selected)} post(s); need at least 2")
    total = sum(p.engagement for p in selected)
    if total <= 0:
        raise ZeroEngagement(f"topic {topic_id!r} has zero total engagement")

    t0 = min(p.timestamp for p in selected)
    offsets = np.array(
        [(p.timestamp - t0).total_seconds() / SECONDS_PER_DAY for p in selected])
    weights = np.array([p.engagement for p in selected], dtype=float)
    bins = np.floor(offsets / bin_width).astype(int)
    n_bins = int(bins.max()) + 1
    if n_bins < 2:
        raise InsufficientData(
            f"topic {topic_id!r} spans a single {bin_width}-day bin")

    per_bin = np.zeros(n_bins)
    np.add.at(per_bin, bins, weights)
    cumulative = np.cumsum(per_bin)
    # divide by the accumulated last value (== total) so the terminal
    # fraction is exactly 1.0 regardless of magnitude
    fractions = cumulative / cumulative[-1]
    times = np.arange(n_bins, dtype=float) * bin_width

    return TopicSeries(
        topic_id=topic_id,
        t0=t0,
        times=tuple(times.tolist()),
        fractions=tuple(fractions.tolist()),
        total_engagement=int(total),
        n_posts=len(selected),
        horizon_days=float(times[-1]),
    )


def group_by_topic(records: Iterable[PostRecord]) -> dict[str, list[PostRecord]]:
    grouped: dict[str, list[PostRecord]] = {}
    for rec in records:
        grouped.setdefault(rec.topic_id, []).append(rec)
    return grouped


def read_categories(path: str | Path) -> dict[str, CategoryAssignment]:
    """Read the ``topic_id,category`` CSV (one row per pair)."""
    pairs: dict[str, set[str]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or \
                [f.strip() for f in reader.fieldnames] != ["topic_id", "category"]:
            raise InvalidInput(
                f"{path}: expected header 'topic_id,category', got {reader.fieldnames}")
        for row in reader:
            pairs.setdefault(row["topic_id"], set()).add(row["category"])
    return {
        topic: CategoryAssignment(topic, frozenset(cats))
        for topic, cats in pairs.items()
    }
