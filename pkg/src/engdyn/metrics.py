"""Per-topic summary metrics: Speed Index and Love-Hate score.

The Speed Index is the time-normalized area under the fitted logistic
curve over the observation window [0, T]; it lives in [0, 1] and is large
for curves that saturate early. The Love-Hate score contrasts Love and
Angry reaction counts, +1 all-Love, -1 all-Angry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .curvefit import sigmoid
from .errors import DomainError, InvalidInput
from .model import PostRecord

LH_MODES = ("pooled", "mean_of_posts")


@dataclass(frozen=True)
class TopicMetrics:
    topic_id: str
    speed_index: float
    lh_score: Optional[float]  # None when no post carries Love/Angry reactions
    lh_posts_used: int
    total_love: int
    total_angry: int


def _softplus(x: float) -> float:
    # ln(1 + e^x), written through the negative-magnitude exponential
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def speed_index(alpha: float, beta: float, horizon: float) -> float:
    """Mean value of the logistic curve over [0, horizon], in closed form.

    The antiderivative of 1/(1+e^(-a(t-b))) is softplus(a(t-b))/a, so the
    normalized area is [softplus(a(T-b)) - softplus(-a*b)] / (a*T).
    """
    if not (math.isfinite(alpha) and math.isfinite(beta) and math.isfinite(horizon)):
        raise DomainError("speed_index requires finite arguments")
    if alpha <= 0 or horizon <= 0:
        raise DomainError("speed_index requires alpha > 0 and horizon > 0")
    upper = _softplus(alpha * (horizon - beta))
    lower = _softplus(-alpha * beta)
    value = (upper - lower) / (alpha * horizon)
    return min(max(value, 0.0), 1.0)  # trim float fuzz at the saturated ends


def speed_index_quadrature(alpha: float, beta: float, horizon: float,
                           tol: float = 1e-10) -> float:
    """Adaptive Simpson evaluation of the same mean value.

    Kept as an independent cross-check of the closed form; ``tol`` bounds the
    error of the returned (already T-normalized) value.
    """
    if alpha <= 0 or horizon <= 0:
        raise DomainError("speed_index requires alpha > 0 and horizon > 0")
    if tol <= 0:
        raise DomainError("tol must be positive")

    def f(t: float) -> float:
        return sigmoid(t, alpha, beta)

    # Seed panels around the transition so a coarse first parabola cannot
    # miss a near-step rise.
    knots = {0.0, horizon}
    for k in (-16.0, -8.0, -4.0, 0.0, 4.0, 8.0, 16.0):
        c = beta + k / alpha
        if 0.0 < c < horizon:
            knots.add(c)
    points = sorted(knots)

    total = 0.0
    budget = tol * horizon  # tolerance for the raw integral
    for a, b in zip(points[:-1], points[1:]):
        share = budget * (b - a) / horizon
        total += _adaptive_simpson(f, a, b, share)
    return min(max(total / horizon, 0.0), 1.0)


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width * (fa + 4.0 * fm + fb) / 6.0


def _adaptive_simpson(f, a: float, b: float, eps: float) -> float:
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive_step(f, a, b, fa, fm, fb, whole, eps, depth=50)


def _adaptive_step(f, a, b, fa, fm, fb, whole, eps, depth) -> float:
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    half = 0.5 * eps
    return (_adaptive_step(f, a, m, fa, flm, fm, left, half, depth - 1)
            + _adaptive_step(f, m, b, fm, frm, fb, right, half, depth - 1))


def reaction_totals(posts: Sequence[PostRecord]) -> tuple[int, int, int]:
    """(total love, total angry, number of posts with any of either)."""
    love = sum(p.love for p in posts)
    angry = sum(p.angry for p in posts)
    used = sum(1 for p in posts if p.love + p.angry > 0)
    return love, angry, used


def love_hate(posts: Sequence[PostRecord], mode: str = "pooled") -> Optional[float]:
    """Love-Hate score of one topic's posts, or None when undefined.

    ``pooled`` applies (love - angry) / (love + angry) to the summed
    reaction counts; ``mean_of_posts`` scores each post with a nonzero
    denominator and averages. Posts without Love/Angry reactions are
    excluded rather than counted as neutral.
    """
    if mode not in LH_MODES:
        raise InvalidInput(f"unknown love_hate mode {mode!r}")
    topics = {p.topic_id for p in posts}
    if len(topics) > 1:
        raise InvalidInput(f"posts span multiple topics: {sorted(topics)}")
    if mode == "pooled":
        love = sum(p.love for p in posts)
        angry = sum(p.angry for p in posts)
        if love + angry == 0:
            return None
        return (love - angry) / (love + angry)
    scores = [(p.love - p.angry) / (p.love + p.angry)
              for p in posts if p.love + p.angry > 0]
    if not scores:
        return None
    return sum(scores) / len(scores)


def topic_metrics(topic_id: str, posts: Sequence[PostRecord], alpha: float,
                  beta: float, horizon: float, lh_mode: str = "pooled") -> TopicMetrics:
    love, angry, used = reaction_totals(posts)
    return TopicMetrics(
        topic_id=topic_id,
        speed_index=speed_index(alpha, beta, horizon),
        lh_score=love_hate(posts, mode=lh_mode),
        lh_posts_used=used,
        total_love=love,
        total_angry=angry,
    )
