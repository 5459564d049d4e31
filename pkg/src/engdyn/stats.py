"""Nonparametric statistics: Spearman correlation, Mann-Whitney U, and
Bonferroni-corrected pairwise category comparisons.

Everything here is rank-based. Ranking uses average ranks for ties
throughout, and the Mann-Whitney test switches between an exact null
distribution (small untied samples) and the tie-corrected normal
approximation with continuity correction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.special import ndtr, stdtr

from .errors import InvalidInput, UndefinedCorrelation
from .model import CategoryAssignment

EXACT_LIMIT = 8  # per-sample cutoff; enumeration stays <= C(16, 8) labelings

MWU_MODES = ("exact", "normal_approx", "auto")
ALTERNATIVES = ("two-sided", "greater", "less")


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int


class MannWhitneyResult(NamedTuple):
    u: float  # U statistic of the first sample
    p_value: float


def rank_average(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with tied values sharing the mean of their positions."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(len(a), dtype=float)
    i = 0
    sorted_a = a[order]
    while i < len(a):
        j = i
        while j + 1 < len(a) and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman rank correlation with the two-tailed t-approximation p-value.

    rho is the Pearson correlation of the average-rank vectors; the p-value
    uses t = rho * sqrt((n-2) / (1-rho^2)) on n-2 degrees of freedom, with
    p = 0 at rho = +/-1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise InvalidInput(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise InvalidInput(f"need at least 3 pairs, got {n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInput("inputs contain non-finite values")

    rx = rank_average(x)
    ry = rank_average(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0 or vy == 0.0:
        raise UndefinedCorrelation("a rank vector has zero variance")
    rho = float(dx @ dy) / math.sqrt(vx * vy)
    rho = max(-1.0, min(1.0, rho))

    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return CorrelationResult(rho=rho, p_value=p, n=n)


@lru_cache(maxsize=None)
def _u_counts(n1: int, n2: int) -> tuple[int, ...]:
    """Null distribution of U for untied samples: counts of each U value.

    Recursion on whether the largest observation belongs to the first
    sample: c(n1, n2, u) = c(n1-1, n2, u-n2) + c(n1, n2-1, u).
    """
    if n1 == 0 or n2 == 0:
        return (1,)
    drop_x = _u_counts(n1 - 1, n2)
    drop_y = _u_counts(n1, n2 - 1)
    out = [0] * (n1 * n2 + 1)
    for u in range(len(out)):
        if 0 <= u - n2 < len(drop_x):
            out[u] += drop_x[u - n2]
        if u < len(drop_y):
            out[u] += drop_y[u]
    return tuple(out)


def _exact_p(u: float, n1: int, n2: int, alternative: str) -> float:
    counts = _u_counts(n1, n2)
    total = math.comb(n1 + n2, n1)
    # untied samples make U an integer
    ui = int(round(u))
    p_le = sum(counts[: ui + 1]) / total
    p_ge = sum(counts[ui:]) / total
    if alternative == "greater":
        return min(1.0, p_ge)
    if alternative == "less":
        return min(1.0, p_le)
    return min(1.0, 2.0 * min(p_le, p_ge))


def _normal_p(u: float, n1: int, n2: int, tie_term: float, alternative: str) -> float:
    n = n1 + n2
    mu = 0.5 * n1 * n2
    variance = n1 * n2 * (n + 1) / 12.0 * (1.0 - tie_term)
    if variance <= 0.0:
        return 1.0  # every observation tied; U is pinned at its mean
    sd = math.sqrt(variance)
    p_le = float(ndtr((u - mu + 0.5) / sd))
    p_ge = float(ndtr(-(u - mu - 0.5) / sd))
    if alternative == "greater":
        return min(1.0, p_ge)
    if alternative == "less":
        return min(1.0, p_le)
    return min(1.0, 2.0 * min(p_le, p_ge))


def mann_whitney_u(x: Sequence[float], y: Sequence[float], mode: str = "auto",
                   alternative: str = "two-sided") -> MannWhitneyResult:
    """Mann-Whitney U test; returns (U of x, p-value).

    ``auto`` enumerates the exact null distribution when both samples have
    at most 8 values and no ties are present, and otherwise falls back to
    the normal approximation with tie-corrected variance and continuity
    correction. ``greater`` tests the alternative that x tends larger.
    """
    if mode not in MWU_MODES:
        raise InvalidInput(f"unknown mode {mode!r}")
    if alternative not in ALTERNATIVES:
        raise InvalidInput(f"unknown alternative {alternative!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) == 0 or len(y) == 0:
        raise InvalidInput("samples must be non-empty")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInput("inputs contain non-finite values")

    n1, n2 = len(x), len(y)
    pooled = np.concatenate([x, y])
    ranks = rank_average(pooled)
    u1 = float(ranks[:n1].sum()) - 0.5 * n1 * (n1 + 1)

    _, tie_counts = np.unique(pooled, return_counts=True)
    has_ties = bool(np.any(tie_counts > 1))
    n = n1 + n2
    tie_term = float(((tie_counts.astype(float) ** 3 - tie_counts).sum())
                     / (n ** 3 - n)) if n > 1 else 0.0

    if mode == "exact" or (mode == "auto" and not has_ties
                           and n1 <= EXACT_LIMIT and n2 <= EXACT_LIMIT):
        if has_ties:
            raise InvalidInput("exact mode requires samples without ties")
        return MannWhitneyResult(u1, _exact_p(u1, n1, n2, alternative))
    return MannWhitneyResult(u1, _normal_p(u1, n1, n2, tie_term, alternative))


@dataclass
class PairwiseTestMatrix:
    """Symmetric matrix of pairwise two-tailed Mann-Whitney p-values."""

    metric_name: str
    categories: tuple[str, ...]
    p_values: np.ndarray  # NaN diagonal
    corrected_threshold: float
    alpha_level: float
    excluded: tuple[str, ...] = ()

    @property
    def n_pairs(self) -> int:
        k = len(self.categories)
        return k * (k - 1) // 2

    def pair_p_values(self) -> list[tuple[str, str, float]]:
        out = []
        for i in range(len(self.categories)):
            for j in range(i + 1, len(self.categories)):
                out.append((self.categories[i], self.categories[j],
                            float(self.p_values[i, j])))
        return out

    def frac_significant(self, threshold: float | None = None) -> float:
        cutoff = self.corrected_threshold if threshold is None else threshold
        pairs = self.pair_p_values()
        if not pairs:
            return 0.0
        return sum(1 for _, _, p in pairs if p < cutoff) / len(pairs)

    def summary(self) -> dict:
        return {
            "metric": self.metric_name,
            "n_pairs": self.n_pairs,
            "threshold": self.corrected_threshold,
            "frac_significant": self.frac_significant(),
        }


def pairwise_category_tests(
    values: Mapping[str, float],
    assignments: Iterable[CategoryAssignment],
    metric_name: str,
    alpha_level: float = 0.05,
    category_order: Sequence[str] | None = None,
    mode: str = "auto",
) -> PairwiseTestMatrix:
    """Two-tailed Mann-Whitney tests between every pair of categories.

    Topics carrying several categories contribute their value to each of
    them. Categories with fewer than 2 topics are excluded with a warning.
    The Bonferroni threshold divides ``alpha_level`` by the number of pairs
    actually tested.
    """
    if not (0.0 < alpha_level < 1.0):
        raise InvalidInput("alpha_level must lie in (0, 1)")
    by_category: dict[str, list[float]] = {}
    for assignment in assignments:
        if assignment.topic_id not in values:
            continue
        for cat in assignment.categories:
            by_category.setdefault(cat, []).append(values[assignment.topic_id])

    present = list(by_category)
    if category_order is not None:
        present.sort(key=lambda c: (list(category_order).index(c)
                                    if c in category_order else len(category_order), c))
    else:
        present.sort()

    kept, excluded = [], []
    for cat in present:
        if len(by_category[cat]) >= 2:
            kept.append(cat)
        else:
            excluded.append(cat)
            warnings.warn(
                f"category {cat!r} has {len(by_category[cat])} topic(s); excluded "
                f"from pairwise {metric_name} tests", stacklevel=2)
    if len(kept) < 2:
        raise InvalidInput("need at least 2 categories with 2+ topics each")

    k = len(kept)
    matrix = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            _, p = mann_whitney_u(by_category[kept[i]], by_category[kept[j]],
                                  mode=mode)
            matrix[i, j] = matrix[j, i] = p

    n_pairs = k * (k - 1) // 2
    return PairwiseTestMatrix(
        metric_name=metric_name,
        categories=tuple(kept),
        p_values=matrix,
        corrected_threshold=alpha_level / n_pairs,
        alpha_level=alpha_level,
        excluded=tuple(excluded),
    )
