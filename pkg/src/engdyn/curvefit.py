"""Nonlinear least-squares fit of a two-parameter logistic growth curve.

The model is f(t) = 1 / (1 + exp(-alpha * (t - beta))): alpha sets the
steepness of the rise, beta the time at which the curve crosses 0.5.
Fitting is damped Gauss-Newton (Levenberg-Marquardt) with the analytic
Jacobian, run over (log alpha, beta) so alpha stays positive. Standard
errors come from s2 * inv(J'J) with s2 = RSS / (n - 2), expressed in the
original (alpha, beta) coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit, InsufficientData
from .model import TopicSeries

_STALL_DAMPING = 1e16


@dataclass(frozen=True)
class FitOptions:
    """Dials of the Levenberg-Marquardt loop."""

    max_iter: int = 200
    grad_tol: float = 1e-10
    step_tol: float = 1e-12
    damping_init: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 0.1
    initial: tuple[float, float] | None = None  # (alpha0, beta0); None = heuristic


@dataclass(frozen=True)
class FitResult:
    alpha_hat: float
    beta_hat: float
    se_alpha: float
    se_beta: float
    rss: float
    n_points: int
    converged: bool
    iterations: int


def sigmoid(t, alpha: float, beta: float):
    """Logistic curve value(s) at t, stable for |alpha * (t - beta)| up to ~700.

    The overflowing exponential branch is rewritten through exp of the
    negative magnitude, so saturated tails return exactly 0.0 or 1.0 instead
    of overflowing. Accepts scalars or arrays.
    """
    z = np.asarray(alpha * (np.asarray(t, dtype=float) - beta))
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


def sigmoid_jacobian(t, alpha: float, beta: float):
    """Partials (df/dalpha, df/dbeta) of the logistic curve."""
    t = np.asarray(t, dtype=float)
    f = sigmoid(t, alpha, beta)
    core = f * (1.0 - f)
    return (t - beta) * core, -alpha * core


def initial_guess(series: TopicSeries) -> tuple[float, float]:
    """Quantile read-off start point for the optimizer.

    beta0 is the first time the curve reaches 0.5; alpha0 = 4 / (t90 - t10)
    from the 10%/90% crossing times, clamped to [1e-5, 10], with 1.0 as the
    fallback when both quantiles land in the same bin (step-like series).
    """
    t = np.asarray(series.times)
    y = np.asarray(series.fractions)

    def first_crossing(level: float) -> float:
        hit = np.nonzero(y >= level)[0]
        return float(t[hit[0]]) if hit.size else float(t[-1])

    beta0 = first_crossing(0.5)
    t10 = first_crossing(0.1)
    t90 = first_crossing(0.9)
    if t90 == t10:
        alpha0 = 1.0
    else:
        alpha0 = min(max(4.0 / (t90 - t10), 1e-5), 10.0)
    return alpha0, beta0


def _solve_step(A: np.ndarray, g: np.ndarray, damping: float) -> np.ndarray:
    lhs = A + damping * np.diag(np.diag(A))
    return np.linalg.solve(lhs, g)


def fit(series: TopicSeries, options: FitOptions = FitOptions()) -> FitResult:
    """Fit the logistic curve to a series by damped Gauss-Newton.

    Non-convergence within ``max_iter`` is reported through the result
    (``converged=False``), not raised; a singular J'J raises DegenerateFit.
    ``converged=True`` guarantees the gradient infinity-norm is below
    ``grad_tol`` and both standard errors are finite.
    """
    t = np.asarray(series.times, dtype=float)
    y = np.asarray(series.fractions, dtype=float)
    n = len(t)
    if n < 3:
        raise InsufficientData(f"fit needs at least 3 points, got {n}")

    alpha0, beta0 = options.initial if options.initial is not None \
        else initial_guess(series)
    if alpha0 <= 0:
        raise DegenerateFit("initial alpha must be positive")
    theta = np.array([math.log(alpha0), beta0])

    def model_and_jac(th):
        alpha = math.exp(th[0])
        beta = th[1]
        f = sigmoid(t, alpha, beta)
        core = f * (1.0 - f)
        # columns: d/d(log alpha) = alpha * (t - beta) * f(1-f), d/dbeta
        J = np.column_stack((alpha * (t - beta) * core, -alpha * core))
        return f, J

    f, J = model_and_jac(theta)
    residual = y - f
    rss = float(residual @ residual)
    damping = options.damping_init
    iterations = 0
    grad_ok = False
    best_norm = math.inf
    no_progress = 0

    while iterations < options.max_iter:
        A = J.T @ J
        if not np.all(np.isfinite(A)) or np.any(np.diag(A) <= 0.0):
            raise DegenerateFit("J'J is singular at the current iterate")
        gradient = J.T @ residual
        grad_norm = float(np.max(np.abs(gradient)))
        if grad_norm < options.grad_tol:
            grad_ok = True
            break
        # Large-residual Gauss-Newton contracts the gradient only linearly,
        # so allow a few flat iterations before declaring a stall.
        if grad_norm < best_norm:
            best_norm = grad_norm
            no_progress = 0
        else:
            no_progress += 1
            if no_progress >= 5:
                break
        iterations += 1

        step = None
        while damping < _STALL_DAMPING:
            try:
                candidate = _solve_step(A, gradient, damping)
            except np.linalg.LinAlgError as exc:
                raise DegenerateFit("J'J is singular at the current iterate") from exc
            # Model-predicted decrease; once it is below the RSS rounding
            # granularity the S-comparison carries no information, so the
            # quadratic model is trusted outright (near-Newton refinement).
            predicted = float(gradient @ candidate)
            flat = predicted <= 16.0 * np.finfo(float).eps * max(rss, 1e-300)
            trial = theta + candidate
            if not np.all(np.isfinite(trial)) or trial[0] > 700.0:
                damping *= options.damping_up  # alpha would overflow; shrink
                continue
            f_trial = sigmoid(t, math.exp(trial[0]), trial[1])
            r_trial = y - f_trial
            rss_trial = float(r_trial @ r_trial)
            if np.isfinite(rss_trial) and (rss_trial <= rss or flat):
                step = candidate
                theta = trial
                residual = r_trial
                rss = rss_trial
                if flat:
                    damping = min(damping * options.damping_down, 1e-12)
                else:
                    damping = max(damping * options.damping_down, 1e-300)
                break
            damping *= options.damping_up
        if step is None:
            break  # stalled: no decrease possible at float precision
        f, J = model_and_jac(theta)
        if float(np.linalg.norm(step)) < options.step_tol:
            gradient = J.T @ residual
            grad_ok = bool(np.max(np.abs(gradient)) < options.grad_tol)
            break
    else:
        gradient = J.T @ residual
        grad_ok = bool(np.max(np.abs(gradient)) < options.grad_tol)

    alpha_hat = math.exp(theta[0])
    beta_hat = float(theta[1])
    se_alpha, se_beta = _standard_errors(t, alpha_hat, beta_hat, rss, n)
    converged = grad_ok and math.isfinite(se_alpha) and math.isfinite(se_beta)
    return FitResult(
        alpha_hat=alpha_hat,
        beta_hat=beta_hat,
        se_alpha=se_alpha,
        se_beta=se_beta,
        rss=rss,
        n_points=n,
        converged=converged,
        iterations=iterations,
    )


def _standard_errors(t, alpha, beta, rss, n) -> tuple[float, float]:
    """Asymptotic standard errors in the original parametrization.

    Computing J'J directly in (alpha, beta) coordinates is identical to the
    delta-method transport of the (log alpha, beta) covariance.
    """
    ja, jb = sigmoid_jacobian(t, alpha, beta)
    J = np.column_stack((ja, jb))
    A = J.T @ J
    sigma2 = rss / (n - 2)
    try:
        cov = sigma2 * np.linalg.inv(A)
    except np.linalg.LinAlgError:
        return math.inf, math.inf
    diag = np.diag(cov)
    if np.any(diag < 0) or not np.all(np.isfinite(diag)):
        return math.inf, math.inf
    return float(math.sqrt(diag[0])), float(math.sqrt(diag[1]))
