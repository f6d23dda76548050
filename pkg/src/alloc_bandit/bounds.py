"""Closed-form evaluators for the concentration events and guarantee formulas.

These are the theoretical counterparts of what the harness measures: the
high-probability events under which the adaptive allocations track the static
optimum, the corresponding pull-count deviation allowances, and the regret
bounds.  Everything here is a pure function; nothing samples.

The constants involved are honest but enormous, so at desk scales most bounds
exceed any attainable value.  They are still reported, flagged as vacuous,
rather than hidden (see ``vacuous_for_pulls`` / ``vacuous_for_regret``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class InstanceSummary:
    """Derived constants of a bandit instance used by the bound formulas."""

    variances: tuple[float, ...]
    c1: float
    c2: float
    sigma_bar: float | None = None

    def __post_init__(self):
        if not self.variances:
            raise ValueError("need at least one variance")
        if any(v <= 0.0 for v in self.variances):
            raise ValueError("all variances must be > 0")

    @property
    def num_arms(self) -> int:
        return len(self.variances)

    @property
    def total_variance(self) -> float:
        return math.fsum(self.variances)

    @property
    def lambdas(self) -> tuple[float, ...]:
        total = self.total_variance
        return tuple(v / total for v in self.variances)

    @property
    def lambda_min(self) -> float:
        return min(self.lambdas)


# ---------------------------------------------------------------------------
# Concentration events
# ---------------------------------------------------------------------------

def ch_event_holds(sample_paths: Sequence[np.ndarray], variances: Sequence[float],
                   delta: float):
    """Whether every biased-variance prefix estimate stays inside its band.

    The event requires |sigma_hat^2_t - sigma^2| <= 3 sqrt(log(1/delta)/(2t))
    for every arm and every prefix length t >= 1, with the biased estimator
    (1/t) sum x^2 - mean^2.

    ``sample_paths`` holds one array per arm, either a single path of shape
    (n,) or a batch of shape (runs, n); the return value is a bool or a bool
    array of shape (runs,) accordingly.
    """
    log_term = math.log(1.0 / delta)
    ok, scalar = None, False
    for path, var in zip(sample_paths, variances, strict=True):
        x, scalar = _as_batch(path)
        t = np.arange(1, x.shape[1] + 1, dtype=np.float64)
        cum1 = np.cumsum(x, axis=1)
        cum2 = np.cumsum(x * x, axis=1)
        var_biased = cum2 / t - (cum1 / t) ** 2
        band = 3.0 * np.sqrt(log_term / (2.0 * t))
        arm_ok = np.all(np.abs(var_biased - var) <= band, axis=1)
        ok = arm_ok if ok is None else ok & arm_ok
    return bool(ok[0]) if scalar else ok


def b_event_holds(sample_paths: Sequence[np.ndarray], variances: Sequence[float],
                  delta: float, a: float):
    """Whether every unbiased-sd prefix estimate stays inside its band.

    The event requires |sigma_hat_t - sigma| <= 2 a sqrt(log(2/delta)/t) for
    every arm and every prefix length 2 <= t <= n, with the unbiased standard
    deviation.  Shapes as in ``ch_event_holds``.
    """
    log_term = math.log(2.0 / delta)
    ok, scalar = None, False
    for path, var in zip(sample_paths, variances, strict=True):
        x, scalar = _as_batch(path)
        n = x.shape[1]
        if n < 2:
            raise ValueError("paths must contain at least two samples")
        t = np.arange(1, n + 1, dtype=np.float64)
        cum1 = np.cumsum(x, axis=1)
        cum2 = np.cumsum(x * x, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            var_unbiased = (cum2 - cum1**2 / t) / (t - 1.0)
        sd = np.sqrt(np.maximum(var_unbiased[:, 1:], 0.0))
        band = 2.0 * a * np.sqrt(log_term / t[1:])
        arm_ok = np.all(np.abs(sd - math.sqrt(var)) <= band, axis=1)
        ok = arm_ok if ok is None else ok & arm_ok
    return bool(ok[0]) if scalar else ok


def _as_batch(path) -> tuple[np.ndarray, bool]:
    x = np.asarray(path, dtype=np.float64)
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim == 2:
        return x, False
    raise ValueError(f"paths must be 1-D or 2-D, got shape {x.shape}")


# ---------------------------------------------------------------------------
# Pull-deviation and regret bounds
# ---------------------------------------------------------------------------

def ch_pull_deviation_bound(summary: InstanceSummary, n: int, delta: float) -> float:
    """Upper half-width for ch-as pulls on the event.

    On the event, T_k - T*_k lies in [-lambda_k * bound, bound] with
    bound = 12 sqrt(n log(1/delta)) / (Sigma lambda_min^(3/2)) + 4K.
    """
    _regime_check("ch_pull_deviation_bound", n, summary.num_arms)
    lead = 12.0 * math.sqrt(n * math.log(1.0 / delta))
    return lead / (summary.total_variance * summary.lambda_min**1.5) + 4.0 * summary.num_arms


def ch_regret_bound(n: int, lambda_min: float, total_variance: float) -> float:
    """Regret guarantee for ch-as on bounded arms at delta = n^(-5/2).

    39 sqrt(log n) / (n^(3/2) lambda_min^(5/2))
      + (2.9e3 / n^2) (log n)^(3/2) lambda_min^(-11/2) (1 + total_variance^(-5/2))
    """
    log_n = math.log(n)
    first = 39.0 * math.sqrt(log_n) / (n**1.5 * lambda_min**2.5)
    second = (2.9e3 / n**2) * log_n**1.5 * lambda_min**-5.5 * (1.0 + total_variance**-2.5)
    return first + second


def bas_pull_bounds(summary: InstanceSummary, arm: int, n: int, delta: float,
                    a: float) -> tuple[float, float]:
    """Per-arm deviation allowances for b-as pulls on the event.

    Returns (lower_dev, upper_dev) meaning
    T*_k - K lambda_k * bracket <= T_k <= T*_k + K * bracket, where the shared
    bracket combines an sqrt(n) term, an n^(1/4) term with
    c(delta) = a sqrt(3 L) / (sqrt(K) (sqrt(Sigma) + 3 a sqrt(L))), L = log(2/delta),
    and an additive 2.
    """
    _regime_check("bas_pull_bounds", n, summary.num_arms)
    if delta > 2.0 / math.e:
        warnings.warn(
            f"bas_pull_bounds: delta={delta} above 2/e, outside the stated regime",
            RuntimeWarning, stacklevel=2)
    k = summary.num_arms
    sigma = summary.total_variance
    big_l = math.log(2.0 / delta)
    c_delta = a * math.sqrt(3.0 * big_l) / (math.sqrt(k) * (math.sqrt(sigma) + 3.0 * a * math.sqrt(big_l)))
    bracket = (
        (16.0 * a * math.sqrt(big_l) / sigma)
        * (math.sqrt(sigma) + 2.0 * a * math.sqrt(big_l) / c_delta)
        * math.sqrt(n)
        + 64.0 * math.sqrt(2.0 * k) * a**2 * big_l / (sigma * math.sqrt(c_delta)) * n**0.25
        + 2.0
    )
    return (k * summary.lambdas[arm] * bracket, k * bracket)


def bas_regret_bound(n: int, num_arms: int, lambda_min: float, c1: float,
                     c2: float) -> float:
    """Leading term of the b-as regret guarantee at delta = n^(-7/2).

    76400 c1 (c2 + 1) K^2 (log n)^2 / (lambda_min n^(3/2)); the omitted
    remainder decays faster and has no stated constant, so only the leading
    term is evaluated.
    """
    return 76400.0 * c1 * (c2 + 1.0) * num_arms**2 * math.log(n) ** 2 / (lambda_min * n**1.5)


def gaussian_regret_bound(n: int, num_arms: int, sigma_bar: float) -> float:
    """b-as regret guarantee for all-Gaussian instances, free of lambda_min.

    105e3 sigma_bar K^2 (log n)^2 / n^(3/2), valid for sigma_bar >= 1/2 where
    sigma_bar upper-bounds the total variance.
    """
    if sigma_bar < 0.5:
        raise ValueError(f"gaussian_regret_bound needs sigma_bar >= 1/2, got {sigma_bar}")
    _regime_check("gaussian_regret_bound", n, num_arms)
    return 105e3 * sigma_bar * num_arms**2 * math.log(n) ** 2 / n**1.5


def vacuous_for_pulls(value: float, n: int) -> bool:
    """A pull-deviation allowance larger than the whole budget says nothing."""
    return value > n


def vacuous_for_regret(value: float, max_variance: float) -> bool:
    """A regret bound above half the largest variance says nothing at this scale."""
    return value > max_variance / 2.0


def _regime_check(name: str, n: int, num_arms: int) -> None:
    if n < 5 * num_arms:
        warnings.warn(
            f"{name}: n={n} is below the asymptotic regime n >= 5K (K={num_arms})",
            RuntimeWarning, stacklevel=3)
