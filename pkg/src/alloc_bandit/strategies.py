"""Budget-allocation policies.

Five policies share one episode protocol: ``select_arm`` names the arm to pull
next and the caller feeds the observed sample back via ``update_state``.

* ch-as: pull the arm maximizing a Chernoff-Hoeffding-style index, the biased
  variance estimate plus a distribution-free bonus, all divided by the pull
  count.
* b-as: pull the arm maximizing an empirical-Bernstein-style index built from
  the unbiased standard deviation and an exploration constant ``a`` derived
  from sub-Gaussian tail parameters (or supplied directly).
* gafs-max: forced exploration to ceil(sqrt(t)) pulls per arm, then greedy on
  the per-pull variance ratio.
* uniform: round-robin.
* oracle: the known-variance static optimum, pulls proportional to true
  variances.

The adaptive policies start by pulling every arm twice in index order so both
variance estimators are defined.  All ties break toward the lowest arm index
so that runs are exactly reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .stats import RunningStats


class StrategyKind(str, Enum):
    CHAS = "ch-as"
    BAS = "b-as"
    GAFS_MAX = "gafs-max"
    UNIFORM = "uniform"
    ORACLE = "oracle"


class AFormula(str, Enum):
    """Which leading term the exploration constant ``a`` uses."""

    MAIN_TEXT = "main"
    APPENDIX = "appendix"


@dataclass(frozen=True)
class StrategyParams:
    """Static knobs of a policy; anything left None is resolved per episode.

    delta defaults to n^(-5/2) for ch-as and n^(-7/2) for b-as.  For b-as the
    exploration constant resolves in priority order: a_override if set, else
    the single-knob rule a = sqrt(2 * sigma_bar * log n) if sigma_bar is set,
    else compute_a on (c1, c2) with per-instance defaults.
    """

    kind: StrategyKind
    delta: float | None = None
    c1: float | None = None
    c2: float | None = None
    a_override: float | None = None
    a_formula: AFormula = AFormula.APPENDIX
    sigma_bar: float | None = None

    def __post_init__(self):
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0,1), got {self.delta}")
        for name in ("c1", "c2"):
            v = getattr(self, name)
            if v is not None and v < 1.0:
                raise ValueError(f"{name} must be >= 1, got {v}")
        if self.a_override is not None and not self.a_override > 0:
            raise ValueError(f"a_override must be > 0, got {self.a_override}")
        if self.sigma_bar is not None and not self.sigma_bar > 0:
            raise ValueError(f"sigma_bar must be > 0, got {self.sigma_bar}")


def default_delta(kind: StrategyKind, n: int) -> float | None:
    if kind is StrategyKind.CHAS:
        return float(n) ** -2.5
    if kind is StrategyKind.BAS:
        return float(n) ** -3.5
    return None


def ch_index(var_biased, pulls, delta):
    """(var_biased + 3 sqrt(log(1/delta) / (2 pulls))) / pulls.

    Accepts scalars or numpy arrays; the vectorized engine calls the same
    expression so both code paths agree bit for bit.
    """
    bonus = 3.0 * np.sqrt(np.log(1.0 / delta) / (2.0 * pulls))
    return (var_biased + bonus) / pulls


def b_index(sd_unbiased, pulls, delta, a):
    """(sd^2 + 4 a sd sqrt(L/pulls) + 4 a^2 L/pulls) / pulls with L = log(2/delta)."""
    big_l = np.log(2.0 / delta)
    sd = sd_unbiased
    return (sd * sd + 4.0 * a * sd * np.sqrt(big_l / pulls) + 4.0 * a * a * big_l / pulls) / pulls


def compute_a(c1: float, c2: float, delta: float, n: int,
              formula: AFormula = AFormula.APPENDIX) -> float:
    """Exploration constant for b-as under the (c1, c2) tail condition.

    Both published forms of the leading term are available; they differ by a
    factor sqrt(2):

        appendix:  2 sqrt(c1 log(c2/delta))
        main:      sqrt(2 c1 log(c2/delta))

    plus the shared remainder term
    sqrt(c1 delta (1 + c2 + log(c2/delta))) / ((1-delta) sqrt(2 log(2/delta))) * sqrt(n),
    which vanishes as delta -> 0 at fixed n.
    """
    if c1 < 1.0 or c2 < 1.0:
        raise ValueError(f"need c1, c2 >= 1, got ({c1}, {c2})")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    if delta >= c2:
        raise ValueError(f"delta must be < c2, got delta={delta}, c2={c2}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    log_ratio = math.log(c2 / delta)
    if formula is AFormula.APPENDIX:
        first = 2.0 * math.sqrt(c1 * log_ratio)
    elif formula is AFormula.MAIN_TEXT:
        first = math.sqrt(2.0 * c1 * log_ratio)
    else:
        raise ValueError(f"unknown a formula {formula!r}")
    second = (
        math.sqrt(c1 * delta * (1.0 + c2 + log_ratio))
        / ((1.0 - delta) * math.sqrt(2.0 * math.log(2.0 / delta)))
        * math.sqrt(n)
    )
    return first + second


def optimal_static_allocation(variances: Sequence[float], n: int) -> list[int]:
    """Integer pull counts proportional to variances, largest-remainder rounded.

    Ties in the remainder ordering favor the lowest arm index; the result
    always sums to n exactly.
    """
    variances = [float(v) for v in variances]
    if any(v <= 0.0 for v in variances):
        raise ValueError("all variances must be > 0")
    k = len(variances)
    if k < 1 or n < k:
        raise ValueError(f"need n >= K >= 1, got n={n}, K={k}")
    total = math.fsum(variances)
    targets = [v * n / total for v in variances]
    counts = [math.floor(t) for t in targets]
    leftover = n - sum(counts)
    by_remainder = sorted(range(k), key=lambda i: (counts[i] - targets[i], i))
    for i in by_remainder[:leftover]:
        counts[i] += 1
    return counts


@dataclass
class StrategyState:
    """Per-episode mutable state: pull counter plus one RunningStats per arm.

    ``delta`` and ``a`` are resolved once at creation; ``t`` counts pulls made
    so far (so the init phase covers t = 0 .. 2K-1).
    """

    kind: StrategyKind
    n: int
    arms: list[RunningStats]
    delta: float | None = None
    a: float | None = None
    oracle_targets: tuple[int, ...] | None = None
    t: int = field(default=0)

    @property
    def num_arms(self) -> int:
        return len(self.arms)


def make_state(params: StrategyParams, n: int, num_arms: int, *,
               variances: Sequence[float] | None = None,
               instance_c1: float | None = None,
               instance_c2: float | None = None) -> StrategyState:
    """Resolve per-episode constants and build a fresh state.

    ``variances`` is consulted only by the oracle; ``instance_c1``/``instance_c2``
    are the fallback tail parameters when b-as has none of its own.
    """
    kind = params.kind
    if num_arms < 1:
        raise ValueError("need at least one arm")
    min_budget = num_arms if kind in (StrategyKind.UNIFORM, StrategyKind.ORACLE) else 2 * num_arms
    if n < min_budget:
        raise ValueError(
            f"budget n={n} infeasible for {kind.value} with {num_arms} arms (need >= {min_budget})")
    delta = params.delta if params.delta is not None else default_delta(kind, n)
    a = None
    if kind is StrategyKind.BAS:
        a = _resolve_a(params, n, delta, instance_c1, instance_c2)
    targets = None
    if kind is StrategyKind.ORACLE:
        if variances is None:
            raise ValueError("oracle needs the true variances")
        alloc = optimal_static_allocation(variances, n)
        if min(alloc) == 0:
            raise ValueError(
                "budget too small: the static optimum would leave an arm with zero pulls")
        targets = tuple(alloc)
    return StrategyState(
        kind=kind, n=n, arms=[RunningStats() for _ in range(num_arms)],
        delta=delta, a=a, oracle_targets=targets)


def _resolve_a(params: StrategyParams, n: int, delta: float,
               instance_c1: float | None, instance_c2: float | None) -> float:
    if params.a_override is not None:
        return params.a_override
    if params.sigma_bar is not None:
        # Single-knob tuning: one confidence scale built from a variance-sum
        # bound, bypassing the conservative closed-form constant.
        return math.sqrt(2.0 * params.sigma_bar * math.log(n))
    c1 = params.c1 if params.c1 is not None else instance_c1
    c2 = params.c2 if params.c2 is not None else instance_c2
    if c1 is None or c2 is None:
        raise ValueError("b-as needs (c1, c2), a_override, or sigma_bar")
    return compute_a(c1, c2, delta, n, params.a_formula)


def select_arm(state: StrategyState) -> int:
    """The 0-based arm to pull at round t (pulls made so far)."""
    if state.t >= state.n:
        raise ValueError(f"budget exhausted: t={state.t}, n={state.n}")
    kind = state.kind
    k = state.num_arms
    if kind is StrategyKind.UNIFORM:
        return state.t % k
    if kind is StrategyKind.ORACLE:
        for i in range(k):
            if state.arms[i].count < state.oracle_targets[i]:
                return i
        raise AssertionError("oracle targets exhausted before the budget")
    if state.t < 2 * k:
        return state.t // 2
    if kind is StrategyKind.GAFS_MAX:
        return gafs_select(state)
    if kind is StrategyKind.CHAS:
        values = [ch_index(s.variance_biased(), s.count, state.delta) for s in state.arms]
    else:
        values = [b_index(s.sd_unbiased(), s.count, state.delta, state.a) for s in state.arms]
    return _argmax_lowest(values)


def gafs_select(state: StrategyState) -> int:
    """Forced pull for any arm under ceil(sqrt(t)); else greedy variance ratio."""
    threshold = _ceil_sqrt(state.t)
    under = [i for i, s in enumerate(state.arms) if s.count < threshold]
    if under:
        return min(under, key=lambda i: (state.arms[i].count, i))
    ratios = [s.variance_biased() / s.count for s in state.arms]
    return _argmax_lowest(ratios)


def update_state(state: StrategyState, arm: int, x: float) -> None:
    state.arms[arm].update(x)
    state.t += 1


def _ceil_sqrt(t: int) -> int:
    r = math.isqrt(t)
    return r if r * r == t else r + 1


def _argmax_lowest(values) -> int:
    best = 0
    best_v = values[0]
    for i in range(1, len(values)):
        if values[i] > best_v:
            best, best_v = i, values[i]
    return best
