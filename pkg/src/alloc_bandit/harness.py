"""Episode runner and Monte-Carlo aggregator.

An episode pulls arms for n rounds under one policy and reports final pull
counts, empirical means, and squared estimation errors.  ``monte_carlo``
replicates episodes over independent per-run sample streams and aggregates
losses, regret, and rescaled regret with standard errors.

Determinism contract: the stream of arm k in run r depends only on
(master_seed, r, k), never on the policy, the scheduling of rounds, or the
worker count.  Per-run results are assembled in run-index order and reduced
with numpy's fixed pairwise summation over the assembled arrays, so repeated
calls produce bit-identical aggregates under any ``workers`` setting.

Two execution paths exist and agree exactly: ``run_episode`` walks one episode
sample by sample in O(K) memory, while the internal chunked engine advances
thousands of runs in lockstep over pre-drawn streams.  Both feed identical
floating-point expressions, which the test suite checks bitwise.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import InstanceSummary, b_event_holds, ch_event_holds, ch_pull_deviation_bound
from .dists import ArmSpec, Gaussian, stream_rng
from .strategies import (
    StrategyKind,
    StrategyParams,
    _ceil_sqrt,
    b_index,
    ch_index,
    compute_a,
    make_state,
    optimal_static_allocation,
    select_arm,
    update_state,
)

# Upper bound on the bytes of pre-drawn samples held at once by the engine.
_CHUNK_BYTES = 128 * 1024 * 1024


@dataclass(frozen=True)
class BanditInstance:
    """A fixed set of arms to allocate a budget across."""

    arms: tuple[ArmSpec, ...]

    def __post_init__(self):
        if not isinstance(self.arms, tuple):
            object.__setattr__(self, "arms", tuple(self.arms))
        if not self.arms:
            raise ValueError("an instance needs at least one arm")

    @property
    def num_arms(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> tuple[float, ...]:
        return tuple(a.mean for a in self.arms)

    @property
    def variances(self) -> tuple[float, ...]:
        return tuple(a.variance for a in self.arms)

    @property
    def total_variance(self) -> float:
        return math.fsum(self.variances)

    @property
    def all_gaussian(self) -> bool:
        return all(isinstance(a, Gaussian) for a in self.arms)

    @property
    def any_unbounded(self) -> bool:
        return any(not a.bounded for a in self.arms)

    def default_subgaussian(self, sigma_bar: float | None = None) -> tuple[float, float]:
        """Instance-level (c1, c2) defaults for b-as.

        All-Gaussian instances use the joint pair (2 * sigma_bar, 1) with
        sigma_bar defaulting to the true total variance.  Mixed instances take
        the componentwise maximum over per-arm pairs, which stays valid
        because enlarging either constant only loosens the tail condition.
        """
        if self.all_gaussian:
            bar = self.total_variance if sigma_bar is None else sigma_bar
            if bar < self.total_variance:
                raise ValueError(
                    f"sigma_bar={bar} is below the actual total variance {self.total_variance}")
            return (2.0 * bar, 1.0)
        pairs = [a.subgaussian_params() for a in self.arms]
        return (max(p[0] for p in pairs), max(p[1] for p in pairs))

    def summary(self, c1: float | None = None, c2: float | None = None,
                sigma_bar: float | None = None) -> InstanceSummary:
        d1, d2 = self.default_subgaussian(sigma_bar)
        return InstanceSummary(
            variances=self.variances,
            c1=d1 if c1 is None else c1,
            c2=d2 if c2 is None else c2,
            sigma_bar=sigma_bar,
        )


@dataclass(frozen=True)
class EpisodeResult:
    pulls: tuple[int, ...]
    means: tuple[float, ...]
    sq_errors: tuple[float, ...]


@dataclass(frozen=True)
class AggregateStats:
    """Monte-Carlo summary over independent episodes.

    ``regret`` is the max of the per-arm loss estimates minus the exact
    optimal static loss total_variance / n.  Taking the max of noisy
    estimates biases it slightly upward, and it can go negative within noise;
    ``regret_stderr`` is the stderr of the arm attaining the max.
    """

    n: int
    runs: int
    loss: tuple[float, ...]
    loss_stderr: tuple[float, ...]
    global_loss: float
    regret: float
    regret_stderr: float
    rescaled_regret: float
    mean_pulls: tuple[float, ...]

    @property
    def rescaled_regret_stderr(self) -> float:
        return float(self.n) ** 1.5 * self.regret_stderr


def run_episode(instance: BanditInstance, params: StrategyParams, n: int,
                seed: int, run_index: int = 0) -> EpisodeResult:
    """Simulate one n-round episode, drawing each sample on demand."""
    _warn_about(instance, params, n)
    state = _fresh_state(instance, params, n)
    rngs = [stream_rng(seed, run_index, k) for k in range(instance.num_arms)]
    for _ in range(n):
        k = select_arm(state)
        x = float(instance.arms[k].sample(rngs[k]))
        update_state(state, k, x)
    pulls = tuple(s.count for s in state.arms)
    means = tuple(s.mean for s in state.arms)
    sq_errors = tuple((m - mu) ** 2 for m, mu in zip(means, instance.means))
    return EpisodeResult(pulls=pulls, means=means, sq_errors=sq_errors)


def monte_carlo(instance: BanditInstance, params: StrategyParams, n: int,
                runs: int, master_seed: int, *, workers: int = 1) -> AggregateStats:
    """Aggregate ``runs`` independent episodes into loss and regret estimates."""
    if runs < 2:
        raise ValueError(f"need runs >= 2, got {runs}")
    _warn_about(instance, params, n)
    _fresh_state(instance, params, n)  # validate budget and parameters up front
    pulls, means = _simulate_runs(instance, params, n, runs, master_seed, workers)
    sq_errors = (means - np.asarray(instance.means)) ** 2
    loss = sq_errors.mean(axis=0)
    loss_stderr = sq_errors.std(axis=0, ddof=1) / math.sqrt(runs)
    k_star = int(np.argmax(loss))
    global_loss = float(loss[k_star])
    regret = global_loss - instance.total_variance / n
    return AggregateStats(
        n=n,
        runs=runs,
        loss=tuple(float(v) for v in loss),
        loss_stderr=tuple(float(v) for v in loss_stderr),
        global_loss=global_loss,
        regret=regret,
        regret_stderr=float(loss_stderr[k_star]),
        rescaled_regret=float(n) ** 1.5 * regret,
        mean_pulls=tuple(float(v) for v in pulls.sum(axis=0) / runs),
    )


# ---------------------------------------------------------------------------
# Gaussian loss identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArmIdentity:
    """Both sides of the per-arm loss identity E[(mean error)^2] = var * E[1/T]."""

    arm: int
    empirical_loss: float
    empirical_loss_stderr: float
    variance_over_pulls: float
    variance_over_pulls_stderr: float

    @property
    def z(self) -> float:
        se = math.hypot(self.empirical_loss_stderr, self.variance_over_pulls_stderr)
        diff = self.empirical_loss - self.variance_over_pulls
        if se == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / se


def gaussian_loss_identity_check(instance: BanditInstance, params: StrategyParams,
                                 n: int, runs: int, master_seed: int, *,
                                 workers: int = 1) -> list[ArmIdentity]:
    """Monte-Carlo check that each arm's loss equals variance times E[1/pulls].

    Holds for Gaussian arms under the two variance-UCB policies, and trivially
    for deterministic schedules (uniform, oracle).  gafs-max is refused: it is
    adaptive and not covered.  Non-Gaussian arms are refused because their
    empirical mean and variance are dependent, which breaks the identity.
    """
    if not instance.all_gaussian:
        raise ValueError("loss identity check requires all-Gaussian arms")
    if params.kind is StrategyKind.GAFS_MAX:
        raise ValueError("loss identity check does not cover gafs-max")
    if runs < 2:
        raise ValueError(f"need runs >= 2, got {runs}")
    pulls, means = _simulate_runs(instance, params, n, runs, master_seed, workers)
    sq_errors = (means - np.asarray(instance.means)) ** 2
    inv_pulls = 1.0 / pulls
    out = []
    root_runs = math.sqrt(runs)
    for k, var in enumerate(instance.variances):
        lhs = float(sq_errors[:, k].mean())
        lhs_se = float(sq_errors[:, k].std(ddof=1)) / root_runs
        rhs = var * float(inv_pulls[:, k].mean())
        rhs_se = var * float(inv_pulls[:, k].std(ddof=1)) / root_runs
        out.append(ArmIdentity(
            arm=k, empirical_loss=lhs, empirical_loss_stderr=lhs_se,
            variance_over_pulls=rhs, variance_over_pulls_stderr=rhs_se))
    return out


# ---------------------------------------------------------------------------
# Event study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EventStudy:
    """Empirical frequencies of the concentration events plus the conditional
    pull-deviation check for ch-as on the event-holding runs."""

    runs: int
    delta: float
    a: float
    ch_frequency: float
    b_frequency: float
    pull_bound: float
    optimal_pulls: tuple[int, ...]
    event_runs: int
    deviations_within_bound: bool


def event_study(instance: BanditInstance, n: int, runs: int, master_seed: int,
                delta: float, *, a: float | None = None,
                params: StrategyParams | None = None) -> EventStudy:
    """Measure how often both concentration events hold, and whether ch-as
    pull counts stay inside the deviation band whenever its event holds.

    Episodes and event checks consume the same per-run streams, so the
    conditional claim is evaluated on genuinely coupled data.  This is the one
    code path that materializes full sample paths.
    """
    if params is None:
        params = StrategyParams(kind=StrategyKind.CHAS, delta=delta)
    summary = instance.summary()
    if a is None:
        a = compute_a(summary.c1, summary.c2, delta, n)
    variances = instance.variances
    targets = np.asarray(optimal_static_allocation(variances, n))
    lambdas = np.asarray(summary.lambdas)
    bound = ch_pull_deviation_bound(summary, n, delta)
    ch_count = 0
    b_count = 0
    event_runs = 0
    all_within = True
    for lo, hi in _chunk_ranges(runs, _chunk_rows(n, instance.num_arms)):
        streams = _draw_streams(instance, master_seed, lo, hi, n)
        ch_ok = ch_event_holds(streams, variances, delta)
        b_ok = b_event_holds(streams, variances, delta, a)
        counts, _ = _episode_chunk(instance, params, n, streams)
        dev = counts - targets
        within = np.all((dev <= bound) & (dev >= -lambdas * bound), axis=1)
        ch_count += int(ch_ok.sum())
        b_count += int(b_ok.sum())
        event_runs += int(ch_ok.sum())
        if not bool(within[ch_ok].all()):
            all_within = False
    return EventStudy(
        runs=runs, delta=delta, a=a,
        ch_frequency=ch_count / runs, b_frequency=b_count / runs,
        pull_bound=bound, optimal_pulls=tuple(int(t) for t in targets),
        event_runs=event_runs, deviations_within_bound=all_within)


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

def _fresh_state(instance: BanditInstance, params: StrategyParams, n: int):
    c1, c2 = (None, None)
    if params.kind is StrategyKind.BAS:
        c1, c2 = instance.default_subgaussian()
    return make_state(params, n, instance.num_arms, variances=instance.variances,
                      instance_c1=c1, instance_c2=c2)


def _warn_about(instance: BanditInstance, params: StrategyParams, n: int) -> None:
    if n < 5 * instance.num_arms:
        warnings.warn(
            f"n={n} is below the asymptotic regime n >= 5K (K={instance.num_arms})",
            RuntimeWarning, stacklevel=3)
    if params.kind is StrategyKind.CHAS and instance.any_unbounded:
        warnings.warn(
            "ch-as carries guarantees only for bounded samples; this instance "
            "has an unbounded arm", RuntimeWarning, stacklevel=3)


def _simulate_runs(instance: BanditInstance, params: StrategyParams, n: int,
                   runs: int, master_seed: int, workers: int) -> tuple[np.ndarray, np.ndarray]:
    """All runs' final pull counts (runs, K) int64 and means (runs, K) float64."""
    ranges = _chunk_ranges(runs, _chunk_rows(n, instance.num_arms))
    tasks = [(instance, params, n, master_seed, lo, hi) for lo, hi in ranges]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_task, tasks))
    else:
        parts = [_chunk_task(t) for t in tasks]
    pulls = np.concatenate([p for p, _ in parts], axis=0)
    means = np.concatenate([m for _, m in parts], axis=0)
    return pulls, means


def _chunk_rows(n: int, num_arms: int) -> int:
    return max(1, _CHUNK_BYTES // (8 * n * num_arms))


def _chunk_ranges(runs: int, rows: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + rows, runs)) for lo in range(0, runs, rows)]


def _chunk_task(args) -> tuple[np.ndarray, np.ndarray]:
    instance, params, n, master_seed, lo, hi = args
    streams = _draw_streams(instance, master_seed, lo, hi, n)
    return _episode_chunk(instance, params, n, streams)


def _draw_streams(instance: BanditInstance, master_seed: int, lo: int, hi: int,
                  n: int) -> list[np.ndarray]:
    """Pre-draw n samples per arm for runs lo..hi-1; row r is run lo + r."""
    rows = hi - lo
    streams = []
    for k, arm in enumerate(instance.arms):
        block = np.empty((rows, n), dtype=np.float64)
        for r in range(rows):
            block[r] = arm.sample(stream_rng(master_seed, lo + r, k), n)
        streams.append(block)
    return streams


def _episode_chunk(instance: BanditInstance, params: StrategyParams, n: int,
                   streams: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Advance every run in the chunk through n rounds in lockstep.

    Per-arm state is the same Welford triple the scalar path keeps, updated
    with identical expressions so results match ``run_episode`` bitwise.
    """
    state = _fresh_state(instance, params, n)
    kind, delta, a = params.kind, state.delta, state.a
    num_k = instance.num_arms
    rows = streams[0].shape[0]
    counts = np.zeros((rows, num_k), dtype=np.int64)
    mean = np.zeros((rows, num_k), dtype=np.float64)
    m2 = np.zeros((rows, num_k), dtype=np.float64)
    run_idx = np.arange(rows)
    schedule = None
    if kind is StrategyKind.ORACLE:
        schedule = np.repeat(np.arange(num_k), state.oracle_targets)
    for t in range(n):
        if kind is StrategyKind.UNIFORM:
            sel = np.full(rows, t % num_k)
        elif kind is StrategyKind.ORACLE:
            sel = np.full(rows, schedule[t])
        elif t < 2 * num_k:
            sel = np.full(rows, t // 2)
        elif kind is StrategyKind.CHAS:
            var_b = np.maximum(m2 / counts, 0.0)
            sel = np.argmax(ch_index(var_b, counts, delta), axis=1)
        elif kind is StrategyKind.BAS:
            sd = np.sqrt(np.maximum(m2 / (counts - 1), 0.0))
            sel = np.argmax(b_index(sd, counts, delta, a), axis=1)
        else:  # gafs-max
            var_b = np.maximum(m2 / counts, 0.0)
            greedy = np.argmax(var_b / counts, axis=1)
            threshold = _ceil_sqrt(t)
            under = counts < threshold
            any_under = under.any(axis=1)
            if any_under.any():
                masked = np.where(under, counts, np.iinfo(np.int64).max)
                sel = np.where(any_under, np.argmin(masked, axis=1), greedy)
            else:
                sel = greedy
        pos = counts[run_idx, sel]
        x = np.empty(rows, dtype=np.float64)
        for k in range(num_k):
            mask = sel == k
            if mask.any():
                x[mask] = streams[k][mask, pos[mask]]
        new_count = pos + 1
        d = x - mean[run_idx, sel]
        new_mean = mean[run_idx, sel] + d / new_count
        m2[run_idx, sel] += d * (x - new_mean)
        mean[run_idx, sel] = new_mean
        counts[run_idx, sel] = new_count
    return counts, mean
