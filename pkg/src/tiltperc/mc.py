"""Monte Carlo layer: tail probabilities, reach-set sizes, shell-time means,
and critical-probability location by bisection.

Replicas draw independent fields from seeds derived by mixing (base seed,
replica index), so results are pure functions of the plan and parameters and
merging is order-independent.  Runs at different q (or different tilt) that
share a plan share fields site-for-site, which is what the coupled
monotonicity checks rely on.

Censoring: a replica whose search touched the height cap is counted as
exceeding the threshold (the uncapped value could only be larger) and
reported in ``censored_count`` when its outcome was otherwise undecided.
This direction treats cap contact as surface-absent evidence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rng import derive_seed
from .errors import BracketError, InvalidWindowError
from .lattice import ConfigField, FloorSpec
from .paths import Window, sample_shell_time


@dataclass(frozen=True)
class ReplicaPlan:
    """Replica count plus the base seed from which per-replica seeds derive."""

    replicas: int
    base_seed: int

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")

    def seed(self, index: int) -> int:
        return derive_seed(self.base_seed, index)


@dataclass(frozen=True)
class EstimateCI:
    """Point estimate with a 95% interval (Wilson for proportions, normal
    for means) and the number of cap/budget-censored replicas."""

    point: float
    lo: float
    hi: float
    replicas: int
    censored_count: int

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.hi - self.lo)


Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = Z95):
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("need n >= 1")
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def mean_interval(values: np.ndarray, z: float = Z95):
    """Normal interval for a sample mean."""
    values = np.asarray(values, dtype=float)
    m = float(values.mean())
    if len(values) < 2:
        return m, m, m
    se = float(values.std(ddof=1)) / math.sqrt(len(values))
    return m, m - z * se, m + z * se


def _kernel_args(floor: FloorSpec):
    tilt = floor.tilt
    return (
        tilt.d,
        tilt.alpha.numerator,
        tilt.alpha.denominator,
        np.array(tilt.eta, dtype=np.int64),
        floor.kind == "pyramid",
    )


def _check_window(window: Window):
    if window.anchor is not None and any(window.anchor):
        raise InvalidWindowError("estimators require the origin-anchored window")


def _tail_events(q: float, floor: FloorSpec, h: int, window: Window, plan: ReplicaPlan,
                 n_replicas: int):
    """(successes, censored) for the event F_R(0) - floor(0) >= h.

    The event holds iff the origin column reaches relative height h - 1;
    cap-contact replicas count as exceeding and, when otherwise undecided,
    as censored."""
    d, num, den, eta, pyramid = _kernel_args(floor)
    successes = 0
    censored = 0
    for r in range(n_replicas):
        seed = np.uint64(plan.seed(r))
        event, capped, _, _, _ = _kernels.reach_kernel(
            seed, q, d, num, den, eta, pyramid,
            window.radius, window.height_cap, h - 1, _kernels.MODE_EVENT, 0,
        )
        if event or capped:
            successes += 1
            if capped and not event:
                censored += 1
    return successes, censored


def estimate_tail(q: float, floor: FloorSpec, h: int, window: Window,
                  plan: ReplicaPlan) -> EstimateCI:
    """Proportion of replicas whose window surface height at the origin
    exceeds the floor by at least h."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    _check_window(window)
    successes, censored = _tail_events(q, floor, h, window, plan, plan.replicas)
    lo, hi = wilson_interval(successes, plan.replicas)
    return EstimateCI(successes / plan.replicas, lo, hi, plan.replicas, censored)


def estimate_reach_size(q: float, floor: FloorSpec, h: int, window: Window,
                        plan: ReplicaPlan) -> EstimateCI:
    """Mean cardinality of the level-h reachable set from the origin;
    truncated searches are reported in ``censored_count``."""
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    _check_window(window)
    d, num, den, eta, pyramid = _kernel_args(floor)
    counts = np.empty(plan.replicas)
    truncated = 0
    for r in range(plan.replicas):
        seed = np.uint64(plan.seed(r))
        _, _, trunc, count, _ = _kernels.reach_kernel(
            seed, q, d, num, den, eta, pyramid,
            window.radius, window.height_cap, 0, _kernels.MODE_REACH, h,
        )
        counts[r] = count
        truncated += 1 if trunc else 0
    m, lo, hi = mean_interval(counts)
    return EstimateCI(m, lo, hi, plan.replicas, truncated)


def estimate_shell_mean(q: float, d: int, budget: int, plan: ReplicaPlan) -> EstimateCI:
    """Mean shell hitting time; censored replicas contribute the budget value
    (a lower bound) and are reported."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    vals = np.empty(plan.replicas)
    censored = 0
    for r in range(plan.replicas):
        field = ConfigField(q, plan.seed(r))
        t = sample_shell_time(field, d, budget)
        if t.censored:
            censored += 1
            vals[r] = budget
        else:
            vals[r] = t.value
    m, lo, hi = mean_interval(vals)
    return EstimateCI(m, lo, hi, plan.replicas, censored)


def replica_thresholds(floor: FloorSpec, window: Window, plan: ReplicaPlan,
                       h_star: int, q_limit: float = 1.0):
    """Per-replica critical q values for the proxy event.

    With coupled fields the event {F_R(0) - floor(0) >= h*} is monotone in q,
    so each replica has an exact threshold; the kernel finds it in one
    bottleneck sweep.  Returns (event_thresholds, cap_thresholds) arrays,
    entries inf when beyond q_limit."""
    d, num, den, eta, pyramid = _kernel_args(floor)
    qe = np.empty(plan.replicas)
    qc = np.empty(plan.replicas)
    for r in range(plan.replicas):
        seed = np.uint64(plan.seed(r))
        qe[r], qc[r] = _kernels.threshold_kernel(
            seed, d, num, den, eta, pyramid,
            window.radius, window.height_cap, h_star - 1, q_limit,
        )
    return qe, qc


def estimate_pc(floor: FloorSpec, window: Window, plan: ReplicaPlan,
                bracket, h_star: int | None = None, target: float = 0.5) -> EstimateCI:
    """Locate the q where the surface-existence proxy crosses ``target``.

    The proxy is psi(q) = P(F_R(0) - floor(0) >= h*), nondecreasing in q on
    coupled replicas; h* defaults to half the height cap.  The infinite-
    volume event is a zero-one law, so any fixed quantile locates the
    transition as the window grows; target 1/2 minimizes the variance at the
    crossing.

    On coupled replicas psi is the empirical distribution of the per-replica
    thresholds, so bisecting psi(q) = target converges to an order statistic;
    this computes that limit directly (no resolution error) and wraps it in
    the distribution-free binomial order-statistic interval.
    """
    _check_window(window)
    q_lo, q_hi = bracket
    if not (0.0 <= q_lo < q_hi <= 1.0):
        raise BracketError(f"need 0 <= q_lo < q_hi <= 1, got ({q_lo}, {q_hi})")
    if not (0.0 < target < 1.0):
        raise ValueError(f"target must lie in (0, 1), got {target}")
    if h_star is None:
        h_star = max(1, window.height_cap // 2)
    if h_star > window.height_cap:
        raise InvalidWindowError(f"h_star={h_star} exceeds the height cap")

    qe, qc = replica_thresholds(floor, window, plan, h_star, q_limit=q_hi)
    succ = np.minimum(qe, qc)  # cap contact counts as exceeding
    n = plan.replicas
    psi_lo = float(np.count_nonzero(succ < q_lo)) / n
    psi_hi = float(np.count_nonzero(succ < q_hi)) / n
    if not (psi_lo < target < psi_hi):
        raise BracketError(
            f"proxy does not straddle the target on ({q_lo}, {q_hi}): "
            f"psi={psi_lo:.3f}, {psi_hi:.3f}, target={target}"
        )
    order = np.sort(succ)
    k = max(1, math.ceil(target * n))
    q_hat = float(order[k - 1])
    half = Z95 * math.sqrt(n * target * (1.0 - target))
    k_lo = max(1, math.floor(n * target - half))
    k_hi = min(n, math.ceil(n * target + half) + 1)
    lo = float(order[k_lo - 1])
    hi = float(min(order[k_hi - 1], q_hi))
    censored = int(np.count_nonzero((qc <= q_hat) & (q_hat < qe)))
    return EstimateCI(q_hat, max(q_lo, lo), hi, n, censored)
