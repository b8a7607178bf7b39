"""Self-check suite binding simulation to theory.

Ten numbered checks: exact formula goldens, series/Monte-Carlo consistency,
the sharpening inequality, sandwich placement of the estimated threshold,
coupled monotonicities, the tail inequality, oracle equivalence, the d = 1
trend, coarse-box geometry, and the oriented-percolation bridge.  ``quick``
runs the same assertions at smoke scale (about a minute); ``full`` runs the
stated scales and is the acceptance gate (pytest drives the same code).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bounds, lattice, mc, oracles, paths, rho
from ._rng import derive_seed, site_uniform
from .lattice import ConfigField, FloorSpec, make_tilt
from .mc import ReplicaPlan
from .paths import Window

BASE_SEED = 0x7117E9C0FFEE


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str
    seconds: float


def _se(est: mc.EstimateCI) -> float:
    return est.halfwidth / mc.Z95


# --- 1: exact golden formulas ------------------------------------------------

def _c01_exact_goldens(level: str):
    msgs = []
    ok = True

    v = bounds.lb_general(0.0, 1)
    ok &= v == 0.125
    msgs.append(f"lb_general(0,1)={v}")

    c0 = bounds.lipschitz_theta_const(0.0)
    ok &= c0 == 1.0
    theta1, r1 = bounds.theta_constant(1.0)
    ok &= r1 == 1.0 and theta1 == 0.0
    msgs.append(f"C(0)={c0}, R(1)={r1}")

    theta, _ = bounds.theta_constant(0.5)
    res_theta = abs(theta * math.exp(theta) / math.expm1(theta) - 2.0)
    ok &= res_theta < 1e-12
    msgs.append(f"theta residual={res_theta:.2e}")

    k, d = 1, 1
    a = 4.0 * (k + 1) * math.log(4.0 * d + 2.0)
    eps = bounds.epsilon_opt(k, d)
    h = eps * a - 1.0
    res_h = abs(h * math.exp(h) + math.exp(-1.0 - a))
    ok &= res_h < 1e-12
    ok &= 0.0 < eps < 1.0 / a
    msgs.append(f"eps_opt(1,1)={eps:.6f}, residual={res_h:.2e}")
    return ok, "; ".join(msgs)


# --- 2: E[T] series vs Monte Carlo -------------------------------------------

def _c02_expected_T(level: str):
    replicas = 10_000 if level == "full" else 1500
    msgs = []
    ok = True

    v = bounds.expected_T_exact(0.5, 1)
    ok &= v == 1.0
    msgs.append(f"E[T](d=1,q=0.5)={v}")

    for d in (1, 2, 3):
        for q in (0.1, 0.3, 0.6):
            exact = bounds.expected_T_exact(q, d)
            budget = 600 if d == 1 else 80
            est = mc.estimate_shell_mean(q, d, budget, ReplicaPlan(replicas, derive_seed(BASE_SEED, 20 + d)))
            se = _se(est)
            good = abs(est.point - exact) <= 3.0 * se and est.censored_count == 0
            ok &= good
            if not good:
                msgs.append(f"FAIL d={d} q={q}: mc={est.point:.4f} exact={exact:.4f} se={se:.4f}")
    msgs.append(f"9 shell-mean cells within 3 SE at {replicas} replicas")
    return ok, "; ".join(msgs)


# --- 3: sharpening inequality -------------------------------------------------

def _c03_sharpening(level: str):
    ok = True
    msgs = []
    for alpha in (0.0, 0.25, 0.5, 0.75):
        for d in (1, 2, 3, 4):
            ue = bounds.ub_expected_T(alpha, d)
            uf = bounds.ub_factorial(alpha, d)
            ok &= ue <= uf + 1e-12
            if d == 1:
                closed_form = (1.0 - alpha) / (2.0 - alpha)
                ok &= abs(ue - closed_form) < 1e-12
                ok &= abs(uf - closed_form) < 1e-12
    msgs.append("ub_expected_T <= ub_factorial on the 4x4 grid; d=1 equality to 1e-12")
    return ok, "; ".join(msgs)


# --- 4: bounds sandwich + MC placement ----------------------------------------

def _pc_run(alpha: Fraction, d: int, k: int, radius: int, cap: int, replicas: int,
            seed_salt: int, h_star: int | None = None, bracket=(1e-4, 0.6)):
    floor = FloorSpec("plane", make_tilt(alpha, d, k=k))
    window = Window(radius, cap)
    plan = ReplicaPlan(replicas, derive_seed(BASE_SEED, seed_salt))
    return mc.estimate_pc(floor, window, plan, bracket, h_star=h_star)


def _c04_sandwich(level: str):
    replicas = 2000 if level == "full" else 300
    scale = 1 if level == "full" else 2
    ok = True
    msgs = []
    runs = []
    for alpha in (Fraction(0), Fraction(1, 2)):
        for radius in (40 // scale, 80 // scale):
            runs.append((alpha, 1, radius))
        for radius in (20 // scale, 40 // scale):
            runs.append((alpha, 2, radius))
    for alpha, d, radius in runs:
        rep = bounds.bounds_report(float(alpha), d, d)
        lb, ub = rep.exact_lower(), rep.exact_upper()
        est = _pc_run(alpha, d, d, radius, 2 * radius, replicas, 40 + d * 10 + radius)
        good = (est.point >= lb - est.halfwidth) and (est.point <= ub + est.halfwidth)
        ok &= good
        msgs.append(
            f"{'OK' if good else 'FAIL'} a={alpha} d={d} R={radius}: "
            f"q_hat={est.point:.4f} in [{lb:.4f},{ub:.4f}] +- {est.halfwidth:.4f}"
        )
    return ok, "; ".join(msgs)


# --- 5: coupled monotonicity ---------------------------------------------------

def _c05_monotonicity(level: str):
    replicas = 1500 if level == "full" else 300
    ok = True
    msgs = []

    def pair(tag, est_a, est_b):
        nonlocal ok
        slack = est_a.halfwidth + est_b.halfwidth
        good = est_b.point <= est_a.point + slack
        ok &= good
        msgs.append(f"{'OK' if good else 'FAIL'} {tag}: {est_a.point:.4f} -> {est_b.point:.4f} (slack {slack:.4f})")

    # alpha: 0 -> 1/2, nonincreasing, at d = 1 and d = 2
    r1 = 60 if level == "full" else 30
    a0 = _pc_run(Fraction(0), 1, 1, r1, 2 * r1, replicas, 101)
    a1 = _pc_run(Fraction(1, 2), 1, 1, r1, 2 * r1, replicas, 101)
    pair("alpha 0->1/2 (d=1)", a0, a1)
    r2 = 16 if level == "full" else 10
    b0 = _pc_run(Fraction(0), 2, 2, r2, 2 * r2, replicas, 102)
    b1 = _pc_run(Fraction(1, 2), 2, 2, r2, 2 * r2, replicas, 102)
    pair("alpha 0->1/2 (d=2)", b0, b1)

    # d: 1 -> 2 at alpha = 1/2, k = 1
    c0 = _pc_run(Fraction(1, 2), 1, 1, r2, 2 * r2, replicas, 103)
    c1 = _pc_run(Fraction(1, 2), 2, 1, r2, 2 * r2, replicas, 103)
    pair("d 1->2 (alpha=1/2, k=1)", c0, c1)

    # k: 1 -> 2 at d = 2, alpha = 1/2
    e0 = _pc_run(Fraction(1, 2), 2, 1, r2, 2 * r2, replicas, 104)
    e1 = _pc_run(Fraction(1, 2), 2, 2, r2, 2 * r2, replicas, 104)
    pair("k 1->2 (d=2, alpha=1/2)", e0, e1)
    return ok, "; ".join(msgs)


# --- 6: tail inequality ---------------------------------------------------------

def _c06_tail_inequality(level: str):
    tail_reps = 4000 if level == "full" else 800
    reach_reps = 600 if level == "full" else 150
    ok = True
    msgs = []
    for d in (1, 2):
        radius = 50 if d == 1 else 12
        cap = 25 if d == 1 else 12
        floor = FloorSpec("plane", make_tilt(Fraction(1, 2), d, k=d))
        window = Window(radius, cap)
        for q in (0.1, 0.2):
            for h in (3, 5):
                tail = mc.estimate_tail(q, floor, h, window, ReplicaPlan(tail_reps, derive_seed(BASE_SEED, 600 + d)))
                reach = mc.estimate_reach_size(q, floor, h - 2, window, ReplicaPlan(reach_reps, derive_seed(BASE_SEED, 700 + d)))
                se = math.hypot(_se(tail), _se(reach))
                good = tail.point <= reach.point + 3.0 * se
                ok &= good
                msgs.append(
                    f"{'OK' if good else 'FAIL'} d={d} q={q} h={h}: "
                    f"tail={tail.point:.4f} reach={reach.point:.4f} se={se:.4f}"
                )
    return ok, f"16 cells; {sum(m.startswith('OK') for m in msgs)} ok"


# --- 7: oracle equivalence -------------------------------------------------------

def _c07_oracles(level: str):
    per_op = 50 if level == "full" else 12
    rng = np.random.default_rng(20270811)
    ok = True
    fails = []

    for i in range(per_op):  # reachable_set: relaxation sweep + simple-path confirm
        d = 1 if i % 2 == 0 else 2
        alpha = Fraction([0, 1, 1, 2][i % 4], [1, 2, 3, 3][i % 4])
        tilt = make_tilt(alpha, d, k=int(rng.integers(0, d + 1)))
        floor = FloorSpec("plane" if i % 3 else "pyramid", tilt)
        window = Window(3 if d == 1 else 2, 4 if d == 1 else 3)
        field = ConfigField(float(rng.uniform(0.1, 0.7)), int(rng.integers(1 << 40)))
        h = int(rng.integers(0, 3))
        got = paths.reachable_set(field, floor, h, window)
        anchor = (0,) * (d + 1)
        swept, _, _ = oracles.sweep_reachable(field, floor, window, [anchor])
        certified = oracles.simple_path_certificates(field, floor, window, [anchor], swept)
        want = frozenset(v for v in swept if v[d] == floor.floor(v[:d]) + h)
        if got.members != want or not certified:
            ok = False
            fails.append(f"reachable_set #{i}")

    for i in range(per_op):  # surface_height: relaxation sweep + simple-path confirm
        d = 1 if i % 2 == 0 else 2
        alpha = Fraction([0, 1][i % 2], [1, 2][i % 2])
        floor = FloorSpec("plane", make_tilt(alpha, d, k=d))
        window = Window(2, 3)
        field = ConfigField(float(rng.uniform(0.1, 0.8)), int(rng.integers(1 << 40)))
        cols = paths.window_columns((0,) * (d + 1), d, window.radius)
        sources = [c + (floor.floor(c),) for c in cols]
        swept, _, _ = oracles.sweep_reachable(field, floor, window, sources)
        if not oracles.simple_path_certificates(field, floor, window, sources, swept):
            ok = False
            fails.append(f"surface loop-erasure #{i}")
        sf = paths.surface_field(field, floor, window)
        for c in cols:
            want = max([v[d] for v in swept if v[:d] == c] + [floor.floor(c)]) + 1
            if sf.heights[c] != want:
                ok = False
                fails.append(f"surface #{i} at {c}")

    for i in range(per_op):  # max_closed_dp vs path enumeration
        d = 2 if i % 2 == 0 else 3
        n = int(rng.integers(1, 8 if d == 2 else 6))
        field = ConfigField(float(rng.uniform(0.1, 0.9)), int(rng.integers(1 << 40)))
        if rho.max_closed_dp(field, d, n) != oracles.directed_max_enumerated(field, d, n):
            ok = False
            fails.append(f"max_closed_dp #{i}")

    for i in range(per_op):  # height_map vs path enumeration
        d = 2 if i % 2 == 0 else 3
        xbar = tuple(int(v) for v in rng.integers(0, 5 if d == 2 else 3, size=d))
        field = ConfigField(float(rng.uniform(0.1, 0.9)), int(rng.integers(1 << 40)))
        if rho.height_map(field, xbar) != oracles.height_map_enumerated(field, xbar):
            ok = False
            fails.append(f"height_map #{i}")

    for i in range(per_op):  # d1_column_height vs simple-path enumeration
        n = int(rng.integers(0, 4))
        cap = int(rng.integers(1, 4))
        field = ConfigField(float(rng.uniform(0.1, 0.7)), int(rng.integers(1 << 40)))
        if paths.d1_column_height(field, n, cap) != oracles.d1_column_enumerated(field, n, cap):
            ok = False
            fails.append(f"d1_column #{i}")

    detail = f"{5 * per_op} instances, zero mismatches" if ok else "mismatches: " + ", ".join(fails[:5])
    return ok, detail


# --- 8: d = 1 trend as alpha -> 1 -------------------------------------------------

def _c08_d1_trend(level: str):
    replicas = 2000 if level == "full" else 400
    radius = 400 if level == "full" else 120
    cap = radius // 2
    ok = True
    msgs = []
    for alpha in (Fraction(3, 5), Fraction(7, 10), Fraction(4, 5)):
        est = _pc_run(alpha, 1, 1, radius, cap, replicas, 800, bracket=(1e-4, 0.5))
        ratio = est.point / (1.0 - float(alpha))
        upper = (1.0 - float(alpha)) / (2.0 - float(alpha))
        good = 0.2 <= ratio <= 1.2 and est.point <= upper + est.halfwidth
        ok &= good
        msgs.append(
            f"{'OK' if good else 'FAIL'} a={alpha}: q_hat={est.point:.4f} "
            f"ratio={ratio:.3f} ub={upper:.4f}"
        )
    return ok, "; ".join(msgs)


# --- 9: coarse-box geometry --------------------------------------------------------

def _partition_violations(d: int, alpha: Fraction, n_sites: int, seed: int) -> int:
    """Vectorized partition check: every site lies in its computed box and in
    none of the 2(d+1) coordinate-adjacent boxes."""
    num, den = alpha.numerator, alpha.denominator
    rng = np.random.default_rng(seed)
    y = rng.integers(-1_000_000, 1_000_001, size=(n_sites, d + 1)).astype(np.int64)
    eta = np.ones(d, dtype=np.int64)  # canonical fully tilted pattern
    a = np.empty_like(y)
    for i in range(d):
        a[:, i] = np.floor_divide((den - num) * y[:, i], den)
    t = (y[:, :d] * eta).sum(axis=1)
    a[:, d] = y[:, d] - np.floor_divide(num * t, den)

    def contains(abox):
        okv = np.ones(n_sites, dtype=bool)
        for i in range(d):
            r = (den - num) * y[:, i] - abox[:, i] * den
            okv &= (0 <= r) & (r < den)
        r = den * (y[:, d] - abox[:, d]) - num * t
        okv &= (-den < r) & (r <= 0)
        return okv

    bad = int((~contains(a)).sum())
    for i in range(d + 1):
        for s in (-1, 1):
            nb = a.copy()
            nb[:, i] += s
            bad += int(contains(nb).sum())
    return bad


def _c09_geometry(level: str):
    n_sites = 100_000 if level == "full" else 10_000
    ok = True
    msgs = []
    total_bad = 0
    for d in (1, 2, 3):
        for alpha in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            total_bad += _partition_violations(d, alpha, n_sites, 90_000 + d)
    ok &= total_bad == 0
    msgs.append(f"partition: {total_bad} violations on 9x{n_sites} sites")

    # API-level spot check, routed through the module floor function
    rng = np.random.default_rng(77)
    spot_bad = 0
    for _ in range(200):
        d = int(rng.integers(1, 4))
        tilt = make_tilt(Fraction(int(rng.integers(0, 3)), 4), d, k=int(rng.integers(0, d + 1)))
        y = tuple(int(v) for v in rng.integers(-500, 501, size=d + 1))
        a = lattice.box_coords(y, tilt)
        if a[d] != y[d] - lattice.plane_floor(y[:d], tilt):
            spot_bad += 1
        if not lattice.box_contains(a, y, tilt):
            spot_bad += 1
    ok &= spot_bad == 0
    msgs.append(f"spot checks through plane_floor: {spot_bad} violations")

    # rate vanishes at the canonical-beta threshold
    worst = 0.0
    for d in (1, 2, 3):
        for k in range(1, d + 1):
            for alpha in (0.0, 0.25, 0.5, 0.75):
                for eps in (0.05, bounds.epsilon_opt(k, d)):
                    gamma = 1.0 / (4.0 * (k + 1))
                    beta = (1.0 + eps) / gamma * math.log(4.0 * d + 2.0)
                    q_thr = bounds.cg_threshold(alpha, d, k, eps, gamma)
                    rate = bounds.cg_exponent(alpha, d, k, q_thr, beta, gamma)
                    worst = max(worst, abs(rate))
    ok &= worst < 1e-12
    msgs.append(f"cg rate at threshold: |rate| <= {worst:.2e}")
    return ok, "; ".join(msgs)


# --- 10: oriented percolation and the bridge -----------------------------------------

def _c10_rho(level: str):
    replicas = 500 if level == "full" else 120
    n = 60
    d = 2
    ok = True
    msgs = []

    est = rho.gamma_estimate(0.3, d, n, replicas, derive_seed(BASE_SEED, 1000))
    good = est.gamma_hat >= 0.3 - 3.0 * est.stderr
    ok &= good
    msgs.append(f"{'OK' if good else 'FAIL'} gamma(0.3)={est.gamma_hat:.4f}+-{est.stderr:.4f}")

    mono_bad = 0
    for r in range(replicas):
        seed = derive_seed(derive_seed(BASE_SEED, 1001), r)
        prev = None
        for q in (0.2, 0.35, 0.5):
            v = rho.max_closed_dp(ConfigField(q, seed), d, n)
            if prev is not None and v < prev:
                mono_bad += 1
            prev = v
    ok &= mono_bad == 0
    msgs.append(f"coupled monotonicity violations: {mono_bad}")

    bridge_bad = 0
    for r in range(replicas):
        field = ConfigField(0.35, derive_seed(derive_seed(BASE_SEED, 1002), r))
        b = rho.rho_lambda_bridge(field, d, n)
        if not b.admissible or b.terminal_height > b.height_bound + 1e-9:
            bridge_bad += 1
    ok &= bridge_bad == 0
    msgs.append(f"bridge replay violations: {bridge_bad} of {replicas}")
    return ok, "; ".join(msgs)


CRITERIA = (
    (1, "exact-formula goldens", _c01_exact_goldens),
    (2, "E[T] series vs Monte Carlo", _c02_expected_T),
    (3, "sharpening inequality", _c03_sharpening),
    (4, "bounds sandwich + MC placement", _c04_sandwich),
    (5, "coupled monotonicity suite", _c05_monotonicity),
    (6, "tail inequality", _c06_tail_inequality),
    (7, "oracle equivalence", _c07_oracles),
    (8, "d=1 trend toward degenerate tilt", _c08_d1_trend),
    (9, "coarse-box geometry", _c09_geometry),
    (10, "oriented percolation bridge", _c10_rho),
)


def run_criterion(number: int, level: str = "quick") -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            passed, details = fn(level)
            return CriterionResult(num, name, passed, details, time.perf_counter() - t0)
    raise ValueError(f"no criterion numbered {number}")


def run(level: str = "quick", numbers=None) -> list:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    results = []
    for num, name, fn in CRITERIA:
        if numbers is not None and num not in numbers:
            continue
        results.append(run_criterion(num, level))
    return results
