"""Closed-form and numerically solved bounds on the critical probability.

Everything here is deterministic arithmetic on (alpha, d, k): lower bounds
from path-counting over simplex weights and from coarse-graining, upper
bounds from the shell hitting-time criterion, plus the root solvers they
need.  Monte Carlo never enters; the estimators are checked against these
values elsewhere.

Conventions: q = 1 - p is the closed-site probability, bounds are stated for
q_L; degenerate simplex terms use 1/0 = infinity so that k = 0 and k = d need
no special-casing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

EXACT = "exact"
ASYMP_D = "asymptotic-in-d"
ASYMP_ALPHA = "asymptotic-in-alpha"

_ROOT_TOL = 1e-12


def _check_alpha_d(alpha: float, d: int) -> None:
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")


@dataclass(frozen=True)
class SimplexWeights:
    """Four positive weights summing to one, used by the path-count bounds."""

    p1: float
    p2: float
    p3: float
    p4: float

    def __post_init__(self):
        ps = (self.p1, self.p2, self.p3, self.p4)
        if any(not (0.0 < p < 1.0) for p in ps):
            raise ValueError(f"weights must lie strictly in (0,1), got {ps}")
        if abs(sum(ps) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got sum={sum(ps)!r}")

    def as_tuple(self):
        return (self.p1, self.p2, self.p3, self.p4)


@dataclass(frozen=True)
class SeriesBoundParams:
    """Geometric-series parameters of the expected-path-count bound."""

    delta: float
    C: float
    convergent: bool


@dataclass(frozen=True)
class BoundEntry:
    name: str
    kind: str  # "lower" | "upper"
    value: float
    validity: str  # EXACT | ASYMP_D | ASYMP_ALPHA
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BoundsReport:
    alpha: float
    d: int
    k: int
    entries: tuple

    def exact_lower(self) -> float:
        vals = [e.value for e in self.entries if e.kind == "lower" and e.validity == EXACT]
        return max(vals) if vals else 0.0

    def exact_upper(self) -> float:
        vals = [e.value for e in self.entries if e.kind == "upper" and e.validity == EXACT]
        return min(vals) if vals else 1.0

    def get(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


# --- Lower bounds -----------------------------------------------------------

def lb_general(alpha: float, d: int) -> float:
    """Fully tilted lower bound: q_L(alpha, d, d) >= (1/2) (4d)^(-1/(1-alpha))."""
    _check_alpha_d(alpha, d)
    return 0.5 * (4.0 * d) ** (-1.0 / (1.0 - alpha))


def lb_simplex(alpha: float, d: int, k: int, w: SimplexWeights) -> float:
    """Path-count lower bound for given simplex weights: the minimum of

        (1/k) p1 sqrt(p2 p3),   p1 (p3/k)^(1/(1-alpha)),   p1 p4 / (2(d-k)),

    with the 1/0 = infinity convention at k = 0 and k = d."""
    _check_alpha_d(alpha, d)
    if not 0 <= k <= d:
        raise ValueError(f"k must satisfy 0 <= k <= d, got k={k}, d={d}")
    p1, p2, p3, p4 = w.as_tuple()
    t1 = p1 * math.sqrt(p2 * p3) / k if k > 0 else math.inf
    t2 = p1 * (p3 / k) ** (1.0 / (1.0 - alpha)) if k > 0 else math.inf
    t3 = p1 * p4 / (2.0 * (d - k)) if d > k else math.inf
    return min(t1, t2, t3)


def _ascend_simplex(objective, seeds, floor_w=1e-9, passes=60, tol=1e-13):
    """Deterministic coordinate ascent on the open 4-simplex.

    Moves mass between weight pairs with a shrinking step ladder; purely a
    local improver, but seeded from a grid it reliably beats any hand-picked
    weights (which is all the bounds need, and what the tests assert).
    """
    best_w, best_v = None, -math.inf
    for w in seeds:
        if best_w is None or objective(w) > best_v:
            best_w, best_v = list(w), objective(w)
    step = 0.25
    for _ in range(passes):
        improved = False
        for i in range(4):
            for j in range(4):
                if i == j:
                    continue
                delta = min(step, best_w[j] - floor_w)
                if delta <= 0:
                    continue
                cand = list(best_w)
                cand[i] += delta
                cand[j] -= delta
                v = objective(cand)
                if v > best_v + tol:
                    best_w, best_v = cand, v
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-10:
                break
    return best_w, best_v


def _simplex_grid(resolution=8):
    seeds = []
    n = resolution
    for a in range(1, n):
        for b in range(1, n - a):
            for c in range(1, n - a - b):
                dd = n - a - b - c
                if dd >= 1:
                    seeds.append([a / n, b / n, c / n, dd / n])
    return seeds


def _weights_of(w_list) -> SimplexWeights:
    p1, p2, p3, p4 = w_list
    s = p1 + p2 + p3 + p4
    return SimplexWeights(p1 / s, p2 / s, p3 / s, p4 / s)


def lb_simplex_opt(alpha: float, d: int, k: int):
    """Best path-count lower bound over the simplex.

    Returns (value, weights).  Deterministic: grid seeding plus coordinate
    ascent; dominates every specific weight choice used by the closed-form
    bounds (asserted in tests)."""
    _check_alpha_d(alpha, d)

    def objective(wl):
        p1, p2, p3, p4 = wl
        t1 = p1 * math.sqrt(p2 * p3) / k if k > 0 else math.inf
        t2 = p1 * (p3 / k) ** (1.0 / (1.0 - alpha)) if k > 0 else math.inf
        t3 = p1 * p4 / (2.0 * (d - k)) if d > k else math.inf
        return min(t1, t2, t3)

    w, v = _ascend_simplex(objective, _simplex_grid())
    weights = _weights_of(w)
    return lb_simplex(alpha, d, k, weights), weights


def lb_regime(alpha: float, c: float, regime: str, w: SimplexWeights | None = None) -> float:
    """Asymptotic lower-bound prefactor when the tilted-axis count scales
    with the dimension.

    regime 'a' (k = o(d^(1-alpha))): prefactor 1/8 on d^-1.
    regime 'b' (k ~ c d^(1-alpha)): prefactor C(c, alpha) on d^-1, from the
      two (three at alpha = 0) surviving simplex terms; C(c, 0) = C(0, alpha)
      = 1/8 exactly, interior values optimized over the simplex unless
      explicit weights are supplied.
    regime 'c' (k ~ c d): prefactor (1/4)(1-alpha) c^(-1/(1-alpha)) on
      d^(-1/(1-alpha)); needs alpha in (0, 1).
    """
    if regime == "a":
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"regime 'a' needs c in [0, 1], got {c}")
        return 0.125
    if regime == "b":
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"regime 'b' needs c in [0, 1], got {c}")
        if not (0.0 <= alpha < 1.0):
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")

        def objective(wl):
            p1, p2, p3, p4 = wl
            t3 = 0.5 * p1 * p4 / (1.0 - c) if c < 1.0 else math.inf
            if alpha == 0.0:
                if c == 0.0:
                    return t3
                return min(p1 * math.sqrt(p2 * p3) / c, p1 * p3 / c, t3)
            if c == 0.0:
                return t3
            return min(p1 * (p3 / c) ** (1.0 / (1.0 - alpha)), t3)

        if w is not None:
            return objective(list(w.as_tuple()))
        if alpha == 0.0 or c == 0.0:
            return 0.125  # boundary cases reduce to the untilted prefactor
        _, v = _ascend_simplex(objective, _simplex_grid())
        return v
    if regime == "c":
        if not 0.0 < c <= 1.0:
            raise ValueError(f"regime 'c' needs c in (0, 1], got {c}")
        if not (0.0 < alpha < 1.0):
            raise ValueError(f"regime 'c' needs alpha in (0, 1), got {alpha}")
        return 0.25 * (1.0 - alpha) * c ** (-1.0 / (1.0 - alpha))
    raise ValueError(f"regime must be 'a', 'b' or 'c', got {regime!r}")


def lb_alpha_const(k: int, d: int, eps: float) -> float:
    """Coarse-graining constant C(k, d, eps); the tilt bound is
    C(k, d, eps) (1-alpha)^k."""
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    logd = math.log(4.0 * d + 2.0)
    return eps * logd / math.expm1((1.0 + eps) * 4.0 * (k + 1) * logd) * 2.0 ** (-k)


def lb_alpha(alpha: float, d: int, k: int, eps: float | None = None) -> float:
    """Near-degenerate-tilt lower bound C(k, d, eps) (1-alpha)^k, with the
    optimal eps by default."""
    _check_alpha_d(alpha, d)
    if eps is None:
        eps = epsilon_opt(k, d)
    return lb_alpha_const(k, d, eps) * (1.0 - alpha) ** k


def epsilon_opt(k: int, d: int) -> float:
    """Maximizer of C(k, d, .): eps = (1+h)/A with A = 4(k+1) log(4d+2) and
    h the solution of h e^h = -e^(-1-A) on (-1, 0) (principal Lambert
    branch; the other real branch gives eps < 0).  Safeguarded Newton."""
    if k < 1 or d < 1:
        raise ValueError(f"need k, d >= 1, got k={k}, d={d}")
    a = 4.0 * (k + 1) * math.log(4.0 * d + 2.0)
    target = -math.exp(-1.0 - a)
    h = _solve_we(target)
    return (1.0 + h) / a


def _solve_we(target: float) -> float:
    """Solve h e^h = target for target in (-1/e, 0), h in (-1, 0)."""
    lo, hi = -1.0 + 1e-15, -1e-300
    h = max(target, -0.5)  # h ~ target for small |target|
    for _ in range(100):
        f = h * math.exp(h) - target
        if f > 0:
            hi = h
        else:
            lo = h
        fp = (1.0 + h) * math.exp(h)
        step = f / fp
        h_new = h - step
        if not (lo < h_new < hi):
            h_new = 0.5 * (lo + hi)
        if abs(h_new - h) < 1e-17 and abs(f) < _ROOT_TOL:
            h = h_new
            break
        h = h_new
    if abs(h * math.exp(h) - target) > _ROOT_TOL:
        raise ArithmeticError("Lambert-type solve did not reach tolerance")
    return h


# --- Upper bounds -----------------------------------------------------------

def ub_factorial(alpha: float, d: int) -> float:
    """Fully tilted upper bound d!(1-alpha)^d / (1 + d!(1-alpha)^d)."""
    _check_alpha_d(alpha, d)
    x = math.factorial(d) * (1.0 - alpha) ** d
    return x / (1.0 + x)


def ub_factorial_weak(alpha: float, d: int) -> float:
    """The weaker companion value d!(1-alpha)^d."""
    _check_alpha_d(alpha, d)
    return math.factorial(d) * (1.0 - alpha) ** d


def theta_constant(rho: float):
    """Oriented-percolation constant: returns (theta, R(rho)) with theta the
    unique root of theta e^theta / (e^theta - 1) = 1/rho and
    R(rho) = theta^(1/rho) / (e^theta - 1); R(1) = 1 via the theta -> 0
    limit.  The Lipschitz constant is C(alpha) = R(1 - alpha)."""
    if not (0.0 < rho <= 1.0):
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if rho == 1.0:
        return 0.0, 1.0
    target = 1.0 / rho

    def g(t):
        # theta e^theta/(e^theta - 1) = theta / (1 - e^-theta), stable form
        return t / (-math.expm1(-t))

    lo, hi = 1e-12, 2.0
    while g(hi) < target:
        hi *= 2.0
    theta = 0.5 * (lo + hi)
    for _ in range(200):
        val = g(theta)
        if val > target:
            hi = theta
        else:
            lo = theta
        em = -math.expm1(-theta)
        gp = (em - theta * math.exp(-theta)) / (em * em)
        step = (val - target) / gp
        cand = theta - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - theta) < 1e-16 and abs(val - target) < _ROOT_TOL:
            theta = cand
            break
        theta = cand
    if abs(g(theta) - target) > _ROOT_TOL:
        raise ArithmeticError("theta solve did not reach tolerance")
    r = theta ** (1.0 / rho) / math.expm1(theta)
    return theta, r


def lipschitz_theta_const(alpha: float) -> float:
    """C(alpha) = R(1 - alpha), the d -> infinity prefactor of q_L."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    return theta_constant(1.0 - alpha)[1]


def shell_ball_size(d: int, j: int) -> int:
    """Number of base points in N_0^d with coordinate sum <= j."""
    return math.comb(j + d, d)


def shell_radius_of(d: int, i: int) -> int:
    """Smallest j with ball size (excluding the origin) >= i; generalized
    inverse of ``shell_ball_size``."""
    j = 0
    while shell_ball_size(d, j) - 1 < i:
        j += 1
    return j


def expected_T_exact(q: float, d: int, tol: float = 1e-15, cap: float | None = None) -> float:
    """Exact series for the mean shell hitting time:
    E[T] = sum_m p^binom(m+d, d) with p = 1 - q.

    Truncates once the geometric tail certificate drops below
    tol * 1e-3 * partial sum; terms decay superexponentially.  ``cap``
    short-circuits the sum once the partial total reaches it (used by the
    threshold bisection, which only needs the comparison against a target)."""
    if not (0.0 < q <= 1.0):
        if q == 0.0:
            raise ValueError("E[T] diverges at q = 0 (no closed sites)")
        raise ValueError(f"q must lie in (0, 1], got {q}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if q == 1.0:
        return 0.0
    p = 1.0 - q
    logp = math.log1p(-q)  # log(1 - q), accurate for tiny q
    total = 0.0
    m = 0
    while True:
        b = shell_ball_size(d, m)
        le = logp * b if b < 10**300 else -math.inf
        if le < -745.0:
            term = 0.0
        elif q < 1e-9:
            term = math.exp(le)  # p rounds to 1.0 here; use the log form
        else:
            term = math.pow(p, float(b))
        total += term
        if cap is not None and total >= cap:
            return total
        # tail <= term * p / q since exponents grow by at least 1 per shell
        if term * (1.0 - q) / q < tol * 1e-3 * max(total, 1e-300):
            break
        m += 1
        if m > 10_000_000:  # unreachable for q > 0; defensive
            raise ArithmeticError("series failed to converge")
    return total


def ub_expected_T(alpha: float, d: int) -> float:
    """Sharp shell-criterion threshold: the q above which E[T] < 1/(1-alpha).

    Found by bisection on the exact series; always <= ub_factorial (the
    factorial bound applies one extra convexity step), with equality at
    d = 1 where both reduce to (1-alpha)/(2-alpha)."""
    _check_alpha_d(alpha, d)
    target = 1.0 / (1.0 - alpha)
    cap = 2.0 * target
    lo, hi = 1e-30, 1.0 - 1e-15
    if expected_T_exact(lo, d, cap=cap) < target:
        raise ArithmeticError(f"threshold below bracket at (alpha={alpha}, d={d})")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if expected_T_exact(mid, d, cap=cap) < target:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


# --- Series bound and coarse-graining exponent ------------------------------

def series_params(alpha: float, d: int, k: int, q: float, w: SimplexWeights) -> SeriesBoundParams:
    """Ratio delta = q/p1 and prefactor C of the expected-path-count bound
    E|reachable(h)| <= C delta^(h-1); convergent iff q is below the simplex
    minimum (all three geometric factors finite)."""
    _check_alpha_d(alpha, d)
    if not 0 <= k <= d:
        raise ValueError(f"k must satisfy 0 <= k <= d, got k={k}, d={d}")
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"q must lie in [0, 1], got {q}")
    p1, p2, p3, p4 = w.as_tuple()
    delta = q / p1
    ok = delta < 1.0
    f1 = f2 = f3 = 1.0
    if k > 0:
        a1 = p1 * p1 * p2 * p3
        ok = ok and q * q * k * k < a1
        a2 = p1 ** (1.0 - alpha) * p3
        ok = ok and q ** (1.0 - alpha) * k < a2
        if ok:
            f1 = a1 / (a1 - q * q * k * k)
            f2 = a2 / (a2 - q ** (1.0 - alpha) * k)
    if d > k:
        a3 = p1 * p4
        ok = ok and 2.0 * (d - k) * q < a3
        if ok:
            f3 = a3 / (a3 - 2.0 * (d - k) * q)
    if not ok:
        return SeriesBoundParams(delta, math.inf, False)
    return SeriesBoundParams(delta, 2.0 ** d * f1 * f2 * f3, True)


def series_bound(alpha: float, d: int, k: int, q: float, w: SimplexWeights, h: int) -> float:
    """Expected-path-count bound C delta^(h-1) at level h, or inf when the
    series diverges (q at or above the simplex minimum)."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    sp = series_params(alpha, d, k, q, w)
    if not sp.convergent:
        return math.inf
    return sp.C * sp.delta ** (h - 1)


def cg_exponent(alpha: float, d: int, k: int, q: float, beta: float, gamma: float) -> float:
    """Per-step large-deviation rate for coarse-grained paths:
    log(4d+2) - beta*gamma + q (e^beta - 1) ((2-alpha)/(1-alpha))^k."""
    _check_alpha_d(alpha, d)
    if beta <= 0.0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if not 0 <= k <= d:
        raise ValueError(f"k must satisfy 0 <= k <= d, got k={k}, d={d}")
    logd = math.log(4.0 * d + 2.0)
    ratio = ((2.0 - alpha) / (1.0 - alpha)) ** k
    return logd - beta * gamma + q * math.expm1(beta) * ratio


def cg_threshold(alpha: float, d: int, k: int, eps: float, gamma: float | None = None) -> float:
    """The q below which the canonical-beta rate is negative:
    eps log(4d+2) / (e^((1+eps)/gamma log(4d+2)) - 1) * ((1-alpha)/(2-alpha))^k.
    gamma defaults to 1/(4(k+1)), the proof's coarse-graining choice."""
    _check_alpha_d(alpha, d)
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if gamma is None:
        gamma = 1.0 / (4.0 * (k + 1))
    logd = math.log(4.0 * d + 2.0)
    denom = math.expm1((1.0 + eps) / gamma * logd)
    return eps * logd / denom * ((1.0 - alpha) / (2.0 - alpha)) ** k


def gh12_reference(d: int):
    """Untilted reference pair: exact lower 1/(8d), asymptotic upper 1/(2d)."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return (
        BoundEntry("gh12_lower", "lower", 1.0 / (8.0 * d), EXACT, {"d": d}),
        BoundEntry("gh12_upper", "upper", 1.0 / (2.0 * d), ASYMP_D, {"d": d}),
    )


# --- Aggregate report -------------------------------------------------------

def bounds_report(alpha: float, d: int, k: int) -> BoundsReport:
    """All applicable bounds at one (alpha, d, k), tagged exact or asymptotic.

    Exact bounds stated for the fully tilted case transfer through the
    monotonicity of q_L: decreasing in k gives lower bounds from (alpha, d, d),
    decreasing in d gives upper bounds from (alpha, k, k); k = 0 reduces to
    the untilted (alpha = 0, d = 1) upper bound the same way.  Raises if an
    exact lower exceeds an exact upper."""
    _check_alpha_d(alpha, d)
    if not 0 <= k <= d:
        raise ValueError(f"k must satisfy 0 <= k <= d, got k={k}, d={d}")
    entries = []
    entries.append(
        BoundEntry("lb_general", "lower", lb_general(alpha, d), EXACT,
                   {"via": "k-monotonicity from (alpha, d, d)"})
    )
    val, w = lb_simplex_opt(alpha, d, k)
    entries.append(BoundEntry("lb_simplex_opt", "lower", val, EXACT, {"weights": w.as_tuple()}))
    if k >= 1:
        eps = epsilon_opt(k, d)
        entries.append(
            BoundEntry("lb_alpha", "lower", lb_alpha(alpha, d, k, eps), EXACT, {"eps": eps})
        )
    d_eff = max(k, 1)
    alpha_eff = alpha if k >= 1 else 0.0
    entries.append(
        BoundEntry("ub_factorial", "upper", ub_factorial(alpha_eff, d_eff), EXACT,
                   {"d_eff": d_eff, "alpha_eff": alpha_eff})
    )
    entries.append(
        BoundEntry("ub_expected_T", "upper", ub_expected_T(alpha_eff, d_eff), EXACT,
                   {"d_eff": d_eff, "alpha_eff": alpha_eff})
    )
    theta, r = theta_constant(1.0 - alpha)
    entries.append(
        BoundEntry("C_alpha_theta", "upper", r, ASYMP_D,
                   {"theta": theta, "scale": "d^(-1/(1-alpha))", "k": "d"})
    )
    if alpha == 0.0 or k == 0:
        entries.extend(gh12_reference(d))
    report = BoundsReport(alpha, d, k, tuple(entries))
    if report.exact_lower() > report.exact_upper() + 1e-15:
        raise ArithmeticError(
            f"bounds sandwich violated at (alpha={alpha}, d={d}, k={k}): "
            f"lower {report.exact_lower()} > upper {report.exact_upper()}"
        )
    return report
