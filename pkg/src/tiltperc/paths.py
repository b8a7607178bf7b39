"""Admissible-path reachability engine.

A path step is either one up (+e_{d+1}) or one down-diagonal (-e_{d+1} +- e_j);
a path is admissible when every up step lands on a closed site.  This module
is the exact reference implementation: plain breadth-first fixed points over
explicit site tuples, workable on desk-scale windows and cross-checked against
brute-force path enumeration.  The Monte Carlo layer uses the numba kernels in
``_kernels`` instead, which are tested for bit-equality against this module.

Finite truncation: all searches run inside a window (L-infinity radius R in
the base coordinates around the anchor, relative height within +-H of the
floor).  Window-restricted reachability is a monotone lower bound of the
infinite-lattice notion; contact with the window boundary is reported via the
``truncated`` flag, and reaching relative height H via the cap flag.

Path distinctness: the engine computes walk reachability.  Erasing a loop
from a walk keeps every remaining up step landing on the same closed site, so
loop-free path existence coincides with walk reachability; the equivalence is
enforced against a simple-path enumeration oracle in the tests.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import CensoredWalkError, InvalidWindowError
from .lattice import ConfigField, FloorSpec, TiltSpec


def lambda_step_set(d: int) -> frozenset:
    """The 2d+1 admissible step vectors in Z^(d+1)."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    steps = {tuple([0] * d + [1])}
    for j in range(d):
        for s in (1, -1):
            v = [0] * (d + 1)
            v[j] = s
            v[d] = -1
            steps.add(tuple(v))
    return frozenset(steps)


@dataclass(frozen=True)
class Window:
    """Finite search region: base radius R around the anchor, height cap H
    above/below the floor."""

    radius: int
    height_cap: int
    anchor: tuple | None = None

    def __post_init__(self):
        if self.radius < 1 or self.height_cap < 1:
            raise InvalidWindowError(
                f"window needs radius >= 1 and height_cap >= 1, "
                f"got R={self.radius}, H={self.height_cap}"
            )


@dataclass(frozen=True)
class ReachSet:
    """Sites on the level-h copy of the floor reachable from the anchor."""

    h: int
    members: frozenset
    truncated: bool


@dataclass(frozen=True)
class SurfaceField:
    """Finite-window minimal-surface heights; ``diverged`` marks cap contact."""

    heights: dict
    diverged: bool


@dataclass(frozen=True)
class ReversedWalk:
    """Trajectory of the shell-renewal walk: (Y_n, X_n, H(n)) per round."""

    trajectory: tuple
    iota: tuple


@dataclass(frozen=True)
class ShellHitTime:
    """Index of the first diagonal shell containing a closed site."""

    value: int | None
    censored: bool
    shell_budget: int


def _anchor(window: Window, d: int) -> tuple:
    if window.anchor is not None:
        a = tuple(window.anchor)
        if len(a) != d + 1:
            raise InvalidWindowError(f"anchor has length {len(a)}, expected {d + 1}")
        return a
    return (0,) * (d + 1)


def _in_window(site, anchor, floor: FloorSpec, window: Window) -> bool:
    d = len(site) - 1
    for i in range(d):
        if abs(site[i] - anchor[i]) > window.radius:
            return False
    return abs(site[d] - floor.floor(site[:d])) <= window.height_cap


def _explore(field: ConfigField, floor: FloorSpec, window: Window, sources):
    """BFS fixed point; returns (visited set, truncated flag, capped flag)."""
    d = floor.tilt.d
    anchor = _anchor(window, d)
    steps = lambda_step_set(d)
    visited = set()
    queue = deque()
    truncated = False
    capped = False
    for s in sources:
        s = tuple(s)
        if not _in_window(s, anchor, floor, window):
            raise InvalidWindowError(f"source site {s} lies outside the window")
        if s not in visited:
            visited.add(s)
            queue.append(s)
            if s[d] - floor.floor(s[:d]) == window.height_cap:
                capped = True
    while queue:
        u = queue.popleft()
        for dv in steps:
            v = tuple(a + b for a, b in zip(u, dv))
            if dv[d] == 1 and not field.is_closed(v):
                continue  # up step must land on a closed site
            if not _in_window(v, anchor, floor, window):
                truncated = True
                continue
            if v not in visited:
                visited.add(v)
                queue.append(v)
                if v[d] - floor.floor(v[:d]) == window.height_cap:
                    capped = True
    return visited, truncated, capped


def reachable_set(field: ConfigField, floor: FloorSpec, h: int, window: Window) -> ReachSet:
    """Sites on level h of the floor reachable from the anchor by admissible
    paths inside the window.  Down-diagonal steps are unconditional; up steps
    require a closed target."""
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    d = floor.tilt.d
    anchor = _anchor(window, d)
    visited, truncated, _ = _explore(field, floor, window, [anchor])
    members = frozenset(
        v for v in visited if v[d] == floor.floor(v[:d]) + h
    )
    return ReachSet(h, members, truncated)


def reach_size(field: ConfigField, floor: FloorSpec, h: int, window: Window) -> int:
    """Cardinality of the reachable set on level h."""
    return len(reachable_set(field, floor, h, window).members)


def surface_field(field: ConfigField, floor: FloorSpec, window: Window) -> SurfaceField:
    """Finite-window minimal-surface heights F_R over every column.

    F_R(xbar) is one more than the highest site of column xbar reachable from
    some floor site inside the window; at least floor(xbar) + 1.  Monotone
    nondecreasing in R and H (more seeds, more room).
    """
    d = floor.tilt.d
    anchor = _anchor(window, d)
    cols = window_columns(anchor, d, window.radius)
    sources = [c + (floor.floor(c),) for c in cols]
    visited, _, capped = _explore(field, floor, window, sources)
    best = {c: floor.floor(c) for c in cols}
    for v in visited:
        c = v[:d]
        if v[d] > best[c]:
            best[c] = v[d]
    heights = {c: best[c] + 1 for c in cols}
    return SurfaceField(heights, capped)


def surface_height(field: ConfigField, floor: FloorSpec, xbar, window: Window):
    """(F_R(xbar), diverged flag) for one column."""
    xbar = tuple(xbar)
    d = floor.tilt.d
    anchor = _anchor(window, d)
    if any(abs(xbar[i] - anchor[i]) > window.radius for i in range(d)):
        raise InvalidWindowError(f"column {xbar} lies outside the window")
    sf = surface_field(field, floor, window)
    return sf.heights[xbar], sf.diverged


def window_columns(anchor, d, radius):
    """All base points of the window around the anchor."""
    from itertools import product

    rng = range(-radius, radius + 1)
    return [tuple(anchor[i] + o[i] for i in range(d)) for o in product(rng, repeat=d)]


def is_admissible_lambda_path(field: ConfigField, path) -> bool:
    """Check that consecutive sites differ by admissible steps and that every
    up step lands on a closed site (walk semantics: revisits allowed)."""
    if not path:
        return False
    d = len(path[0]) - 1
    steps = lambda_step_set(d)
    for u, v in zip(path, path[1:]):
        dv = tuple(b - a for a, b in zip(u, v))
        if dv not in steps:
            return False
        if dv[d] == 1 and not field.is_closed(v):
            return False
    return True


# --- Diagonal shells and the renewal walk ----------------------------------

def shell_sites(d: int, m: int):
    """Base points of N_0^d with coordinate sum m, in lexicographic order."""
    if d == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in shell_sites(d - 1, m - first):
            yield (first,) + rest


def diagonal_ordering(d: int, max_shell: int):
    """(global index, base point) pairs, ordered by 1-norm then lexicographic."""
    i = 0
    for m in range(max_shell + 1):
        for z in shell_sites(d, m):
            yield i, z
            i += 1


def sample_shell_time(field: ConfigField, d: int, shell_budget: int) -> ShellHitTime:
    """First shell index m <= budget whose diagonal copy holds a closed site.

    Shell m consists of the sites (zbar, m) with zbar in N_0^d, |zbar|_1 = m;
    censoring (no closed site up to the budget) is a value, not an error.
    """
    if shell_budget < 0:
        raise ValueError(f"shell_budget must be >= 0, got {shell_budget}")
    for m in range(shell_budget + 1):
        for z in shell_sites(d, m):
            if field.is_closed(z + (m,)):
                return ShellHitTime(m, False, shell_budget)
    return ShellHitTime(None, True, shell_budget)


def reversed_walk(field: ConfigField, tilt: TiltSpec, n_steps: int, shell_budget: int) -> ReversedWalk:
    """Renewal walk tracking how far admissible paths can start below the plane.

    Needs the fully tilted case (k = d).  Each round scans the diagonal shells
    around the current position Y_n in the fixed 1-norm/lexicographic order,
    jumps to the first closed site X_{n+1} = (zbar, |zbar|_1), and sets
    Y_{n+1} = Y_n + X_{n+1} - e_{d+1}.  H(n) is the depth of Y_n below the
    plane: floor(alpha * |Ybar_n|_1) - height(Y_n), equivalently
    floor(alpha * sum |Xbar_j|) - sum |Xbar_j| + n.  Its drift per round is
    (alpha - 1) E[T] + 1, positive exactly when E[T] < 1/(1-alpha).
    """
    if tilt.k != tilt.d:
        raise ValueError(f"reversed_walk needs k = d, got k={tilt.k}, d={tilt.d}")
    d = tilt.d
    num, den = tilt.alpha.numerator, tilt.alpha.denominator
    y = (0,) * (d + 1)
    sum_norm = 0
    trajectory = []
    iota = []
    for n in range(1, n_steps + 1):
        hit = None
        for idx, z in diagonal_ordering(d, shell_budget):
            cand = tuple(y[i] + z[i] for i in range(d)) + (y[d] + sum(z),)
            if field.is_closed(cand):
                hit = (idx, z)
                break
        if hit is None:
            raise CensoredWalkError(
                f"no closed diagonal site within {shell_budget} shells at round {n}",
                tuple(trajectory),
            )
        idx, z = hit
        m = sum(z)
        x = z + (m,)
        y = tuple(y[i] + z[i] for i in range(d)) + (y[d] + m - 1,)
        sum_norm += m
        depth = (num * sum_norm) // den - sum_norm + n
        trajectory.append((y, x, depth))
        iota.append(idx)
    return ReversedWalk(tuple(trajectory), tuple(iota))


def reversed_walk_forward_path(walk: ReversedWalk, n: int | None = None):
    """Forward admissible path from Y_n back to the origin.

    Round j contributed the closed site C_j = Y_{j-1} + X_j; the forward
    segment climbs one up step into C_j and then takes |Xbar_j| down-diagonal
    steps.  Replaying the concatenation through ``is_admissible_lambda_path``
    asserts the walk's defining property.
    """
    traj = walk.trajectory if n is None else walk.trajectory[:n]
    if not traj:
        return []
    d = len(traj[0][0]) - 1
    path = [traj[-1][0]]
    for j in range(len(traj) - 1, -1, -1):
        y_prev = traj[j - 1][0] if j > 0 else (0,) * (d + 1)
        x = traj[j][1]
        closed_site = tuple(y_prev[i] + x[i] for i in range(d + 1))
        cur = path[-1]
        assert cur == tuple(closed_site[i] for i in range(d)) + (closed_site[d] - 1,)
        path.append(closed_site)  # up step into the closed site
        cur = closed_site
        for i in range(d):
            for _ in range(x[i]):
                cur = tuple(
                    cur[a] - (1 if a == i else 0) - (1 if a == d else 0)
                    for a in range(d + 1)
                )
                path.append(cur)
        assert cur == y_prev
    return path


# --- d = 1 restricted-column maxima ----------------------------------------

def d1_column_height(field: ConfigField, n: int, height_cap: int) -> int:
    """Highest admissible-path height at column -n, columns restricted to
    [-n, 0].

    Search box: columns -n..0, absolute heights in [-n - height_cap,
    height_cap]; the result is capped at height_cap.  All closed -> cap;
    all open -> -n (pure descent).
    """
    if height_cap < 1:
        raise ValueError(f"invalid cap: height_cap must be >= 1, got {height_cap}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    lo = -n - height_cap
    hi = height_cap
    visited = {(0, 0)}
    queue = deque([(0, 0)])
    while queue:
        c, h = queue.popleft()
        cand = []
        up = (c, h + 1)
        if h + 1 <= hi and field.is_closed(up):
            cand.append(up)
        for s in (-1, 1):
            c2 = c + s
            if -n <= c2 <= 0 and h - 1 >= lo:
                cand.append((c2, h - 1))
        for v in cand:
            if v not in visited:
                visited.add(v)
                queue.append(v)
    return max(h for c, h in visited if c == -n)
