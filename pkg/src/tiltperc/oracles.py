"""Independent brute-force references for the verification suite.

Deliberately naive re-implementations with different algorithmics than the
engines they check: simple-path depth-first enumeration (which also certifies
that loop-free path existence matches walk reachability), a backward
relaxation sweep for larger windows, and direct path enumeration for the
oriented-percolation quantities.  Exponential in the worst case; only ever
run on tiny instances.
"""
from __future__ import annotations

from itertools import product

from .lattice import ConfigField, FloorSpec, TiltSpec
from .paths import Window, lambda_step_set

_ORACLE_STEP_BUDGET = 20_000_000


def _window_test(floor: FloorSpec, window: Window, anchor):
    d = floor.tilt.d

    def inside(v):
        for i in range(d):
            if abs(v[i] - anchor[i]) > window.radius:
                return False
        return abs(v[d] - floor.floor(v[:d])) <= window.height_cap

    return inside


def simple_path_sites(field: ConfigField, floor: FloorSpec, window: Window,
                      sources) -> set:
    """Every site touched by some admissible simple path from a source, by
    exhaustive depth-first enumeration (distinct sites along each path).
    Exponential; only for the tiniest windows (a few dozen sites)."""
    d = floor.tilt.d
    anchor = window.anchor or (0,) * (d + 1)
    inside = _window_test(floor, window, anchor)
    steps = sorted(lambda_step_set(d))
    reached = set()
    budget = [_ORACLE_STEP_BUDGET]

    def dfs(u, onpath):
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("oracle step budget exceeded; shrink the instance")
        reached.add(u)
        for dv in steps:
            v = tuple(a + b for a, b in zip(u, dv))
            if v in onpath or not inside(v):
                continue
            if dv[d] == 1 and not field.is_closed(v):
                continue
            onpath.add(v)
            dfs(v, onpath)
            onpath.remove(v)

    for s in sources:
        s = tuple(s)
        dfs(s, {s})
    return reached


def simple_path_certificates(field: ConfigField, floor: FloorSpec, window: Window,
                             sources, targets) -> bool:
    """Exhibit and validate an admissible simple path to every target.

    Certificates come from spanning-tree parent chains (tree paths never
    repeat a site); each is then checked from scratch: sites distinct and in
    the window, steps admissible, climbs landing on closed sites.  Returns
    True iff every target is certified, which is exactly the claim that
    walk reachability implies loop-free path existence."""
    d = floor.tilt.d
    anchor = window.anchor or (0,) * (d + 1)
    inside = _window_test(floor, window, anchor)
    steps = sorted(lambda_step_set(d))
    parent = {tuple(s): None for s in sources}
    frontier = list(parent)
    while frontier:
        nxt = []
        for u in frontier:
            for dv in steps:
                v = tuple(a + b for a, b in zip(u, dv))
                if v in parent or not inside(v):
                    continue
                if dv[d] == 1 and not field.is_closed(v):
                    continue
                parent[v] = u
                nxt.append(v)
        frontier = nxt
    for t in targets:
        t = tuple(t)
        if t not in parent:
            return False
        path = [t]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        if len(set(path)) != len(path):
            return False
        for u, v in zip(path, path[1:]):
            dv = tuple(b - a for a, b in zip(u, v))
            if dv not in steps or not inside(v):
                return False
            if dv[d] == 1 and not field.is_closed(v):
                return False
    return True


def sweep_reachable(field: ConfigField, floor: FloorSpec, window: Window, sources):
    """Walk-reachability fixed point by backward relaxation over the whole
    window (no frontier queue); returns (reached, truncated, capped)."""
    d = floor.tilt.d
    anchor = window.anchor or (0,) * (d + 1)
    inside = _window_test(floor, window, anchor)
    steps = sorted(lambda_step_set(d))
    base = [range(anchor[i] - window.radius, anchor[i] + window.radius + 1)
            for i in range(d)]
    sites = []
    for xb in product(*base):
        f = floor.floor(xb)
        for n in range(f - window.height_cap, f + window.height_cap + 1):
            sites.append(xb + (n,))
    reach = set(tuple(s) for s in sources)
    while True:
        added = []
        for v in sites:
            if v in reach:
                continue
            for dv in steps:
                u = tuple(a - b for a, b in zip(v, dv))
                if u not in reach:
                    continue
                if dv[d] == 1 and not field.is_closed(v):
                    continue
                added.append(v)
                break
        if not added:
            break
        reach.update(added)
    truncated = False
    capped = False
    for u in reach:
        if u[d] - floor.floor(u[:d]) == window.height_cap:
            capped = True
        for dv in steps:
            v = tuple(a + b for a, b in zip(u, dv))
            if dv[d] == 1 and not field.is_closed(v):
                continue
            if not inside(v):
                truncated = True
    return reach, truncated, capped


def pyramid_floor_enumerated(xbar, tilt: TiltSpec) -> int:
    """Pyramid height by exhausting all sign patterns with the same count of
    tilted axes."""
    num, den = tilt.alpha.numerator, tilt.alpha.denominator
    k = tilt.k
    best = None
    for pattern in product((-1, 0, 1), repeat=tilt.d):
        if sum(1 for e in pattern if e != 0) != k:
            continue
        t = sum(e * x for e, x in zip(pattern, xbar))
        v = (num * t) // den
        if best is None or v > best:
            best = v
    return best


def directed_max_enumerated(field, d: int, n: int, origin=None) -> int:
    """Best closed count over all d^n directed paths, by recursion."""
    origin = (0,) * d if origin is None else tuple(origin)
    best = [-1]

    def rec(x, left, acc):
        if left == 0:
            if acc > best[0]:
                best[0] = acc
            return
        for j in range(d):
            y = tuple(x[i] + (1 if i == j else 0) for i in range(d))
            rec(y, left - 1, acc + (1 if field.is_closed(y) else 0))

    rec(origin, n, 0)
    return best[0]


def height_map_enumerated(field, xbar) -> int:
    """Minimal lifted terminal height over all directed paths to xbar."""
    xbar = tuple(xbar)
    d = len(xbar)
    best = [None]

    def rec(x, h):
        if x == xbar:
            if best[0] is None or h < best[0]:
                best[0] = h
            return
        h2 = h if field.is_closed(x + (h,)) else h + 1
        for j in range(d):
            if x[j] < xbar[j]:
                rec(tuple(x[i] + (1 if i == j else 0) for i in range(d)), h2)

    rec((0,) * d, 0)
    return best[0]


def d1_column_enumerated(field: ConfigField, n: int, cap: int) -> int:
    """Highest simple-path height at column -n on the restricted box,
    matching the search box of ``d1_column_height``."""
    lo, hi = -n - cap, cap
    best = [None]
    budget = [_ORACLE_STEP_BUDGET]

    def dfs(c, h, onpath):
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("oracle step budget exceeded; shrink the instance")
        if c == -n and (best[0] is None or h > best[0]):
            best[0] = h
        cands = []
        if h + 1 <= hi and field.is_closed((c, h + 1)):
            cands.append((c, h + 1))
        for s in (-1, 1):
            if -n <= c + s <= 0 and h - 1 >= lo:
                cands.append((c + s, h - 1))
        for v in cands:
            if v not in onpath:
                onpath.add(v)
                dfs(v[0], v[1], onpath)
                onpath.remove(v)

    dfs(0, 0, {(0, 0)})
    return best[0]
