"""Oriented percolation in Z^d: directed closed-site maxima, the density
time-constant estimator, and the projection tying oriented paths to
admissible paths one dimension up.

Directed paths move by +e_j steps inside N_0^d.  ``max_closed_dp`` computes
the best closed-site count over length-n paths by level dynamic programming
(one 1-norm slice in memory at a time).  ``height_map``/``project_config``
implement the height lift and configuration projection used to transfer
oriented-path density down to surface non-existence; ``rho_lambda_bridge``
replays that transfer explicitly on samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from ._rng import derive_seed
from .lattice import ConfigField
from .paths import is_admissible_lambda_path


@dataclass(frozen=True)
class DirectedDPTable:
    """One level of the directed DP: best closed counts on a 1-norm slice."""

    n: int
    values: dict


@dataclass(frozen=True)
class GammaEstimate:
    """Monte Carlo estimate of the limiting closed-site density gamma(q).

    Finite-n values are upper biased (the n-step maximum overshoots the
    limit); ``stderr`` is the replica standard error."""

    q: float
    n: int
    replicas: int
    gamma_hat: float
    stderr: float


def _level_sites(d: int, level: int, origin: tuple):
    for comp in _compositions(d, level):
        yield tuple(origin[i] + comp[i] for i in range(d))


def _compositions(d: int, total: int):
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(d - 1, total - first):
            yield (first,) + rest


def _dp_levels(field, d: int, n: int, origin: tuple):
    """All DP levels 0..n; values[x] = best closed count of a directed path
    origin -> x counting the sites after the origin."""
    levels = [{tuple(origin): 0}]
    for _ in range(n):
        prev = levels[-1]
        cur = {}
        for x, v in prev.items():
            for j in range(d):
                y = tuple(x[i] + (1 if i == j else 0) for i in range(d))
                if y not in cur:
                    cur[y] = -1
        for y in cur:
            best = -1
            for j in range(d):
                if y[j] > origin[j]:
                    x = tuple(y[i] - (1 if i == j else 0) for i in range(d))
                    v = prev.get(x, -1)
                    if v > best:
                        best = v
            cur[y] = best + (1 if field.is_closed(y) else 0)
        levels.append(cur)
    return levels


def max_closed_dp(field, d: int, n: int, origin: tuple | None = None) -> int:
    """Best closed-site count over directed n-step paths from the origin
    (origin itself not counted)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    origin = (0,) * d if origin is None else tuple(origin)
    levels = _dp_levels(field, d, n, origin)
    return max(levels[-1].values())


def max_closed_sequence(field, d: int, n: int, origin: tuple | None = None) -> list:
    """Per-level maxima [Y_0, Y_1, ..., Y_n] from one DP run (coupled)."""
    origin = (0,) * d if origin is None else tuple(origin)
    levels = _dp_levels(field, d, n, origin)
    return [max(lv.values()) for lv in levels]


def directed_table(field, d: int, n: int, origin: tuple | None = None) -> DirectedDPTable:
    """Final DP slice: best closed counts for every endpoint at level n."""
    origin = (0,) * d if origin is None else tuple(origin)
    levels = _dp_levels(field, d, n, origin)
    return DirectedDPTable(n, levels[-1])


def directed_argmax(field, d: int, n: int, origin: tuple | None = None):
    """(best value, lexicographically lowest endpoint attaining it)."""
    origin = (0,) * d if origin is None else tuple(origin)
    levels = _dp_levels(field, d, n, origin)
    best = max(levels[-1].values())
    endpoint = min(x for x, v in levels[-1].items() if v == best)
    return best, endpoint


def max_closed_path(field, d: int, n: int, origin: tuple | None = None):
    """(best value, one optimal directed path) with deterministic backtrack
    (lexicographically lowest endpoint, then lowest predecessors)."""
    origin = (0,) * d if origin is None else tuple(origin)
    levels = _dp_levels(field, d, n, origin)
    best = max(levels[-1].values())
    x = min(x for x, v in levels[-1].items() if v == best)
    path = [x]
    for lvl in range(n, 0, -1):
        v_here = levels[lvl][x]
        need = v_here - (1 if field.is_closed(x) else 0)
        preds = []
        for j in range(d):
            if x[j] > origin[j]:
                p = tuple(x[i] - (1 if i == j else 0) for i in range(d))
                if levels[lvl - 1].get(p, -1) == need:
                    preds.append(p)
        x = min(preds)
        path.append(x)
    path.reverse()
    return best, path


def gamma_estimate(q: float, d: int, n: int, replicas: int, seed: int) -> GammaEstimate:
    """Mean of Y_{0,n}/n over independent replica fields."""
    if n < 1 or replicas < 1:
        raise ValueError(f"need n >= 1 and replicas >= 1, got n={n}, replicas={replicas}")
    vals = np.empty(replicas)
    for r in range(replicas):
        field = ConfigField(q, derive_seed(seed, r))
        vals[r] = max_closed_dp(field, d, n) / n
    stderr = float(vals.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return GammaEstimate(q, n, replicas, float(vals.mean()), stderr)


def gamma_richardson(q: float, d: int, n: int, replicas: int, seed: int):
    """Estimates at n and 2n (same seeds), for eyeballing the finite-n bias."""
    return (
        gamma_estimate(q, d, n, replicas, seed),
        gamma_estimate(q, d, 2 * n, replicas, seed),
    )


# --- Height lift and projection ---------------------------------------------

def _height_table(field, xbar: tuple) -> dict:
    """H over the box [0, x_1] x ... x [0, x_d], filled in level order.

    H(0) = 0; stepping from base point p lifts the height by one exactly when
    the lattice site (p, H(p)) is open; H minimizes over directed predecessors.
    """
    ranges = [range(x + 1) for x in xbar]
    table = {}
    sites = sorted(product(*ranges), key=lambda s: (sum(s), s))
    for s in sites:
        if all(c == 0 for c in s):
            table[s] = 0
            continue
        best = None
        for j in range(len(s)):
            if s[j] > 0:
                p = tuple(s[i] - (1 if i == j else 0) for i in range(len(s)))
                hp = table[p]
                step = hp if field.is_closed(p + (hp,)) else hp + 1
                if best is None or step < best:
                    best = step
        table[s] = best
    return table


def height_map(field, xbar) -> int:
    """Minimal terminal height over directed paths 0 -> xbar under the
    open-site lift rule; all open gives |xbar|_1, all closed gives 0."""
    xbar = tuple(xbar)
    if any(c < 0 for c in xbar):
        raise ValueError(f"xbar must lie in N_0^d, got {xbar}")
    return _height_table(field, xbar)[xbar]


def height_map_path(field, xbar):
    """(H(xbar), minimizing directed base path 0 -> xbar), deterministic
    backtrack through lexicographically lowest predecessors."""
    xbar = tuple(xbar)
    if any(c < 0 for c in xbar):
        raise ValueError(f"xbar must lie in N_0^d, got {xbar}")
    table = _height_table(field, xbar)
    path = [xbar]
    cur = xbar
    while any(c > 0 for c in cur):
        target = table[cur]
        preds = []
        for j in range(len(cur)):
            if cur[j] > 0:
                p = tuple(cur[i] - (1 if i == j else 0) for i in range(len(cur)))
                hp = table[p]
                step = hp if field.is_closed(p + (hp,)) else hp + 1
                if step == target:
                    preds.append(p)
        cur = min(preds)
        path.append(cur)
    path.reverse()
    return table[xbar], path


class ProjectedConfig:
    """Lazy projection of a (d+1)-dimensional field onto Z^d.

    Inside N_0^d the value at xbar is the state of (xbar, H(xbar)); elsewhere
    the state of the level-0 slice.  Quacks like ``ConfigField`` for the
    directed DP (``is_closed`` only)."""

    def __init__(self, field):
        self.field = field
        self._h = {}

    def height(self, xbar: tuple) -> int:
        if xbar not in self._h:
            self._h.update(_height_table(self.field, xbar))
        return self._h[xbar]

    def is_closed(self, xbar) -> bool:
        xbar = tuple(xbar)
        if all(c >= 0 for c in xbar):
            return self.field.is_closed(xbar + (self.height(xbar),))
        return self.field.is_closed(xbar + (0,))


def project_config(field) -> ProjectedConfig:
    """Configuration view over Z^d whose law matches the base field's."""
    return ProjectedConfig(field)


@dataclass(frozen=True)
class BridgeReplay:
    """One replica of the oriented-path-to-admissible-path transfer."""

    rho_hat: float
    terminal_height: int
    height_bound: float
    lambda_path: tuple
    admissible: bool


def rho_lambda_bridge(field, d: int, n: int) -> BridgeReplay:
    """Transfer an optimal oriented path in the projected configuration to an
    explicit admissible path in the base field.

    Finds the n-step directed path maximizing the closed count in the
    projection (density rho_hat), lifts its endpoint to height H(endpoint),
    and rebuilds the path one dimension up: each flat height step becomes a
    down-diagonal followed by an up step into the recorded closed site, each
    rising step a single down-diagonal.  The rebuilt path runs from
    (endpoint, H(endpoint)) to the origin, is admissible by construction, and
    its starting height obeys H(endpoint) <= (1 - rho_hat) n + 1.
    """
    proj = project_config(field)
    best, endpoint = directed_argmax(proj, d, n)
    rho_hat = best / n
    h_term, base_path = height_map_path(field, endpoint)

    # lift the minimizing base path, then read it backward as a lambda path
    heights = [0]
    for i in range(len(base_path) - 1):
        p = base_path[i]
        hp = heights[-1]
        heights.append(hp if field.is_closed(p + (hp,)) else hp + 1)
    assert heights[-1] == h_term

    lam = [endpoint + (h_term,)]
    for i in range(len(base_path) - 2, -1, -1):
        p, hp = base_path[i], heights[i]
        hn = heights[i + 1]
        if hn == hp + 1:
            lam.append(p + (hp,))  # down-diagonal
        else:
            mid = p + (hp - 1,)
            lam.append(mid)        # down-diagonal
            lam.append(p + (hp,))  # up into the closed site (p, hp)
    ok = is_admissible_lambda_path(field, lam) and lam[-1] == (0,) * (d + 1)
    return BridgeReplay(rho_hat, h_term, (1.0 - rho_hat) * n + 1.0, tuple(lam), ok)
