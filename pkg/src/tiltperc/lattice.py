"""Geometry of tilted planes and pyramids plus the deterministic site field.

Sites of ``Z^(d+1)`` are plain integer tuples ``(x_1, ..., x_d, x_{d+1})``;
the first ``d`` entries form the base point and the last one the height.
The tilt fraction ``alpha`` is stored as an exact rational so all floor
computations stay in integer arithmetic; there is no floating-point floor
anywhere near a lattice boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from ._rng import site_uniform

Site = tuple  # integer tuple of length d+1
BaseVec = tuple  # integer tuple of length d


def _as_fraction(alpha) -> Fraction:
    """Accept Fraction, int, float, "p/q" string, or (num, den) pair."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, tuple) and len(alpha) == 2:
        return Fraction(alpha[0], alpha[1])
    if isinstance(alpha, str):
        if "/" in alpha:
            num, den = alpha.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(alpha)
    return Fraction(alpha)  # int or float (floats convert exactly)


@dataclass(frozen=True)
class TiltSpec:
    """Tilt parameters: exact rational slope, base dimension, axis pattern."""

    alpha: Fraction
    d: int
    eta: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_fraction(self.alpha))
        object.__setattr__(self, "eta", tuple(int(e) for e in self.eta))
        if not (0 <= self.alpha < 1):
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if len(self.eta) != self.d:
            raise ValueError(f"eta has length {len(self.eta)}, expected d={self.d}")
        if any(e not in (-1, 0, 1) for e in self.eta):
            raise ValueError(f"eta entries must be in {{-1,0,+1}}, got {self.eta}")

    @property
    def k(self) -> int:
        return sum(1 for e in self.eta if e != 0)

    def canonicalize(self) -> "TiltSpec":
        """Equivalent spec with eta = (1,...,1,0,...,0); same k, same law."""
        return TiltSpec(self.alpha, self.d, (1,) * self.k + (0,) * (self.d - self.k))


def make_tilt(alpha, d: int, k: int | None = None, eta=None) -> TiltSpec:
    """Build a TiltSpec from either an explicit eta or a tilted-axis count k."""
    if eta is not None:
        return TiltSpec(alpha, d, tuple(eta))
    if k is None:
        k = d
    if not 0 <= k <= d:
        raise ValueError(f"k must satisfy 0 <= k <= d, got k={k}, d={d}")
    return TiltSpec(alpha, d, (1,) * k + (0,) * (d - k))


@dataclass(frozen=True)
class FloorSpec:
    """A floor under the surface: a tilted plane or the inverted pyramid."""

    kind: str  # "plane" | "pyramid"
    tilt: TiltSpec

    def __post_init__(self):
        if self.kind not in ("plane", "pyramid"):
            raise ValueError(f"kind must be 'plane' or 'pyramid', got {self.kind!r}")

    def floor(self, xbar: BaseVec) -> int:
        if self.kind == "plane":
            return plane_floor(xbar, self.tilt)
        return pyramid_floor(xbar, self.tilt)


def plane_floor(xbar: BaseVec, tilt: TiltSpec) -> int:
    """Height of the tilted plane below base point xbar: floor(alpha * eta.xbar)."""
    t = sum(e * x for e, x in zip(tilt.eta, xbar))
    return (tilt.alpha.numerator * t) // tilt.alpha.denominator


def pyramid_floor(xbar: BaseVec, tilt: TiltSpec) -> int:
    """Inverted-pyramid height: max plane height over all sign patterns with the same k.

    Closed form: the maximizing pattern puts matching signs on the k entries
    of largest absolute value, so the max equals floor(alpha * sum of the k
    largest |xbar_i|).  Bit-identical to brute-force enumeration (tested).
    """
    k = tilt.k
    s = sum(sorted((abs(x) for x in xbar), reverse=True)[:k])
    return (tilt.alpha.numerator * s) // tilt.alpha.denominator


@dataclass(frozen=True)
class ConfigField:
    """Bernoulli site field: closed with probability q, lazily evaluated.

    The state of a site is a pure function of (seed, site, q), so the infinite
    lattice needs no storage and coupled runs at different q share closed sets
    monotonically (closed at q stays closed at any q' >= q).
    ``overrides`` pins explicit sites for deterministic tests.
    """

    q: float
    seed: int
    overrides: Mapping | None = None

    def __post_init__(self):
        if not (0.0 <= self.q <= 1.0):
            raise ValueError(f"q must lie in [0, 1], got {self.q}")

    def uniform(self, site: Site) -> float:
        return site_uniform(self.seed, site)

    def is_closed(self, site: Site) -> bool:
        if self.overrides is not None:
            ov = self.overrides.get(tuple(site))
            if ov is not None:
                return ov in ("closed", True, 1)
        return self.uniform(site) < self.q

    def with_q(self, q: float) -> "ConfigField":
        """Same seed and overrides at a different closed-site probability."""
        return ConfigField(q, self.seed, self.overrides)


def site_state(field: ConfigField, site: Site) -> str:
    """'closed' or 'open' for the given site."""
    return "closed" if field.is_closed(site) else "open"


# --- Coarse-grained boxes -------------------------------------------------

def box_coords(y: Site, tilt: TiltSpec) -> tuple:
    """Coarse-grained coordinates a(y) of the box containing lattice site y.

    Flat axes keep their coordinate, tilted axes are bucketed at width
    1/(1-alpha), and the last coordinate is the height of y relative to the
    tilted plane.
    """
    num, den = tilt.alpha.numerator, tilt.alpha.denominator
    a = []
    for i in range(tilt.d):
        if tilt.eta[i] == 0:
            a.append(y[i])
        else:
            a.append(((den - num) * y[i]) // den)
    t = sum(e * y[i] for i, e in enumerate(tilt.eta))
    a.append(y[tilt.d] - (num * t) // den)
    return tuple(a)


def box_contains(a: tuple, y: Site, tilt: TiltSpec) -> bool:
    """Exact membership of lattice site y in box B_a, from the half-open
    interval definition of the base box (independent of ``box_coords``)."""
    num, den = tilt.alpha.numerator, tilt.alpha.denominator
    for i in range(tilt.d):
        if tilt.eta[i] == 0:
            if y[i] != a[i]:
                return False
        else:
            # 0 <= y_i - a_i/(1-alpha) < 1/(1-alpha)
            r = (den - num) * y[i] - a[i] * den
            if not (0 <= r < den):
                return False
    # height slot: -1 < y_{d+1} - a_{d+1} - alpha * eta.ybar <= 0
    t = sum(e * y[i] for i, e in enumerate(tilt.eta))
    r = den * (y[tilt.d] - a[tilt.d]) - num * t
    return -den < r <= 0


def cg_step_set(tilt: TiltSpec) -> frozenset:
    """Allowed coarse-box step differences a' - a for coarse-grained paths.

    One up step, k height-preserving lateral steps against the tilt, one
    straight down, 2d diagonal downs, and k double-downs along the tilt;
    cardinality 2 + 2k + 2d.
    """
    d = tilt.d
    e = lambda i: tuple(1 if j == i else 0 for j in range(d + 1))
    neg = lambda v: tuple(-c for c in v)
    up = e(d)
    steps = {up, neg(up)}
    for i in range(d):
        steps.add(tuple((1 if j == i else 0) - (1 if j == d else 0) for j in range(d + 1)))
        steps.add(tuple((-1 if j == i else 0) - (1 if j == d else 0) for j in range(d + 1)))
        if tilt.eta[i] != 0:
            steps.add(tuple(-tilt.eta[i] if j == i else 0 for j in range(d + 1)))
            steps.add(tuple((tilt.eta[i] if j == i else 0) - (2 if j == d else 0) for j in range(d + 1)))
    return frozenset(steps)
