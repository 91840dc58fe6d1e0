"""Reaction terms for the three model variants.

All variants share the autocatalytic core A + 2B -> 3B (rate constant fixed
at 1) with food A fed toward concentration 1 at rate r:

  plain:  da = -a b^2 + r (1 - a)            db = a b^2 - k b
  waste:  the autocatalysis rate is modulated by exp(-w p), and the decay
          product P accumulates (dp = k b - k_p p) without diffusing.
  tail:   a second autocatalyst C feeds on B (B + 2C -> 3C at k2, C -> P
          at k3), so db = a b^2 - k1 b - k2 b c^2 and dc = k2 b c^2 - k3 c.

These functions are pure pointwise math: they accept negative inputs and
never clamp.  Clamping is the integrator's job.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import Field, require_same_spec


def _require_positive(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not (np.isfinite(v) and v > 0):
            raise ConfigError(f"{type(obj).__name__}.{name} must be > 0, got {v}")


def _require_nonnegative(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not (np.isfinite(v) and v >= 0):
            raise ConfigError(f"{type(obj).__name__}.{name} must be >= 0, got {v}")


@dataclass(frozen=True)
class GrayScottParams:
    """Plain two-species parameters.

    d_a, d_b are diffusion rates (distance^2 / time); r is the feed rate and
    k the decay rate of B (both 1/time).  Rates may be zero (a zero-rate
    system is pure diffusion, used as a conservation check); diffusion rates
    must be positive.
    """

    d_a: float
    d_b: float
    r: float
    k: float

    def __post_init__(self):
        _require_positive(self, ("d_a", "d_b"))
        _require_nonnegative(self, ("r", "k"))

    @property
    def max_diffusion(self) -> float:
        return max(self.d_a, self.d_b)


@dataclass(frozen=True)
class WasteParams:
    """Waste-modulated parameters: plain base plus inhibition strength w
    and waste decay rate k_p.  The waste field P does not diffuse."""

    base: GrayScottParams
    w: float
    k_p: float

    def __post_init__(self):
        _require_nonnegative(self, ("w",))
        _require_positive(self, ("k_p",))

    @property
    def max_diffusion(self) -> float:
        return self.base.max_diffusion


@dataclass(frozen=True)
class TailParams:
    """Spot-tail parameters: B decays at k1, is eaten by C at k2, and C
    decays at k3."""

    d_a: float
    d_b: float
    d_c: float
    r: float
    k1: float
    k2: float
    k3: float

    def __post_init__(self):
        _require_positive(self, ("d_a", "d_b", "d_c", "r", "k1", "k2", "k3"))

    @property
    def max_diffusion(self) -> float:
        return max(self.d_a, self.d_b, self.d_c)


def react_gs_arrays(a, b, r, k):
    ab2 = a * b * b
    da = -ab2 + r * (1.0 - a)
    db = ab2 - k * b
    return da, db


def react_gs(a: Field, b: Field, p: GrayScottParams):
    """Plain reaction terms (diffusion excluded)."""
    spec = require_same_spec(a, b)
    da, db = react_gs_arrays(a.values, b.values, p.r, p.k)
    return Field(spec, da), Field(spec, db)


def react_waste_arrays(a, b, p, r, k, w, k_p):
    gate = np.exp(-w * p)
    gab2 = gate * (a * b * b)
    da = -gab2 + r * (1.0 - a)
    db = gab2 - k * b
    dp = k * b - k_p * p
    return da, db, dp


def react_waste(a: Field, b: Field, p: Field, wp: WasteParams):
    """Waste-modulated reaction terms.  With w = 0 or p = 0 this reduces
    exactly to the plain terms for (da, db)."""
    spec = require_same_spec(a, b, p)
    da, db, dp = react_waste_arrays(
        a.values, b.values, p.values, wp.base.r, wp.base.k, wp.w, wp.k_p
    )
    return Field(spec, da), Field(spec, db), Field(spec, dp)


def react_tail_arrays(a, b, c, r, k1, k2, k3):
    ab2 = a * b * b
    bc2 = b * c * c
    da = -ab2 + r * (1.0 - a)
    db = ab2 - k1 * b - k2 * bc2
    dc = k2 * bc2 - k3 * c
    return da, db, dc


def react_tail(a: Field, b: Field, c: Field, tp: TailParams):
    """Spot-tail reaction terms.  With c = 0 this reduces to the plain
    terms with k = k1."""
    spec = require_same_spec(a, b, c)
    da, db, dc = react_tail_arrays(
        a.values, b.values, c.values, tp.r, tp.k1, tp.k2, tp.k3
    )
    return Field(spec, da), Field(spec, db), Field(spec, dc)


def homogeneous_fixed_points(p: GrayScottParams):
    """Well-mixed fixed points of the plain system, in increasing-b order.

    The trivial point (1, 0) always exists.  Nontrivial points solve
    k b^2 - r b + r k = 0 with a = k / b; real roots exist when r >= 4 k^2.
    """
    points = [(1.0, 0.0)]
    if p.k <= 0 or p.r <= 0:
        return points
    disc = p.r * p.r - 4.0 * p.k * p.k * p.r
    if disc < 0:
        return points
    root = math.sqrt(disc)
    b_lo = (p.r - root) / (2.0 * p.k)
    b_hi = (p.r + root) / (2.0 * p.k)
    for b in (b_lo, b_hi):
        points.append((p.k / b, b))
    return points
