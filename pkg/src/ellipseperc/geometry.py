"""Closed ellipses, disks, segments and boxes in the plane.

An ellipse grain has semi-axes ``R`` (along direction ``V``) and 1; a disk
grain has radius ``R``.  All sets are closed and tangencies count as
intersections, up to the tolerance ``TOL``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ValidationError

TOL = K.TOL
ELLIPSE = "ellipse"
DISK = "disk"
HALF_PI = 0.5 * math.pi


def normalize_direction(v: float) -> float:
    """Map an axis direction into (-pi/2, pi/2]."""
    v = math.fmod(v, math.pi)
    if v <= -HALF_PI:
        v += math.pi
    elif v > HALF_PI:
        v -= math.pi
    return v


@dataclass(frozen=True)
class GrainSpec:
    x: float
    y: float
    R: float
    V: float = 0.0
    kind: str = ELLIPSE

    def __post_init__(self):
        if not (self.R >= 1.0) or not math.isfinite(self.R):
            raise ValidationError(f"grain semi-axis R must be finite and >= 1, got {self.R}")
        if self.kind not in (ELLIPSE, DISK):
            raise ValidationError(f"grain kind must be 'ellipse' or 'disk', got {self.kind!r}")
        if self.kind == DISK and self.V != 0.0:
            object.__setattr__(self, "V", 0.0)
        elif not (-HALF_PI < self.V <= HALF_PI):
            object.__setattr__(self, "V", normalize_direction(self.V))

    @property
    def center(self):
        return (self.x, self.y)

    @property
    def axes(self):
        return (self.R, 1.0) if self.kind == ELLIPSE else (self.R, self.R)

    def params(self):
        a, b = self.axes
        return self.x, self.y, a, b, self.V

    @property
    def area(self) -> float:
        a, b = self.axes
        return math.pi * a * b

    @classmethod
    def ellipse(cls, center, R, V=0.0):
        return cls(float(center[0]), float(center[1]), float(R), float(V), ELLIPSE)

    @classmethod
    def disk(cls, center, R):
        return cls(float(center[0]), float(center[1]), float(R), 0.0, DISK)


@dataclass(frozen=True)
class BoxSpec:
    """B(l; k) = [-lk/2, lk/2] x [-l/2, l/2] shifted to ``center``."""
    l: float
    k: float = 1.0
    cx: float = 0.0
    cy: float = 0.0

    def __post_init__(self):
        if not (self.l > 0 and self.k > 0) or not math.isfinite(self.l * self.k):
            raise ValidationError(f"box needs l > 0 and k > 0, got l={self.l}, k={self.k}")

    @property
    def width(self):
        return self.l * self.k

    @property
    def height(self):
        return self.l

    @property
    def half(self):
        return 0.5 * self.l * self.k, 0.5 * self.l

    @property
    def circumradius(self):
        return 0.5 * math.hypot(self.width, self.height)

    def params(self):
        hw, hh = self.half
        return self.cx, self.cy, hw, hh

    def bounds(self):
        hw, hh = self.half
        return self.cx - hw, self.cy - hh, self.cx + hw, self.cy + hh

    def side(self, name: str) -> "Segment":
        x0, y0, x1, y1 = self.bounds()
        return {
            "left": Segment((x0, y0), (x0, y1)),
            "right": Segment((x1, y0), (x1, y1)),
            "bottom": Segment((x0, y0), (x1, y0)),
            "top": Segment((x0, y1), (x1, y1)),
        }[name]

    @classmethod
    def from_bounds(cls, x0, y0, x1, y1):
        h = y1 - y0
        return cls(h, (x1 - x0) / h, 0.5 * (x0 + x1), 0.5 * (y0 + y1))


@dataclass(frozen=True)
class Segment:
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", (float(self.a[0]), float(self.a[1])))
        object.__setattr__(self, "b", (float(self.b[0]), float(self.b[1])))
        if self.a == self.b:
            raise ValidationError("segment endpoints must differ")

    def params(self):
        return self.a[0], self.a[1], self.b[0], self.b[1]


# ------------------------------------------------------------ predicates


def point_in_grain(p, g: GrainSpec) -> bool:
    return bool(K.qform(float(p[0]), float(p[1]), *g.params()) <= TOL)


def disk_in_grain(w, eps: float, g: GrainSpec) -> bool:
    if eps < 0:
        raise ValidationError(f"eps must be >= 0, got {eps}")
    return bool(K.disk_in(float(w[0]), float(w[1]), float(eps), *g.params(), TOL))


def grain_segment_intersects(g: GrainSpec, s: Segment) -> bool:
    return bool(K.seg_hits(*s.params(), *g.params(), TOL))


def grain_box_intersects(g: GrainSpec, b: BoxSpec) -> bool:
    return bool(K.grain_box(*g.params(), *b.params(), TOL))


def grain_grain_intersects(a: GrainSpec, b: GrainSpec) -> bool:
    return bool(K.grain_grain(*a.params(), *b.params(), TOL)[0])


def triple_common_point(a: GrainSpec, b: GrainSpec, box: BoxSpec) -> bool:
    return bool(K.triple(*a.params(), *b.params(), *box.params(), TOL))


def common_point(a: GrainSpec, b: GrainSpec):
    """A point of a ∩ b, or None."""
    hit, wx, wy, _ = K.grain_grain(*a.params(), *b.params(), TOL)
    return (wx, wy) if hit else None


# --- convex gaps: min over the plane of the largest membership gap.
# Grain gaps are quadratic form minus one, box gaps are signed distances to
# the edge lines; a predicate holds iff its gap is <= 0.


def point_gap(p, g: GrainSpec) -> float:
    return float(K.qform(float(p[0]), float(p[1]), *g.params()))


def disk_gap(w, eps: float, g: GrainSpec) -> float:
    return float(K.disk_in_gap(float(w[0]), float(w[1]), float(eps), *g.params()))


def segment_gap(g: GrainSpec, s: Segment) -> float:
    return float(K.seg_min_q(*s.params(), *g.params()))


def box_gap(g: GrainSpec, b: BoxSpec) -> float:
    return float(K.gap_grain_box(*g.params(), *b.params()))


def pair_gap(a: GrainSpec, b: GrainSpec) -> float:
    return float(K.gap_grain_grain(*a.params(), *b.params()))


def triple_gap(a: GrainSpec, b: GrainSpec, box: BoxSpec) -> float:
    return float(K.gap_triple(*a.params(), *b.params(), *box.params()))


def is_marginal(gap: float, tol: float = TOL) -> bool:
    return abs(gap) < tol


# ------------------------------------------------------------- measures


def support_extent(g: GrainSpec, direction: float) -> float:
    """Width of the projection of the grain on the line at angle ``direction``."""
    a, b = g.axes
    t = direction - g.V
    return 2.0 * math.sqrt((a * math.cos(t)) ** 2 + (b * math.sin(t)) ** 2)


def minkowski_hit_area(w: float, h: float, R: float, V: float = 0.0, kind: str = ELLIPSE) -> float:
    """Area of the set of centers whose grain meets a w x h box."""
    if not (w >= 0 and h >= 0):
        raise ValidationError(f"box sides must be non-negative, got {w}, {h}")
    if kind == DISK:
        return w * h + math.pi * R * R + 2.0 * (w + h) * R
    g = GrainSpec(0.0, 0.0, R, V, kind)
    return w * h + g.area + w * support_extent(g, HALF_PI) + h * support_extent(g, 0.0)


def grain_arrays(grains, kind: str = ELLIPSE):
    """Grains as kernel arrays (x, y, a, b, v)."""
    n = len(grains)
    out = np.empty((5, n))
    for i, g in enumerate(grains):
        out[:, i] = g.params()
    return tuple(np.ascontiguousarray(row) for row in out)
