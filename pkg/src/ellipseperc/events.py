"""Percolation events evaluated on a finite grain configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ValidationError
from .geometry import BoxSpec, GrainSpec, Segment

EVENT_NAMES = ("covered_lr", "covered_tb", "vacant_lr", "one_ellipse_lr", "circuit3",
               "point_covered", "disk_covered", "annulus_conn", "vacant_annulus_circuit")


def _arrays(config):
    """(x, y, a, b, v) arrays from a Configuration, a sequence of GrainSpec,
    or such a tuple of arrays."""
    if hasattr(config, "arrays"):
        return config.arrays()
    if isinstance(config, tuple) and len(config) == 5 and isinstance(config[0], np.ndarray):
        return tuple(np.ascontiguousarray(c, dtype=float) for c in config)
    grains = list(config)
    if not grains:
        e = np.empty(0)
        return e, e, e, e, e
    p = np.array([g.params() for g in grains], dtype=float).T
    return tuple(np.ascontiguousarray(r) for r in p)


def _axis(axis):
    if axis in (0, "horizontal", "lr"):
        return 0
    if axis in (1, "vertical", "tb"):
        return 1
    raise ValidationError(f"axis must be 'horizontal' or 'vertical', got {axis!r}")


@dataclass
class CrossingGraph:
    nodes: np.ndarray       # indices of grains meeting the box
    roots: np.ndarray       # union-find representative per node
    mark_lo: np.ndarray     # node meets L- (or bottom)
    mark_hi: np.ndarray     # node meets L+ (or top)

    def components(self):
        comps = {}
        for node, root in zip(self.nodes, self.roots):
            comps.setdefault(int(root), []).append(int(node))
        return list(comps.values())

    @property
    def crosses(self) -> bool:
        return bool(K.crosses(self.roots, self.mark_lo, self.mark_hi))


def crossing_graph(config, box: BoxSpec, axis="horizontal") -> CrossingGraph:
    x, y, a, b, v = _arrays(config)
    idx, roots, lo, hi = K.box_components(x, y, a, b, v, *box.params(), _axis(axis))
    return CrossingGraph(idx, roots, lo, hi)


def covered_crossing(config, box: BoxSpec, axis="horizontal") -> bool:
    return crossing_graph(config, box, axis).crosses


def vacant_lr_crossing(config, box: BoxSpec) -> bool:
    return not covered_crossing(config, box, "vertical")


def one_ellipse_crossing(config, box: BoxSpec) -> bool:
    x, y, a, b, v = _arrays(config)
    if x.size == 0:
        return False
    x0, y0, x1, y1 = box.bounds()
    left = K.hits_segment(x, y, a, b, v, x0, y0, x0, y1)
    right = K.hits_segment(x, y, a, b, v, x1, y0, x1, y1)
    return bool(np.any(left & right))


# ------------------------------------------------------------- circuits


def _rot(theta, pts):
    c, s = math.cos(theta), math.sin(theta)
    pts = np.asarray(pts, dtype=float)
    return np.stack([c * pts[..., 0] - s * pts[..., 1], s * pts[..., 0] + c * pts[..., 1]], axis=-1)


def _rect(x0, x1, y0, y1):
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def _separated(p, q):
    """Convex polygons p, q have disjoint closures (strict separating axis)."""
    for poly in (p, q):
        for i in range(len(poly)):
            e = poly[(i + 1) % len(poly)] - poly[i]
            n = np.array([-e[1], e[0]])
            a = p @ n
            b = q @ n
            if a.max() < b.min() - 1e-12 * np.abs(n).sum() or b.max() < a.min() - 1e-12 * np.abs(n).sum():
                return True
    return False


def _inside(poly, pts):
    """All points inside the closed convex polygon (counter-clockwise)."""
    for i in range(len(poly)):
        e = poly[(i + 1) % len(poly)] - poly[i]
        d = pts - poly[i]
        if np.any(e[0] * d[:, 1] - e[1] * d[:, 0] < -1e-12):
            return False
    return True


class CircuitSpec:
    """Segments S_j^±(a), strips B_j(a) and center regions D_j(a), j = 1, 2, 3."""

    def __init__(self, a: float):
        if not a > 0:
            raise ValidationError(f"circuit scale a must be > 0, got {a}")
        self.a = float(a)
        h = math.sqrt(3.0) / 2.0 * a
        s_minus = np.array([[-h, -a / 2], [-h, -a / 4]])
        s_plus = np.array([[h, -a / 2], [h, -a / 4]])
        b1 = _rect(-h, h, -a / 2, -a / 4)
        d1 = _rect(-a / 4, a / 4, -7 * a / 16, -5 * a / 16)
        self.angles = [0.0, 2 * math.pi / 3, 4 * math.pi / 3]
        self.S = [(_rot(t, s_minus), _rot(t, s_plus)) for t in self.angles]
        self.B = [_rot(t, b1) for t in self.angles]
        self.D = [_rot(t, d1) for t in self.angles]
        self._d1 = (-a / 4, a / 4, -7 * a / 16, -5 * a / 16)
        for j in range(3):
            if not _inside(self.B[j], self.D[j]):
                raise AssertionError(f"D_{j + 1} is not inside B_{j + 1}")
            for i in range(3):
                if i != j and not _separated(self.D[j], self.B[i]):
                    raise AssertionError(f"D_{j + 1} meets B_{i + 1}")

    @property
    def d_area(self):
        return (self.a / 2) * (self.a / 8)

    @property
    def r_min(self):
        # a grain meeting both segments has diameter at least their distance
        return math.sqrt(3.0) / 2.0 * self.a

    def segments(self, j):
        return tuple(Segment(tuple(s[0]), tuple(s[1])) for s in self.S[j])

    def satisfied_by(self, config):
        """Per j, whether some grain centered in D_j meets S_j^- and S_j^+."""
        x, y, a, b, v = _arrays(config)
        out = []
        h = math.sqrt(3.0) / 2.0 * self.a
        x0, x1, y0, y1 = self._d1
        tol = K.TOL * max(1.0, self.a)
        for t in self.angles:
            # rotate the scene by -t so that block j becomes block 1
            c, s = math.cos(t), math.sin(t)
            rx = c * x + s * y
            ry = -s * x + c * y
            rv = v - t
            inside = (rx >= x0 - tol) & (rx <= x1 + tol) & (ry >= y0 - tol) & (ry <= y1 + tol)
            ok = False
            if np.any(inside):
                sel = np.flatnonzero(inside)
                args = (rx[sel], ry[sel], a[sel], b[sel], rv[sel])
                left = K.hits_segment(*args, -h, -self.a / 2, -h, -self.a / 4)
                right = K.hits_segment(*args, h, -self.a / 2, h, -self.a / 4)
                ok = bool(np.any(left & right))
            out.append(ok)
        return out


def three_ellipse_circuit(config, a) -> bool:
    spec = a if isinstance(a, CircuitSpec) else CircuitSpec(a)
    return all(spec.satisfied_by(config))


def circuit_grains(a: float):
    """The three ellipses of the canonical circuit at scale a."""
    out = []
    for t in (0.0, 2 * math.pi / 3, 4 * math.pi / 3):
        cx, cy = _rot(t, [0.0, -3 * a / 8])
        out.append(GrainSpec.ellipse((cx, cy), a, t))
    return out


# ------------------------------------------------------------- covering


def count_covering(config, w, eps: float, n: float) -> int:
    """Grains centered in B(n) (around the origin) containing B(w, eps)."""
    if not 0 <= eps < 0.5:
        raise ValidationError(f"eps must lie in [0, 1/2), got {eps}")
    x, y, a, b, v = _arrays(config)
    if x.size == 0:
        return 0
    near = x * x + y * y <= n * n
    if not np.any(near):
        return 0
    sel = np.flatnonzero(near)
    cov = K.contains_disk(x[sel], y[sel], a[sel], b[sel], v[sel], float(w[0]), float(w[1]), float(eps))
    return int(cov.sum())


def point_covered(config, p) -> bool:
    x, y, a, b, v = _arrays(config)
    return bool(x.size and np.any(K.contains_point(x, y, a, b, v, float(p[0]), float(p[1]))))


def disk_covered(config, w, eps) -> bool:
    """Some single grain contains the closed disk B(w, eps)."""
    x, y, a, b, v = _arrays(config)
    return bool(x.size and np.any(K.contains_disk(x, y, a, b, v, float(w[0]), float(w[1]), float(eps))))


# --------------------------------------------------------------- annuli


def annulus_graph(config, r_in, r_out, center=(0.0, 0.0)) -> CrossingGraph:
    if not r_out > r_in > 0:
        raise ValidationError(f"need r_out > r_in > 0, got r_in={r_in}, r_out={r_out}")
    x, y, a, b, v = _arrays(config)
    idx, roots, lo, hi = K.annulus_components(x, y, a, b, v, float(center[0]), float(center[1]),
                                              float(r_in), float(r_out))
    return CrossingGraph(idx, roots, lo, hi)


def annulus_connection(config, r_in, r_out, center=(0.0, 0.0)) -> bool:
    """A covered path joins the circles of radii r_in and r_out.

    Grains are joined when they intersect anywhere: any covered path between
    the circles contains a sub-path inside the closed annulus, so restricting
    nodes to grains meeting the annulus is enough."""
    return annulus_graph(config, r_in, r_out, center).crosses


def vacant_circuit_in_annulus(config, l, center=(0.0, 0.0)) -> bool:
    return not annulus_connection(config, l, 3.0 * l, center)
