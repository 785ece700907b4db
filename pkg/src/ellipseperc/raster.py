"""Raster ground truth for tests.

``rasterize_scene`` marks a pixel covered iff its center lies in some grain.
The scanline oracles decide set intersections row by row from the closed-form
conic chord of each ellipse, refining around the best row; they share no code
with the predicates in ``geometry``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import _kernels as K
from .errors import ResourceLimit, ValidationError
from .geometry import BoxSpec

MEMORY_BUDGET = 256 * 2 ** 20  # bytes for one bitmap

FOUR = ndimage.generate_binary_structure(2, 1)
EIGHT = ndimage.generate_binary_structure(2, 2)


@dataclass
class Raster:
    grid: np.ndarray        # bool[row, col], row 0 at the bottom
    region: BoxSpec

    @property
    def shape(self):
        return self.grid.shape

    def pixel_centers(self):
        x0, y0, x1, y1 = self.region.bounds()
        ny, nx = self.grid.shape
        xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
        ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
        return xs, ys

    @property
    def pixel_size(self):
        x0, y0, x1, y1 = self.region.bounds()
        ny, nx = self.grid.shape
        return max((x1 - x0) / nx, (y1 - y0) / ny)


def rasterize_scene(config, region: BoxSpec, resolution) -> Raster:
    if isinstance(resolution, (tuple, list)):
        nx, ny = int(resolution[0]), int(resolution[1])
    else:
        nx = ny = int(resolution)
    if min(nx, ny) < 64:
        raise ValidationError(f"resolution must be >= 64, got {resolution}")
    if nx * ny > MEMORY_BUDGET:
        raise ResourceLimit(f"{nx}x{ny} raster exceeds the {MEMORY_BUDGET} byte budget")
    from .events import _arrays
    x, y, a, b, v = _arrays(config)
    x0, y0, x1, y1 = region.bounds()
    grid = K.coverage(x, y, a, b, v, x0, y0, (x1 - x0) / nx, (y1 - y0) / ny, nx, ny)
    return Raster(grid, region)


def _spans(mask, conn):
    lab, _ = ndimage.label(mask, structure=conn)
    return lab


def raster_crossing(r: Raster, covered: bool, axis="horizontal", connectivity=4) -> bool:
    """Pixel path of covered (or vacant) pixels joining opposite sides."""
    mask = r.grid if covered else ~r.grid
    lab = _spans(mask, FOUR if connectivity == 4 else EIGHT)
    if axis in ("horizontal", 0):
        a, b = lab[:, 0], lab[:, -1]
    else:
        a, b = lab[0, :], lab[-1, :]
    common = np.intersect1d(a[a > 0], b[b > 0])
    return common.size > 0


def _annulus_mask(r: Raster, center, r_in, r_out):
    xs, ys = r.pixel_centers()
    X, Y = np.meshgrid(xs - center[0], ys - center[1])
    d = np.hypot(X, Y)
    return (d >= r_in) & (d <= r_out), np.arctan2(Y, X)


def raster_annulus_connection(r: Raster, r_in, r_out, center=(0.0, 0.0)) -> bool:
    """Covered 8-connected pixel path in the annulus from inner to outer rim."""
    ann, _ = _annulus_mask(r, center, r_in, r_out)
    xs, ys = r.pixel_centers()
    X, Y = np.meshgrid(xs - center[0], ys - center[1])
    d = np.hypot(X, Y)
    h = r.pixel_size
    lab = _spans(ann & r.grid, EIGHT)
    inner = np.unique(lab[(d < r_in + h) & (lab > 0)])
    outer = np.unique(lab[(d > r_out - h) & (lab > 0)])
    return np.intersect1d(inner, outer).size > 0


def raster_circuit(r: Raster, r_in, r_out, center=(0.0, 0.0), vacant=True, bins=64) -> bool:
    """Some 4-connected vacant (or covered) component inside the annulus winds
    around the center: the center is cut off from the raster border in the
    8-connected complement of that component."""
    ann, ang = _annulus_mask(r, center, r_in, r_out)
    mask = ann & (~r.grid if vacant else r.grid)
    lab, n = ndimage.label(mask, structure=FOUR)
    if n == 0:
        return False
    b = np.minimum(((ang + math.pi) / (2 * math.pi) * bins).astype(int), bins - 1)
    hit = np.zeros((n + 1, bins), dtype=bool)
    hit[lab[mask], b[mask]] = True
    xs, ys = r.pixel_centers()
    ci = int(np.clip(np.searchsorted(ys, center[1]), 0, len(ys) - 1))
    cj = int(np.clip(np.searchsorted(xs, center[0]), 0, len(xs) - 1))
    for comp in np.flatnonzero(hit[1:].all(axis=1)) + 1:
        rest = lab != comp
        rl, _ = ndimage.label(rest, structure=EIGHT)
        c = rl[ci, cj]
        border = np.concatenate([rl[0], rl[-1], rl[:, 0], rl[:, -1]])
        if c == 0 or not np.any(border == c):
            return True
    return False


def raster_origin_blocked(r: Raster, center=(0.0, 0.0)) -> bool:
    """The vacant 4-connected component of the center misses the border."""
    xs, ys = r.pixel_centers()
    ci = int(np.clip(np.searchsorted(ys, center[1]), 0, len(ys) - 1))
    cj = int(np.clip(np.searchsorted(xs, center[0]), 0, len(xs) - 1))
    if r.grid[ci, cj]:
        return True
    lab = _spans(~r.grid, FOUR)
    c = lab[ci, cj]
    border = np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]])
    return not np.any(border == c)


# ------------------------------------------------------------ scanlines


def conic(g):
    """Quadratic form coefficients (A, B, C) with A X^2 + 2 B X Y + C Y^2 <= 1."""
    cx, cy, a, b, v = g
    c, s = math.cos(v), math.sin(v)
    A = c * c / (a * a) + s * s / (b * b)
    B = c * s * (1.0 / (a * a) - 1.0 / (b * b))
    C = s * s / (a * a) + c * c / (b * b)
    return A, B, C


def _grain_rows(g):
    cx, cy, a, b, v = g
    A, B, C = conic(g)
    half = a * b * math.sqrt(A)
    return cy - half, cy + half


def _grain_chord(g, y):
    cx, cy, a, b, v = g
    A, B, C = conic(g)
    Y = y - cy
    disc = A - Y * Y / (a * a * b * b)
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    lo = cx + (-B * Y - sq) / A
    hi = cx + (-B * Y + sq) / A
    return np.where(ok, lo, np.inf), np.where(ok, hi, -np.inf)


def _set_rows(item):
    if item[0] == "box":
        _, bx, by, hw, hh = item
        return by - hh, by + hh
    return _grain_rows(item[1])


def _set_chord(item, y):
    if item[0] == "box":
        _, bx, by, hw, hh = item
        return np.full_like(y, bx - hw), np.full_like(y, bx + hw)
    return _grain_chord(item[1], y)


def scanline_common(items, rows=2048, levels=3) -> bool:
    """Closed convex sets (('grain', params) or ('box', cx, cy, hw, hh)) share a point.

    The horizontal chord length of an intersection of convex sets is concave
    in y, so the best row of each pass brackets the maximizer for the next."""
    ylo = max(_set_rows(it)[0] for it in items)
    yhi = min(_set_rows(it)[1] for it in items)
    if ylo > yhi:
        return False
    lo_y, hi_y = ylo, yhi
    best = -np.inf
    for _ in range(levels):
        h = (hi_y - lo_y) / rows
        ys = lo_y + (np.arange(rows) + 0.5) * h
        ys = np.concatenate([ys, [lo_y, hi_y]])
        lo = np.full(ys.shape, -np.inf)
        hi = np.full(ys.shape, np.inf)
        for it in items:
            a, b = _set_chord(it, ys)
            lo = np.maximum(lo, a)
            hi = np.minimum(hi, b)
        width = hi - lo
        i = int(np.argmax(width))
        best = max(best, width[i])
        if best >= 0:
            return True
        yc = ys[i]
        lo_y, hi_y = max(ylo, yc - h), min(yhi, yc + h)
    return bool(best >= 0)


def scanline_point(p, g) -> bool:
    lo, hi = _grain_chord(g, np.array([float(p[1])]))
    return bool(lo[0] <= p[0] <= hi[0])


def scanline_segment(seg, g, samples=2048, levels=3) -> bool:
    """Minimum of the conic gap along the segment, by refined sampling."""
    (x0, y0), (x1, y1) = seg
    cx, cy, a, b, v = g
    A, B, C = conic(g)
    t_lo, t_hi = 0.0, 1.0
    best = np.inf
    for _ in range(levels):
        h = (t_hi - t_lo) / samples
        t = np.concatenate([t_lo + (np.arange(samples) + 0.5) * h, [t_lo, t_hi]])
        X = x0 + t * (x1 - x0) - cx
        Y = y0 + t * (y1 - y0) - cy
        q = A * X * X + 2 * B * X * Y + C * Y * Y - 1.0
        i = int(np.argmin(q))
        best = min(best, q[i])
        if best <= 0:
            return True
        t_lo, t_hi = max(0.0, t[i] - h), min(1.0, t[i] + h)
    return bool(best <= 0)


def scanline_disk_inside(w, eps, g, rows=2048, levels=3) -> bool:
    """Every row chord of the disk B(w, eps) lies in the grain's chord."""
    wx, wy = float(w[0]), float(w[1])
    if eps == 0:
        return scanline_point(w, g)
    lo_y, hi_y = wy - eps, wy + eps
    worst = np.inf
    for _ in range(levels):
        h = (hi_y - lo_y) / rows
        ys = np.concatenate([lo_y + (np.arange(rows) + 0.5) * h, [lo_y, hi_y]])
        c = np.sqrt(np.maximum(0.0, eps * eps - (ys - wy) ** 2))
        glo, ghi = _grain_chord(g, ys)
        m = np.minimum(ghi - (wx + c), (wx - c) - glo)
        i = int(np.argmin(m))
        worst = min(worst, m[i])
        if worst < 0:
            return False
        lo_y, hi_y = max(wy - eps, ys[i] - h), min(wy + eps, ys[i] + h)
    return bool(worst >= 0)


def hit_region_area(w, h, R, V, kind="ellipse", rows=4096, samples=4096) -> float:
    """Area of {z : grain at z meets the w x h box}, summed over row slices.

    At height y the slice is the union over box points p of the chord of
    p + E, i.e. [x0 + min lo_E(t), x1 + max hi_E(t)] over admissible offsets t."""
    b = R if kind == "disk" else 1.0
    g = (0.0, 0.0, float(R), b, float(V))
    ey = _grain_rows(g)[1]
    y_lo, y_hi = -h / 2 - ey, h / 2 + ey
    dy = (y_hi - y_lo) / rows
    ys = y_lo + (np.arange(rows) + 0.5) * dy
    total = 0.0
    tt = np.linspace(-ey, ey, samples)
    # chords over the full height; the discriminant is clamped at the two tangent rows
    A, B, C = conic(g)
    sq = np.sqrt(np.maximum(0.0, A - tt * tt / (R * R * b * b)))
    lo_t, hi_t = (-B * tt - sq) / A, (-B * tt + sq) / A
    for y in ys:
        # offsets t = y - p_y with p_y in [-h/2, h/2]
        m = (tt >= y - h / 2) & (tt <= y + h / 2)
        if not np.any(m):
            continue
        total += (w + hi_t[m].max() - lo_t[m].min()) * dy
    return total
