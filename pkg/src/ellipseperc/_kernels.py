"""Compiled scalar and array kernels for ellipse/disk/box/segment predicates.

A grain is passed as five floats ``(cx, cy, a, b, v)``: center, semi-axis ``a``
along direction ``v`` and semi-axis ``b`` across it, with ``a >= b``.
Ellipse grains use ``(R, 1)``, disk grains ``(R, R)``.
A box is ``(bx, by, hw, hh)``: center and half sizes.
"""
import math

import numpy as np
from numba import njit

TOL = 1e-9


@njit(cache=True)
def to_local(px, py, cx, cy, v):
    c = math.cos(v)
    s = math.sin(v)
    dx = px - cx
    dy = py - cy
    return c * dx + s * dy, -s * dx + c * dy


@njit(cache=True)
def qform(px, py, cx, cy, a, b, v):
    x, y = to_local(px, py, cx, cy, v)
    x /= a
    y /= b
    return x * x + y * y - 1.0


@njit(cache=True)
def half_extents(a, b, v):
    c = math.cos(v)
    s = math.sin(v)
    ex = math.sqrt((a * c) ** 2 + (b * s) ** 2)
    ey = math.sqrt((a * s) ** 2 + (b * c) ** 2)
    return ex, ey


# ---------------------------------------------------------------- segments


@njit(cache=True)
def seg_interval(x0, y0, x1, y1, cx, cy, a, b, v, slack):
    """Parameter interval [lo, hi] of the segment inside the grain scaled to
    radius sqrt(1 + slack) in its unit frame.  Empty when lo > hi."""
    lx0, ly0 = to_local(x0, y0, cx, cy, v)
    lx1, ly1 = to_local(x1, y1, cx, cy, v)
    px = lx0 / a
    py = ly0 / b
    dx = (lx1 - lx0) / a
    dy = (ly1 - ly0) / b
    A = dx * dx + dy * dy
    B = px * dx + py * dy
    C = px * px + py * py - (1.0 + slack)
    if A == 0.0:
        if C <= 0.0:
            return 0.0, 1.0
        return 1.0, 0.0
    disc = B * B - A * C
    if disc < 0.0:
        return 1.0, 0.0
    sq = math.sqrt(disc)
    if B >= 0.0:
        qq = -(B + sq)
    else:
        qq = -B + sq
    if qq == 0.0:
        t1 = 0.0
        t2 = 0.0
    else:
        t1 = qq / A
        t2 = C / qq
    if t1 > t2:
        t1, t2 = t2, t1
    lo = max(t1, 0.0)
    hi = min(t2, 1.0)
    return lo, hi


@njit(cache=True)
def seg_hits(x0, y0, x1, y1, cx, cy, a, b, v, slack):
    lo, hi = seg_interval(x0, y0, x1, y1, cx, cy, a, b, v, slack)
    return lo <= hi


@njit(cache=True)
def seg_min_q(x0, y0, x1, y1, cx, cy, a, b, v):
    """Minimum of the membership gap along the closed segment."""
    lx0, ly0 = to_local(x0, y0, cx, cy, v)
    lx1, ly1 = to_local(x1, y1, cx, cy, v)
    px = lx0 / a
    py = ly0 / b
    dx = (lx1 - lx0) / a
    dy = (ly1 - ly0) / b
    A = dx * dx + dy * dy
    t = 0.0
    if A > 0.0:
        t = -(px * dx + py * dy) / A
        t = min(1.0, max(0.0, t))
    qx = px + t * dx
    qy = py + t * dy
    return qx * qx + qy * qy - 1.0


# ---------------------------------------------------- point to ellipse


@njit(cache=True)
def _get_root(r0, z0, z1, g):
    n0 = r0 * z0
    s0 = z1 - 1.0
    s1 = 0.0 if g < 0.0 else math.sqrt(n0 * n0 + z1 * z1) - 1.0
    s = 0.0
    for _ in range(2000):
        s = 0.5 * (s0 + s1)
        if s == s0 or s == s1:
            break
        r_0 = n0 / (s + r0)
        r_1 = z1 / (s + 1.0)
        g = r_0 * r_0 + r_1 * r_1 - 1.0
        if g > 0.0:
            s0 = s
        elif g < 0.0:
            s1 = s
        else:
            break
    return s


@njit(cache=True)
def _closest_quadrant(e0, e1, y0, y1):
    # e0 >= e1 > 0, y0 >= 0, y1 >= 0 (robust bisection on the secular equation)
    if y1 > 0.0:
        if y0 > 0.0:
            z0 = y0 / e0
            z1 = y1 / e1
            g = z0 * z0 + z1 * z1 - 1.0
            if g != 0.0:
                r0 = (e0 / e1) ** 2
                sbar = _get_root(r0, z0, z1, g)
                return r0 * y0 / (sbar + r0), y1 / (sbar + 1.0)
            return y0, y1
        return 0.0, e1
    numer0 = e0 * y0
    denom0 = e0 * e0 - e1 * e1
    if numer0 < denom0:
        xde0 = numer0 / denom0
        return e0 * xde0, e1 * math.sqrt(max(0.0, 1.0 - xde0 * xde0))
    return e0, 0.0


@njit(cache=True)
def closest_on_boundary(e0, e1, px, py):
    """Closest boundary point of the axis-aligned ellipse (e0 >= e1) to p."""
    x0, x1 = _closest_quadrant(e0, e1, abs(px), abs(py))
    if px < 0.0:
        x0 = -x0
    if py < 0.0:
        x1 = -x1
    return x0, x1


@njit(cache=True)
def _farthest_quadrant(e0, e1, y0, y1):
    best = max(math.hypot(e0 + y0, y1), math.hypot(y0, e1 + y1))
    if y0 > 0.0:
        # lam = e0^2 + s, s > 0
        gap = e0 * e0 - e1 * e1
        lo = 0.0
        hi = 2.0 * math.hypot(e0 * y0, e1 * y1) + 1e-300
        for _ in range(2000):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            g = (e0 * y0 / mid) ** 2 + (e1 * y1 / (mid + gap)) ** 2 - 1.0
            if g > 0.0:
                lo = mid
            else:
                hi = mid
        s = 0.5 * (lo + hi)
        X = e0 * e0 * y0 / s
        Y = e1 * e1 * y1 / (s + gap)
        best = max(best, math.hypot(X + y0, Y + y1))
    elif e0 > e1:
        Y = y1 * e1 * e1 / (e0 * e0 - e1 * e1)
        if Y <= e1:
            X = e0 * math.sqrt(max(0.0, 1.0 - (Y / e1) ** 2))
            best = max(best, math.hypot(X, Y + y1))
    return best


@njit(cache=True)
def min_dist(px, py, cx, cy, a, b, v):
    """Euclidean distance from p to the closed grain (0 inside)."""
    lx, ly = to_local(px, py, cx, cy, v)
    if (lx / a) ** 2 + (ly / b) ** 2 <= 1.0:
        return 0.0
    x0, x1 = closest_on_boundary(a, b, lx, ly)
    return math.hypot(x0 - lx, x1 - ly)


@njit(cache=True)
def max_dist(px, py, cx, cy, a, b, v):
    """Largest distance from p to a point of the grain."""
    lx, ly = to_local(px, py, cx, cy, v)
    return _farthest_quadrant(a, b, abs(lx), abs(ly))


@njit(cache=True)
def disk_in(wx, wy, eps, cx, cy, a, b, v, tol):
    lx, ly = to_local(wx, wy, cx, cy, v)
    q = (lx / a) ** 2 + (ly / b) ** 2 - 1.0
    if eps == 0.0:
        return q <= tol
    if q > tol:
        return False
    x0, x1 = closest_on_boundary(a, b, lx, ly)
    d = math.hypot(x0 - lx, x1 - ly)
    if q > 0.0:
        d = -d
    return d >= eps - tol


@njit(cache=True)
def disk_in_gap(wx, wy, eps, cx, cy, a, b, v):
    """eps minus the signed distance from w to the boundary (positive inside)."""
    lx, ly = to_local(wx, wy, cx, cy, v)
    q = (lx / a) ** 2 + (ly / b) ** 2 - 1.0
    x0, x1 = closest_on_boundary(a, b, lx, ly)
    d = math.hypot(x0 - lx, x1 - ly)
    if q > 0.0:
        d = -d
    return eps - d


# ------------------------------------------------------- grain vs grain


@njit(cache=True)
def _key_less(ax, ay, aa, ab, av, bx, by, ba, bb, bv):
    ka = aa * ab
    kb = ba * bb
    if ka != kb:
        return ka < kb
    if aa != ba:
        return aa < ba
    if ax != bx:
        return ax < bx
    if ay != by:
        return ay < by
    return av < bv


@njit(cache=True)
def grain_grain(ax, ay, aa, ab, av, bx, by, ba, bb, bv, tol):
    """Returns (hit, wx, wy, dist).

    The smaller grain f is mapped onto the unit disk; dist is the distance in
    that frame from the origin to the image of the other grain, and (wx, wy)
    a point of the intersection when it is nonempty."""
    if _key_less(bx, by, ba, bb, bv, ax, ay, aa, ab, av):
        fx, fy, fa, fb, fv = bx, by, ba, bb, bv
        ox, oy, oa, ob, ov = ax, ay, aa, ab, av
    else:
        fx, fy, fa, fb, fv = ax, ay, aa, ab, av
        ox, oy, oa, ob, ov = bx, by, ba, bb, bv
    cf = math.cos(fv)
    sf = math.sin(fv)
    dx = ox - fx
    dy = oy - fy
    mcx = (cf * dx + sf * dy) / fa
    mcy = (-sf * dx + cf * dy) / fb
    d = ov - fv
    cd = math.cos(d)
    sd = math.sin(d)
    m00 = cd * oa / fa
    m01 = -sd * ob / fa
    m10 = sd * oa / fb
    m11 = cd * ob / fb
    p = m00 * m00 + m01 * m01
    q = m00 * m10 + m01 * m11
    r = m10 * m10 + m11 * m11
    th = 0.5 * math.atan2(2.0 * q, p - r)
    l1 = 0.5 * (p + r) + math.sqrt(0.25 * (p - r) ** 2 + q * q)
    det = m00 * m11 - m01 * m10
    l2 = det * det / l1
    s1 = math.sqrt(l1)
    s2 = math.sqrt(l2)
    ct = math.cos(th)
    st = math.sin(th)
    # origin of the unit frame, seen from the image ellipse's principal frame
    ux = -(ct * mcx + st * mcy)
    uy = -(-st * mcx + ct * mcy)
    if (ux / s1) ** 2 + (uy / s2) ** 2 <= 1.0:
        return True, fx, fy, 0.0
    x0, x1 = closest_on_boundary(s1, s2, ux, uy)
    dist = math.hypot(x0 - ux, x1 - uy)
    mx = mcx + ct * x0 - st * x1
    my = mcy + st * x0 + ct * x1
    lx = mx * fa
    ly = my * fb
    wx = fx + cf * lx - sf * ly
    wy = fy + sf * lx + cf * ly
    return dist <= 1.0 + tol, wx, wy, dist


@njit(cache=True)
def grain_box(cx, cy, a, b, v, bx, by, hw, hh, tol):
    if abs(cx - bx) <= hw + tol and abs(cy - by) <= hh + tol:
        return True
    x0 = bx - hw
    x1 = bx + hw
    y0 = by - hh
    y1 = by + hh
    if seg_hits(x0, y0, x1, y0, cx, cy, a, b, v, tol):
        return True
    if seg_hits(x1, y0, x1, y1, cx, cy, a, b, v, tol):
        return True
    if seg_hits(x1, y1, x0, y1, cx, cy, a, b, v, tol):
        return True
    return seg_hits(x0, y1, x0, y0, cx, cy, a, b, v, tol)


@njit(cache=True)
def triple(ax, ay, aa, ab, av, bx, by, ba, bb, bv, px, py, hw, hh, tol):
    """Closed grains a, b and the closed box share a point.

    If a common point w of a and b lies outside the box while a ∩ b meets it,
    the convex set a ∩ b must cross the box boundary, so checking the four
    edges against both grains settles the remaining cases."""
    hit, wx, wy, _ = grain_grain(ax, ay, aa, ab, av, bx, by, ba, bb, bv, tol)
    if not hit:
        return False
    if abs(wx - px) <= hw + tol and abs(wy - py) <= hh + tol:
        return True
    xs = (px - hw, px + hw, px + hw, px - hw)
    ys = (py - hh, py - hh, py + hh, py + hh)
    for e in range(4):
        x0 = xs[e]
        y0 = ys[e]
        x1 = xs[(e + 1) % 4]
        y1 = ys[(e + 1) % 4]
        lo_a, hi_a = seg_interval(x0, y0, x1, y1, ax, ay, aa, ab, av, tol)
        if lo_a > hi_a:
            continue
        lo_b, hi_b = seg_interval(x0, y0, x1, y1, bx, by, ba, bb, bv, tol)
        if max(lo_a, lo_b) <= min(hi_a, hi_b):
            return True
    return False


# --------------------------------------------------------- gap values


@njit(cache=True)
def _bisect_gap(kind, ax, ay, aa, ab, av, bx, by, ba, bb, bv, px, py, hw, hh):
    # kind 0: grain-grain, 1: grain-box, 2: grain-grain-box
    lo = -1.0
    hi = 1.0
    for _ in range(200):
        if _scaled_feasible(kind, hi, ax, ay, aa, ab, av, bx, by, ba, bb, bv, px, py, hw, hh):
            break
        lo = hi
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _scaled_feasible(kind, mid, ax, ay, aa, ab, av, bx, by, ba, bb, bv, px, py, hw, hh):
            hi = mid
        else:
            lo = mid
    return hi


@njit(cache=True)
def _scaled_feasible(kind, t, ax, ay, aa, ab, av, bx, by, ba, bb, bv, px, py, hw, hh):
    if t <= -1.0:
        return False
    f = math.sqrt(1.0 + t)
    if kind == 0:
        return grain_grain(ax, ay, aa * f, ab * f, av, bx, by, ba * f, bb * f, bv, 0.0)[0]
    if hw + t < 0.0 or hh + t < 0.0:
        return False
    if kind == 1:
        return grain_box(ax, ay, aa * f, ab * f, av, px, py, hw + t, hh + t, 0.0)
    return triple(ax, ay, aa * f, ab * f, av, bx, by, ba * f, bb * f, bv,
                  px, py, hw + t, hh + t, 0.0)


@njit(cache=True)
def gap_grain_grain(ax, ay, aa, ab, av, bx, by, ba, bb, bv):
    return _bisect_gap(0, ax, ay, aa, ab, av, bx, by, ba, bb, bv, 0.0, 0.0, 0.0, 0.0)


@njit(cache=True)
def gap_grain_box(ax, ay, aa, ab, av, px, py, hw, hh):
    return _bisect_gap(1, ax, ay, aa, ab, av, 0.0, 0.0, 1.0, 1.0, 0.0, px, py, hw, hh)


@njit(cache=True)
def gap_triple(ax, ay, aa, ab, av, bx, by, ba, bb, bv, px, py, hw, hh):
    return _bisect_gap(2, ax, ay, aa, ab, av, bx, by, ba, bb, bv, px, py, hw, hh)


# ------------------------------------------------------------ arrays


@njit(cache=True)
def hits_box(x, y, a, b, v, bx, by, hw, hh):
    n = x.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        out[i] = grain_box(x[i], y[i], a[i], b[i], v[i], bx, by, hw, hh, TOL)
    return out


@njit(cache=True)
def contains_point(x, y, a, b, v, px, py):
    n = x.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        out[i] = qform(px, py, x[i], y[i], a[i], b[i], v[i]) <= TOL
    return out


@njit(cache=True)
def contains_disk(x, y, a, b, v, wx, wy, eps):
    n = x.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        out[i] = disk_in(wx, wy, eps, x[i], y[i], a[i], b[i], v[i], TOL)
    return out


@njit(cache=True)
def hits_segment(x, y, a, b, v, x0, y0, x1, y1):
    n = x.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        out[i] = seg_hits(x0, y0, x1, y1, x[i], y[i], a[i], b[i], v[i], TOL)
    return out


@njit(cache=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True)
def box_components(x, y, a, b, v, bx, by, hw, hh, axis):
    """Union-find over grains meeting the box, edges restricted to the box.

    Returns (node index, root, mark_lo, mark_hi) arrays; marks refer to the
    left/right sides for axis 0 and bottom/top for axis 1."""
    n = x.shape[0]
    inbox = hits_box(x, y, a, b, v, bx, by, hw, hh)
    m = 0
    for i in range(n):
        if inbox[i]:
            m += 1
    idx = np.empty(m, dtype=np.int64)
    j = 0
    for i in range(n):
        if inbox[i]:
            idx[j] = i
            j += 1
    lo_mark = np.zeros(m, dtype=np.bool_)
    hi_mark = np.zeros(m, dtype=np.bool_)
    x0 = bx - hw
    x1 = bx + hw
    y0 = by - hh
    y1 = by + hh
    for j in range(m):
        i = idx[j]
        if axis == 0:
            lo_mark[j] = seg_hits(x0, y0, x0, y1, x[i], y[i], a[i], b[i], v[i], TOL)
            hi_mark[j] = seg_hits(x1, y0, x1, y1, x[i], y[i], a[i], b[i], v[i], TOL)
        else:
            lo_mark[j] = seg_hits(x0, y0, x1, y0, x[i], y[i], a[i], b[i], v[i], TOL)
            hi_mark[j] = seg_hits(x0, y1, x1, y1, x[i], y[i], a[i], b[i], v[i], TOL)
    xmin = np.empty(m)
    xmax = np.empty(m)
    ymin = np.empty(m)
    ymax = np.empty(m)
    for j in range(m):
        i = idx[j]
        ex, ey = half_extents(a[i], b[i], v[i])
        xmin[j] = max(x[i] - ex, x0)
        xmax[j] = min(x[i] + ex, x1)
        ymin[j] = max(y[i] - ey, y0)
        ymax[j] = min(y[i] + ey, y1)
    parent = np.arange(m)
    order = np.argsort(xmin)
    for p in range(m):
        j = order[p]
        for qi in range(p + 1, m):
            k = order[qi]
            if xmin[k] > xmax[j] + TOL:
                break
            if ymin[k] > ymax[j] + TOL or ymin[j] > ymax[k] + TOL:
                continue
            rj = _find(parent, j)
            rk = _find(parent, k)
            if rj == rk:
                continue
            i1 = idx[j]
            i2 = idx[k]
            if triple(x[i1], y[i1], a[i1], b[i1], v[i1], x[i2], y[i2], a[i2], b[i2], v[i2],
                      bx, by, hw, hh, TOL):
                parent[rk] = rj
    roots = np.empty(m, dtype=np.int64)
    for j in range(m):
        roots[j] = _find(parent, j)
    return idx, roots, lo_mark, hi_mark


@njit(cache=True)
def crosses(roots, lo_mark, hi_mark):
    m = roots.shape[0]
    has_lo = np.zeros(m, dtype=np.bool_)
    has_hi = np.zeros(m, dtype=np.bool_)
    for j in range(m):
        if lo_mark[j]:
            has_lo[roots[j]] = True
        if hi_mark[j]:
            has_hi[roots[j]] = True
    for j in range(m):
        if has_lo[j] and has_hi[j]:
            return True
    return False


@njit(cache=True)
def annulus_components(x, y, a, b, v, ox, oy, r_in, r_out):
    n = x.shape[0]
    keep = np.zeros(n, dtype=np.bool_)
    inner = np.zeros(n, dtype=np.bool_)
    outer = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        dmin = min_dist(ox, oy, x[i], y[i], a[i], b[i], v[i])
        dmax = max_dist(ox, oy, x[i], y[i], a[i], b[i], v[i])
        keep[i] = dmin <= r_out + TOL and dmax >= r_in - TOL
        inner[i] = dmin <= r_in + TOL and dmax >= r_in - TOL
        outer[i] = dmin <= r_out + TOL and dmax >= r_out - TOL
    m = 0
    for i in range(n):
        if keep[i]:
            m += 1
    idx = np.empty(m, dtype=np.int64)
    j = 0
    for i in range(n):
        if keep[i]:
            idx[j] = i
            j += 1
    xmin = np.empty(m)
    xmax = np.empty(m)
    ymin = np.empty(m)
    ymax = np.empty(m)
    lo_mark = np.empty(m, dtype=np.bool_)
    hi_mark = np.empty(m, dtype=np.bool_)
    for j in range(m):
        i = idx[j]
        ex, ey = half_extents(a[i], b[i], v[i])
        xmin[j] = x[i] - ex
        xmax[j] = x[i] + ex
        ymin[j] = y[i] - ey
        ymax[j] = y[i] + ey
        lo_mark[j] = inner[i]
        hi_mark[j] = outer[i]
    parent = np.arange(m)
    order = np.argsort(xmin)
    for p in range(m):
        j = order[p]
        for qi in range(p + 1, m):
            k = order[qi]
            if xmin[k] > xmax[j] + TOL:
                break
            if ymin[k] > ymax[j] + TOL or ymin[j] > ymax[k] + TOL:
                continue
            rj = _find(parent, j)
            rk = _find(parent, k)
            if rj == rk:
                continue
            i1 = idx[j]
            i2 = idx[k]
            if grain_grain(x[i1], y[i1], a[i1], b[i1], v[i1],
                           x[i2], y[i2], a[i2], b[i2], v[i2], TOL)[0]:
                parent[rk] = rj
    roots = np.empty(m, dtype=np.int64)
    for j in range(m):
        roots[j] = _find(parent, j)
    return idx, roots, lo_mark, hi_mark


@njit(cache=True)
def boxes_hit_by_grain(cx, cy, a, b, v, gx0, gy0, side, nx, ny):
    """Grid cells (column, row) of a regular grid met by one grain."""
    ex, ey = half_extents(a, b, v)
    c0 = max(0, int(math.floor((cx - ex - gx0) / side)) - 1)
    c1 = min(nx - 1, int(math.floor((cx + ex - gx0) / side)) + 1)
    r0 = max(0, int(math.floor((cy - ey - gy0) / side)) - 1)
    r1 = min(ny - 1, int(math.floor((cy + ey - gy0) / side)) + 1)
    cols = []
    rows = []
    h = 0.5 * side
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            bx = gx0 + (c + 0.5) * side
            by = gy0 + (r + 0.5) * side
            if grain_box(cx, cy, a, b, v, bx, by, h, h, TOL):
                cols.append(c)
                rows.append(r)
    out = np.empty((len(cols), 2), dtype=np.int64)
    for i in range(len(cols)):
        out[i, 0] = cols[i]
        out[i, 1] = rows[i]
    return out


@njit(cache=True)
def remove_boxes(x, y, a, b, v, gx0, gy0, side, nx, ny, bits, span):
    """Clear bits[row, col] of every cell met by a grain; span[i] receives
    the largest L-infinity index distance among cells met by grain i."""
    for i in range(x.shape[0]):
        cells = boxes_hit_by_grain(x[i], y[i], a[i], b[i], v[i], gx0, gy0, side, nx, ny)
        s = 0
        for p in range(cells.shape[0]):
            bits[cells[p, 1], cells[p, 0]] = False
            for q in range(p + 1, cells.shape[0]):
                d = max(abs(cells[p, 0] - cells[q, 0]), abs(cells[p, 1] - cells[q, 1]))
                if d > s:
                    s = d
        span[i] = s


@njit(cache=True)
def coverage(x, y, a, b, v, x0, y0, dx, dy, nx, ny):
    """Pixel (row, col) covered iff its center lies in some grain."""
    grid = np.zeros((ny, nx), dtype=np.bool_)
    for i in range(x.shape[0]):
        ex, ey = half_extents(a[i], b[i], v[i])
        c0 = max(0, int(math.floor((x[i] - ex - x0) / dx - 0.5)))
        c1 = min(nx - 1, int(math.ceil((x[i] + ex - x0) / dx - 0.5)))
        r0 = max(0, int(math.floor((y[i] - ey - y0) / dy - 0.5)))
        r1 = min(ny - 1, int(math.ceil((y[i] + ey - y0) / dy - 0.5)))
        cv = math.cos(v[i])
        sv = math.sin(v[i])
        for r in range(r0, r1 + 1):
            py = y0 + (r + 0.5) * dy - y[i]
            for c in range(c0, c1 + 1):
                if grid[r, c]:
                    continue
                px = x0 + (c + 0.5) * dx - x[i]
                lx = (cv * px + sv * py) / a[i]
                ly = (-sv * px + cv * py) / b[i]
                if lx * lx + ly * ly <= 1.0:
                    grid[r, c] = True
    return grid
