"""Exact and truncated sampling of the Poisson process of grains.

Randomness comes from numpy's counter-based Philox generator; replicate ``r``
of a run with base seed ``s`` draws from ``SeedSequence(s, spawn_key=(r,))``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import DomainError, InfiniteIntensity, RejectionStall, ValidationError
from .geometry import DISK, ELLIPSE, HALF_PI, BoxSpec, GrainSpec
from .laws import INF, AxisLaw, quad

ACCEPT_FLOOR = 1e-3
MAX_ROUNDS = 10_000


def make_rng(seed: int, replicate: int | None = None) -> np.random.Generator:
    if replicate is None:
        ss = np.random.SeedSequence(int(seed))
    else:
        ss = np.random.SeedSequence(int(seed), spawn_key=(int(replicate),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class TruncationReport:
    radius: float
    error_probability: float
    method: str


@dataclass
class Configuration:
    window: BoxSpec
    u: float
    law: AxisLaw
    grain_kind: str
    x: np.ndarray
    y: np.ndarray
    R: np.ndarray
    V: np.ndarray
    seed: int | None = None
    truncation: dict = field(default_factory=lambda: {"mode": "exact", "radius": None, "error_bound": 0.0})

    def __post_init__(self):
        for name in ("x", "y", "R", "V"):
            setattr(self, name, np.ascontiguousarray(getattr(self, name), dtype=float))
        if self.grain_kind == DISK:
            self.V = np.zeros_like(self.R)

    def __len__(self):
        return self.x.shape[0]

    @property
    def b(self):
        return self.R.copy() if self.grain_kind == DISK else np.ones_like(self.R)

    def arrays(self):
        return self.x, self.y, self.R, self.b, self.V

    @property
    def grains(self):
        return [GrainSpec(float(x), float(y), float(r), float(v), self.grain_kind)
                for x, y, r, v in zip(self.x, self.y, self.R, self.V)]

    def subset(self, mask):
        return Configuration(self.window, self.u, self.law, self.grain_kind,
                             self.x[mask], self.y[mask], self.R[mask], self.V[mask],
                             self.seed, dict(self.truncation))

    def with_grains(self, grains):
        g = list(grains)
        return Configuration(self.window, self.u, self.law, self.grain_kind,
                             np.array([q.x for q in g]), np.array([q.y for q in g]),
                             np.array([q.R for q in g]), np.array([q.V for q in g]),
                             self.seed, dict(self.truncation))

    @classmethod
    def from_grains(cls, grains, window=None, u=0.0, law=None, grain_kind=None, seed=None):
        g = list(grains)
        kind = grain_kind or (g[0].kind if g else ELLIPSE)
        return cls(window or BoxSpec(1.0), float(u), law or AxisLaw.pareto(2.0), kind,
                   np.array([q.x for q in g]), np.array([q.y for q in g]),
                   np.array([q.R for q in g]), np.array([q.V for q in g]), seed)

    def concat(self, other: "Configuration"):
        return Configuration(self.window, self.u, self.law, self.grain_kind,
                             np.concatenate([self.x, other.x]), np.concatenate([self.y, other.y]),
                             np.concatenate([self.R, other.R]), np.concatenate([self.V, other.V]),
                             self.seed, dict(self.truncation))

    # ------------------------------------------------------ serialization
    def to_dict(self):
        w = self.window
        return {
            "window": {"l": w.l, "k": w.k, "cx": w.cx, "cy": w.cy},
            "u": self.u,
            "law": self.law.to_json(),
            "grain_kind": self.grain_kind,
            "truncation": dict(self.truncation),
            "seed": self.seed,
            "grains": [{"x": float(x), "y": float(y), "R": float(r), "V": float(v)}
                       for x, y, r, v in zip(self.x, self.y, self.R, self.V)],
        }

    def to_json(self) -> str:
        # float repr is the shortest decimal string that round-trips exactly
        return json.dumps(self.to_dict(), indent=1, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, d):
        w = d["window"]
        gs = d["grains"]
        return cls(BoxSpec(float(w["l"]), float(w["k"]), float(w["cx"]), float(w["cy"])),
                   float(d["u"]), AxisLaw.from_json(d["law"]), d["grain_kind"],
                   np.array([float(g["x"]) for g in gs]), np.array([float(g["y"]) for g in gs]),
                   np.array([float(g["R"]) for g in gs]), np.array([float(g["V"]) for g in gs]),
                   d.get("seed"), dict(d.get("truncation", {})))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    def same_as(self, other: "Configuration") -> bool:
        return self.to_json() == other.to_json()


# ------------------------------------------------------------ variates


def sample_major_axis(law: AxisLaw, U):
    U = np.asarray(U, dtype=float)
    if np.any(U <= 0) or np.any(U > 1):
        raise DomainError("U must lie in (0, 1]")
    out = law.sample(U)
    return float(out) if out.ndim == 0 else out


def sample_direction(U):
    U = np.asarray(U, dtype=float)
    if np.any(U < 0) or np.any(U >= 1):
        raise DomainError("U must lie in [0, 1)")
    v = math.pi * U - HALF_PI
    v = np.where(v <= -HALF_PI, v + math.pi, v)
    return float(v) if v.ndim == 0 else v


def _directions(rng, n):
    return sample_direction(rng.random(n)) if n else np.empty(0)


def _open_uniform(rng, n):
    # uniform on (0, 1]
    return 1.0 - rng.random(n)


def thin_points(points, g, rng):
    """Keep each point independently with probability g(point)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        return pts
    p = np.broadcast_to(np.asarray(g(pts), dtype=float), (pts.shape[0],))
    if np.any(p < 0) or np.any(p > 1):
        raise DomainError("thinning probabilities must lie in [0, 1]")
    return pts[rng.random(pts.shape[0]) < p]


# ------------------------------------------------------------ hit process


def _check_range(r_range):
    lo, hi = (1.0, INF) if r_range is None else (max(1.0, float(r_range[0])), float(r_range[1]))
    if not lo < hi:
        raise ValidationError(f"empty semi-axis range [{lo}, {hi})")
    return lo, hi


def hit_components(window: BoxSpec, law: AxisLaw, grain_kind: str = ELLIPSE, r_range=None):
    """Per-unit-intensity masses of the four mixture components:
    box area, grain area, w * vertical extent, h * horizontal extent."""
    w, h = window.width, window.height
    lo, hi = _check_range(r_range)
    m0 = law.mass(lo, hi)
    if grain_kind == DISK:
        m1 = law.moment(1.0, lo, hi)
        m2 = law.moment(2.0, lo, hi)
        if m2 == INF:
            raise InfiniteIntensity(
                f"disk grains need E[R^2] < inf (tail alpha > 2), law tail alpha = {law.tail_alpha}")
        return np.array([w * h * m0, math.pi * m2, 2.0 * w * m1, 2.0 * h * m1])
    m1 = law.moment(1.0, lo, hi)
    if m1 == INF:
        raise InfiniteIntensity(
            f"ellipse grains need E[R] < inf (tail alpha > 1), law tail alpha = {law.tail_alpha}")
    ext = law.mean_extent(lo, hi)
    return np.array([w * h * m0, math.pi * m1, w * ext, h * ext])


def hitting_intensity(window: BoxSpec, u: float, law: AxisLaw, grain_kind: str = ELLIPSE,
                      r_range=None) -> float:
    if u < 0:
        raise ValidationError(f"intensity u must be >= 0, got {u}")
    comps = hit_components(window, law, grain_kind, r_range)
    return float(u * comps.sum())


def _rejection(draw, accept, n, rng, what):
    """Collect n accepted proposals; draw(m) -> tuple of arrays."""
    out = None
    tried = 0
    got = 0
    for _ in range(MAX_ROUNDS):
        need = n - got
        if need <= 0:
            break
        m = max(16, int(need * 1.5))
        prop = draw(m)
        ok = accept(prop)
        tried += m
        k = int(ok.sum())
        take = [p[ok][:need] for p in prop]
        out = take if out is None else [np.concatenate([o, t]) for o, t in zip(out, take)]
        got += min(k, need)
        if tried > 10_000 and got < ACCEPT_FLOOR * tried:
            raise RejectionStall(f"{what}: acceptance {got / tried:.2e} below floor {ACCEPT_FLOOR}")
    else:
        raise RejectionStall(f"{what}: no completion after {MAX_ROUNDS} rounds")
    return out


def _sample_marks(comp, n, law, grain_kind, lo, hi, rng):
    if n == 0:
        return np.empty(0), np.empty(0)
    if grain_kind == DISK:
        t = (0.0, 2.0, 1.0, 1.0)[comp]
        R = law.sample_tilted(t, rng.random(n), lo, hi, rng.random(n))
        return R, np.zeros(n)
    if comp == 0:
        return law.sample_tilted(0.0, rng.random(n), lo, hi, rng.random(n)), _directions(rng, n)
    if comp == 1:
        return law.sample_tilted(1.0, rng.random(n), lo, hi, rng.random(n)), _directions(rng, n)

    def draw(m):
        return law.sample_tilted(1.0, rng.random(m), lo, hi, rng.random(m)), _directions(rng, m), rng.random(m)

    def accept(p):
        R, V, U = p
        # comp 2: vertical extent, comp 3: horizontal extent; both <= 2R
        s = np.sin(V) if comp == 2 else np.cos(V)
        c = np.cos(V) if comp == 2 else np.sin(V)
        return U * R <= np.sqrt((R * s) ** 2 + c * c)

    R, V, _ = _rejection(draw, accept, n, rng, "extent-weighted marks")
    return R, V


def _sample_centers(R, V, grain_kind, window, rng):
    """Centers uniform on each grain's hit region, by rejection from the
    smaller of the axis-aligned and grain-aligned enclosing rectangles."""
    n = R.shape[0]
    bx, by, hw, hh = window.params()
    b = R if grain_kind == DISK else np.ones_like(R)
    c = np.abs(np.cos(V))
    s = np.abs(np.sin(V))
    ex = np.sqrt((R * c) ** 2 + (b * s) ** 2)
    ey = np.sqrt((R * s) ** 2 + (b * c) ** 2)
    area_axis = (hw + ex) * (hh + ey)
    pw = hw * c + hh * s
    ph = hw * s + hh * c
    area_rot = (pw + R) * (ph + b)
    use_rot = area_rot < area_axis
    X = np.empty(n)
    Y = np.empty(n)
    todo = np.arange(n)
    tried = 0
    for _ in range(MAX_ROUNDS):
        if todo.size == 0:
            break
        m = todo.size
        u1 = 2.0 * rng.random(m) - 1.0
        u2 = 2.0 * rng.random(m) - 1.0
        rot = use_rot[todo]
        px = np.where(rot, u1 * (pw[todo] + R[todo]), u1 * (hw + ex[todo]))
        py = np.where(rot, u2 * (ph[todo] + b[todo]), u2 * (hh + ey[todo]))
        cv = np.where(rot, np.cos(V[todo]), 1.0)
        sv = np.where(rot, np.sin(V[todo]), 0.0)
        cx = bx + cv * px - sv * py
        cy = by + sv * px + cv * py
        ok = K.hits_box(cx, cy, R[todo], b[todo], V[todo], bx, by, hw, hh)
        tried += m
        X[todo[ok]] = cx[ok]
        Y[todo[ok]] = cy[ok]
        todo = todo[~ok]
        if tried > 10_000 and (n - todo.size) < ACCEPT_FLOOR * tried:
            raise RejectionStall("center rejection acceptance below floor")
    else:
        raise RejectionStall("center rejection did not complete")
    return X, Y


def sample_hitting_process(window: BoxSpec, u: float, law: AxisLaw, grain_kind: str = ELLIPSE,
                           rng=None, r_range=None, seed=None) -> Configuration:
    """Exact draw of the grains meeting ``window`` (optionally only those with
    semi-axis R in ``r_range``)."""
    if rng is None:
        rng = make_rng(0 if seed is None else seed)
    lo, hi = _check_range(r_range)
    comps = u * hit_components(window, law, grain_kind, (lo, hi))
    lam = float(comps.sum())
    N = int(rng.poisson(lam)) if lam > 0 else 0
    counts = rng.multinomial(N, comps / lam) if N else np.zeros(4, dtype=int)
    Rs, Vs = [], []
    for comp in range(4):
        R, V = _sample_marks(comp, int(counts[comp]), law, grain_kind, lo, hi, rng)
        Rs.append(R)
        Vs.append(V)
    R = np.concatenate(Rs) if N else np.empty(0)
    V = np.concatenate(Vs) if N else np.empty(0)
    X, Y = _sample_centers(R, V, grain_kind, window, rng)
    trunc = {"mode": "exact", "radius": None, "error_bound": 0.0}
    if r_range is not None:
        trunc["r_range"] = [lo, hi if hi < INF else None]
    return Configuration(window, u, law, grain_kind, X, Y, R, V, seed, trunc)


# ------------------------------------------------- radially thinned process


def sample_radial(center, radius: float, u: float, law: AxisLaw, r_needed, rng):
    """Poisson(u) centers on the disk B(center, radius) with independent marks,
    keeping only grains with R >= r_needed(|z - center|).

    ``r_needed`` must be non-decreasing.  The retained grains form exactly the
    restriction of the full process to those marks (independent thinning with
    retention S(r_needed(d)), then R drawn conditionally on R >= r_needed(d)).
    Returns (x, y, R, V)."""
    cx, cy = center
    edges = [0.0]
    d = min(1.0, radius)
    while d < radius:
        edges.append(d)
        d *= 1.25
    edges.append(radius)
    xs, ys, ds = [], [], []
    for e0, e1 in zip(edges[:-1], edges[1:]):
        if e1 <= e0:
            continue
        env = float(law.survival(max(1.0, float(r_needed(e0)))))
        if env <= 0.0:
            continue
        m = int(rng.poisson(u * math.pi * (e1 * e1 - e0 * e0) * env))
        if m == 0:
            continue
        dist = np.sqrt(e0 * e0 + rng.random(m) * (e1 * e1 - e0 * e0))
        keep = rng.random(m) * env <= law.survival(np.maximum(1.0, r_needed(dist)))
        dist = dist[keep]
        th = 2.0 * math.pi * rng.random(dist.size)
        xs.append(cx + dist * np.cos(th))
        ys.append(cy + dist * np.sin(th))
        ds.append(dist)
    if not ds:
        e = np.empty(0)
        return e, e.copy(), e.copy(), e.copy()
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    dist = np.concatenate(ds)
    R = law.sample_above(np.maximum(1.0, r_needed(dist)), rng.random(dist.size))
    V = _directions(rng, dist.size)
    return x, y, np.asarray(R, dtype=float), V


def sample_truncated_process(window: BoxSpec, u: float, law: AxisLaw, grain_kind: str = ELLIPSE,
                             trunc_radius: float = 64.0, rng=None, seed=None):
    """Grains centered within ``trunc_radius`` of the window center that meet
    the window, for any tail exponent, with a certified far-field bound."""
    a = window.circumradius
    if not trunc_radius >= a + 1:
        raise DomainError(f"trunc_radius must be >= window circumradius + 1 = {a + 1}, got {trunc_radius}")
    if rng is None:
        rng = make_rng(0 if seed is None else seed)
    report = truncation_report(a, trunc_radius, u, law)
    if u == 0:
        e = np.empty(0)
        cfg = Configuration(window, u, law, grain_kind, e, e, e, e, seed)
    else:
        x, y, R, V = sample_radial((window.cx, window.cy), trunc_radius, u, law,
                                   lambda d: np.asarray(d, dtype=float) - a, rng)
        cfg = Configuration(window, u, law, grain_kind, x, y, R, V, seed)
        cfg = cfg.subset(K.hits_box(*cfg.arrays(), *window.params()))
    cfg.truncation = {"mode": "truncated", "radius": float(trunc_radius),
                      "error_bound": report.error_probability}
    return cfg, report


def truncation_integral(a: float, trunc_radius: float, law: AxisLaw) -> float:
    """∫_{|z| > T} P[R >= |z| - a] (2/pi) arcsin((a + 1)/|z|) dz."""
    T = float(trunc_radius)
    if law.is_atomic:
        top = law.r + a
        if top <= T:
            return 0.0
        return quad(lambda r: 4.0 * r * math.asin(min(1.0, (a + 1.0) / r)), T, top)
    if law.tail_alpha <= 1.0:
        return INF
    cuts = sorted({T} | {t + a for t, _ in (law.pieces if law.kind == "piecewise" else ()) if t + a > T})
    cuts.append(INF)

    def f(r):
        return 4.0 * r * float(law.survival(r - a)) * math.asin(min(1.0, (a + 1.0) / r))

    # r = lo * s keeps the integrand well scaled for very large radii
    return float(sum(lo * quad(lambda s, lo=lo: f(lo * s), 1.0, hi / lo) for lo, hi in zip(cuts[:-1], cuts[1:])))


def truncation_error_bound(a: float, trunc_radius: float, u: float, law: AxisLaw) -> float:
    """Upper bound on P[some grain centered beyond trunc_radius meets B(0, a)]."""
    if not (a > 0):
        raise DomainError(f"enclosing radius must be > 0, got {a}")
    if not trunc_radius >= max(a + 1.0, 2.0 * a):
        raise DomainError(f"trunc_radius must be >= max(a + 1, 2a) = {max(a + 1, 2 * a)}, got {trunc_radius}")
    if u < 0:
        raise DomainError("u must be >= 0")
    if u == 0:
        return 0.0
    integral = truncation_integral(a, trunc_radius, law)
    if integral == INF:
        return 1.0
    return float(-math.expm1(-u * integral))


def truncation_report(a, trunc_radius, u, law) -> TruncationReport:
    if trunc_radius >= max(a + 1.0, 2.0 * a):
        return TruncationReport(float(trunc_radius), truncation_error_bound(a, trunc_radius, u, law),
                                "quadrature")
    return TruncationReport(float(trunc_radius), 0.0 if u == 0 else 1.0, "vacuous")


# ------------------------------------------------ probabilities by quadrature


def point_cover_probability(d: float, law: AxisLaw) -> float:
    """P[a fixed point lies in the ellipse grain centered at distance d]."""
    if d <= 1.0:
        return 1.0

    def g(R):
        num = 1.0 / (d * d) - 1.0 / (R * R)
        den = 1.0 - 1.0 / (R * R)
        return 2.0 / math.pi * math.asin(min(1.0, math.sqrt(max(0.0, num) / den)))

    if law.is_atomic:
        return g(law.r) if law.r >= d else 0.0
    total = 0.0
    for lo, hi, a, s in law._segments():
        c = max(lo, d)
        if not c < hi:
            continue
        k = s * a * lo ** a
        total += quad(lambda R, k=k, a=a: g(R) * k * R ** (-a - 1.0), c, hi)
    return total
