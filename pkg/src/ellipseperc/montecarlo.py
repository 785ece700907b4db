"""Replicated estimation: event probabilities, covariances, LLN counts, fits."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import _kernels as K
from . import events as ev
from .errors import DomainError, ValidationError
from .geometry import DISK, ELLIPSE, BoxSpec
from .laws import INF, AxisLaw
from .sampling import (Configuration, make_rng, sample_direction, sample_hitting_process,
                       sample_radial, sample_truncated_process,
                       truncation_report)

CSV_FIELDS = ["event", "alpha", "u", "l", "k", "extra", "n", "successes", "phat", "ci_lo", "ci_hi", "seed"]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ELLIPSEPERC_THREADS", "1")))
    except ValueError:
        raise ValidationError("ELLIPSEPERC_THREADS must be a positive integer") from None


# --------------------------------------------------------------- records


@dataclass
class EventParams:
    law: AxisLaw
    u: float
    grain_kind: str = ELLIPSE
    l: float | None = None
    k: float = 1.0
    a: float | None = None
    eps: float = 0.0
    point: tuple = (0.0, 0.0)
    r_in: float | None = None
    r_out: float | None = None
    trunc_radius: float | None = None
    allow_uncertified: bool = False

    def record(self):
        d = asdict(self)
        d["law"] = self.law.label()
        d["point"] = list(self.point)
        return d


@dataclass
class EstimateResult:
    event: str
    params: dict
    n: int
    successes: int
    phat: float
    ci: tuple
    level: float
    seed: int
    wall_time: float = 0.0

    def row(self):
        p = self.params
        law = p.get("law", "")
        alpha = law.split(":", 1)[1] if law.startswith("pareto:") else ""
        extra = {key: p[key] for key in ("a", "eps", "r_in", "r_out", "trunc_radius") if p.get(key) not in (None, 0.0)}
        if p.get("grain_kind", ELLIPSE) != ELLIPSE:
            extra["grain"] = p["grain_kind"]
        if not law.startswith("pareto:"):
            extra["law"] = law
        if tuple(p.get("point", (0.0, 0.0))) != (0.0, 0.0):
            extra["point"] = "{}:{}".format(*p["point"])
        return {
            "event": self.event, "alpha": alpha, "u": repr(float(p["u"])),
            "l": "" if p.get("l") is None else repr(float(p["l"])), "k": repr(float(p.get("k", 1.0))),
            "extra": ";".join(f"{k}={v}" for k, v in extra.items()),
            "n": str(self.n), "successes": str(self.successes), "phat": repr(self.phat),
            "ci_lo": repr(float(self.ci[0])), "ci_hi": repr(float(self.ci[1])), "seed": str(self.seed),
        }


def rows_to_csv(rows, extra_fields=()) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS + list(extra_fields), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def rows_to_json(rows) -> str:
    return json.dumps(list(rows), indent=1) + "\n"


# ------------------------------------------------------------- intervals


def wilson_ci(successes: int, n: int, level: float = 0.95):
    if not (n >= 1 and 0 <= successes <= n):
        raise ValidationError(f"need n >= 1 and 0 <= successes <= n, got {successes}/{n}")
    if not 0 < level < 1:
        raise ValidationError(f"level must lie in (0, 1), got {level}")
    z = stats.norm.ppf(0.5 + level / 2)
    p = successes / n
    den = 1 + z * z / n
    center = (p + z * z / (2 * n)) / den
    half = z / den * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return lo, hi


@dataclass
class PowerFit:
    slope: float
    intercept: float
    stderr_slope: float
    r_squared: float
    points: list = field(default_factory=list)

    def predict(self, x):
        return np.exp(self.intercept) * np.asarray(x, dtype=float) ** self.slope


def fit_power_law(points) -> PowerFit:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise DomainError("need at least 3 points")
    if np.any(pts <= 0):
        raise DomainError("power-law fit needs positive coordinates")
    return _ols(np.log(pts[:, 0]), np.log(pts[:, 1]), pts)


def fit_linear(x, y) -> PowerFit:
    """OLS of y on x (used for the logarithmic LLN regime)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _ols(x, y, np.column_stack([x, y]))


def _ols(lx, ly, pts):
    if np.ptp(ly) == 0:
        return PowerFit(0.0, float(ly[0]), 0.0, 1.0, pts.tolist())
    res = stats.linregress(lx, ly)
    return PowerFit(float(res.slope), float(res.intercept), float(res.stderr),
                    float(res.rvalue ** 2), pts.tolist())


# ------------------------------------------------------------------ plans


@dataclass
class Plan:
    window: BoxSpec
    sample: object          # rng -> Configuration
    evaluate: object        # Configuration -> bool
    error_bound: float = 0.0


def _need(p: EventParams, *names):
    for nm in names:
        if getattr(p, nm) is None:
            raise ValidationError(f"parameter '{nm}' is required for this event")


def event_window(event: str, p: EventParams) -> BoxSpec:
    px, py = p.point
    if event in ("covered_lr", "covered_tb", "vacant_lr", "one_ellipse_lr"):
        _need(p, "l")
        return BoxSpec(p.l, p.k)
    if event == "circuit3":
        _need(p, "a")
        return BoxSpec(2.0 * p.a)
    if event == "point_covered":
        return BoxSpec(1.0, 1.0, px, py)
    if event == "disk_covered":
        return BoxSpec(max(1.0, 2.0 * p.eps), 1.0, px, py)
    if event == "annulus_conn":
        r_in, r_out = annulus_radii(p)
        return BoxSpec(2.0 * r_out, 1.0, px, py)
    if event == "vacant_annulus_circuit":
        _need(p, "l")
        return BoxSpec(6.0 * p.l, 1.0, px, py)
    raise ValidationError(f"unknown event {event!r}; expected one of {', '.join(ev.EVENT_NAMES)}")


def annulus_radii(p: EventParams):
    r_in = p.r_in if p.r_in is not None else p.l
    if r_in is None:
        raise ValidationError("annulus_conn needs r_in (or l)")
    r_out = p.r_out if p.r_out is not None else 8.0 * r_in
    return r_in, r_out


def event_evaluator(event: str, p: EventParams):
    box = BoxSpec(p.l, p.k) if p.l is not None else None
    if event == "covered_lr":
        return lambda c: ev.covered_crossing(c, box, "horizontal")
    if event == "covered_tb":
        return lambda c: ev.covered_crossing(c, box, "vertical")
    if event == "vacant_lr":
        return lambda c: ev.vacant_lr_crossing(c, box)
    if event == "one_ellipse_lr":
        return lambda c: ev.one_ellipse_crossing(c, box)
    if event == "circuit3":
        spec = ev.CircuitSpec(p.a)
        return lambda c: ev.three_ellipse_circuit(c, spec)
    if event == "point_covered":
        return lambda c: ev.point_covered(c, p.point)
    if event == "disk_covered":
        return lambda c: ev.disk_covered(c, p.point, p.eps)
    if event == "annulus_conn":
        r_in, r_out = annulus_radii(p)
        return lambda c: ev.annulus_connection(c, r_in, r_out, p.point)
    if event == "vacant_annulus_circuit":
        return lambda c: ev.vacant_circuit_in_annulus(c, p.l, p.point)
    raise ValidationError(f"unknown event {event!r}")


def sample_circuit_regions(spec: ev.CircuitSpec, u, law: AxisLaw, grain_kind, rng, seed=None):
    """Grains centered in D_1, D_2, D_3 with R large enough to join the paired
    segments; all other grains are irrelevant to the circuit event."""
    x0, x1, y0, y1 = spec._d1
    r_min = spec.r_min
    s = float(law.survival(r_min))
    xs, ys, Rs, Vs = [], [], [], []
    for t in spec.angles:
        m = int(rng.poisson(u * spec.d_area * s)) if s > 0 else 0
        px = x0 + (x1 - x0) * rng.random(m)
        py = y0 + (y1 - y0) * rng.random(m)
        c, sn = math.cos(t), math.sin(t)
        xs.append(c * px - sn * py)
        ys.append(sn * px + c * py)
        Rs.append(np.asarray(law.sample_above(np.full(m, r_min), rng.random(m)), dtype=float))
        Vs.append(sample_direction(rng.random(m)) if m else np.empty(0))
    return Configuration(BoxSpec(2 * spec.a), u, law, grain_kind, np.concatenate(xs), np.concatenate(ys),
                         np.concatenate(Rs), np.concatenate(Vs), seed,
                         {"mode": "exact", "radius": None, "error_bound": 0.0, "region": "circuit"})


def make_plan(event: str, p: EventParams, level: float = 0.95) -> Plan:
    if p.u < 0:
        raise ValidationError(f"intensity u must be >= 0, got {p.u}")
    window = event_window(event, p)
    evaluate = event_evaluator(event, p)
    if event == "circuit3":
        spec = ev.CircuitSpec(p.a)
        return Plan(window, lambda rng: sample_circuit_regions(spec, p.u, p.law, p.grain_kind, rng), evaluate)
    if p.trunc_radius is not None:
        bound = truncation_report(window.circumradius, p.trunc_radius, p.u, p.law).error_probability
        if bound > (1 - level) / 10 and not p.allow_uncertified:
            raise ValidationError(
                f"truncation error bound {bound:.3g} exceeds (1 - level)/10 = {(1 - level) / 10:.3g} "
                f"at trunc_radius={p.trunc_radius}; enlarge the radius or allow uncertified runs")

        def sample(rng):
            return sample_truncated_process(window, p.u, p.law, p.grain_kind, p.trunc_radius, rng)[0]
        return Plan(window, sample, evaluate, bound)
    r_range = None
    if event == "one_ellipse_lr":
        # only grains with R >= lk/2 can meet both vertical sides
        r_range = (max(1.0, 0.5 * p.l * p.k), INF)
    sample_hitting_process(window, 0.0, p.law, p.grain_kind, make_rng(0), r_range)  # validates moments

    def sample(rng):
        return sample_hitting_process(window, p.u, p.law, p.grain_kind, rng, r_range)
    return Plan(window, sample, evaluate)


# ---------------------------------------------------------------- runners


def _run_replicates(fn, n, workers):
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or n < 2 * workers:
        return [fn(r) for r in range(n)]
    chunks = np.array_split(np.arange(n), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda idx: [fn(int(r)) for r in idx], chunks))
    return [v for part in parts for v in part]


def replicate_outcomes(event, params: EventParams, n: int, seed: int, level=0.95, workers=None):
    plan = make_plan(event, params, level)

    def rep(r):
        return bool(plan.evaluate(plan.sample(make_rng(seed, r))))
    return np.array(_run_replicates(rep, n, workers), dtype=bool)


def estimate(event, params: EventParams, n: int, seed: int, level: float = 0.95, workers=None) -> EstimateResult:
    if n < 1:
        raise ValidationError(f"replicate count n must be >= 1, got {n}")
    t0 = time.perf_counter()
    out = replicate_outcomes(event, params, n, seed, level, workers)
    s = int(out.sum())
    lo, hi = wilson_ci(s, n, level)
    return EstimateResult(event, params.record(), n, s, s / n, (lo, hi), level, int(seed),
                          time.perf_counter() - t0)


def covariance(event_a, event_b, params: EventParams, n: int, seed: int, params_b: EventParams | None = None,
               level: float = 0.95, workers=None):
    """Plug-in covariance of two events evaluated on one shared configuration
    per replicate (hit process on the union of the two event windows)."""
    pb = params if params_b is None else params_b
    evals, wins = [], []
    for e, p in ((event_a, params), (event_b, pb)):
        if callable(e):
            evals.append(e)
            wins.append(BoxSpec(p.l or 1.0, p.k))
        else:
            evals.append(event_evaluator(e, p))
            wins.append(event_window(e, p))
    x0 = min(w.bounds()[0] for w in wins)
    y0 = min(w.bounds()[1] for w in wins)
    x1 = max(w.bounds()[2] for w in wins)
    y1 = max(w.bounds()[3] for w in wins)
    union = BoxSpec.from_bounds(x0, y0, x1, y1)

    def rep(r):
        cfg = sample_hitting_process(union, params.u, params.law, params.grain_kind, make_rng(seed, r))
        return bool(evals[0](cfg)), bool(evals[1](cfg))

    out = np.array(_run_replicates(rep, n, workers), dtype=float).reshape(n, 2)
    f1, f2 = out[:, 0], out[:, 1]
    m1, m2 = f1.mean(), f2.mean()
    cov = float(np.mean(f1 * f2) - m1 * m2)
    psi = (f1 - m1) * (f2 - m2)
    se = float(psi.std(ddof=1) / math.sqrt(n)) if n > 1 else INF
    z = stats.norm.ppf(0.5 + level / 2)
    return cov, (cov - z * se, cov + z * se)


def lln_counts(eps, u, law: AxisLaw, n_list, reps: int, seed: int, grain_kind: str = ELLIPSE):
    """Mean and variance of the number of grains centered in B(n) that contain
    B(0, eps), for each n.  Only grains with R >= |z| + eps can contain the
    disk, so the center process is thinned to those before sampling marks."""
    if not 0 <= eps < 0.5:
        raise ValidationError(f"eps must lie in [0, 1/2), got {eps}")
    ns = sorted(float(v) for v in n_list)
    counts = np.zeros((reps, len(ns)), dtype=np.int64)
    for r in range(reps):
        rng = make_rng(seed, r)
        if u == 0:
            continue
        x, y, R, V = sample_radial((0.0, 0.0), ns[-1], u, law, lambda d: np.asarray(d) + eps, rng)
        b = R if grain_kind == DISK else np.ones_like(R)
        cov = K.contains_disk(x, y, R, b, V, 0.0, 0.0, float(eps))
        d = np.hypot(x, y)[cov]
        counts[r] = [(d <= nv).sum() for nv in ns]
    return [(nv, float(counts[:, i].mean()), float(counts[:, i].var(ddof=1)) if reps > 1 else 0.0)
            for i, nv in enumerate(ns)]


def point_cover_mc(d: float, law: AxisLaw, samples: int, rng):
    """P[a point lies in the ellipse grain centered at distance d].

    Coverage forces |sin V'| <= 1/d and R >= sqrt(d^2 - 1), V' being the
    angle between the axis and the center direction; the estimate multiplies
    the exact probability of these conditions by the hit fraction of draws
    made under them.  Returns (estimate, standard error)."""
    if d <= 1:
        return 1.0, 0.0
    r_star = math.sqrt(d * d - 1.0)
    v_star = math.asin(1.0 / d)
    pre = float(law.survival(r_star)) * 2.0 * v_star / math.pi
    if pre == 0:
        return 0.0, 0.0
    R = np.asarray(law.sample_above(np.full(samples, r_star), rng.random(samples)), dtype=float)
    V = v_star * (2.0 * rng.random(samples) - 1.0)
    inside = (d * np.cos(V) / R) ** 2 + (d * np.sin(V)) ** 2 <= 1.0
    f = inside.mean()
    return pre * f, pre * math.sqrt(f * (1 - f) / samples)


def nested_vacancy(window: BoxSpec, u, law: AxisLaw, radii, n: int, seed: int, point=(0.0, 0.0)):
    """Point vacancy under nested truncations.

    Each replicate samples the truncated process once at the largest radius;
    the configuration at a smaller radius is its restriction to centers in the
    smaller disk.  Returns vacancy counts per radius."""
    radii = sorted(float(r) for r in radii)
    a = window.circumradius
    vac = np.zeros(len(radii), dtype=np.int64)
    for r in range(n):
        rng = make_rng(seed, r)
        x, y, R, V = sample_radial((window.cx, window.cy), radii[-1], u, law,
                                   lambda dd: np.asarray(dd) - a, rng)
        cov = K.contains_point(x, y, R, np.ones_like(R), V, float(point[0]), float(point[1]))
        dist = np.hypot(x - window.cx, y - window.cy)
        first = dist[cov].min() if np.any(cov) else INF
        vac += np.array([first > T for T in radii])
    return radii, vac
