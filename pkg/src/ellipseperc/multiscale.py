"""Multiscale engines: the q_k recursion and the dyadic removal process."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, stats

from . import _kernels as K
from .errors import DomainError, ValidationError
from .geometry import DISK, ELLIPSE, BoxSpec
from .laws import AxisLaw
from .sampling import sample_hitting_process

LN10 = math.log(10.0)
FOUR = ndimage.generate_binary_structure(2, 1)


# --------------------------------------------------------------- recursion


@dataclass(frozen=True)
class RecursionParams:
    C7: float
    alpha: float
    u: float = 0.0
    q0: float = 1.0

    def __post_init__(self):
        for name in ("C7", "alpha", "u", "q0"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if not self.C7 > 0:
            raise ValidationError(f"C7 must be > 0, got {self.C7}")
        if self.u < 0:
            raise ValidationError(f"u must be >= 0, got {self.u}")
        if not 0 <= self.q0 <= 1:
            raise ValidationError(f"q0 must lie in [0, 1], got {self.q0}")


def iterate_qk(params: RecursionParams, k_max: int):
    """q_{k+1} = min(1, C7 q_k^2 + u C7 10^{(2 - alpha) k}), k = 0..k_max - 1."""
    if k_max < 1:
        raise ValidationError(f"k_max must be >= 1, got {k_max}")
    q = [float(params.q0)]
    for k in range(k_max):
        drive = params.u * params.C7 * 10.0 ** ((2.0 - params.alpha) * k)
        q.append(min(1.0, params.C7 * q[-1] ** 2 + drive))
    return q


def compute_k0_u0(C7: float, alpha: float):
    """(epsilon, k0, u0) of the induction: k0 is the least integer with
    C7 e^{eps - eps k0} < 1/2 and C7 e^{(eps - (alpha - 2) ln 10) k0 + eps} < 1/2,
    u0 makes the crude bound u C7 (100^k0 + 10^{(2 - alpha) k0}) equal e^{-eps k0}."""
    if not alpha > 2:
        raise DomainError(f"alpha must be > 2, got {alpha}")
    if not C7 > 0:
        raise ValidationError(f"C7 must be > 0, got {C7}")
    eps = 2.0 * (alpha - 2.0)
    slope = eps - (alpha - 2.0) * LN10            # < 0
    log_half = math.log(0.5) - math.log(C7)
    # both conditions are monotone in k0; solve then step to the strict inequality
    k0 = max(1, math.ceil(max(1.0 - log_half / eps, (log_half - eps) / slope)))
    while k0 > 1 and _k0_ok(C7, eps, slope, k0 - 1):
        k0 -= 1
    while not _k0_ok(C7, eps, slope, k0):
        k0 += 1
    log_u0 = -eps * k0 - math.log(C7) - np.logaddexp(k0 * 2 * LN10, (2.0 - alpha) * k0 * LN10)
    return eps, k0, min(1.0, math.exp(log_u0))


def _k0_ok(C7, eps, slope, k):
    return C7 * math.exp(eps - eps * k) < 0.5 and C7 * math.exp(slope * k + eps) < 0.5


def _log_step(logC, logu, alpha, k, lq):
    return min(0.0, float(np.logaddexp(logC + 2.0 * lq, logu + logC + (2.0 - alpha) * k * LN10)))


def verify_qk_bound(C7, alpha, u, epsilon, k0, k_max, mode="crude", rtol=1e-12) -> bool:
    """Check q_k <= e^{-eps k} for k0 <= k <= k_max.

    mode="crude" seeds q_k0 with the crude bound u C7 (100^k0 + 10^{(2-alpha)k0}),
    a valid upper bound for the true q_k0(u); mode="envelope" seeds with the
    envelope value e^{-eps k0} itself.  Iteration runs on log q so tiny values
    do not underflow."""
    if not alpha > 2:
        raise DomainError(f"alpha must be > 2, got {alpha}")
    if u < 0:
        raise ValidationError("u must be >= 0")
    logC = math.log(C7)
    logu = math.log(u) if u > 0 else -math.inf
    if mode == "crude":
        crude = np.logaddexp(k0 * 2 * LN10, (2.0 - alpha) * k0 * LN10)
        lq = min(0.0, logu + logC + float(crude))
    elif mode == "envelope":
        lq = -epsilon * k0
    else:
        raise ValidationError(f"mode must be 'crude' or 'envelope', got {mode!r}")
    slack = math.log1p(rtol)
    for k in range(k0, k_max + 1):
        if lq > -epsilon * k + slack:
            return False
        lq = _log_step(logC, logu, alpha, k, lq)
    return True


# ------------------------------------------------------- removal process


def removal_levels(l: float):
    """n0 and the intervals I_1..I_n0 partitioning [1, l/2)."""
    if not l > 2:
        raise ValidationError(f"l must be > 2, got {l}")
    n0 = 0
    while not (l / 2 ** (n0 + 1) <= 1 < l / 2 ** n0):
        n0 += 1
    intervals = [(l / 2 ** (n + 1), l / 2 ** n) for n in range(1, n0)]
    intervals.append((1.0, l / 2 ** n0))
    return n0, intervals


@dataclass
class LevelField:
    n: int
    interval: tuple
    bits: np.ndarray            # bool[row, col], 2^n rows by 2 * 2^n columns
    side: float
    max_span: int = 0           # largest L-infinity distance between boxes met by one grain
    n_grains: int = 0

    @property
    def structural_ok(self) -> bool:
        return self.max_span <= 2

    def to_dict(self):
        return {"n": self.n, "interval": [self.interval[0], self.interval[1]],
                "bits": [rle_encode(r) for r in self.bits], "max_span": self.max_span,
                "n_grains": self.n_grains}

    @classmethod
    def from_dict(cls, d, l):
        bits = np.array([rle_decode(r) for r in d["bits"]], dtype=bool)
        return cls(int(d["n"]), tuple(d["interval"]), bits, l / 2 ** int(d["n"]),
                   int(d.get("max_span", 0)), int(d.get("n_grains", 0)))


def rle_encode(row):
    """Row of bits as [first_value, run, run, ...]."""
    row = np.asarray(row, dtype=bool)
    if row.size == 0:
        return [1]
    cut = np.flatnonzero(row[1:] != row[:-1]) + 1
    runs = np.diff(np.concatenate([[0], cut, [row.size]]))
    return [int(row[0])] + [int(r) for r in runs]


def rle_decode(code):
    out, val = [], bool(code[0])
    for r in code[1:]:
        out.extend([val] * r)
        val = not val
    return out


def level_field(l, n, interval, x, y, a, b, v) -> LevelField:
    nx, ny = 2 * 2 ** n, 2 ** n
    side = l / 2 ** n
    bits = np.ones((ny, nx), dtype=bool)
    span = np.zeros(x.size, dtype=np.int64)
    K.remove_boxes(x, y, a, b, v, -float(l), -0.5 * l, side, nx, ny, bits, span)
    return LevelField(n, tuple(interval), bits, side, int(span.max()) if span.size else 0, int(x.size))


def box_crossing(bits) -> bool:
    """Left-right path through edge-adjacent surviving boxes."""
    lab, _ = ndimage.label(bits, structure=FOUR)
    common = np.intersect1d(lab[:, 0][lab[:, 0] > 0], lab[:, -1][lab[:, -1] > 0])
    return common.size > 0


@dataclass
class RemovalOutcome:
    levels: list
    survivors: np.ndarray       # A_n0 on the finest grid
    crossing: bool
    l: float
    u: float
    nested: list = field(default_factory=list)     # A_1..A_n0, each on its own grid
    grains: tuple = ()                             # (x, y, a, b, v) of all sampled grains

    def __iter__(self):
        return iter((self.levels, self.survivors, self.crossing))

    @property
    def structural_ok(self):
        return all(f.structural_ok for f in self.levels)

    def to_dict(self):
        return {"l": self.l, "u": self.u, "levels": [f.to_dict() for f in self.levels],
                "crossing": bool(self.crossing)}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1) + "\n"


def removal_process(l, u, law: AxisLaw, rng, grain_kind: str = ELLIPSE, inject=None) -> RemovalOutcome:
    """Levels n = 1..n0: sample the grains with R in I_n meeting B(l; 2) and
    clear every box of side l/2^n they touch.  ``inject`` maps a level to
    extra (x, y, R, V) grains, for negative controls."""
    n0, intervals = removal_levels(l)
    window = BoxSpec(l, 2.0)
    levels, nested, parts = [], [], []
    A = np.ones((1, 2), dtype=bool)
    for n, I in enumerate(intervals, start=1):
        cfg = sample_hitting_process(window, u, law, grain_kind, rng, r_range=I)
        x, y, R, V = cfg.x, cfg.y, cfg.R, cfg.V
        if inject and n in inject:
            ex = np.asarray(inject[n], dtype=float).reshape(-1, 4)
            x, y, R, V = (np.concatenate([p, ex[:, i]]) for i, p in enumerate((x, y, R, V)))
        b = R if grain_kind == DISK else np.ones_like(R)
        f = level_field(l, n, I, x, y, R, b, V)
        levels.append(f)
        parts.append((x, y, R, b, V))
        A = np.kron(A, np.ones((2, 2), dtype=bool)) & f.bits
        nested.append(A.copy())
    grains = tuple(np.concatenate([p[i] for p in parts]) for i in range(5))
    return RemovalOutcome(levels, A, box_crossing(A), float(l), float(u), nested, grains)


def coupling_holds(outcome: RemovalOutcome) -> bool:
    """A box-path crossing of A_n0 implies a vacant left-right crossing of
    B(l; 2) for the same grains (all grains with R in [1, l/2))."""
    from .events import vacant_lr_crossing
    if not outcome.crossing:
        return True
    return vacant_lr_crossing(outcome.grains, BoxSpec(outcome.l, 2.0))


# -------------------------------------------------------- fractal percolation


def fractal_percolation(p, N, depth, rng):
    """Mandelbrot fractal percolation on the unit square; returns the
    surviving depth-level boxes and the left-right crossing flag."""
    if not 0 <= p <= 1:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    if N < 2 or depth < 1:
        raise ValidationError(f"need N >= 2 and depth >= 1, got N={N}, depth={depth}")
    alive = np.ones((1, 1), dtype=bool)
    for _ in range(depth):
        alive = np.kron(alive, np.ones((N, N), dtype=bool))
        alive &= rng.random(alive.shape) < p
    return alive, box_crossing(alive)


# ----------------------------------------------------------- 2-dependence


@dataclass
class DependenceReport:
    structural_ok: bool
    tested: int
    undefined: int
    rejected: int
    level: float
    correlations: list = field(default_factory=list)   # (n, cell_a, cell_b, r, lo, hi)

    @property
    def passed(self):
        return self.structural_ok and self.rejected == 0


def _pairs(ny, nx, min_dist, count, rng):
    out = []
    tries = 0
    while len(out) < count and tries < 100 * count:
        tries += 1
        r0, c0 = int(rng.integers(ny)), int(rng.integers(nx))
        r1, c1 = int(rng.integers(ny)), int(rng.integers(nx))
        if max(abs(r0 - r1), abs(c0 - c1)) >= min_dist:
            out.append(((r0, c0), (r1, c1)))
    return out


def check_two_dependence(realizations, n_samples=20, level=0.95, min_dist=3, seed=0) -> DependenceReport:
    """Empirical dependence of X-bits at box distance >= min_dist across
    independent realizations, plus the exact per-grain span check.

    Bits are rare at fine levels, so each pair gets the exact conditional
    interval for the log odds ratio (zero iff uncorrelated) instead of a
    normal approximation; levels are Bonferroni-adjusted over all pairs."""
    reals = [r.levels if isinstance(r, RemovalOutcome) else r for r in realizations]
    if len(reals) < 2:
        raise ValidationError("need at least 2 realizations")
    structural = all(f.structural_ok for rs in reals for f in rs)
    rng = np.random.default_rng(seed)
    plan = []
    for i, f in enumerate(reals[0]):
        ny, nx = f.bits.shape
        for pa, pb in _pairs(ny, nx, min_dist, n_samples, rng):
            plan.append((i, pa, pb))
    conf = 1 - (1 - level) / max(1, len(plan))
    out, undefined, rejected = [], 0, 0
    for i, pa, pb in plan:
        xa = np.array([rs[i].bits[pa] for rs in reals], dtype=bool)
        xb = np.array([rs[i].bits[pb] for rs in reals], dtype=bool)
        if xa.all() or not xa.any() or xb.all() or not xb.any():
            undefined += 1
            continue
        table = [[np.sum(xa & xb), np.sum(xa & ~xb)], [np.sum(~xa & xb), np.sum(~xa & ~xb)]]
        ci = stats.contingency.odds_ratio(table, kind="conditional").confidence_interval(conf)
        lo = math.log(ci.low) if ci.low > 0 else -math.inf
        hi = math.log(ci.high) if ci.high < math.inf else math.inf
        if not lo <= 0 <= hi:
            rejected += 1
        r = float(np.corrcoef(xa, xb)[0, 1])
        out.append((reals[0][i].n, pa, pb, r, lo, hi))
    return DependenceReport(structural, len(out), undefined, rejected, level, out)


# ------------------------------------------------------------ annuli


@dataclass
class ScheduleReport:
    ok: bool
    min_ratio: float
    tail_sum: float
    tail_bound: float
    heuristic: bool = True


def schedule_report(L_list, tail_bound=0.5) -> ScheduleReport:
    L = np.asarray(L_list, dtype=float)
    if L.size < 2:
        raise DomainError("need at least two scales")
    if L[0] < 1:
        raise DomainError(f"L_1 must be >= 1, got {L[0]}")
    if np.any(np.diff(L) <= 0):
        raise DomainError("scales must be strictly increasing")
    a = L[1:] / L[:-1]
    tail = float(np.sum(1.0 / a[a.size // 2:]))
    ok = bool(a.min() >= 9 and tail < tail_bound)
    return ScheduleReport(ok, float(a.min()), tail, float(tail_bound))


def validate_annuli_schedule(L_list, tail_bound=0.5) -> bool:
    """Ratios a_n = L_n / L_{n-1} are all >= 9 and the tail of sum 1/a_n over
    the last half of the list stays below ``tail_bound`` (a finite-list proxy
    for summability)."""
    return schedule_report(L_list, tail_bound).ok
