"""Major-axis laws on [1, inf): Pareto, point masses and piecewise power tails.

Continuous laws are stored as power-law pieces ``(lo, hi, alpha, s_lo)`` with
survival ``S(r) = s_lo * (r / lo) ** -alpha`` on ``[lo, hi)``.  Every
quantity the samplers need (restricted masses, moments ``E[R^t; lo <= R < hi]``,
size-biased draws) is closed form on such pieces.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, QuadratureError, ValidationError

INF = math.inf


@dataclass(frozen=True)
class AxisLaw:
    kind: str
    alpha: float | None = None
    r: float | None = None
    pieces: tuple = ()

    def __post_init__(self):
        if self.kind == "pareto":
            if not (self.alpha is not None and self.alpha > 0 and math.isfinite(self.alpha)):
                raise ValidationError(f"pareto law needs alpha > 0, got {self.alpha}")
        elif self.kind == "point_mass":
            if not (self.r is not None and self.r >= 1 and math.isfinite(self.r)):
                raise ValidationError(f"point_mass law needs r >= 1, got {self.r}")
        elif self.kind == "piecewise":
            pcs = tuple((float(t), float(a)) for t, a in self.pieces)
            if not pcs or pcs[0][0] != 1.0:
                raise ValidationError("piecewise law must start at threshold 1")
            for (t0, _), (t1, _) in zip(pcs, pcs[1:]):
                if not t1 > t0:
                    raise ValidationError("piecewise thresholds must increase")
            if any(not (a > 0) for _, a in pcs):
                raise ValidationError("piecewise exponents must be > 0")
            object.__setattr__(self, "pieces", pcs)
        else:
            raise ValidationError(f"unknown law kind {self.kind!r}")

    # constructors
    @classmethod
    def pareto(cls, alpha):
        return cls("pareto", alpha=float(alpha))

    @classmethod
    def point_mass(cls, r):
        return cls("point_mass", r=float(r))

    @classmethod
    def piecewise(cls, pieces):
        return cls("piecewise", pieces=tuple(pieces))

    @property
    def is_atomic(self):
        return self.kind == "point_mass"

    @property
    def tail_alpha(self) -> float:
        """Exponent of the far tail (inf for bounded support)."""
        if self.kind == "pareto":
            return self.alpha
        if self.kind == "piecewise":
            return self.pieces[-1][1]
        return INF

    def _segments(self):
        if self.kind == "pareto":
            return [(1.0, INF, self.alpha, 1.0)]
        segs = []
        s = 1.0
        pcs = self.pieces
        for i, (t, a) in enumerate(pcs):
            hi = pcs[i + 1][0] if i + 1 < len(pcs) else INF
            segs.append((t, hi, a, s))
            if hi < INF:
                s = s * (hi / t) ** (-a)
        return segs

    # ---------------------------------------------------------- survival
    def survival(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_atomic:
            return np.where(r <= self.r, 1.0, 0.0)
        out = np.ones_like(r)
        for lo, hi, a, s in self._segments():
            m = (r >= lo) & (r < hi)
            out = np.where(m, s * (np.maximum(r, lo) / lo) ** (-a), out)
        return out

    def inverse_survival(self, p):
        """Smallest R with S(R) <= p, for p in (0, 1]."""
        p = np.asarray(p, dtype=float)
        if np.any(p <= 0) or np.any(p > 1):
            raise DomainError("survival level must lie in (0, 1]")
        if self.is_atomic:
            return np.full_like(p, self.r)
        out = np.empty_like(p)
        for lo, hi, a, s in self._segments():
            s_hi = 0.0 if hi == INF else s * (hi / lo) ** (-a)
            m = (p <= s) & (p > s_hi)
            out = np.where(m, lo * (np.minimum(p, s) / s) ** (-1.0 / a), out)
        return out

    def sample(self, U):
        return self.inverse_survival(U)

    def mass(self, lo=1.0, hi=INF) -> float:
        if self.is_atomic:
            return 1.0 if lo <= self.r < hi else 0.0
        return float(self.survival(max(lo, 1.0)) - (0.0 if hi == INF else self.survival(hi)))

    # ----------------------------------------------------------- tilting
    def _tilted_parts(self, t, lo, hi):
        """(c, d, beta, weight) per piece for density ∝ r^t f(r) on [lo, hi)."""
        parts = []
        for plo, phi, a, s in self._segments():
            c = max(plo, lo)
            d = min(phi, hi)
            if not c < d:
                continue
            k = s * a * plo ** a
            beta = t - a
            if d == INF:
                if beta >= 0:
                    return None
                w = -k * c ** beta / beta
            elif beta == 0:
                w = k * math.log(d / c)
            else:
                w = k * (d ** beta - c ** beta) / beta
            parts.append((c, d, beta, w))
        return parts

    def moment(self, t=1.0, lo=1.0, hi=INF) -> float:
        """E[R^t ; lo <= R < hi]; inf when divergent."""
        if self.is_atomic:
            return self.r ** t if lo <= self.r < hi else 0.0
        parts = self._tilted_parts(t, lo, hi)
        if parts is None:
            return INF
        return float(sum(p[3] for p in parts))

    def sample_tilted(self, t, U, lo=1.0, hi=INF, U2=None):
        """Draw from density ∝ r^t f(r) restricted to [lo, hi).  ``U`` picks
        the value within a piece and ``U2`` picks the piece."""
        U = np.asarray(U, dtype=float)
        if self.is_atomic:
            return np.full_like(U, self.r)
        parts = self._tilted_parts(t, lo, hi)
        if parts is None or not parts:
            raise DomainError(f"tilted law r^{t} has no finite mass on [{lo}, {hi})")
        if len(parts) == 1:
            idx = np.zeros(U.shape, dtype=int)
        else:
            w = np.array([p[3] for p in parts])
            cum = np.cumsum(w) / w.sum()
            idx = np.minimum(np.searchsorted(cum, U2, side="right"), len(parts) - 1)
        out = np.empty_like(U)
        for i, (c, d, beta, _) in enumerate(parts):
            m = idx == i
            if not np.any(m):
                continue
            u = U[m]
            if d == INF:
                out[m] = c * (1.0 - u) ** (1.0 / beta)
            elif beta == 0:
                out[m] = c * (d / c) ** u
            else:
                cb = c ** beta
                out[m] = (cb + u * (d ** beta - cb)) ** (1.0 / beta)
                out[m] = np.clip(out[m], c, d)
        return out

    def sample_above(self, r0, U):
        """Draw R from the law conditioned on R >= r0 (vectorized in r0, U)."""
        r0 = np.asarray(r0, dtype=float)
        U = np.asarray(U, dtype=float)
        if self.is_atomic:
            return np.full(np.broadcast(r0, U).shape, self.r)
        s = self.survival(np.maximum(r0, 1.0))
        return self.inverse_survival(np.clip((1.0 - U) * s, np.finfo(float).tiny, 1.0))

    # ----------------------------------------------------- extents
    def mean_extent(self, lo=1.0, hi=INF) -> float:
        """E[mean width of an ellipse grain ; lo <= R < hi].

        The mean width of a convex body is perimeter/pi, so for semi-axes
        (R, 1) it equals 4 R E(1 - 1/R^2) / pi with E the complete elliptic
        integral of the second kind."""
        return _mean_extent(self, float(lo), float(hi))

    def _mean_extent(self, lo, hi):
        if self.is_atomic:
            if lo <= self.r < hi:
                return float(ellipse_mean_width(self.r))
            return 0.0
        m1 = self.moment(1.0, lo, hi)
        if m1 == INF:
            return INF
        total = 4.0 / math.pi * m1
        for plo, phi, a, s in self._segments():
            c = max(plo, lo)
            d = min(phi, hi)
            if not c < d:
                continue
            k = s * a * plo ** a

            def f(r, k=k, a=a):
                return 4.0 / math.pi * r * (special.ellipe(1.0 - 1.0 / (r * r)) - 1.0) * k * r ** (-a - 1.0)

            total += quad(f, c, d)
        return float(total)

    def to_json(self):
        if self.kind == "pareto":
            return {"kind": "pareto", "alpha": self.alpha}
        if self.kind == "point_mass":
            return {"kind": "point_mass", "r": self.r}
        return {"kind": "piecewise", "pieces": [list(p) for p in self.pieces]}

    @classmethod
    def from_json(cls, d):
        if d["kind"] == "pareto":
            return cls.pareto(float(d["alpha"]))
        if d["kind"] == "point_mass":
            return cls.point_mass(float(d["r"]))
        return cls.piecewise([tuple(map(float, p)) for p in d["pieces"]])

    def label(self):
        if self.kind == "pareto":
            return f"pareto:{self.alpha!r}"
        if self.kind == "point_mass":
            return f"pointmass:{self.r!r}"
        return "piecewise:" + ",".join(f"{t!r}:{a!r}" for t, a in self.pieces)


def ellipse_mean_width(R):
    R = np.asarray(R, dtype=float)
    return 4.0 / math.pi * R * special.ellipe(1.0 - 1.0 / (R * R))


def quad(f, a, b, rel=1e-8, limit=400):
    """Adaptive quadrature that raises instead of returning a degraded value."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(f, a, b, epsrel=rel, epsabs=0.0, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{a}, {b}] failed: {exc}") from None
    return val


def parse_law(text: str, alpha: float | None = None) -> AxisLaw:
    """Parse 'pareto:2', 'pointmass:1' or 'piecewise:1:2.5,10:1.5'."""
    if text is None:
        if alpha is None:
            raise ValidationError("either --law or --alpha is required")
        return AxisLaw.pareto(alpha)
    head, _, rest = text.partition(":")
    try:
        if head == "pareto":
            return AxisLaw.pareto(float(rest) if rest else float(alpha))
        if head in ("pointmass", "point_mass"):
            return AxisLaw.point_mass(float(rest) if rest else 1.0)
        if head == "piecewise":
            pieces = []
            for item in rest.split(","):
                t, a = item.split(":")
                pieces.append((float(t), float(a)))
            return AxisLaw.piecewise(pieces)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"cannot parse law spec {text!r}: {exc}") from None
    raise ValidationError(f"unknown law spec {text!r}")


@functools.lru_cache(maxsize=256)
def _mean_extent(law, lo, hi):
    # laws are immutable, and replicate loops ask for the same value repeatedly
    return law._mean_extent(lo, hi)
