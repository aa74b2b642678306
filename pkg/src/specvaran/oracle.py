"""Brute-force difference-quotient estimators for first/second-order objects.

Every closed-form quantity in this package has a sampling counterpart here:
the defining liminf is approximated by minimizing difference quotients over
perturbed arguments on a decreasing t-grid.  Perturbations are isotropic
Gaussians in the argument space with per-coordinate scale equal to the
level radius (proportional to t, the parabolic scaling), clipped at two
standard deviations so the sample minimum cannot run away with the sample
count.

The reported estimate is the minimum over the samples of the finest grid
level; coarser levels are kept in the refinement trace but do not enter the
estimate, because their wider perturbation balls bias the quotient away
from the t -> 0 limit (and, for indicators, can reach feasible points from
directions that are not tangent).  Estimates are deterministic under a
fixed seed, and enlarging the sample count only extends each per-level
sample stream, so refinement can never increase a per-level minimum.

Indicator-valued hooks evaluate membership with their own tolerance; for
the tilted (second-subderivative) quotients that tolerance must stay well
below t^2 at the finest level, otherwise tolerated infeasibilities distort
the tilt term.  The built-in hooks accept a tolerance argument for this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, InsufficientData

__all__ = [
    "QuotientGrid",
    "OracleEstimate",
    "numeric_subderivative",
    "numeric_parabolic_subderivative",
    "numeric_second_subderivative",
    "slope_fit",
]

INF = float("inf")
_CLIP = 2.0  # Gaussian entries clipped to +-2 standard deviations


@dataclass(frozen=True)
class QuotientGrid:
    """Sampling plan: t values, samples per t, and perturbation radii.

    The radius at t is radius_ratio * t unless explicit radii are given.
    """

    ts: tuple
    samples: int = 64
    radius_ratio: float = 1.0
    radii: Optional[tuple] = None
    seed: int = 0

    def __post_init__(self):
        ts = tuple(float(t) for t in self.ts)
        if len(ts) == 0 or any(t <= 0 for t in ts):
            raise InputError("grid needs positive t values")
        if any(nxt >= cur for cur, nxt in zip(ts, ts[1:])):
            raise InputError("grid t values must be strictly decreasing")
        object.__setattr__(self, "ts", ts)
        if self.samples < 1:
            raise InputError("samples per t must be >= 1")
        if self.radii is not None:
            radii = tuple(float(r) for r in self.radii)
            if len(radii) != len(ts):
                raise InputError("explicit radii must match the t grid")
            object.__setattr__(self, "radii", radii)

    @classmethod
    def geometric(cls, t_max: float = 1e-1, t_min: float = 1e-6, ratio: float = 10.0, **kw) -> "QuotientGrid":
        ts = []
        t = float(t_max)
        while t >= t_min * (1 - 1e-12):
            ts.append(t)
            t /= ratio
        return cls(ts=tuple(ts), **kw)

    def radius_at(self, level: int) -> float:
        if self.radii is not None:
            return self.radii[level]
        return self.radius_ratio * self.ts[level]


@dataclass(frozen=True)
class OracleEstimate:
    """Estimate plus the per-level refinement trace (t, level minimum)."""

    value: float
    trace: tuple
    seed: int
    samples: int

    def __float__(self) -> float:
        return self.value


def _perturbations(rng: np.random.Generator, shape, count: int) -> np.ndarray:
    """Unit-scale clipped-Gaussian perturbations.

    For square 2-D arguments the output is the isotropic Gaussian of the
    symmetric-matrix space under the Frobenius inner product: unit-variance
    diagonal coefficients and off-diagonal entries scaled by 1/sqrt(2).
    """
    if len(shape) == 2 and shape[0] == shape[1]:
        n = shape[0]
        d = n * (n + 1) // 2
        g = np.clip(rng.standard_normal((count, d)), -_CLIP, _CLIP)
        out = np.zeros((count, n, n))
        iu = np.triu_indices(n)
        off = ~np.eye(n, dtype=bool)
        for k in range(count):
            M = np.zeros((n, n))
            M[iu] = g[k]
            M = M + np.triu(M, 1).T
            M[off] /= np.sqrt(2.0)
            out[k] = M
        return out
    d = int(np.prod(shape))
    g = np.clip(rng.standard_normal((count, d)), -_CLIP, _CLIP)
    return g.reshape((count,) + tuple(shape))


def _tail_min(levels: Sequence[Tuple[float, float]]) -> float:
    return levels[-1][1]


def _diverges(levels: Sequence[Tuple[float, float]]) -> bool:
    """Detect per-level minima growing like 1/t as t decreases."""
    finite = [(t, v) for t, v in levels if np.isfinite(v)]
    if len(finite) < 3:
        return False
    ts = np.array([t for t, _ in finite])
    vs = np.array([v for _, v in finite])
    if np.any(vs <= 1e-6):
        return False
    if vs[-1] < 10.0 * vs[0]:
        return False
    slope = np.polyfit(np.log(ts), np.log(vs), 1)[0]
    return bool(slope <= -0.5)


def _scan(
    grid: QuotientGrid,
    base: np.ndarray,
    quotient: Callable[[float, np.ndarray], float],
) -> list:
    """Per-level minima of quotient(t, perturbed base) over the grid."""
    levels = []
    for level, t in enumerate(grid.ts):
        rng = np.random.default_rng([int(grid.seed), level])
        r = grid.radius_at(level)
        cands = [base] if r == 0 else [base] + list(base + r * _perturbations(rng, base.shape, grid.samples))
        best = INF
        for c in cands:
            q = quotient(t, c)
            if np.isfinite(q):
                best = min(best, q)
        levels.append((t, best))
    return levels


def numeric_subderivative(f: Callable, x, w, grid: QuotientGrid) -> OracleEstimate:
    """Estimate the subderivative of f at x along w by quotient sampling.

    Infeasible samples (f = +inf) are discarded; a finest level with no
    feasible sample reports +inf.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    fx = f(x)
    if not np.isfinite(fx):
        raise InputError("f(x) must be finite")

    def quotient(t, wp):
        return (f(x + t * wp) - fx) / t

    levels = _scan(grid, w, quotient)
    return OracleEstimate(value=_tail_min(levels), trace=tuple(levels), seed=grid.seed, samples=grid.samples)


def _first_order_estimate(f: Callable, x: np.ndarray, w: np.ndarray, grid: QuotientGrid, fx: float) -> float:
    """Unperturbed difference quotient at the finest feasible level.

    Exact for piecewise-linear f and for indicators (where every feasible
    quotient is zero); falls back to the sampled estimate when no
    unperturbed step is feasible.  Any error here enters the parabolic
    quotient amplified by 2/t, so the unperturbed value is preferred.
    """
    for t in sorted(grid.ts):
        q = (f(x + t * w) - fx) / t
        if np.isfinite(q):
            return q
    return numeric_subderivative(f, x, w, grid).value


def numeric_parabolic_subderivative(
    f: Callable,
    x,
    w,
    z,
    grid: QuotientGrid,
    first_order: Optional[float] = None,
) -> OracleEstimate:
    """Estimate the parabolic subderivative of f at x for w with respect to z.

    The first-order term defaults to the unperturbed quotient at the finest
    feasible level, which is exact for the piecewise-linear built-ins.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    fx = f(x)
    if not np.isfinite(fx):
        raise InputError("f(x) must be finite")
    d1 = _first_order_estimate(f, x, w, grid, fx) if first_order is None else float(first_order)
    if not np.isfinite(d1):
        return OracleEstimate(value=INF, trace=(), seed=grid.seed, samples=grid.samples)

    def quotient(t, zp):
        return (f(x + t * w + 0.5 * t * t * zp) - fx - t * d1) / (0.5 * t * t)

    levels = _scan(grid, z, quotient)
    return OracleEstimate(value=_tail_min(levels), trace=tuple(levels), seed=grid.seed, samples=grid.samples)


def numeric_second_subderivative(f: Callable, x, v, w, grid: QuotientGrid) -> OracleEstimate:
    """Estimate the second subderivative of f at x for the tilt v along w.

    Per-level minima growing like 1/t signal a direction outside the
    critical cone; such scans are flagged +inf with the trace retained.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    fx = f(x)
    if not np.isfinite(fx):
        raise InputError("f(x) must be finite")

    def quotient(t, wp):
        return (f(x + t * wp) - fx - t * float(np.tensordot(v, wp, axes=v.ndim))) / (0.5 * t * t)

    levels = _scan(grid, w, quotient)
    value = INF if _diverges(levels) else _tail_min(levels)
    return OracleEstimate(value=value, trace=tuple(levels), seed=grid.seed, samples=grid.samples)


def slope_fit(points, noise_floor: float = 1e-13) -> float:
    """Least-squares slope of log(residual) against log(t).

    Points with residuals at or below the noise floor are discarded; at
    least three usable points are required.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InputError("expected an array of (t, residual) rows")
    keep = pts[:, 1] > noise_floor
    if int(np.sum(keep)) < 3:
        raise InsufficientData(f"only {int(np.sum(keep))} points above the noise floor {noise_floor}")
    t = np.log(pts[keep, 0])
    r = np.log(pts[keep, 1])
    return float(np.polyfit(t, r, 1)[0])
