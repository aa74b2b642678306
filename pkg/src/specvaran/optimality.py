"""Second-order optimality verdicts for minimize phi(X) + g(X).

At a stationary point (the negative gradient of the smooth part is a
subgradient of the spectral part), the second-order quantity along a
critical direction H is

    q(H) = hessian_quad(X)(H, H) + sigma_term(pair, H),

the Hessian quadratic form of phi plus the curvature correction of g.
Nonnegativity of q over the critical cone is necessary for local
optimality; strict positivity over unit-norm critical directions is
equivalent to local quadratic growth of phi + g.  The scans here estimate
the minimum of q by sampling the cone (explicit parameterization for the
semidefinite cones, rejection sampling otherwise): they are heuristic
verifiers, not certificates, and every report carries its sample count.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputError, SamplerWarning
from .spectral import (
    SpectralFunction,
    SubgradientPair,
    g_critical_cone_contains,
    g_eval,
    g_subdiff_contains,
    prox_g,
    sigma_term,
)
from .symmat import as_symmetric, frobenius

__all__ = [
    "SmoothObjective",
    "SamplerConfig",
    "ScanResult",
    "GrowthProbe",
    "OptimalityReport",
    "stationarity_check",
    "sample_critical_directions",
    "necessary_condition_scan",
    "sufficient_condition_scan",
    "quadratic_growth_probe",
    "check_optimality",
]

INF = float("inf")


@dataclass(frozen=True)
class SmoothObjective:
    """Twice-differentiable part: value, gradient, and Hessian quadratic form."""

    value: Callable
    gradient: Callable
    hessian_quad: Callable

    @classmethod
    def linear(cls, C) -> "SmoothObjective":
        Cs = as_symmetric(C)
        return cls(
            value=lambda X: float(np.tensordot(Cs, as_symmetric(X))),
            gradient=lambda X: Cs,
            hessian_quad=lambda X, H: 0.0,
        )

    @classmethod
    def quadratic_tilt(cls, C, weight: float, X0=None) -> "SmoothObjective":
        """phi(X) = <C, X> + (weight/2) ||X - X0||^2."""
        Cs = as_symmetric(C)
        X0s = np.zeros_like(Cs) if X0 is None else as_symmetric(X0)
        w = float(weight)
        return cls(
            value=lambda X: float(np.tensordot(Cs, as_symmetric(X)))
            + 0.5 * w * frobenius(as_symmetric(X) - X0s) ** 2,
            gradient=lambda X: Cs + w * (as_symmetric(X) - X0s),
            hessian_quad=lambda X, H: w * frobenius(H) ** 2,
        )


@dataclass(frozen=True)
class SamplerConfig:
    count: int = 200
    seed: int = 0
    max_rejections: int = 100_000
    scale: float = 1.0


@dataclass(frozen=True)
class ScanResult:
    holds: bool
    min_value: Optional[float]
    samples: int
    vacuous: bool = False
    warning: Optional[str] = None


@dataclass(frozen=True)
class GrowthProbe:
    l_hat: Optional[float]
    violations: int
    trials: int


@dataclass(frozen=True)
class OptimalityReport:
    stationary: bool
    necessary: Optional[ScanResult] = None
    sufficient: Optional[ScanResult] = None
    growth: Optional[GrowthProbe] = None

    def __post_init__(self):
        if self.sufficient is not None and self.necessary is not None:
            if self.sufficient.holds and not self.necessary.holds:
                raise InputError("inconsistent report: sufficiency cannot hold without necessity")


def stationarity_check(phi: SmoothObjective, g: SpectralFunction, X, tol=None) -> Optional[SubgradientPair]:
    """Return the subgradient pair for -grad phi(X), or None if not stationary."""
    Xs = as_symmetric(X)
    return g_subdiff_contains(g, Xs, -as_symmetric(phi.gradient(Xs)), tol)


def _symmetric_gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    A = rng.standard_normal((n, n))
    return (A + A.T) / 2.0


def _orthant_cone_sampler(pair: SubgradientPair, rng: np.random.Generator, count: int, scale: float):
    """Explicit critical-cone sampler for the semidefinite-cone indicators.

    In the pair frame, split the kernel block of X into rho (zero
    multiplier) and tau (nonzero multiplier): criticality pins the tau
    slices to zero and makes the rho-by-rho slice semidefinite of the
    matching sign; everything else is free.
    """
    sign = -1.0 if pair.fn.name == "neg-orthant" else 1.0
    # neg-orthant indicator composes to the negative semidefinite cone,
    # whose multipliers are positive semidefinite, and vice versa.
    tol = 1e-9 * (1.0 + float(np.max(np.abs(pair.lam_x))) + float(np.max(np.abs(pair.lam_y))))
    zero_x = np.abs(pair.lam_x) <= tol
    zero_y = np.abs(pair.lam_y) <= tol
    rho = np.where(zero_x & zero_y)[0]
    tau = np.where(zero_x & ~zero_y)[0]
    free = np.where(~zero_x)[0]
    n = pair.n
    if rho.size == 0 and free.size == 0:
        return [], True
    out = []
    for _ in range(count):
        M = np.zeros((n, n))
        if free.size:
            B = _symmetric_gaussian(rng, free.size) * scale
            M[np.ix_(free, free)] = B
            C = rng.standard_normal((free.size, rho.size + tau.size)) * scale
            rest = np.concatenate([rho, tau])
            M[np.ix_(free, rest)] = C
            M[np.ix_(rest, free)] = C.T
        if rho.size:
            A = rng.standard_normal((rho.size, rho.size)) * scale
            M[np.ix_(rho, rho)] = sign * (A @ A.T) / max(1, rho.size)
        H = pair.U @ M @ pair.U.T
        out.append((H + H.T) / 2.0)
    return out, False


def sample_critical_directions(pair: SubgradientPair, cfg: SamplerConfig):
    """Draw directions from the critical cone of the pair.

    Returns (directions, vacuous): explicit parameterization for the
    orthant-indicator (semidefinite cone) thetas and for the max theta
    with a simple top eigenvalue; generic rejection sampling elsewhere.
    An empty draw triggers a SamplerWarning since the cone may be {0}.
    """
    rng = np.random.default_rng(cfg.seed)
    name = pair.fn.name
    if name in ("neg-orthant", "pos-orthant"):
        dirs, vacuous = _orthant_cone_sampler(pair, rng, cfg.count, cfg.scale)
        if vacuous:
            warnings.warn("critical cone is trivial; scans hold vacuously", SamplerWarning)
        return dirs, vacuous
    if name == "max":
        top = np.sum(np.abs(pair.lam_x - pair.lam_x[0]) <= 1e-9 * (1.0 + abs(pair.lam_x[0])))
        if top == 1:
            # Differentiable point: the critical cone is the whole space.
            return [_symmetric_gaussian(rng, pair.n) * cfg.scale for _ in range(cfg.count)], False
    dirs = []
    rejected = 0
    while len(dirs) < cfg.count and rejected < cfg.max_rejections:
        H = _symmetric_gaussian(rng, pair.n) * cfg.scale
        if g_critical_cone_contains(pair, H):
            dirs.append(H)
        else:
            rejected += 1
    if not dirs:
        warnings.warn(
            f"no critical directions found after {rejected} rejections; cone may be trivial",
            SamplerWarning,
        )
        return dirs, True
    return dirs, False


def _scan(phi: SmoothObjective, pair: SubgradientPair, cfg: SamplerConfig, normalize: bool):
    dirs, vacuous = sample_critical_directions(pair, cfg)
    if vacuous:
        return None, vacuous, len(dirs)
    values = []
    for H in dirs:
        if normalize:
            nrm = frobenius(H)
            if nrm < 1e-14:
                continue
            H = H / nrm
        values.append(phi.hessian_quad(pair.X, H) + sigma_term(pair, H))
    if not values:
        return None, True, 0
    return float(np.min(values)), False, len(values)


def necessary_condition_scan(
    phi: SmoothObjective, pair: SubgradientPair, cfg: SamplerConfig = SamplerConfig(), tol: float = 1e-9
) -> ScanResult:
    """Sampled check of q(H) >= 0 over the critical cone."""
    mn, vacuous, count = _scan(phi, pair, cfg, normalize=False)
    if vacuous:
        return ScanResult(holds=True, min_value=None, samples=count, vacuous=True, warning="trivial cone")
    return ScanResult(holds=mn >= -tol, min_value=mn, samples=count)


def sufficient_condition_scan(
    phi: SmoothObjective, pair: SubgradientPair, cfg: SamplerConfig = SamplerConfig(), margin: float = 1e-6
) -> ScanResult:
    """Sampled check of q(H) >= margin over unit-norm critical directions."""
    mn, vacuous, count = _scan(phi, pair, cfg, normalize=True)
    if vacuous:
        return ScanResult(holds=True, min_value=None, samples=count, vacuous=True, warning="trivial cone")
    return ScanResult(holds=mn >= margin, min_value=mn, samples=count)


def quadratic_growth_probe(
    phi: SmoothObjective,
    g: SpectralFunction,
    X,
    radius: float = 1e-2,
    trials: int = 10_000,
    seed: int = 0,
) -> GrowthProbe:
    """Empirical growth modulus around X.

    Samples perturbed points (projected onto the domain for indicator
    parts), returns the smallest quotient 2*(objective increase)/distance^2
    and the count of quotients below -1e-9.
    """
    Xs = as_symmetric(X)
    rng = np.random.default_rng(seed)
    base = phi.value(Xs) + g_eval(g, Xs)
    if not np.isfinite(base):
        raise InputError("growth probe needs a feasible base point")
    n = Xs.shape[0]
    project = not g.finite_everywhere
    l_hat = INF
    violations = 0
    used = 0
    for _ in range(trials):
        G = _symmetric_gaussian(rng, n)
        nrm = frobenius(G)
        if nrm < 1e-14:
            continue
        P = G * (radius * rng.uniform() / nrm)
        Xp = Xs + P
        if project:
            Xp = prox_g(g, Xp)
        diff = frobenius(Xp - Xs)
        if diff < 1e-12:
            continue
        val = phi.value(Xp) + g_eval(g, Xp)
        q = 2.0 * (val - base) / diff**2
        l_hat = min(l_hat, q)
        used += 1
        if q < -1e-9:
            violations += 1
    return GrowthProbe(l_hat=None if used == 0 else float(l_hat), violations=violations, trials=used)


def check_optimality(
    phi: SmoothObjective,
    g: SpectralFunction,
    X,
    cfg: SamplerConfig = SamplerConfig(),
    growth_radius: float = 1e-2,
    growth_trials: int = 10_000,
    tol=None,
) -> OptimalityReport:
    """Full battery: stationarity, both scans, and the growth probe."""
    pair = stationarity_check(phi, g, X, tol)
    if pair is None:
        return OptimalityReport(stationary=False)
    nec = necessary_condition_scan(phi, pair, cfg)
    suf = sufficient_condition_scan(phi, pair, cfg)
    growth = quadratic_growth_probe(phi, g, X, radius=growth_radius, trials=growth_trials, seed=cfg.seed)
    return OptimalityReport(stationary=True, necessary=nec, sufficient=suf, growth=growth)
