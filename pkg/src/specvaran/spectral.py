"""Composite calculus for spectral functions g = theta(lam(X)).

A spectral function of a symmetric matrix is an orthogonally invariant
extended-real function; it always factors through the ordered eigenvalue
map composed with a symmetric function theta on R^n.  This module turns
the closed-form hooks of a symmetric function into matrix-level objects:

  value                     g(X) = theta(lam(X))
  subderivative             dg(X)(H) = dtheta(lam(X))(lam'(X;H))
  tangent membership        lam'(X;H) in T_dom(theta)(lam(X))
  2nd-order tangents        lam''(X;H,W) in T^2 at (lam(X), lam'(X;H))
  parabolic subderivative   d2 theta at lam(X) for lam' paired with lam''
  subgradient pairs         lam(Y) in dtheta(lam(X)) plus a shared ordered
                            frame diagonalizing X and Y simultaneously
  critical cone             vector-level criticality plus blockwise ordered
                            simultaneity of diag(lam(Y)) with the
                            compressed direction (tested via the trace gap)
  curvature (sigma) term    2 * sum_m <diag(lam(Y))_mm,
                            U_m^T H (mu_m I - X)^+ H U_m>
  second subderivative      critical-cone indicator plus sigma for a
                            polyhedral theta; tilted vector second
                            subderivative plus sigma otherwise
  witness direction         a matrix What with lam''(X;H,What) equal to a
                            prescribed blockwise-nonincreasing vector z
  proximal map              U diag(prox of theta at lam(X)) U^T
  domain distance           dist(X, dom g) = dist(lam(X), dom theta)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapabilityError, InputError, NumericalError
from .eigderiv import directional_frame, lambda_dir, lambda_parabolic
from .symfn import DEFAULT_TOL, SymmetricFunction, by_name
from .symmat import (
    EigenBlockStructure,
    OrderedEigen,
    as_symmetric,
    block_structure,
    default_group_tol,
    eig_ordered,
    fan_gap,
    frobenius,
    shifted_pseudoinverse,
    simultaneous_ordered_frame,
)

__all__ = [
    "SpectralFunction",
    "SubgradientPair",
    "g_eval",
    "g_subderivative",
    "spectral_tangent_contains",
    "spectral_second_tangent_contains",
    "g_parabolic_subderivative",
    "g_subdiff_contains",
    "g_critical_cone_contains",
    "sigma_term",
    "g_second_subderivative",
    "second_order_direction",
    "witness_direction",
    "minimizing_parabolic_offset",
    "prox_g",
    "dist_dom_g",
    "psd_critical_cone_explicit",
]

INF = float("inf")


@dataclass(frozen=True)
class SpectralFunction:
    """A symmetric function lifted to symmetric matrices through lam."""

    theta: SymmetricFunction

    @property
    def name(self) -> str:
        return self.theta.name

    @property
    def is_convex(self) -> bool:
        return self.theta.is_convex

    @property
    def is_polyhedral(self) -> bool:
        return self.theta.is_polyhedral

    @property
    def finite_everywhere(self) -> bool:
        return self.theta.finite_everywhere

    @classmethod
    def by_name(cls, name: str) -> "SpectralFunction":
        return cls(theta=by_name(name))


@dataclass(frozen=True)
class SubgradientPair:
    """A matrix subgradient Y of g at X with its shared ordered frame."""

    fn: SpectralFunction
    X: np.ndarray
    Y: np.ndarray
    U: np.ndarray
    lam_x: np.ndarray
    lam_y: np.ndarray

    @property
    def n(self) -> int:
        return self.lam_x.shape[0]

    def blocks(self, group_tol: Optional[float] = None) -> EigenBlockStructure:
        if group_tol is None:
            group_tol = default_group_tol(self.X)
        return block_structure(self.lam_x, group_tol)


def _require_subderivative_capability(g: SpectralFunction):
    if not (g.theta.is_convex or g.theta.lipschitz_on_domain):
        raise CapabilityError(
            f"{g.name}: subderivative chain rule needs convexity or Lipschitz continuity "
            "relative to the domain"
        )


def g_eval(g: SpectralFunction, X) -> float:
    return g.theta.value(eig_ordered(X).lam)


def g_subderivative(g: SpectralFunction, X, H) -> float:
    _require_subderivative_capability(g)
    lam = eig_ordered(X).lam
    if not np.isfinite(g.theta.value(lam)):
        raise InputError(f"{g.name}: base point outside the domain")
    return g.theta.subderivative(lam, lambda_dir(X, H))


def spectral_tangent_contains(g: SpectralFunction, X, H, tol=None) -> bool:
    lam = eig_ordered(X).lam
    return bool(np.isfinite(g.theta.subderivative(lam, lambda_dir(X, H), tol)))


def spectral_second_tangent_contains(g: SpectralFunction, X, H, W, tol=None) -> bool:
    lam = eig_ordered(X).lam
    d1 = lambda_dir(X, H)
    if not np.isfinite(g.theta.subderivative(lam, d1, tol)):
        return False
    d2 = lambda_parabolic(X, H, W)
    return bool(np.isfinite(g.theta.parabolic_subderivative(lam, d1, d2, tol)))


def g_parabolic_subderivative(g: SpectralFunction, X, H, W) -> float:
    _require_subderivative_capability(g)
    lam = eig_ordered(X).lam
    d1 = lambda_dir(X, H)
    if not np.isfinite(g.theta.subderivative(lam, d1)):
        raise InputError(f"{g.name}: direction outside the subderivative domain")
    return g.theta.parabolic_subderivative(lam, d1, lambda_parabolic(X, H, W))


def g_subdiff_contains(g: SpectralFunction, X, Y, tol=None) -> Optional[SubgradientPair]:
    """Test Y in the convex subdifferential of g at X; return the pair.

    Membership requires the vector-level subgradient inclusion at the
    eigenvalues together with a simultaneous ordered spectral decomposition
    of X and Y.  None encodes absence.
    """
    tol = DEFAULT_TOL if tol is None else float(tol)
    Xs = as_symmetric(X)
    Ys = as_symmetric(Y)
    frame = simultaneous_ordered_frame(Xs, Ys, tol=max(tol, 1e-8))
    if frame is None:
        return None
    if not g.theta.is_convex:
        raise CapabilityError(f"{g.name}: subdifferential test needs convexity")
    if not g.theta.subdifferential_contains(frame.lam_x, frame.lam_y, tol):
        return None
    return SubgradientPair(fn=g, X=Xs, Y=Ys, U=frame.U, lam_x=frame.lam_x, lam_y=frame.lam_y)


def _pair_lambda_dir(pair: SubgradientPair, H: np.ndarray, blocks: EigenBlockStructure) -> np.ndarray:
    out = np.empty(pair.n)
    for idx in blocks.alpha:
        S = pair.U[:, idx].T @ H @ pair.U[:, idx]
        out[idx] = np.linalg.eigvalsh((S + S.T) / 2.0)[::-1]
    return out


def g_critical_cone_contains(pair: SubgradientPair, H, tol=None) -> bool:
    """Criticality of a direction H for the pair (X, Y).

    Two conditions: the eigenvalue derivative lies in the vector-level
    critical cone, and on every eigenvalue block of X the diagonal
    multiplier slice and the compressed direction align (zero trace gap,
    i.e. blockwise simultaneous ordered decomposition).
    """
    tol = DEFAULT_TOL if tol is None else float(tol)
    Hs = as_symmetric(H)
    if Hs.shape != pair.X.shape:
        raise InputError("dimension mismatch")
    blocks = pair.blocks()
    d1 = _pair_lambda_dir(pair, Hs, blocks)
    if not pair.fn.theta.critical_cone_contains(pair.lam_x, pair.lam_y, d1, tol):
        return False
    for idx in blocks.alpha:
        S = pair.U[:, idx].T @ Hs @ pair.U[:, idx]
        if fan_gap(np.diag(pair.lam_y[idx]), S).gap > tol:
            return False
    return True


def sigma_term(pair: SubgradientPair, H) -> float:
    """Curvature correction of the second subderivative.

    2 * sum over blocks of <diag(lam_y) slice,
    U_a^T H (mu_m I - X)^+ H U_a>; vanishes at H = 0 and whenever the
    multiplier slice of a block is zero.
    """
    Hs = as_symmetric(H)
    if Hs.shape != pair.X.shape:
        raise InputError("dimension mismatch")
    blocks = pair.blocks()
    total = 0.0
    for m, idx in enumerate(blocks.alpha):
        ly = pair.lam_y[idx]
        if np.all(ly == 0.0):
            continue
        P = shifted_pseudoinverse(pair.X, float(blocks.mu[m]))
        M = pair.U[:, idx].T @ Hs @ P @ Hs @ pair.U[:, idx]
        total += float(np.dot(ly, np.diag(M)))
    return 2.0 * total


def g_second_subderivative(pair: SubgradientPair, H, tol=None) -> float:
    """Second subderivative of g at X tilted by the subgradient Y.

    +inf off the critical cone.  On it: the sigma term alone when theta is
    polyhedral; otherwise the vector-level tilted second subderivative of
    theta at the eigenvalue data plus the sigma term (theta must be
    parabolically regular for the formula to be exact, which holds for all
    polyhedral instances).
    """
    theta = pair.fn.theta
    if not theta.is_convex:
        raise CapabilityError(f"{pair.fn.name}: second subderivative needs convexity")
    if not g_critical_cone_contains(pair, H, tol):
        return INF
    sig = sigma_term(pair, H)
    if theta.is_polyhedral:
        return sig
    blocks = pair.blocks()
    d1 = _pair_lambda_dir(pair, as_symmetric(H), blocks)
    return theta.second_subderivative(pair.lam_x, pair.lam_y, d1, tol) + sig


def _aligned_block_diagonalizers(pair: SubgradientPair, H: np.ndarray, blocks: EigenBlockStructure, tol: float):
    """Per-block ordered diagonalizers of the compressed direction.

    When a block additionally commutes with the diagonal multiplier slice
    in the ordered sense (criticality), the returned diagonalizer fixes
    that diagonal slice, which the witness construction exploits; otherwise
    a plain ordered eigenvector matrix is used.
    """
    Qs = []
    for idx in blocks.alpha:
        S = pair.U[:, idx].T @ H @ pair.U[:, idx]
        S = (S + S.T) / 2.0
        d = pair.lam_y[idx]
        Q = _simultaneous_block_frame(S, d, tol)
        if Q is None:
            w, V = np.linalg.eigh(S)
            Q = np.ascontiguousarray(V[:, ::-1])
        Qs.append(Q)
    return Qs


def _simultaneous_block_frame(S: np.ndarray, d: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """Orthogonal Q with Q diag-ordered-eig(S) Q^T = S and Q^T diag(d) Q = diag(d)."""
    k = S.shape[0]
    runs = []
    start = 0
    for i in range(1, k):
        if d[i - 1] - d[i] > tol:
            runs.append(np.arange(start, i))
            start = i
    runs.append(np.arange(start, k))
    scale = 1.0 + float(np.linalg.norm(S))
    off = S.copy()
    for run in runs:
        off[np.ix_(run, run)] = 0.0
    if float(np.linalg.norm(off)) > tol * scale:
        return None
    Q = np.zeros_like(S)
    concat = []
    for run in runs:
        w, V = np.linalg.eigh(S[np.ix_(run, run)])
        Q[np.ix_(run, run)] = V[:, ::-1]
        concat.append(w[::-1])
    concat = np.concatenate(concat)
    target = np.sort(np.linalg.eigvalsh(S))[::-1]
    if float(np.max(np.abs(concat - target))) > tol * scale:
        return None
    return Q


def second_order_direction(X, H, z, group_tol=None, frame=None, block_Q=None, verify_tol: float = 1e-6) -> np.ndarray:
    """Build a matrix W with lam''(X;H,W) equal to a prescribed vector z.

    z must be nonincreasing on every inner run of equal eigenvalues of the
    compressed direction (its admissible block form); InputError otherwise.
    The construction compresses 2 H (X - mu_m I)^+ H to each block of X and
    adds the block rotation of diag(z) by the inner diagonalizer, then
    embeds blockwise.  The output is verified against an independent
    recomputation of lam''; NumericalError on failure.
    """
    Xs = as_symmetric(X)
    Hs = as_symmetric(H)
    z = np.asarray(z, dtype=float).ravel()
    if frame is None:
        frame = directional_frame(Xs, Hs, group_tol=group_tol)
    if z.shape[0] != frame.eig.n:
        raise InputError("z must have one entry per eigenvalue")
    U = frame.eig.U
    n = frame.eig.n
    Wl = np.zeros((n, n))
    for m, idx in enumerate(frame.blocks.alpha):
        for run in frame.beta[m]:
            seg = z[idx[run]]
            if np.any(np.diff(seg) > 1e-12 * (1.0 + float(np.max(np.abs(seg))))):
                raise InputError("each inner segment of z must be nonincreasing")
        Q = frame.Q[m] if block_Q is None else block_Q[m]
        A = Q @ np.diag(z[idx]) @ Q.T
        P = shifted_pseudoinverse(Xs, float(frame.blocks.mu[m]))
        # (X - mu I)^+ is the negative of the shifted pseudoinverse.
        G = U[:, idx].T @ (-2.0 * Hs @ P @ Hs) @ U[:, idx] + A
        Wl[np.ix_(idx, idx)] = (G + G.T) / 2.0
    W = U @ Wl @ U.T
    W = (W + W.T) / 2.0
    achieved = lambda_parabolic(Xs, Hs, W, group_tol=group_tol)
    err = float(np.linalg.norm(achieved - z))
    if err > verify_tol:
        raise NumericalError(f"witness verification failed: ||lam'' - z|| = {err:.3e}")
    return W


def witness_direction(pair: SubgradientPair, H, z, tol=None) -> np.ndarray:
    """Witness matrix What with lam''(X;H,What) = z, aligned with the pair.

    Inside each eigenvalue block the inner diagonalizer is chosen, when the
    direction is critical, to fix the multiplier slice diag(lam_y); then
    <Y, What> decomposes into the sigma term and <lam_y, z>, which is what
    the parabolic-regularity certificate requires.
    """
    tol = DEFAULT_TOL if tol is None else float(tol)
    Hs = as_symmetric(H)
    pair_eig = OrderedEigen(U=pair.U, lam=pair.lam_x)
    frame = directional_frame(pair.X, Hs, eig=pair_eig)
    Qs = _aligned_block_diagonalizers(pair, Hs, frame.blocks, tol)
    return second_order_direction(pair.X, Hs, z, frame=frame, block_Q=Qs)


def minimizing_parabolic_offset(pair: SubgradientPair, H, tol=None) -> np.ndarray:
    """Minimizer z of the inner tilted parabolic problem, polyhedral case.

    For the built-in polyhedral instances the infimum of the parabolic
    subderivative minus <lam_y, z> over admissible z is attained at z = 0
    on every critical direction (the program value is zero and z = 0 is
    always admissible); z = 0 is the canonical minimum-norm choice.
    """
    if not pair.fn.theta.is_polyhedral:
        raise CapabilityError(f"{pair.fn.name}: closed-form inner minimizer needs a polyhedral theta")
    if not g_critical_cone_contains(pair, H, tol):
        raise InputError("direction is not critical for the pair")
    return np.zeros(pair.n)


def prox_g(g: SpectralFunction, X, step: float = 1.0) -> np.ndarray:
    """Proximal map of a convex spectral function: act on eigenvalues."""
    if not g.theta.is_convex:
        raise CapabilityError(f"{g.name}: prox needs convexity")
    if step <= 0:
        raise InputError("step must be positive")
    e = eig_ordered(X)
    y = g.theta.prox(e.lam, step)
    return (e.U * np.asarray(y, dtype=float)) @ e.U.T


def dist_dom_g(g: SpectralFunction, X) -> float:
    """Distance to the domain of g; equals the vector distance at lam(X)."""
    return g.theta.domain_distance(eig_ordered(X).lam)


def psd_critical_cone_explicit(pair: SubgradientPair, H, tol=None) -> bool:
    """Closed-form critical-cone test for the positive-semidefinite cone.

    With index sets rho = {lam_x = 0, lam_y = 0} and tau_y = {lam_y < 0}
    (inside the kernel block of X), membership requires the compressed
    direction to be positive semidefinite on rho, zero on tau_y, and zero
    across rho x tau_y; all other slices are free.
    """
    tol = DEFAULT_TOL if tol is None else float(tol)
    Hs = as_symmetric(H)
    if Hs.shape != pair.X.shape:
        raise InputError("dimension mismatch")
    zero_x = np.abs(pair.lam_x) <= tol
    zero_y = np.abs(pair.lam_y) <= tol
    rho = np.where(zero_x & zero_y)[0]
    tau_y = np.where(pair.lam_y < -tol)[0]
    U = pair.U
    if rho.size:
        M = U[:, rho].T @ Hs @ U[:, rho]
        if float(np.min(np.linalg.eigvalsh((M + M.T) / 2.0))) < -tol:
            return False
    if tau_y.size:
        if float(np.max(np.abs(U[:, tau_y].T @ Hs @ U[:, tau_y]))) > tol:
            return False
    if rho.size and tau_y.size:
        if float(np.max(np.abs(U[:, rho].T @ Hs @ U[:, tau_y]))) > tol:
            return False
    return True
