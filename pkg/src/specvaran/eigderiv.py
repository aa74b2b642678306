"""First- and second-order directional derivatives of the eigenvalue map.

For symmetric X with ordered frame U and eigenvalue blocks alpha_m (distinct
values mu_m), the first directional derivative along H is computed blockwise:
the slice of lam'(X;H) on alpha_m equals the nonincreasing eigenvalues of the
compressed direction U_{alpha_m}^T H U_{alpha_m}.

The parabolic second-order derivative lam''(X;H,W) needs one more level of
structure.  Inside each block, diagonalize the compressed direction with an
orthogonal Q_m (nonincreasing inner eigenvalues), cluster the inner spectrum
into runs beta_j of equal values, and let R_mj be the columns of Q_m selected
by beta_j.  Then the slice of lam''(X;H,W) on the indices of beta_j equals
the nonincreasing eigenvalues of

    R_mj^T [ U_{alpha_m}^T (W + 2 H (mu_m I - X)^+ H) U_{alpha_m} ] R_mj.

Both derivatives are exact directional limits; the residual helpers verify
the corresponding Taylor-like expansions of lam(X + tH + t^2 W / 2) on a
t-grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .symmat import (
    EigenBlockStructure,
    OrderedEigen,
    as_symmetric,
    block_structure,
    default_group_tol,
    eig_ordered,
    shifted_pseudoinverse,
)

__all__ = [
    "DEFAULT_T_GRID",
    "DirectionalSpectralFrame",
    "lambda_dir",
    "directional_frame",
    "lambda_parabolic",
    "expansion_residual_first",
    "expansion_residual_second",
]

# Geometric default grid; below ~1e-6 the eigenvalue residuals drown in
# float noise relative to the t^2 scale.
DEFAULT_T_GRID = tuple(10.0 ** (-k) for k in range(1, 7))


def _check_same_shape(X: np.ndarray, *others: np.ndarray) -> None:
    for M in others:
        if M.shape != X.shape:
            raise InputError(f"dimension mismatch: {X.shape} vs {M.shape}")


@dataclass(frozen=True)
class DirectionalSpectralFrame:
    """Nested spectral data of a base point X and a direction H.

    Fields:
      eig     ordered eigendecomposition of X
      blocks  eigenvalue blocks of X
      Q       per-block orthogonal diagonalizers of U_a^T H U_a (ordered)
      inner   per-block nonincreasing eigenvalues of U_a^T H U_a
      eta     per-block distinct inner eigenvalues
      beta    per-block runs of equal inner eigenvalues (local indices)
      ellp    1-based position of each global index inside its beta-run
    """

    eig: OrderedEigen
    blocks: EigenBlockStructure
    Q: tuple
    inner: tuple
    eta: tuple
    beta: tuple
    ellp: np.ndarray

    def beta_of(self, i: int) -> tuple:
        """Return (m, j) with i in alpha_m and its inner position in beta_j."""
        m = self.blocks.block_of(i)
        loc = int(self.blocks.ell[i]) - 1
        for j, run in enumerate(self.beta[m]):
            if run[0] <= loc <= run[-1]:
                return m, j
        raise InputError("inconsistent inner block structure")


def directional_frame(
    X,
    H,
    group_tol: Optional[float] = None,
    inner_tol: Optional[float] = None,
    eig: Optional[OrderedEigen] = None,
) -> DirectionalSpectralFrame:
    Xs = as_symmetric(X)
    Hs = as_symmetric(H)
    _check_same_shape(Xs, Hs)
    e = eig_ordered(Xs) if eig is None else eig
    blocks = block_structure(e, group_tol if group_tol is not None else default_group_tol(Xs))
    Qs, inners, etas, betas = [], [], [], []
    ellp = np.empty(e.n, dtype=int)
    for m, idx in enumerate(blocks.alpha):
        S = e.U[:, idx].T @ Hs @ e.U[:, idx]
        S = (S + S.T) / 2.0
        w, V = np.linalg.eigh(S)
        order = np.arange(w.shape[0])[::-1]
        w, V = w[order], np.ascontiguousarray(V[:, order])
        tol_m = inner_tol if inner_tol is not None else default_group_tol(S)
        inner_blocks = block_structure(OrderedEigen(U=V, lam=w), tol_m)
        Qs.append(V)
        inners.append(w)
        etas.append(inner_blocks.mu)
        betas.append(inner_blocks.alpha)
        ellp[idx] = inner_blocks.ell
    return DirectionalSpectralFrame(
        eig=e,
        blocks=blocks,
        Q=tuple(Qs),
        inner=tuple(inners),
        eta=tuple(etas),
        beta=tuple(betas),
        ellp=ellp,
    )


def lambda_dir(X, H, group_tol: Optional[float] = None) -> np.ndarray:
    """Directional derivative of the ordered eigenvalue vector at X along H."""
    Xs = as_symmetric(X)
    Hs = as_symmetric(H)
    _check_same_shape(Xs, Hs)
    e = eig_ordered(Xs)
    blocks = block_structure(e, group_tol if group_tol is not None else default_group_tol(Xs))
    out = np.empty(e.n)
    for idx in blocks.alpha:
        S = e.U[:, idx].T @ Hs @ e.U[:, idx]
        out[idx] = np.linalg.eigvalsh((S + S.T) / 2.0)[::-1]
    return out


def lambda_parabolic(
    X,
    H,
    W,
    group_tol: Optional[float] = None,
    frame: Optional[DirectionalSpectralFrame] = None,
) -> np.ndarray:
    """Parabolic second-order derivative of the eigenvalue vector.

    Entry i is the limit of [lam_i(X + tH + t^2 W/2) - lam_i(X)
    - t*lam_i'(X;H)] / (t^2/2) as t decreases to 0.
    """
    Xs = as_symmetric(X)
    Hs = as_symmetric(H)
    Ws = as_symmetric(W)
    _check_same_shape(Xs, Hs, Ws)
    if frame is None:
        frame = directional_frame(Xs, Hs, group_tol=group_tol)
    out = np.empty(frame.eig.n)
    U = frame.eig.U
    for m, idx in enumerate(frame.blocks.alpha):
        P = shifted_pseudoinverse(Xs, float(frame.blocks.mu[m]))
        K = U[:, idx].T @ (Ws + 2.0 * Hs @ P @ Hs) @ U[:, idx]
        K = (K + K.T) / 2.0
        for run in frame.beta[m]:
            R = frame.Q[m][:, run]
            M = R.T @ K @ R
            vals = np.linalg.eigvalsh((M + M.T) / 2.0)[::-1]
            out[idx[run]] = vals
    return out


def expansion_residual_first(X, H, t_grid=None) -> np.ndarray:
    """Table of (t, ||lam(X+tH) - lam(X) - t lam'(X;H)||) over the grid.

    Residuals shrink quadratically in t; a log-log slope fit should come
    out near 2.
    """
    Xs = as_symmetric(X)
    Hs = as_symmetric(H)
    _check_same_shape(Xs, Hs)
    ts = _validated_grid(t_grid)
    lam0 = eig_ordered(Xs).lam
    d1 = lambda_dir(Xs, Hs)
    rows = []
    for t in ts:
        lam_t = eig_ordered(Xs + t * Hs).lam
        rows.append((t, float(np.linalg.norm(lam_t - lam0 - t * d1))))
    return np.array(rows)


def expansion_residual_second(X, H, W, t_grid=None) -> np.ndarray:
    """Residual table of the second-order eigenvalue expansion.

    residual(t) = ||lam(X+tH+t^2 W/2) - lam(X) - t lam'(X;H)
                   - (t^2/2) lam''(X;H,W)||, which is o(t^2): the ratio
    residual/t^2 must decrease along the grid.
    """
    Xs = as_symmetric(X)
    Hs = as_symmetric(H)
    Ws = as_symmetric(W)
    _check_same_shape(Xs, Hs, Ws)
    ts = _validated_grid(t_grid)
    lam0 = eig_ordered(Xs).lam
    d1 = lambda_dir(Xs, Hs)
    d2 = lambda_parabolic(Xs, Hs, Ws)
    rows = []
    for t in ts:
        lam_t = eig_ordered(Xs + t * Hs + 0.5 * t * t * Ws).lam
        res = lam_t - lam0 - t * d1 - 0.5 * t * t * d2
        rows.append((t, float(np.linalg.norm(res))))
    return np.array(rows)


def _validated_grid(t_grid) -> np.ndarray:
    ts = np.asarray(DEFAULT_T_GRID if t_grid is None else t_grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or np.any(ts <= 0):
        raise InputError("t-grid must be a nonempty vector of positive values")
    if np.any(np.diff(ts) >= 0):
        raise InputError("t-grid must be strictly decreasing")
    return ts
