"""Symmetric-matrix core: ordered eigendecompositions and eigenvalue blocks.

Everything downstream works with a dense real symmetric matrix X, its
eigenvalues sorted nonincreasing, and the partition of {0,...,n-1} into
blocks of (numerically) equal eigenvalues.  This module also provides the
shifted Moore-Penrose pseudoinverse (mu*I - X)^+, the trace-inequality gap
<lam(X), lam(Y)> - <X, Y> (nonnegative for symmetric matrices, zero exactly
when X and Y share one orthogonal frame diagonalizing both with eigenvalues
in nonincreasing order), and a constructor for such shared ordered frames.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "as_symmetric",
    "frobenius",
    "default_group_tol",
    "OrderedEigen",
    "eig_ordered",
    "EigenBlockStructure",
    "block_structure",
    "shifted_pseudoinverse",
    "FanGap",
    "fan_gap",
    "OrderedPairFrame",
    "simultaneous_ordered_frame",
    "LoadedMatrix",
    "load_matrix",
    "random_block_rotation",
]


def as_symmetric(a) -> np.ndarray:
    """Validate and symmetrize a square matrix via (A + A^T)/2.

    The averaged form is exactly symmetric in floating point.  Raises
    InputError for non-square shapes, non-finite entries, or n < 1.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise InputError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return (m + m.T) / 2.0


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float)))


def default_group_tol(x) -> float:
    """Eigenvalue clustering threshold: 1e-8 scaled by max(1, ||X||_F)."""
    return 1e-8 * max(1.0, frobenius(x))


@dataclass(frozen=True)
class OrderedEigen:
    """Orthogonal frame U and eigenvalues lam with X = U diag(lam) U^T.

    lam is sorted nonincreasing and the columns of U are permuted to match.
    """

    U: np.ndarray
    lam: np.ndarray

    @property
    def n(self) -> int:
        return self.lam.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.lam) @ self.U.T


def eig_ordered(X) -> OrderedEigen:
    """Eigendecomposition with eigenvalues in nonincreasing order."""
    Xs = as_symmetric(X)
    vals, vecs = np.linalg.eigh(Xs)
    order = np.arange(vals.shape[0])[::-1]  # eigh sorts ascending
    return OrderedEigen(U=np.ascontiguousarray(vecs[:, order]), lam=vals[order])


@dataclass(frozen=True)
class EigenBlockStructure:
    """Partition of eigenvalue indices into blocks of equal eigenvalues.

    mu[m] is the m-th distinct eigenvalue (strictly decreasing), alpha[m]
    the 0-based indices whose eigenvalue equals mu[m], and ell[i] the
    1-based position of index i inside its own block.
    """

    mu: np.ndarray
    alpha: tuple
    ell: np.ndarray
    group_tol: float

    @property
    def r(self) -> int:
        return len(self.alpha)

    def block_of(self, i: int) -> int:
        for m, idx in enumerate(self.alpha):
            if idx[0] <= i <= idx[-1]:
                return m
        raise InputError(f"index {i} outside 0..n-1")


def block_structure(e: OrderedEigen, group_tol: Optional[float] = None) -> EigenBlockStructure:
    """Greedy clustering of a nonincreasing eigenvalue vector.

    A new block starts whenever consecutive eigenvalues differ by more
    than group_tol; each mu[m] is the mean over its block.
    """
    lam = np.asarray(e.lam, dtype=float) if isinstance(e, OrderedEigen) else np.asarray(e, dtype=float)
    if group_tol is None:
        group_tol = 1e-8 * max(1.0, float(np.linalg.norm(lam)))
    if group_tol < 0:
        raise InputError("group_tol must be nonnegative")
    n = lam.shape[0]
    starts = [0]
    for i in range(1, n):
        if lam[i - 1] - lam[i] > group_tol:
            starts.append(i)
    starts.append(n)
    alpha = tuple(np.arange(starts[k], starts[k + 1]) for k in range(len(starts) - 1))
    mu = np.array([float(np.mean(lam[idx])) for idx in alpha])
    ell = np.empty(n, dtype=int)
    for idx in alpha:
        ell[idx] = np.arange(1, idx.size + 1)
    return EigenBlockStructure(mu=mu, alpha=alpha, ell=ell, group_tol=float(group_tol))


def shifted_pseudoinverse(X, mu: float, rank_tol: float = 1e-10) -> np.ndarray:
    """Moore-Penrose pseudoinverse of (mu*I - X) for symmetric X.

    Spectral gaps smaller than rank_tol * max(1, ||X||_F) are treated as
    exact kernel directions and inverted to zero.
    """
    if rank_tol <= 0:
        raise InputError("rank_tol must be positive")
    e = eig_ordered(X)
    cut = rank_tol * max(1.0, float(np.linalg.norm(e.lam)))
    gaps = mu - e.lam
    d = np.zeros_like(gaps)
    keep = np.abs(gaps) > cut
    d[keep] = 1.0 / gaps[keep]
    return (e.U * d) @ e.U.T


class FanGap(NamedTuple):
    inner: float
    lam_inner: float
    gap: float


def fan_gap(X, Y) -> FanGap:
    """Trace inner product vs the aligned-eigenvalue inner product.

    Returns (<X,Y>, <lam(X),lam(Y)>, difference); the difference is
    nonnegative up to roundoff and vanishes exactly for pairs admitting a
    simultaneous ordered spectral decomposition.
    """
    Xs = as_symmetric(X)
    Ys = as_symmetric(Y)
    if Xs.shape != Ys.shape:
        raise InputError(f"dimension mismatch: {Xs.shape} vs {Ys.shape}")
    inner = float(np.tensordot(Xs, Ys))
    lx = eig_ordered(Xs).lam
    ly = eig_ordered(Ys).lam
    lam_inner = float(np.dot(lx, ly))
    return FanGap(inner=inner, lam_inner=lam_inner, gap=lam_inner - inner)


@dataclass(frozen=True)
class OrderedPairFrame:
    """Shared frame U with U^T X U = diag(lam_x), U^T Y U = diag(lam_y)."""

    U: np.ndarray
    lam_x: np.ndarray
    lam_y: np.ndarray


def simultaneous_ordered_frame(X, Y, tol: float = 1e-8) -> Optional[OrderedPairFrame]:
    """Construct a simultaneous ordered spectral decomposition, if one exists.

    Diagonalize X with nonincreasing eigenvalues, rediagonalize Y compressed
    to each eigenvalue block of X, and accept only when the concatenated
    per-block eigenvalues of Y reproduce the globally sorted lam(Y) and the
    shared frame reconstructs both matrices.  Absence is returned as None.
    """
    Xs = as_symmetric(X)
    Ys = as_symmetric(Y)
    if Xs.shape != Ys.shape:
        raise InputError(f"dimension mismatch: {Xs.shape} vs {Ys.shape}")
    if frobenius(Xs @ Ys - Ys @ Xs) > tol:
        return None
    ex = eig_ordered(Xs)
    blocks = block_structure(ex, default_group_tol(Xs))
    U = ex.U.copy()
    lam_y_parts = []
    for idx in blocks.alpha:
        B = U[:, idx].T @ Ys @ U[:, idx]
        B = (B + B.T) / 2.0
        w, V = np.linalg.eigh(B)
        order = np.arange(w.shape[0])[::-1]
        U[:, idx] = U[:, idx] @ V[:, order]
        lam_y_parts.append(w[order])
    lam_y = np.concatenate(lam_y_parts)
    lam_y_global = eig_ordered(Ys).lam
    if float(np.max(np.abs(lam_y - lam_y_global))) > tol:
        return None
    # Guard against residual coupling between distinct X-blocks.
    resid = frobenius(U.T @ Ys @ U - np.diag(lam_y))
    if resid > max(tol, 1e-10) * (1.0 + frobenius(Ys)):
        return None
    return OrderedPairFrame(U=U, lam_x=ex.lam, lam_y=lam_y)


@dataclass(frozen=True)
class LoadedMatrix:
    matrix: np.ndarray
    asymmetry: float


def load_matrix(source) -> LoadedMatrix:
    """Read the JSON matrix format {"n": int, "rows": [[...], ...]}.

    The raw rows are symmetrized via (A + A^T)/2 and the Frobenius norm of
    the discarded skew part is recorded.
    """
    if isinstance(source, (str, bytes)):
        with open(source, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = source
    if not isinstance(obj, dict) or "n" not in obj or "rows" not in obj:
        raise InputError("matrix object must have keys 'n' and 'rows'")
    n = int(obj["n"])
    raw = np.asarray(obj["rows"], dtype=float)
    if raw.shape != (n, n):
        raise InputError(f"rows have shape {raw.shape}, expected ({n}, {n})")
    sym = as_symmetric(raw)
    return LoadedMatrix(matrix=sym, asymmetry=frobenius(raw - sym))


def random_block_rotation(blocks: EigenBlockStructure, rng: np.random.Generator) -> np.ndarray:
    """Random orthogonal matrix acting only inside each eigenvalue block.

    Used to re-randomize the frame choice U within repeated eigenvalues;
    downstream quantities must be invariant under this freedom.
    """
    n = blocks.ell.shape[0]
    R = np.zeros((n, n))
    for idx in blocks.alpha:
        k = idx.size
        if k == 1:
            R[idx[0], idx[0]] = rng.choice([-1.0, 1.0])
            continue
        A = rng.standard_normal((k, k))
        Q, _ = np.linalg.qr(A)
        R[np.ix_(idx, idx)] = Q
    return R
