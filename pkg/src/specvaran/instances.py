"""Random problem-instance generators for verification batteries and tests.

All generators take an explicit numpy Generator so batteries are
reproducible under a fixed seed.  Spectra with exact multiplicities are
built by conjugating a designed diagonal with a random orthogonal matrix;
the numerical eigenvalue splits stay far below the clustering tolerance.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .spectral import SpectralFunction
from .symmat import as_symmetric

__all__ = [
    "random_orthogonal",
    "random_symmetric",
    "matrix_with_spectrum",
    "spectrum_with_pattern",
    "semidefinite_with_kernel",
    "orthant_chain_case",
    "max_chain_case",
    "psd_pair_with_structure",
]


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    A = rng.standard_normal((n, n)) * scale
    return (A + A.T) / 2.0


def matrix_with_spectrum(rng: np.random.Generator, lam: Sequence[float]) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    Q = random_orthogonal(rng, lam.size)
    return as_symmetric((Q * lam) @ Q.T)


def spectrum_with_pattern(rng: np.random.Generator, n: int, pattern: str = "distinct") -> np.ndarray:
    """Eigenvalue vector with well-separated values and forced repeats.

    pattern: 'distinct', 'double' (one 2-fold value), 'triple' (one 3-fold
    value, needs n >= 3).
    """
    base = np.sort(rng.uniform(-2.0, 2.0, size=n))[::-1]
    # enforce separation so clustering is unambiguous
    for i in range(1, n):
        base[i] = min(base[i], base[i - 1] - 0.3)
    if pattern == "double" and n >= 2:
        base[1] = base[0]
    elif pattern == "triple" and n >= 3:
        base[1] = base[0]
        base[2] = base[0]
    elif pattern not in ("distinct", "double", "triple"):
        raise ValueError(f"unknown spectrum pattern {pattern!r}")
    return base


def semidefinite_with_kernel(
    rng: np.random.Generator, n: int, kernel_dim: int, sign: float = -1.0
) -> np.ndarray:
    """Semidefinite matrix with an exact kernel of the given dimension.

    sign -1 gives a negative semidefinite matrix, +1 positive semidefinite;
    nonzero eigenvalues are separated from zero by at least 0.5.
    """
    if not 0 <= kernel_dim <= n:
        raise ValueError("kernel_dim out of range")
    vals = np.zeros(n)
    k = n - kernel_dim
    if k:
        mags = 0.5 + rng.uniform(0.0, 1.5, size=k)
        vals[:k] = sign * np.sort(mags) if sign < 0 else sign * np.sort(mags)[::-1]
    lam = np.sort(vals)[::-1]
    return matrix_with_spectrum(rng, lam)


def _kernel_frame(X: np.ndarray, tol: float = 1e-8):
    vals, vecs = np.linalg.eigh(X)
    order = np.arange(vals.size)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    active = np.abs(vals) <= tol * max(1.0, float(np.max(np.abs(vals))))
    return vecs, active


def orthant_chain_case(rng: np.random.Generator, n: int, mode: str, sign: float = -1.0):
    """(X, H) for the semidefinite-cone indicator with a known verdict.

    modes (stated for the negative semidefinite cone; sign +1 mirrors):
      'interior'  X definite, any H: direction trivially tangent
      'strict'    X singular, compressed H strictly definite the right way
      'aligned'   X singular, H block-diagonal in the frame of X with a
                  singular compressed block: tangency holds with the
                  perturbed point feasible along the exact ray
      'outside'   compressed H has a strictly wrong-signed eigenvalue
    Returns (X, H, tangent: bool).
    """
    if mode == "interior":
        X = semidefinite_with_kernel(rng, n, 0, sign)
        return X, random_symmetric(rng, n), True
    kdim = int(rng.integers(1, max(2, n // 2 + 1)))
    X = semidefinite_with_kernel(rng, n, kdim, sign)
    vecs, active = _kernel_frame(X)
    U_act = vecs[:, active]
    G = random_symmetric(rng, n)
    S = U_act.T @ G @ U_act
    S = (S + S.T) / 2.0
    w = np.linalg.eigvalsh(S)
    if mode == "strict":
        # push the compressed block strictly inside the tangent cone
        if sign < 0:
            shift = (np.max(w) + 0.3) * (U_act @ U_act.T)
            return X, G - shift, True
        shift = (np.min(w) - 0.3) * (U_act @ U_act.T)
        return X, G - shift, True
    if mode == "outside":
        if sign < 0:
            shift = (np.min(w) - 0.3) * (U_act @ U_act.T)
            return X, G - shift, False
        shift = (np.max(w) + 0.3) * (U_act @ U_act.T)
        return X, G - shift, False
    if mode == "aligned":
        # exact block alignment: kernel block singular semidefinite, rest free
        k = U_act.shape[1]
        B = rng.standard_normal((k, max(1, k - 1)))
        M_act = sign * (B @ B.T) / max(1, k)
        M_rest = random_symmetric(rng, n - k)
        M = np.zeros((n, n))
        M[:k, :k] = M_act
        M[k:, k:] = M_rest
        order = np.concatenate([np.where(active)[0], np.where(~active)[0]])
        V = vecs[:, order]
        H = V @ M @ V.T
        return X, (H + H.T) / 2.0, True
    raise ValueError(f"unknown mode {mode!r}")


def expansion_instance(rng: np.random.Generator, n: int, pattern: str):
    """(X, H, W) for eigenvalue-expansion order checks.

    Directions are scaled to Frobenius norm 1/2 and H is resampled until
    the compressed per-block spectra are separated, keeping the cubic
    remainder constant small enough that the o(t^2) ratio test has margin
    at t = 1e-3.
    """
    from .eigderiv import directional_frame

    lam = spectrum_with_pattern(rng, n, pattern)
    X = matrix_with_spectrum(rng, lam)
    H = None
    for _ in range(500):
        cand = random_symmetric(rng, n)
        cand *= 0.5 / np.linalg.norm(cand)
        frame = directional_frame(X, cand)
        if all(v.size < 2 or float(np.min(-np.diff(v))) >= 0.05 for v in frame.inner):
            H = cand
            break
    if H is None:
        raise RuntimeError("no inner-separated direction found")
    W = random_symmetric(rng, n)
    W *= 0.5 / np.linalg.norm(W)
    return X, H, W


def max_chain_case(rng: np.random.Generator, n: int, degenerate_top: bool):
    pattern = "double" if degenerate_top and n >= 2 else "distinct"
    lam = spectrum_with_pattern(rng, n, pattern)
    X = matrix_with_spectrum(rng, lam)
    return X, random_symmetric(rng, n)


def psd_pair_with_structure(rng: np.random.Generator, sizes: tuple):
    """(X, Y) for the positive-semidefinite cone with prescribed index sets.

    sizes = (n_pos, n_zero_both, n_neg_mult): eigenvalues of X positive on
    the first group and zero elsewhere; eigenvalues of Y zero except
    strictly negative on the last group.  Shares one random frame.
    """
    n_pos, n_zero, n_neg = sizes
    n = n_pos + n_zero + n_neg
    Q = random_orthogonal(rng, n)
    lam_x = np.concatenate([np.sort(rng.uniform(0.5, 2.0, n_pos))[::-1], np.zeros(n_zero + n_neg)])
    lam_y = np.concatenate([np.zeros(n_pos + n_zero), -np.sort(rng.uniform(0.5, 2.0, n_neg))])
    X = as_symmetric((Q * lam_x) @ Q.T)
    Y = as_symmetric((Q * lam_y) @ Q.T)
    return X, Y
