"""Dense real matrix kernels.

Matrix exponential, a Bartels-Stewart Lyapunov solver, symmetric
eigendecomposition and the SPD helpers built on it.  All functions are pure
and return new arrays.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _backend
from .exceptions import DimensionError, LyapunovError, NotPSDError, SingularMatrixError

#: Default relative tolerance for PSD / singularity checks.
DEFAULT_TOL = 1e-12


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float array.

    Vectors are not promoted; pass explicit shapes.
    """
    M = np.array(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DimensionError(f"{name} contains non-finite entries")
    return M


def _square(M, name):
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def symmetrize(M):
    return 0.5 * (M + M.T)


def mat_exp(A, t=1.0):
    """Matrix exponential ``exp(A t)``.

    Scaling and squaring with a degree-13 diagonal Pade approximant
    (``scipy.linalg.expm``).  ``t == 0`` returns the identity exactly.
    """
    A = _square(A, "A")
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    if t == 0.0:
        return np.eye(A.shape[0])
    return scipy.linalg.expm(A * t)


def _schur_blocks(T):
    """Start indices and sizes of the diagonal blocks of a real Schur form."""
    n = T.shape[0]
    starts, sizes = [], []
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            starts.append(i)
            sizes.append(2)
            i += 2
        else:
            starts.append(i)
            sizes.append(1)
            i += 1
    return np.array(starts, dtype=np.int64), np.array(sizes, dtype=np.int64)


def _block_eigenvalues(T, starts, sizes):
    eigs = []
    for s, k in zip(starts, sizes):
        if k == 1:
            eigs.append(complex(T[s, s]))
        else:
            eigs.extend(np.linalg.eigvals(T[s:s + 2, s:s + 2]))
    return np.array(eigs, dtype=complex)


def solve_lyapunov(A, W):
    """Solve ``A X + X A^T + W = 0`` for symmetric ``X``.

    Bartels-Stewart: ``A`` is reduced to real Schur form ``U T U^T`` and the
    transformed equation is solved by block back-substitution over the 1x1
    and 2x2 diagonal blocks of ``T``.

    Raises
    ------
    LyapunovError
        If two eigenvalues of ``A`` sum to (numerically) zero.
    """
    A = _square(A, "A")
    W = _square(W, "W")
    n = A.shape[0]
    if W.shape != A.shape:
        raise DimensionError(f"W has shape {W.shape}, expected {A.shape}")
    W = symmetrize(W)

    T, U = scipy.linalg.schur(A, output="real")
    starts, sizes = _schur_blocks(T)

    lam = _block_eigenvalues(T, starts, sizes)
    sums = lam[:, None] + lam[None, :]
    scale = max(np.linalg.norm(T, 1), np.finfo(float).tiny)
    idx = np.unravel_index(np.argmin(np.abs(sums)), sums.shape)
    worst = sums[idx]
    if abs(worst) <= 100 * n * np.finfo(float).eps * scale:
        raise LyapunovError(
            f"Lyapunov operator is singular: eigenvalues {lam[idx[0]]:.6g} and "
            f"{lam[idx[1]]:.6g} sum to {worst:.3g}",
            eigenvalue_sum=worst,
        )

    R = -(U.T @ W @ U)
    R = np.ascontiguousarray(symmetrize(R))
    Y = _backend.lyap_quasitri(np.ascontiguousarray(T), R, starts, sizes)
    return symmetrize(U @ Y @ U.T)


@dataclass(frozen=True)
class SymEig:
    """Eigenvalues in descending order and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    vectors: np.ndarray


def sym_eig(S):
    S = symmetrize(_square(S, "S"))
    w, V = np.linalg.eigh(S)
    return SymEig(w[::-1].copy(), V[:, ::-1].copy())


def spd_factor(S, tol=DEFAULT_TOL, rank_tol=None):
    """Factor ``S = L L^T`` for symmetric positive semidefinite ``S``.

    Built from the eigendecomposition.  Eigenvalues at or below
    ``rank_tol * ||S||_2`` (default ``tol``; negative rounding noise always)
    are dropped, so ``L`` has one column per numerically nonzero eigenvalue
    and is rectangular when ``S`` is rank deficient.  ``rank_tol=0`` keeps
    every positive eigenvalue.

    Raises
    ------
    NotPSDError
        If an eigenvalue is below ``-tol * ||S||_2``.
    """
    eig = sym_eig(S)
    w = eig.eigenvalues
    norm = max(abs(w[0]), abs(w[-1])) if w.size else 0.0
    if w.size and w[-1] < -tol * norm:
        raise NotPSDError(
            f"matrix is not positive semidefinite: smallest eigenvalue {w[-1]:.3e} "
            f"below -{tol:g} * {norm:.3e}"
        )
    keep = w > (tol if rank_tol is None else rank_tol) * norm
    return eig.vectors[:, keep] * np.sqrt(w[keep])


def spd_inv_sqrt(S, tol=DEFAULT_TOL):
    """Symmetric inverse square root of an SPD matrix.

    Raises
    ------
    SingularMatrixError
        If an eigenvalue is at or below ``tol * ||S||_2``.
    """
    eig = sym_eig(S)
    w = eig.eigenvalues
    norm = max(abs(w[0]), abs(w[-1]))
    if w[-1] <= tol * norm:
        raise SingularMatrixError(
            f"matrix is numerically singular: smallest eigenvalue {w[-1]:.3e}, "
            f"threshold {tol * norm:.3e}"
        )
    V = eig.vectors
    return symmetrize((V / np.sqrt(w)) @ V.T)


def svd(M):
    """Thin SVD ``M = U diag(s) V^T``; returns ``(U, s, V)``."""
    M = as_matrix(M, "M")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return U, s, Vt.T


def spectral_norm(M):
    """Largest singular value; 0 for an empty matrix."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])
