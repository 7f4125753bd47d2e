"""Pure numpy implementations of the hot kernels.

These are the reference versions of the routines in ``_kernels.pyx``; both
must return identical results up to rounding.  Inputs are assumed to be
validated by the callers in :mod:`tlbt.linalg` and :mod:`tlbt.simulation`.
"""
import numpy as np


def _small_sylvester(Tii, Tjj, rhs):
    # Tii Y + Y Tjj^T = rhs for blocks of order <= 2, via the Kronecker form
    p, q = rhs.shape
    K = np.kron(np.eye(q), Tii) + np.kron(Tjj, np.eye(p))
    return np.linalg.solve(K, rhs.reshape(-1, order="F")).reshape((p, q), order="F")


def lyap_quasitri(T, R, starts, sizes):
    """Solve ``T Y + Y T^T = R`` for quasi-upper-triangular ``T``.

    ``R`` must be symmetric; only the upper block triangle is solved for and
    the result is mirrored.  ``starts``/``sizes`` describe the 1x1 and 2x2
    diagonal blocks of ``T``.
    """
    n = T.shape[0]
    Y = np.zeros((n, n))
    for jb in range(len(starts) - 1, -1, -1):
        j0 = starts[jb]
        j1 = j0 + sizes[jb]
        Tjj = T[j0:j1, j0:j1]
        rhs_col = R[:, j0:j1] - Y[:, j1:] @ T[j0:j1, j1:].T
        for ib in range(jb, -1, -1):
            i0 = starts[ib]
            i1 = i0 + sizes[ib]
            rhs = rhs_col[i0:i1] - T[i0:i1, i1:] @ Y[i1:, j0:j1]
            Yij = _small_sylvester(T[i0:i1, i0:i1], Tjj, rhs)
            Y[i0:i1, j0:j1] = Yij
            Y[j0:j1, i0:i1] = Yij.T
    return Y


def recurrence(Phi, GU):
    """States of ``x[k+1] = Phi x[k] + GU[k]`` from ``x[0] = 0``.

    Returns an ``(N + 1, n)`` array whose row ``k`` is ``x[k]``.
    """
    N, n = GU.shape
    X = np.empty((N + 1, n))
    X[0] = 0.0
    for k in range(N):
        X[k + 1] = Phi @ X[k] + GU[k]
    return X
