"""Time-limited reachability and observability Gramians.

Two independent routes are provided: the shifted Lyapunov equations
(:func:`gramians_lyapunov`) and direct quadrature of the defining integrals
(:func:`gramians_quadrature`), which serves as an oracle for the first.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ObservabilityError, ReachabilityError
from .linalg import DEFAULT_TOL, mat_exp, solve_lyapunov, sym_eig, symmetrize


@dataclass(frozen=True, eq=False)
class GramianPair:
    """Reachability Gramian ``P``, observability Gramian ``Q`` and the horizon.

    ``exp_AT`` caches ``exp(A T)`` for finite horizons; it is ``None`` for the
    infinite-horizon pair.
    """

    P: np.ndarray
    Q: np.ndarray
    horizon: float
    exp_AT: Optional[np.ndarray] = None

    @property
    def finite(self):
        return math.isfinite(self.horizon)


def _check_psd(M, err, what, tol=DEFAULT_TOL):
    w = sym_eig(M).eigenvalues
    norm = max(abs(w[0]), abs(w[-1]))
    if w[-1] < -tol * norm:
        raise err(f"{what} Gramian is indefinite: smallest eigenvalue {w[-1]:.3e}, norm {norm:.3e}")


def _pair(P, Q, horizon, exp_AT=None):
    P, Q = symmetrize(P), symmetrize(Q)
    _check_psd(P, ReachabilityError, "reachability")
    _check_psd(Q, ObservabilityError, "observability")
    return GramianPair(P, Q, horizon, exp_AT)


def _exp_and_increment(A, T):
    """``exp(A T)`` and ``exp(A T) - I`` without cancellation for small ``T``.

    The increment is ``A`` times the top-right block of the exponential of
    ``[[A, I], [0, 0]] T``, which equals ``int_0^T exp(A s) ds``.
    """
    n = A.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = A
    M[:n, n:] = np.eye(n)
    X = mat_exp(M, T)
    D = A @ X[:n, n:]
    return X[:n, :n], D


def _shifted_rhs(B, DB):
    # B B^T - (B + DB)(B + DB)^T, expanded so no large terms cancel
    return -(DB @ B.T + B @ DB.T + DB @ DB.T)


def gramians_lyapunov(sys, T):
    """Solve ``A P + P A^T + BB^T - E BB^T E^T = 0`` and its dual, ``E = exp(A T)``."""
    T = float(T)
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"horizon must be positive and finite, got {T}")
    A, B, C = sys.A, sys.B, sys.C
    E, D = _exp_and_increment(A, T)
    P = solve_lyapunov(A, _shifted_rhs(B, D @ B))
    Q = solve_lyapunov(A.T, _shifted_rhs(C.T, D.T @ C.T))
    return _pair(P, Q, T, E)


def gramians_infinite(sys):
    """Infinite-horizon Gramians from the standard Lyapunov equations."""
    P = solve_lyapunov(sys.A, sys.B @ sys.B.T)
    Q = solve_lyapunov(sys.A.T, sys.C.T @ sys.C)
    return _pair(P, Q, math.inf)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(7)


def _quadrature_fixed(A, B, C, T, panels):
    n = A.shape[0]
    h = T / panels
    # exp(A s) at the 7 offsets inside the first panel; later panels are
    # reached by repeated multiplication with exp(A h)
    offsets = 0.5 * h * (1.0 + _GL_NODES)
    Eoff = [mat_exp(A, s) for s in offsets]
    Eh = mat_exp(A, h)
    ZB = [E @ B for E in Eoff]
    ZC = [C @ E for E in Eoff]
    P = np.zeros((n, n))
    Q = np.zeros((n, n))
    shift = np.eye(n)
    for _ in range(panels):
        for w, zb, zc in zip(_GL_WEIGHTS, ZB, ZC):
            xb = shift @ zb
            xc = zc @ shift
            P += w * (xb @ xb.T)
            Q += w * (xc.T @ xc)
        shift = Eh @ shift
    scale = 0.5 * h
    return scale * P, scale * Q


def gramians_quadrature(sys, T, panels=None, rtol=1e-9, max_panels=2 ** 10):
    """Gramians by composite 7-point Gauss-Legendre quadrature on ``[0, T]``.

    With a fixed ``panels`` count the rule is applied once.  Otherwise the
    panel count is doubled from 1 until successive results agree to ``rtol``
    (relative Frobenius) or ``max_panels`` is reached.
    """
    T = float(T)
    if not (T >= 0 and math.isfinite(T)):
        raise ValueError(f"horizon must be non-negative and finite, got {T}")
    A, B, C = sys.A, sys.B, sys.C
    if panels is not None:
        if panels < 1:
            raise ValueError("panels must be >= 1")
        P, Q = _quadrature_fixed(A, B, C, T, panels)
        return _pair(P, Q, T, mat_exp(A, T))

    k = 1
    P, Q = _quadrature_fixed(A, B, C, T, k)
    while k < max_panels:
        k *= 2
        P2, Q2 = _quadrature_fixed(A, B, C, T, k)
        dP = np.linalg.norm(P2 - P) / max(np.linalg.norm(P2), np.finfo(float).tiny)
        dQ = np.linalg.norm(Q2 - Q) / max(np.linalg.norm(Q2), np.finfo(float).tiny)
        P, Q = P2, Q2
        if max(dP, dQ) < rtol:
            break
    return _pair(P, Q, T, mat_exp(A, T))
