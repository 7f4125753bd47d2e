"""Square-root balancing of time-limited Gramians and truncation.

Given Gramian factors ``P = L_P L_P^T`` and ``Q = L_Q L_Q^T`` and the SVD
``X diag(sigma) Y^T = L_Q^T L_P``, the balancing transformation is

    S     = diag(sigma)^(-1/2) X^T L_Q^T
    S^-1  = L_P Y diag(sigma)^(-1/2)

In the balanced coordinates both Gramians equal ``diag(sigma)`` and the
shifted Lyapunov equations read

    A Sigma + Sigma A^T = -B B^T + F F^T,    F = S exp(A_o T) B_o
    A^T Sigma + Sigma A = -C^T C + G^T G,    G = C_o exp(A_o T) S^-1
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionError,
    IllConditionedBalancingError,
    ObservabilityError,
    ReachabilityError,
)
from .linalg import DEFAULT_TOL, spd_factor, svd, sym_eig
from .system import SimilarityTransform, StateSpace

#: smallest admissible sigma_n / sigma_1 for a full balancing
MIN_SIGMA_RATIO = 1e-13
COND_WARN = 1e8
COND_REFUSE = 1e13


@dataclass(frozen=True, eq=False)
class BalancedRealization:
    """Balanced system with time-limited singular values and correction factors.

    ``sigma_discarded`` holds singular values dropped by a rank-truncated
    balancing (empty for a full balancing); the realization then has order
    ``k = len(sigma) < n`` and ``transform.S`` is k x n.
    """

    sys_bal: StateSpace
    sigma: np.ndarray
    transform: SimilarityTransform
    F: np.ndarray
    G: np.ndarray
    horizon: float
    sigma_discarded: np.ndarray

    @property
    def order(self):
        return self.sigma.size


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Order-``r`` truncation ``(A11, B1, C1)`` of a balanced realization."""

    sys_r: StateSpace
    r: int
    sigma_kept: np.ndarray
    sigma_truncated: np.ndarray
    horizon: float


def _require_pd(M, err, what, tol):
    w = sym_eig(M).eigenvalues
    norm = max(abs(w[0]), abs(w[-1]))
    if w[-1] < tol * norm:
        rank = int(np.sum(w >= tol * norm))
        raise err(
            f"{what} Gramian is not numerically positive definite: numerical rank "
            f"{rank} of {w.size} (smallest eigenvalue {w[-1]:.3e}, threshold {tol * norm:.3e})"
        )


def _fix_signs(X, Y):
    # largest-magnitude entry of each column of X made positive
    idx = np.argmax(np.abs(X), axis=0)
    signs = np.sign(X[idx, np.arange(X.shape[1])])
    signs[signs == 0] = 1.0
    return X * signs, Y * signs


def balance(sys, gram, rank_tol=None, pd_tol=DEFAULT_TOL):
    """Balance ``sys`` with respect to the Gramians ``gram``.

    Parameters
    ----------
    sys : StateSpace
    gram : GramianPair
        Gramians of ``sys`` at some horizon (finite or infinite).
    rank_tol : float, optional
        ``None`` (default) requires a complete balancing: both Gramians
        positive definite and ``sigma_n / sigma_1 >= 1e-13``.  A float instead
        keeps only ``sigma_i > rank_tol * sigma_1`` and balances that
        numerically minimal part; the transform is then rectangular.

    Raises
    ------
    ReachabilityError, ObservabilityError
        Gramian not positive definite (complete balancing only).
    IllConditionedBalancingError
        Singular value spread or ``cond(S)`` beyond the refusal limits.
    """
    n = sys.n
    if gram.P.shape != (n, n) or gram.Q.shape != (n, n):
        raise DimensionError(f"Gramians have shape {gram.P.shape}, system has n={n}")
    if rank_tol is None:
        _require_pd(gram.P, ReachabilityError, "reachability", pd_tol)
        _require_pd(gram.Q, ObservabilityError, "observability", pd_tol)

    # keep every positive eigenvalue: the rank decision is made on sigma
    LP = spd_factor(gram.P, rank_tol=0.0)
    LQ = spd_factor(gram.Q, rank_tol=0.0)
    if LP.shape[1] == 0:
        raise ReachabilityError("reachability Gramian is zero")
    if LQ.shape[1] == 0:
        raise ObservabilityError("observability Gramian is zero")
    X, s, Y = svd(LQ.T @ LP)

    if rank_tol is None:
        if s.size < n or s[-1] < MIN_SIGMA_RATIO * s[0]:
            smallest = s[-1] if s.size == n else 0.0
            raise IllConditionedBalancingError(
                f"time-limited singular values span too wide a range: "
                f"sigma_n/sigma_1 = {smallest / s[0]:.3e} < {MIN_SIGMA_RATIO:g}"
            )
        k = n
    else:
        k = int(np.sum(s > rank_tol * s[0]))
    discarded = s[k:].copy()
    X, s, Y = X[:, :k], s[:k], Y[:, :k]
    X, Y = _fix_signs(X, Y)

    rs = 1.0 / np.sqrt(s)
    S = (X * rs).T @ LQ.T
    S_inv = LP @ (Y * rs)
    if k < n:
        # restore S S_inv = I lost to rounding in the oblique projection
        S_inv = S_inv @ np.linalg.inv(S @ S_inv)
        cond = float(np.linalg.norm(S, 2) * np.linalg.norm(S_inv, 2))
    else:
        cond = float(np.linalg.cond(S))
    if cond > COND_REFUSE:
        raise IllConditionedBalancingError(f"balancing transformation has cond(S) = {cond:.3e} > {COND_REFUSE:g}")
    if cond > COND_WARN:
        warnings.warn(f"balancing transformation is ill-conditioned: cond(S) = {cond:.3e}", stacklevel=2)

    transform = SimilarityTransform(S, S_inv)
    sys_bal = StateSpace(S @ sys.A @ S_inv, S @ sys.B, sys.C @ S_inv, require_stable=False)
    if gram.finite:
        E = gram.exp_AT
        F = S @ (E @ sys.B)
        G = (sys.C @ E) @ S_inv
    else:
        F = np.zeros((k, sys.m))
        G = np.zeros((sys.p, k))
    return BalancedRealization(sys_bal, s, transform, F, G, gram.horizon, discarded)


def balance_residuals(bal, sys, gram):
    """Relative residuals of the balancing identities.

    Keys: ``diag_P`` and ``diag_Q`` (Frobenius distance of the transformed
    Gramians from ``diag(sigma)``, relative to ``sigma_1``), ``reach`` and
    ``obs`` (balanced Lyapunov residuals relative to ``||BB^T||_F`` and
    ``||C^T C||_F``), ``transform`` (``||S S^-1 - I||_F``).
    """
    S, S_inv = bal.transform.S, bal.transform.S_inv
    Sig = np.diag(bal.sigma)
    A, B, C = bal.sys_bal.A, bal.sys_bal.B, bal.sys_bal.C
    s1 = bal.sigma[0]
    reach = A @ Sig + Sig @ A.T + B @ B.T - bal.F @ bal.F.T
    obs = A.T @ Sig + Sig @ A + C.T @ C - bal.G.T @ bal.G
    return {
        "diag_P": float(np.linalg.norm(S @ gram.P @ S.T - Sig) / s1),
        "diag_Q": float(np.linalg.norm(S_inv.T @ gram.Q @ S_inv - Sig) / s1),
        "reach": float(np.linalg.norm(reach) / np.linalg.norm(B @ B.T)),
        "obs": float(np.linalg.norm(obs) / np.linalg.norm(C.T @ C)),
        "transform": bal.transform.residual(),
    }


def truncate(bal, r):
    """Keep the leading ``r`` balanced states.

    The result need not be stable; time-limited truncation does not
    preserve asymptotic stability.
    """
    k = bal.order
    if not 1 <= r <= k:
        raise ValueError(f"reduced order r={r} out of range 1..{k}")
    A, B, C = bal.sys_bal.A, bal.sys_bal.B, bal.sys_bal.C
    sys_r = StateSpace(A[:r, :r], B[:r], C[:, :r], require_stable=False)
    return ReducedModel(sys_r, r, bal.sigma[:r].copy(), bal.sigma[r:].copy(), bal.horizon)


def tl_singular_values(gram):
    """Square roots of the eigenvalues of ``P Q``, largest first.

    Computed from the symmetric matrix ``L_P^T Q L_P``, which has the same
    nonzero spectrum; entries for the rank deficiency of ``P`` are zero.
    """
    n = gram.P.shape[0]
    LP = spd_factor(gram.P, rank_tol=0.0)
    w = sym_eig(LP.T @ gram.Q @ LP).eigenvalues if LP.shape[1] else np.zeros(0)
    s = np.sqrt(np.clip(w, 0.0, None))
    return np.concatenate([s, np.zeros(n - s.size)])
