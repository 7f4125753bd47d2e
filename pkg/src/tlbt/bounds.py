"""L2 output-error bounds for time-limited balanced truncation.

For a truncation at order ``r`` with distinct truncated singular values
``s_1 > ... > s_kappa`` (multiplicities ``m_i``) the error obeys

    ||y - y_r||_{L2(0,T)} <= 2 (s_1 c_1 + ... + s_kappa c_kappa) ||u||_{L2(0,T)}

    c_i = exp(0.5 T max(||G Sigma^{-1/2} E_i||^2, ||F^T Sigma^{-1/2} E_i||^2))

where ``E_i`` selects the leading ``r_{i+1} = r + m_1 + ... + m_i`` columns
(all columns for ``i = kappa``).  The last constant equals the global
constant ``c_T``, computable in the original coordinates from
``C exp(AT) Q^{-1/2}`` and ``B^T exp(A^T T) P^{-1/2}``; replacing every
``c_i`` by it gives the coarser, transformation-free bound.
"""
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .exceptions import DimensionError
from .linalg import spd_inv_sqrt, spectral_norm

#: default relative gap below which neighbouring singular values are merged
GROUP_TOL = 1e-10


@dataclass(frozen=True)
class Group:
    value: float
    multiplicity: int
    boundary: int
    constant: float = 1.0


@dataclass(frozen=True)
class BoundBreakdown:
    """Per-group constants and the resulting bound (per unit input norm).

    ``discarded_tail`` accounts for singular values dropped by a
    rank-truncated balancing: ``2 * c * sum(sigma_discarded)`` with ``c`` the
    constant over all resolved columns.  Those states are truncated as well,
    so :attr:`certified` (``total + discarded_tail``) is the figure to compare
    errors against; for a complete balancing both coincide.
    """

    groups: List[Group]
    total: float
    horizon: float
    r: int
    discarded_tail: float = 0.0

    @property
    def certified(self):
        return self.total + self.discarded_tail

    @property
    def values(self):
        return np.array([g.value for g in self.groups])

    @property
    def constants(self):
        return np.array([g.constant for g in self.groups])


@dataclass(frozen=True)
class GlobalConstant:
    c_T: float
    g_term: float
    f_term: float
    horizon: float = field(default=math.inf)


def _exp_constant(g_term, f_term, T):
    if not math.isfinite(T):
        return 1.0
    try:
        return math.exp(0.5 * max(g_term, f_term) * T)
    except OverflowError:
        return math.inf


def distinct_groups(sigma_truncated, rel_tol=GROUP_TOL, r=0):
    """Group a non-increasing vector into runs of (numerically) equal values.

    Neighbours ``v_j >= v_{j+1}`` share a group when
    ``v_j - v_{j+1} <= rel_tol * v_j``.  Each group is represented by its
    first (largest) entry.  Boundaries start from ``r``:
    ``boundary_i = r + m_1 + ... + m_i``.
    """
    v = np.asarray(sigma_truncated, dtype=float).ravel()
    if v.size and np.any(np.diff(v) > 0):
        raise ValueError("singular values must be non-increasing")
    if v.size and v[-1] < 0:
        raise ValueError("singular values must be non-negative")
    groups = []
    i = 0
    boundary = r
    while i < v.size:
        j = i + 1
        while j < v.size and v[j - 1] - v[j] <= rel_tol * v[j - 1]:
            j += 1
        boundary += j - i
        groups.append(Group(float(v[i]), j - i, boundary))
        i = j
    return groups


def scaled_corrections(bal):
    """``G Sigma^{-1/2}`` and ``F^T Sigma^{-1/2}`` of a balanced realization."""
    rs = 1.0 / np.sqrt(bal.sigma)
    return bal.G * rs, bal.F.T * rs


def theorem_bound(bal, r, group_tol=GROUP_TOL):
    """Bound with one constant per distinct truncated singular value."""
    k = bal.order
    if not 1 <= r <= k:
        raise ValueError(f"reduced order r={r} out of range 1..{k}")
    T = bal.horizon
    Gs, Fs = scaled_corrections(bal)
    groups = []
    for g in distinct_groups(bal.sigma[r:], group_tol, r):
        cols = g.boundary
        c = _exp_constant(spectral_norm(Gs[:, :cols]) ** 2, spectral_norm(Fs[:, :cols]) ** 2, T)
        groups.append(Group(g.value, g.multiplicity, g.boundary, c))
    total = 2.0 * sum(g.value * g.constant for g in groups)
    tail = 0.0
    if bal.sigma_discarded.size:
        c_all = _exp_constant(spectral_norm(Gs) ** 2, spectral_norm(Fs) ** 2, T)
        tail = 2.0 * c_all * float(np.sum(bal.sigma_discarded))
    return BoundBreakdown(groups, total, T, r, tail)


def balanced_constant(bal):
    """``c_{T,kappa}`` from the balanced quantities (all columns)."""
    Gs, Fs = scaled_corrections(bal)
    g = spectral_norm(Gs) ** 2
    f = spectral_norm(Fs) ** 2
    return GlobalConstant(_exp_constant(g, f, bal.horizon), g, f, bal.horizon)


def global_constant(sys, gram):
    """``c_T`` from the original coordinates.

    Raises
    ------
    SingularMatrixError
        If either Gramian is numerically singular.
    """
    if not gram.finite:
        return GlobalConstant(1.0, 0.0, 0.0, gram.horizon)
    if gram.P.shape != (sys.n, sys.n):
        raise DimensionError(f"Gramians have shape {gram.P.shape}, system has n={sys.n}")
    E = gram.exp_AT
    g = spectral_norm(sys.C @ E @ spd_inv_sqrt(gram.Q)) ** 2
    f = spectral_norm(sys.B.T @ E.T @ spd_inv_sqrt(gram.P)) ** 2
    return GlobalConstant(_exp_constant(g, f, gram.horizon), g, f, gram.horizon)


def corollary_bound(sys, gram, sigma_truncated, group_tol=GROUP_TOL, constant=None):
    """``2 c_T`` times the sum of the distinct truncated singular values.

    ``constant`` may supply a precomputed :class:`GlobalConstant` (for
    instance from :func:`balanced_constant` when the Gramians are singular).
    """
    groups = distinct_groups(sigma_truncated, group_tol)
    if not groups:
        return 0.0
    if constant is None:
        constant = global_constant(sys, gram)
    return 2.0 * constant.c_T * sum(g.value for g in groups)


def hinf_limit_bound(sigma_truncated_distinct):
    """Classical bound ``2 * sum`` of distinct truncated Hankel singular values."""
    return 2.0 * float(np.sum(np.asarray(sigma_truncated_distinct, dtype=float)))
