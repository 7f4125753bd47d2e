"""Continuous-time LTI state-space models ``x' = A x + B u, y = C x``.

The initial state is always zero and there is no feedthrough term, so a model
is fully described by ``(A, B, C)``.
"""
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, StabilityError
from .linalg import as_matrix


def validate_hurwitz(A):
    """Spectral abscissa (largest real part of the eigenvalues) of ``A``."""
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"A must be square, got shape {A.shape}")
    return float(np.max(np.linalg.eigvals(A).real))


@dataclass(frozen=True, eq=False)
class StateSpace:
    """State-space realization ``(A, B, C)``.

    Parameters
    ----------
    A, B, C : array_like
        State (n x n), input (n x m) and output (p x n) matrices.
    require_stable : bool
        Reject ``A`` unless it is Hurwitz.  Full models are always checked;
        reduced models from time-limited truncation need not be stable and
        are built with ``require_stable=False``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    require_stable: bool = field(default=True, repr=False)

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if n < 1 or A.shape != (n, n):
            raise DimensionError(f"A must be square and non-empty, got shape {A.shape}")
        if B.shape[0] != n or B.shape[1] < 1:
            raise DimensionError(f"B has shape {B.shape}, expected ({n}, m) with m >= 1")
        if C.shape[1] != n or C.shape[0] < 1:
            raise DimensionError(f"C has shape {C.shape}, expected (p, {n}) with p >= 1")
        for M in (A, B, C):
            M.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        if self.require_stable:
            alpha = validate_hurwitz(A)
            if alpha >= 0:
                raise StabilityError(
                    f"A is not Hurwitz: spectral abscissa {alpha:.6g} >= 0", abscissa=alpha
                )

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    @property
    def abscissa(self):
        return validate_hurwitz(self.A)

    def is_stable(self):
        return self.abscissa < 0


@dataclass(frozen=True, eq=False)
class SimilarityTransform:
    """A state transformation ``x -> S x`` together with its inverse.

    ``S`` may be a k x n matrix with a right inverse ``S_inv`` (n x k) when
    the transform also projects onto a k-dimensional subspace; then
    ``S @ S_inv`` is the k x k identity.
    """

    S: np.ndarray
    S_inv: np.ndarray

    def __post_init__(self):
        S = as_matrix(self.S, "S")
        S_inv = as_matrix(self.S_inv, "S_inv")
        if S_inv.shape != S.shape[::-1]:
            raise DimensionError(f"S_inv has shape {S_inv.shape}, expected {S.shape[::-1]}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "S_inv", S_inv)

    @classmethod
    def from_matrix(cls, S):
        S = as_matrix(S, "S")
        return cls(S, np.linalg.inv(S))

    def residual(self):
        """``||S S_inv - I||_F``."""
        k = self.S.shape[0]
        return float(np.linalg.norm(self.S @ self.S_inv - np.eye(k)))


def apply_transform(sys, t):
    """Return ``(S A S^-1, S B, C S^-1)``."""
    if t.S.shape[1] != sys.n:
        raise DimensionError(f"transform acts on dimension {t.S.shape[1]}, system has n={sys.n}")
    square = t.S.shape[0] == t.S.shape[1]
    return StateSpace(
        t.S @ sys.A @ t.S_inv,
        t.S @ sys.B,
        sys.C @ t.S_inv,
        require_stable=sys.require_stable and square,
    )


def heat_rod(n=200, diffusivity=1.0, input_node=None, output="mean"):
    """Finite-difference heat equation on (0, 1) with Dirichlet ends.

    ``n`` interior nodes with spacing ``1/(n+1)``.  The input enters at
    ``input_node`` (1-based, default ``ceil(n/3)``); the output is either the
    spatial mean or the temperature at one node (pass the 1-based index).
    """
    if n < 2:
        raise ValueError(f"heat rod needs n >= 2, got {n}")
    if diffusivity <= 0:
        raise ValueError(f"diffusivity must be positive, got {diffusivity}")
    if input_node is None:
        input_node = -(-n // 3)
    if not 1 <= input_node <= n:
        raise ValueError(f"input_node {input_node} out of range 1..{n}")

    A = diffusivity * (n + 1) ** 2 * (
        np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    )
    B = np.zeros((n, 1))
    B[input_node - 1, 0] = 1.0
    if output == "mean":
        C = np.full((1, n), 1.0 / n)
    else:
        node = int(output)
        if not 1 <= node <= n:
            raise ValueError(f"output node {node} out of range 1..{n}")
        C = np.zeros((1, n))
        C[0, node - 1] = 1.0
    return StateSpace(A, B, C)


def random_stable(n, m, p, seed, margin=0.5):
    """Dense random Hurwitz system with spectral abscissa ``-margin``."""
    if min(n, m, p) < 1:
        raise ValueError("n, m, p must all be >= 1")
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    A = M - (validate_hurwitz(M) + margin) * np.eye(n)
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    return StateSpace(A, B, C)
