"""Shared fixtures data for the test suite: system sweeps and small oracles."""
import math

import numpy as np

from tlbt import random_stable

#: rank cut used for sweeps; random systems are often numerically non-minimal
SWEEP_RANK_TOL = 1e-9


def sweep_dims(seed, n_max=20):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, 4))
    p = int(rng.integers(1, 4))
    return n, m, p


def sweep_system(seed, n_max=20):
    n, m, p = sweep_dims(seed, n_max)
    return random_stable(n, m, p, seed)


def taylor_expm(A, t=1.0, terms=200):
    """Term-by-term Taylor sum of exp(A t); fine for ||A t|| of order one."""
    A = np.asarray(A, dtype=float) * t
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
        if np.linalg.norm(term) < 1e-18 * np.linalg.norm(out):
            break
    return out


def kron_lyapunov(A, W):
    """Solve A X + X A^T + W = 0 through the n^2 x n^2 Kronecker system."""
    n = A.shape[0]
    I = np.eye(n)
    K = np.kron(I, A) + np.kron(A, I)
    x = np.linalg.solve(K, -W.reshape(-1, order="F"))
    return x.reshape(n, n, order="F")


def scalar_gramian(a, b, T):
    """int_0^T e^{2 a s} b^2 ds."""
    if math.isinf(T):
        return b * b / (-2.0 * a)
    return b * b * math.expm1(2.0 * a * T) / (2.0 * a)


def rel_fro(X, Y):
    return float(np.linalg.norm(X - Y) / max(np.linalg.norm(Y), np.finfo(float).tiny))


#: acceptance criterion -> (passed, detail); printed in the terminal summary
ACCEPTANCE = {}


def record(name, passed, detail=""):
    ACCEPTANCE[name] = (bool(passed), detail)
    return passed
