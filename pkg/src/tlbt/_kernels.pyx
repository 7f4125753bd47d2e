# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_fallback.py``."""
import numpy as np

from libc.math cimport fabs
from scipy.linalg.cython_blas cimport dgemv


cdef int _solve_small(double* M, double* b, int k) noexcept nogil:
    # in-place Gaussian elimination with partial pivoting, row-major k x k
    cdef int i, j, c, piv
    cdef double t, f
    for c in range(k):
        piv = c
        for i in range(c + 1, k):
            if fabs(M[i * k + c]) > fabs(M[piv * k + c]):
                piv = i
        if M[piv * k + c] == 0.0:
            return -1
        if piv != c:
            for j in range(k):
                t = M[c * k + j]
                M[c * k + j] = M[piv * k + j]
                M[piv * k + j] = t
            t = b[c]
            b[c] = b[piv]
            b[piv] = t
        for i in range(c + 1, k):
            f = M[i * k + c] / M[c * k + c]
            if f != 0.0:
                for j in range(c, k):
                    M[i * k + j] -= f * M[c * k + j]
                b[i] -= f * b[c]
    for i in range(k - 1, -1, -1):
        t = b[i]
        for j in range(i + 1, k):
            t -= M[i * k + j] * b[j]
        b[i] = t / M[i * k + i]
    return 0


def lyap_quasitri(const double[:, ::1] T, const double[:, ::1] R,
                  const long[::1] starts, const long[::1] sizes):
    """Solve ``T Y + Y T^T = R`` for quasi-upper-triangular ``T``."""
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t nb = starts.shape[0]
    Y_arr = np.zeros((n, n))
    rc_arr = np.empty((n, 2))
    cdef double[:, ::1] Y = Y_arr
    cdef double[:, ::1] rc = rc_arr
    cdef double M[16]
    cdef double b[4]
    cdef Py_ssize_t jb, ib, i, l, kk, j0, j1, i0, i1
    cdef int p, q, a, bb, c, d, info
    cdef double s

    with nogil:
        for jb in range(nb - 1, -1, -1):
            j0 = starts[jb]
            q = <int>sizes[jb]
            j1 = j0 + q
            for i in range(n):
                for c in range(q):
                    s = R[i, j0 + c]
                    for l in range(j1, n):
                        s -= Y[i, l] * T[j0 + c, l]
                    rc[i, c] = s
            for ib in range(jb, -1, -1):
                i0 = starts[ib]
                p = <int>sizes[ib]
                i1 = i0 + p
                for c in range(q):
                    for a in range(p):
                        s = rc[i0 + a, c]
                        # Y is kept symmetric, so read row j0+c instead of column
                        for kk in range(i1, n):
                            s -= T[i0 + a, kk] * Y[j0 + c, kk]
                        b[a + c * p] = s
                for c in range(q):
                    for a in range(p):
                        for d in range(q):
                            for bb in range(p):
                                s = 0.0
                                if c == d:
                                    s += T[i0 + a, i0 + bb]
                                if a == bb:
                                    s += T[j0 + c, j0 + d]
                                M[(a + c * p) * (p * q) + (bb + d * p)] = s
                info = _solve_small(M, b, p * q)
                if info != 0:
                    with gil:
                        raise ZeroDivisionError("singular Sylvester block")
                for c in range(q):
                    for a in range(p):
                        Y[i0 + a, j0 + c] = b[a + c * p]
                        Y[j0 + c, i0 + a] = b[a + c * p]
    return Y_arr


def recurrence(const double[:, ::1] Phi, const double[:, ::1] GU):
    """States of ``x[k+1] = Phi x[k] + GU[k]`` from ``x[0] = 0``."""
    cdef int N = <int>GU.shape[0]
    cdef int n = <int>GU.shape[1]
    X_arr = np.empty((N + 1, n))
    cdef double[:, ::1] X = X_arr
    cdef int k, i, inc = 1
    cdef double one = 1.0
    cdef char trans = b'T'
    for i in range(n):
        X[0, i] = 0.0
    with nogil:
        for k in range(N):
            for i in range(n):
                X[k + 1, i] = GU[k, i]
            # Phi is C-contiguous, i.e. Phi^T in BLAS column-major terms
            dgemv(&trans, &n, &n, &one, <double*>&Phi[0, 0], &n,
                  &X[k, 0], &inc, &one, &X[k + 1, 0], &inc)
    return X_arr
