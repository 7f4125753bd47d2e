"""Time-domain simulation, L2 norms and empirical bound checks.

Systems are integrated exactly in ``A``: on each step the input is replaced
by a polynomial in time and the step map comes from the exponential of an
augmented block matrix.  The default ``"cubic"`` hold interpolates the
input at four equispaced points per step (fourth order in the step size);
``"midpoint"`` holds the midpoint value (second order).  Neither assumes
the dynamics decay, so unstable reduced models are handled the same way.
"""
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.integrate

from . import _backend
from .exceptions import DimensionError, GridError, SignalError
from .linalg import mat_exp

DEFAULT_GRID = 4096
DEFAULT_GRID_HORIZON = 12.0

_CUBIC_NODES = np.array([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])
_CUBIC_TO_POWER = np.linalg.inv(np.vander(_CUBIC_NODES, 4, increasing=True))


class ResolutionWarning(UserWarning):
    """The time grid is coarse relative to the input signal."""


@dataclass(frozen=True)
class Signal:
    """Input signal ``u(t) = scale * func(t)``.

    ``func`` takes an array of times and returns shape ``(len(t),)`` for a
    single channel or ``(len(t), m)``.
    """

    func: Callable
    description: str = "signal"
    scale: float = 1.0

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        v = np.asarray(self.func(t), dtype=float) * self.scale
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != t.size:
            raise SignalError(f"{self.description}: returned {v.shape[0]} samples for {t.size} times")
        if not np.all(np.isfinite(v)):
            raise SignalError(f"{self.description}: non-finite values")
        return v

    def scaled(self, factor, description=None):
        return Signal(self.func, description or self.description, self.scale * factor)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    outputs: np.ndarray

    @property
    def horizon(self):
        return float(self.times[-1])

    @property
    def steps(self):
        return self.times.size - 1


def default_grid(T):
    """Number of steps for horizon ``T``: 4096 at ``T = 12``, linear in ``T``, even."""
    N = math.ceil(DEFAULT_GRID * T / DEFAULT_GRID_HORIZON)
    return max(2, N + (N % 2))


def _grid(T, N):
    if N < 2:
        raise GridError(f"need at least 2 steps, got N={N}")
    if not (T > 0 and math.isfinite(T)):
        raise GridError(f"horizon must be positive and finite, got {T}")
    return np.linspace(0.0, T, N + 1)


def _check_resolution(u, times):
    v = u(times)
    peak = np.max(np.abs(v))
    if peak > 0 and np.max(np.abs(np.diff(v, axis=0))) > 0.1 * peak:
        warnings.warn(
            f"{u.description}: input changes by more than 10% of its peak within one step; "
            "consider a finer grid",
            ResolutionWarning,
            stacklevel=3,
        )


def _step_maps(A, B, h, degree):
    # exp of [[hA, hB, 0..], [0, 0, I, ..], ..] gives int_0^1 e^{hA(1-s)} hB s^d/d! ds
    n, m = B.shape
    size = n + (degree + 1) * m
    M = np.zeros((size, size))
    M[:n, :n] = A * h
    M[:n, n:n + m] = B * h
    for d in range(degree):
        a = n + d * m
        M[a:a + m, a + m:a + 2 * m] = np.eye(m)
    E = mat_exp(M)
    Phi = E[:n, :n]
    G = np.hstack([E[:n, n + d * m:n + (d + 1) * m] * math.factorial(d) for d in range(degree + 1)])
    return Phi, G


def simulate(sys, u, T, N=None, hold="cubic"):
    """Output trajectory of ``sys`` driven by ``u`` from zero initial state.

    Parameters
    ----------
    sys : StateSpace
        Stability is not required.
    u : Signal
    T : float
        Horizon.
    N : int, optional
        Number of uniform steps (default :func:`default_grid`).
    hold : {"cubic", "midpoint"}
    """
    N = default_grid(T) if N is None else int(N)
    times = _grid(T, N)
    h = T / N
    _check_resolution(u, times)

    if hold == "cubic":
        Phi, G = _step_maps(sys.A, sys.B, h, 3)
        dense = u(np.linspace(0.0, T, 3 * N + 1))
        if dense.shape[1] != sys.m:
            raise DimensionError(f"{u.description} has {dense.shape[1]} channels, system has m={sys.m}")
        # samples[k, i, :] = u(t_k + i h / 3)
        idx = 3 * np.arange(N)[:, None] + np.arange(4)[None, :]
        samples = dense[idx]
        coeffs = np.einsum("di,kij->kdj", _CUBIC_TO_POWER, samples).reshape(N, -1)
    elif hold == "midpoint":
        Phi, G = _step_maps(sys.A, sys.B, h, 0)
        coeffs = u(times[:-1] + 0.5 * h)
        if coeffs.shape[1] != sys.m:
            raise DimensionError(f"{u.description} has {coeffs.shape[1]} channels, system has m={sys.m}")
    else:
        raise ValueError(f"unknown hold {hold!r}")

    GU = np.ascontiguousarray(coeffs @ G.T)
    X = _backend.recurrence(np.ascontiguousarray(Phi), GU)
    return Trajectory(times, X @ sys.C.T)


def _simpson_l2(values, T):
    N = values.shape[0] - 1
    if N < 2 or N % 2:
        raise GridError(f"Simpson's rule needs an even number of steps, got N={N}")
    sq = np.sum(np.asarray(values).reshape(N + 1, -1) ** 2, axis=1)
    return math.sqrt(max(float(scipy.integrate.simpson(sq, dx=T / N)), 0.0))


def l2_norm(traj):
    """``sqrt(int_0^T ||y(t)||^2 dt)`` by composite Simpson on the trajectory grid."""
    return _simpson_l2(traj.outputs, traj.horizon)


def signal_l2_norm(u, T, N=None):
    N = default_grid(T) if N is None else int(N)
    return _simpson_l2(u(_grid(T, N)), T)


def normalize_input(u, T, N=None):
    """Rescale ``u`` to unit L2 norm on ``[0, T]`` (measured on the simulation grid)."""
    norm = signal_l2_norm(u, T, N)
    if norm == 0.0:
        raise SignalError(f"{u.description}: cannot normalize a zero signal")
    return u.scaled(1.0 / norm)


def builtin_inputs(T, N=None):
    """The two normalized test inputs ``sin(0.4 pi t)`` and ``cos(2 pi t) exp(-t)``."""
    u1 = Signal(lambda t: np.sin(0.4 * np.pi * t), "u1")
    u2 = Signal(lambda t: np.cos(2.0 * np.pi * t) * np.exp(-t), "u2")
    return normalize_input(u1, T, N), normalize_input(u2, T, N)


def sampled_signal(times, values, description="samples"):
    """Piecewise-linear signal through the given samples (held constant outside)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float).reshape(times.size, -1)

    def func(t):
        return np.column_stack([np.interp(t, times, values[:, j]) for j in range(values.shape[1])])

    return Signal(func, description)


def output_error(traj, traj_r):
    """``||y - y_r||`` on the shared grid."""
    if traj.times.shape != traj_r.times.shape or not np.array_equal(traj.times, traj_r.times):
        raise GridError("trajectories are on different time grids")
    if traj.outputs.shape != traj_r.outputs.shape:
        raise DimensionError(f"output shapes differ: {traj.outputs.shape} vs {traj_r.outputs.shape}")
    return l2_norm(Trajectory(traj.times, traj.outputs - traj_r.outputs))


@dataclass(frozen=True)
class BoundCheck:
    error: float
    bound: float
    ratio: float
    holds: bool
    output_norm: float


def verify_bound(sys, rom, u, T, N=None, bound=0.0, rtol=1e-9, floor=1e-8, hold="cubic"):
    """Simulate full and reduced model and compare the output error with ``bound``.

    ``u`` should be normalized so that ``bound`` applies directly.  A zero
    bound (nothing truncated) is accepted when the error is below ``floor``.
    """
    if rom.m != sys.m or rom.p != sys.p:
        raise DimensionError(
            f"ROM has (m, p) = ({rom.m}, {rom.p}), full system has ({sys.m}, {sys.p})"
        )
    traj = simulate(sys, u, T, N, hold)
    traj_r = simulate(rom, u, T, N, hold)
    error = output_error(traj, traj_r)
    if bound > 0:
        ratio = error / bound
        holds = error <= bound * (1.0 + rtol)
    else:
        ratio = 0.0 if error == 0.0 else math.inf
        holds = error <= floor
    return BoundCheck(error, float(bound), ratio, bool(holds), l2_norm(traj))
