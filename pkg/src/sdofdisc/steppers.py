"""Classical earthquake-engineering time steppers.

Each stepper starts from rest (``u = u' = 0``) with the relative
acceleration in equilibrium with the first input sample, and returns
displacement, velocity and relative acceleration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ContractError, DiscreteStateSpace, DivergedSimulationError, SdofSystem, Signal

__all__ = [
    "NigamJenningsCoeffs",
    "NewmarkParams",
    "StepperResult",
    "nigam_jennings_coeffs",
    "nigam_jennings",
    "central_difference",
    "newmark",
    "newmark_dss",
]


@dataclass(frozen=True, eq=False)
class NigamJenningsCoeffs:
    """One-step map ``[u, v][k+1] = a_hat [u, v][k] + b_hat [ag[k], ag[k+1]]``."""

    a_hat: np.ndarray
    b_hat: np.ndarray
    dt: float


@dataclass(frozen=True)
class NewmarkParams:
    """Newmark weights; ``gamma = 1/2`` is second-order accurate."""

    gamma: float = 0.5
    beta: float = 0.25

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and 0.0 <= self.gamma <= 1.0):
            raise ContractError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if not (math.isfinite(self.beta) and 0.0 <= self.beta <= 0.5):
            raise ContractError(f"beta must lie in [0, 1/2], got {self.beta!r}")

    @classmethod
    def average_acceleration(cls) -> "NewmarkParams":
        return cls(0.5, 0.25)

    @classmethod
    def linear_acceleration(cls) -> "NewmarkParams":
        return cls(0.5, 1.0 / 6.0)


@dataclass(frozen=True, eq=False)
class StepperResult:
    displacement: Signal
    velocity: Signal
    acceleration: Signal


def _require_two(input: Signal):
    if len(input) < 2:
        raise ContractError("time steppers need at least two input samples")


def _result(dt, u, v, a) -> StepperResult:
    return StepperResult(Signal(dt, u), Signal(dt, v), Signal(dt, a))


def nigam_jennings_coeffs(sys: SdofSystem, dt: float) -> NigamJenningsCoeffs:
    """Exact one-step coefficients for piecewise-linear ground acceleration."""
    if not (dt > 0 and math.isfinite(dt)):
        raise ContractError(f"dt must be positive, got {dt!r}")
    wn, xi, wd = sys.omega_n, sys.xi, sys.omega_d
    e = math.exp(-xi * wn * dt)
    c, s = math.cos(wd * dt), math.sin(wd * dt)
    r = xi / math.sqrt(1.0 - xi * xi)

    a_hat = np.array(
        [
            [e * (r * s + c), e * s / wd],
            [-wn / math.sqrt(1.0 - xi * xi) * e * s, e * (c - r * s)],
        ]
    )

    p = (2.0 * xi * xi - 1.0) / (wn * wn * dt)
    q = 2.0 * xi / (wn**3 * dt)
    b11 = e * ((p + xi / wn) * s / wd + (q + 1.0 / wn**2) * c) - q
    b12 = -e * (p * s / wd + q * c) - 1.0 / wn**2 + q
    shape = c - r * s
    rate = wd * s + xi * wn * c
    b21 = e * ((p + xi / wn) * shape - (q + 1.0 / wn**2) * rate) + 1.0 / (wn * wn * dt)
    b22 = -e * (p * shape - q * rate) - 1.0 / (wn * wn * dt)
    b_hat = np.array([[b11, b12], [b21, b22]])
    for m in (a_hat, b_hat):
        m.setflags(write=False)
    return NigamJenningsCoeffs(a_hat, b_hat, float(dt))


@njit(cache=True, nogil=True)
def _nj_loop(ah, bh, ag, wn, xi, u, v, a):
    u[0] = 0.0
    v[0] = 0.0
    a[0] = -ag[0]
    for k in range(ag.size - 1):
        un = ah[0, 0] * u[k] + ah[0, 1] * v[k] + bh[0, 0] * ag[k] + bh[0, 1] * ag[k + 1]
        vn = ah[1, 0] * u[k] + ah[1, 1] * v[k] + bh[1, 0] * ag[k] + bh[1, 1] * ag[k + 1]
        if not (math.isfinite(un) and math.isfinite(vn)):
            return k + 1
        u[k + 1] = un
        v[k + 1] = vn
        a[k + 1] = -ag[k + 1] - 2.0 * xi * wn * vn - wn * wn * un
    return -1


def nigam_jennings(sys: SdofSystem, input: Signal) -> StepperResult:
    """Piecewise-exact integration under linearly interpolated input.

    Relative acceleration is recovered from the equation of motion.
    """
    _require_two(input)
    co = nigam_jennings_coeffs(sys, input.dt)
    ag = np.ascontiguousarray(input.samples)
    u, v, a = (np.empty_like(ag) for _ in range(3))
    bad = _nj_loop(np.ascontiguousarray(co.a_hat), np.ascontiguousarray(co.b_hat),
                   ag, sys.omega_n, sys.xi, u, v, a)
    if bad >= 0:
        raise DivergedSimulationError(bad, input.dt)
    return _result(input.dt, u, v, a)


@njit(cache=True, nogil=True)
def _cd_loop(ag, dt, wn, xi, u, v, a):
    n = ag.size
    k_hat = 1.0 / (dt * dt) + xi * wn / dt
    c_prev = 1.0 / (dt * dt) - xi * wn / dt
    c_curr = wn * wn - 2.0 / (dt * dt)
    u[0] = 0.0
    a0 = -ag[0]
    u_prev = 0.5 * dt * dt * a0
    for k in range(n):
        u_next = (-ag[k] - c_prev * u_prev - c_curr * u[k]) / k_hat
        if not math.isfinite(u_next):
            return k + 1
        v[k] = (u_next - u_prev) / (2.0 * dt)
        a[k] = (u_next - 2.0 * u[k] + u_prev) / (dt * dt)
        if k + 1 < n:
            u[k + 1] = u_next
        u_prev = u[k]
    return -1


def central_difference(sys: SdofSystem, input: Signal) -> StepperResult:
    """Explicit central-difference recursion with a fictitious startup sample.

    ``u[-1] = (dt^2 / 2) a0`` with ``a0 = -ag[0]``. Velocity and acceleration
    at the last sample use one extra step beyond the record.
    """
    _require_two(input)
    ag = np.ascontiguousarray(input.samples)
    u, v, a = (np.empty_like(ag) for _ in range(3))
    bad = _cd_loop(ag, input.dt, sys.omega_n, sys.xi, u, v, a)
    if bad >= 0:
        raise DivergedSimulationError(min(bad, ag.size - 1), input.dt)
    return _result(input.dt, u, v, a)


@njit(cache=True, nogil=True)
def _newmark_loop(ag, dt, wn, xi, gamma, beta, u, v, a):
    c = 2.0 * xi * wn
    k_hat = wn * wn + gamma / (beta * dt) * c + 1.0 / (beta * dt * dt)
    ca = 1.0 / (beta * dt) + gamma / beta * c
    cb = 1.0 / (2.0 * beta) + dt * (gamma / (2.0 * beta) - 1.0) * c
    u[0] = 0.0
    v[0] = 0.0
    a[0] = -ag[0]
    for k in range(ag.size - 1):
        dp = -(ag[k + 1] - ag[k]) + ca * v[k] + cb * a[k]
        du = dp / k_hat
        dv = gamma / (beta * dt) * du - gamma / beta * v[k] + dt * (1.0 - gamma / (2.0 * beta)) * a[k]
        da = du / (beta * dt * dt) - v[k] / (beta * dt) - a[k] / (2.0 * beta)
        un = u[k] + du
        if not math.isfinite(un):
            return k + 1
        u[k + 1] = un
        v[k + 1] = v[k] + dv
        a[k + 1] = a[k] + da
    return -1


def newmark(sys: SdofSystem, input: Signal, params: NewmarkParams | None = None) -> StepperResult:
    """Incremental Newmark-beta integration (linear system, no iteration).

    Raises
    ------
    ContractError
        If ``beta == 0`` (the incremental stiffness is undefined).
    DivergedSimulationError
        If the response overflows.
    """
    _require_two(input)
    params = params or NewmarkParams()
    if params.beta == 0.0:
        raise ContractError("incremental Newmark needs beta > 0")
    ag = np.ascontiguousarray(input.samples)
    u, v, a = (np.empty_like(ag) for _ in range(3))
    bad = _newmark_loop(ag, input.dt, sys.omega_n, sys.xi, params.gamma, params.beta, u, v, a)
    if bad >= 0:
        raise DivergedSimulationError(bad, input.dt)
    return _result(input.dt, u, v, a)


def newmark_dss(sys: SdofSystem, dt: float, params: NewmarkParams | None = None) -> DiscreteStateSpace:
    """Three-state ``[u, u', u'']`` form; the input enters one step ahead.

    Use :func:`sdofdisc.core.newmark_input_shift` to simulate it.
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise ContractError(f"dt must be positive, got {dt!r}")
    params = params or NewmarkParams()
    g, b = params.gamma, params.beta
    wn, xi = sys.omega_n, sys.xi
    x = xi * wn
    w2 = wn * wn
    norm = 1.0 + 2.0 * x * g * dt + w2 * b * dt * dt
    a_d = np.array(
        [
            [1.0 + 2.0 * x * g * dt,
             -2.0 * x * b * dt**2 + 2.0 * x * g * dt**2 + dt,
             -2.0 * x * b * dt**3 + x * g * dt**3 - b * dt**2 + 0.5 * dt**2],
            [-w2 * g * dt,
             1.0 + w2 * b * dt**2 - w2 * g * dt**2,
             w2 * b * dt**3 - 0.5 * w2 * g * dt**3 - g * dt + dt],
            [-w2,
             -2.0 * x - w2 * dt,
             w2 * b * dt**2 - 0.5 * w2 * dt**2 + 2.0 * x * g * dt - 2.0 * x * dt],
        ]
    ) / norm
    b_d = np.array([-b * dt * dt, -g * dt, -1.0]) / norm
    return DiscreteStateSpace(a_d, b_d, [[1.0, 0.0, 0.0]], [0.0], dt)
