"""State-space discretizations of the SDOF oscillator.

The continuous model has state ``[u, u']``::

    A = [[0, 1], [-wn^2, -2 xi wn]],  B = [0, -1]^T

and observes displacement (``C = [1, 0]``) or, with ``observe_velocity``,
both states (``C = I``). ``D`` is zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Biquad, ContractError, DiscreteStateSpace, PreconditionError, SdofSystem

__all__ = [
    "ContinuousStateSpace",
    "expm_2x2",
    "zoh_dss",
    "foh_dss",
    "foh_rest_state",
    "fe_dss",
    "be_dss",
    "tustin_dss",
    "dss_to_biquad",
]


@dataclass(frozen=True, eq=False)
class ContinuousStateSpace:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    @classmethod
    def from_system(cls, sys: SdofSystem, observe_velocity: bool = False) -> "ContinuousStateSpace":
        wn, xi = sys.omega_n, sys.xi
        a = np.array([[0.0, 1.0], [-wn * wn, -2.0 * xi * wn]])
        b = np.array([[0.0], [-1.0]])
        c = np.eye(2) if observe_velocity else np.array([[1.0, 0.0]])
        d = np.zeros((c.shape[0], 1))
        return cls(a, b, c, d)


def _inv2(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0.0 or not math.isfinite(det):
        raise PreconditionError("singular 2x2 resolvent")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def _check_dt(dt, allow_zero=False):
    ok = dt >= 0 if allow_zero else dt > 0
    if not (ok and math.isfinite(dt)):
        raise ContractError(f"dt must be positive, got {dt!r}")


def expm_2x2(sys: SdofSystem, dt: float) -> np.ndarray:
    """Closed-form ``exp(A dt)`` from the Cayley-Hamilton theorem.

    ``exp(A dt) = exp(-xi wn dt) [cos(wd dt) I + sin(wd dt)/wd (A + xi wn I)]``
    """
    _check_dt(dt, allow_zero=True)
    wn, xi, wd = sys.omega_n, sys.xi, sys.omega_d
    alpha = math.exp(-xi * wn * dt)
    c, s = math.cos(wd * dt), math.sin(wd * dt)
    r = s / wd
    return alpha * np.array(
        [
            [c + xi * wn * r, r],
            [-wn * wn * r, c - xi * wn * r],
        ]
    )


def zoh_dss(sys: SdofSystem, dt: float, observe_velocity: bool = False) -> DiscreteStateSpace:
    """Exact for piecewise-constant input: ``B_D = A^-1 (A_D - I) B``."""
    _check_dt(dt)
    cs = ContinuousStateSpace.from_system(sys, observe_velocity)
    a_d = expm_2x2(sys, dt)
    b_d = _inv2(cs.a) @ (a_d - np.eye(2)) @ cs.b
    return DiscreteStateSpace(a_d, b_d, cs.c, cs.d, dt)


def foh_dss(sys: SdofSystem, dt: float, observe_velocity: bool = False) -> DiscreteStateSpace:
    """Exact for piecewise-linear input (non-causal triangle hold).

    ``B_D = A^-2 (A_D - I)^2 B / dt`` and
    ``D_D = D + C [A^-2 (A_D - I) / dt - A^-1] B``.
    """
    _check_dt(dt)
    cs = ContinuousStateSpace.from_system(sys, observe_velocity)
    a_d = expm_2x2(sys, dt)
    a_inv = _inv2(cs.a)
    a_inv2 = a_inv @ a_inv
    m = a_d - np.eye(2)
    b_d = a_inv2 @ m @ m @ cs.b / dt
    d_d = cs.d + cs.c @ (a_inv2 @ m / dt - a_inv) @ cs.b
    return DiscreteStateSpace(a_d, b_d, cs.c, d_d, dt)


def foh_rest_state(sys: SdofSystem, dt: float, in0: float) -> np.ndarray:
    """Initial ``foh_dss`` state that puts the oscillator at rest.

    The FOH realization tracks ``x - G B in`` with
    ``G = A^-2 (A_D - I) / dt - A^-1``, so the zero state means rest only
    when the first input sample is zero. Seeding with ``-G B in0`` gives
    a simulation from true rest for any first sample.
    """
    _check_dt(dt)
    cs = ContinuousStateSpace.from_system(sys, False)
    a_inv = _inv2(cs.a)
    g = a_inv @ a_inv @ (expm_2x2(sys, dt) - np.eye(2)) / dt - a_inv
    return -(g @ cs.b)[:, 0] * float(in0)


def fe_dss(sys: SdofSystem, dt: float, observe_velocity: bool = False) -> DiscreteStateSpace:
    _check_dt(dt)
    cs = ContinuousStateSpace.from_system(sys, observe_velocity)
    return DiscreteStateSpace(np.eye(2) + cs.a * dt, cs.b * dt, cs.c, cs.d, dt)


def be_dss(sys: SdofSystem, dt: float, observe_velocity: bool = False) -> DiscreteStateSpace:
    """Backward Euler with the shifted state ``v``; output map absorbs the shift."""
    _check_dt(dt)
    cs = ContinuousStateSpace.from_system(sys, observe_velocity)
    r = _inv2(np.eye(2) - cs.a * dt)
    return DiscreteStateSpace(r, r @ cs.b * dt, cs.c @ r, cs.d + cs.c @ r @ cs.b * dt, dt)


def tustin_dss(sys: SdofSystem, dt: float, observe_velocity: bool = False) -> DiscreteStateSpace:
    """Trapezoidal rule with the shifted state ``v``."""
    _check_dt(dt)
    cs = ContinuousStateSpace.from_system(sys, observe_velocity)
    half = cs.a * (0.5 * dt)
    r = _inv2(np.eye(2) - half)
    a_d = (np.eye(2) + half) @ r
    return DiscreteStateSpace(a_d, r @ cs.b * dt, cs.c @ r, cs.d + cs.c @ r @ cs.b * (0.5 * dt), dt)


def dss_to_biquad(sys: DiscreteStateSpace, output: int = 0) -> Biquad:
    """Transfer function of one output row of a 2-state system.

    ``H(z) = C (zI - A)^-1 B + D`` expanded with the adjugate of ``zI - A``.
    """
    if sys.n_states != 2:
        raise ContractError("dss_to_biquad needs a 2-state system")
    a = sys.a_d
    b1, b2 = sys.b_d[:, 0]
    c1, c2 = sys.c_d[output]
    d = sys.d_d[output, 0]
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    lead = c1 * b1 + c2 * b2
    const = c1 * (a[0, 1] * b2 - a[1, 1] * b1) + c2 * (a[1, 0] * b1 - a[0, 0] * b2)
    return Biquad(d, lead - d * tr, const + d * det, -tr, det)
