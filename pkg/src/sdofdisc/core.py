"""Domain types and the generic discrete-time simulation engines.

Everything downstream (closed-form discretizations, time steppers,
spectra) produces either a :class:`Biquad` or a
:class:`DiscreteStateSpace`; the two engines here run them over a
:class:`Signal` with zero initial conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

__all__ = [
    "SdofError",
    "ContractError",
    "PreconditionError",
    "DivergedSimulationError",
    "SdofSystem",
    "Biquad",
    "DiscreteStateSpace",
    "Signal",
    "biquad_filter",
    "ss_response",
    "ss_simulate",
    "newmark_input_shift",
]


class SdofError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(SdofError, ValueError):
    """Arguments violate an API contract (shape, length, step mismatch)."""


class PreconditionError(SdofError, ValueError):
    """A method cannot be applied to the given parameters."""


class DivergedSimulationError(SdofError, ArithmeticError):
    """A recursion produced a non-finite value.

    Attributes
    ----------
    index : int
        First sample whose value is not finite.
    time : float or None
        ``index * dt`` when the step size is known.
    """

    def __init__(self, index: int, dt: float | None = None):
        self.index = int(index)
        self.time = None if dt is None else self.index * dt
        where = f"sample {self.index}"
        if self.time is not None:
            where += f" (t = {self.time:.6g} s)"
        super().__init__(f"simulation diverged at {where}")


@dataclass(frozen=True)
class SdofSystem:
    """Linear elastic oscillator ``u'' + 2 xi wn u' + wn^2 u = -ag``.

    Parameters
    ----------
    omega_n : float
        Natural circular frequency in rad/s.
    xi : float
        Damping ratio, ``0 <= xi < 1``.
    """

    omega_n: float
    xi: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_n) and self.omega_n > 0):
            raise ContractError(f"omega_n must be positive, got {self.omega_n!r}")
        if not (math.isfinite(self.xi) and 0.0 <= self.xi < 1.0):
            raise ContractError(f"xi must lie in [0, 1), got {self.xi!r}")

    @classmethod
    def from_period(cls, period: float, xi: float) -> "SdofSystem":
        if not period > 0:
            raise ContractError(f"period must be positive, got {period!r}")
        return cls(2.0 * math.pi / period, xi)

    @property
    def omega_d(self) -> float:
        """Damped circular frequency ``wn * sqrt(1 - xi^2)``."""
        return self.omega_n * math.sqrt(1.0 - self.xi * self.xi)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega_n

    def frf(self, omega):
        """Continuous displacement-per-ground-acceleration FRF at ``s = i omega``."""
        s = 1j * np.asarray(omega, dtype=float)
        return -1.0 / (s * s + 2.0 * self.xi * self.omega_n * s + self.omega_n**2)


@dataclass(frozen=True)
class Biquad:
    """Second-order discrete transfer function with ``a0 = 1``.

    ``H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)``
    """

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float

    def __post_init__(self):
        for name in ("b0", "b1", "b2", "a1", "a2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ContractError(f"biquad coefficient {name} is not finite")
            object.__setattr__(self, name, value)

    @property
    def b(self) -> np.ndarray:
        return np.array([self.b0, self.b1, self.b2])

    @property
    def a(self) -> np.ndarray:
        return np.array([1.0, self.a1, self.a2])

    def evaluate(self, z):
        """Evaluate ``H(z)`` at complex points."""
        zi = 1.0 / np.asarray(z, dtype=complex)
        num = self.b0 + zi * (self.b1 + zi * self.b2)
        den = 1.0 + zi * (self.a1 + zi * self.a2)
        return num / den

    def frf(self, omega, dt: float):
        """Discrete FRF at ``z = exp(i omega dt)``."""
        return self.evaluate(np.exp(1j * np.asarray(omega, dtype=float) * dt))

    @property
    def dc_gain(self) -> float:
        return (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteStateSpace:
    """``x[k+1] = A x[k] + B u[k]``, ``y[k] = C x[k] + D u[k]``.

    ``b_d`` and ``d_d`` are column matrices (single input). The first
    output row is always relative displacement.
    """

    a_d: np.ndarray
    b_d: np.ndarray
    c_d: np.ndarray
    d_d: np.ndarray
    dt: float

    def __post_init__(self):
        a = _readonly(np.atleast_2d(self.a_d))
        b = _readonly(np.reshape(self.b_d, (-1, 1)))
        c = _readonly(np.atleast_2d(self.c_d))
        d = _readonly(np.reshape(self.d_d, (-1, 1)))
        n = a.shape[0]
        if a.shape != (n, n) or b.shape[0] != n or c.shape[1] != n or d.shape[0] != c.shape[0]:
            raise ContractError(
                f"inconsistent state-space shapes A{a.shape} B{b.shape} C{c.shape} D{d.shape}"
            )
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ContractError(f"dt must be positive, got {self.dt!r}")
        for name, value in (("a_d", a), ("b_d", b), ("c_d", c), ("d_d", d)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n_states(self) -> int:
        return self.a_d.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.c_d.shape[0]


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled real sequence."""

    dt: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ContractError(f"dt must be positive, got {self.dt!r}")
        x = _readonly(np.ravel(self.samples))
        if x.size < 1:
            raise ContractError("signal must hold at least one sample")
        if not np.all(np.isfinite(x)):
            raise ContractError("signal samples must be finite")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def time(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt

    @property
    def duration(self) -> float:
        return (self.samples.size - 1) * self.dt


@njit(cache=True, nogil=True)
def _biquad_loop(b0, b1, b2, a1, a2, x, y):
    x1 = 0.0
    x2 = 0.0
    y1 = 0.0
    y2 = 0.0
    for k in range(x.size):
        xk = x[k]
        yk = -a1 * y1 - a2 * y2 + b0 * xk + b1 * x1 + b2 * x2
        if not math.isfinite(yk):
            return k
        y[k] = yk
        x2 = x1
        x1 = xk
        y2 = y1
        y1 = yk
    return -1


@njit(cache=True, nogil=True)
def _ss_loop(a, b, c, d, x0, u, y):
    n = a.shape[0]
    m = c.shape[0]
    x = x0.copy()
    xn = np.empty(n)
    for k in range(u.size):
        if k > 0:
            uk = u[k - 1]
            for i in range(n):
                acc = b[i, 0] * uk
                for j in range(n):
                    acc += a[i, j] * x[j]
                xn[i] = acc
            for i in range(n):
                if not math.isfinite(xn[i]):
                    return k
                x[i] = xn[i]
        for r in range(m):
            acc = d[r, 0] * u[k]
            for j in range(n):
                acc += c[r, j] * x[j]
            y[r, k] = acc
    return -1


def biquad_filter(tf: Biquad, input: Signal) -> Signal:
    """Run the second-order recursion over ``input`` from rest.

    Samples before ``k = 0`` are read as zero, so the output is defined
    from the first sample on.

    Raises
    ------
    DivergedSimulationError
        If any output sample is not finite.
    """
    x = np.ascontiguousarray(input.samples, dtype=float)
    y = np.empty_like(x)
    bad = _biquad_loop(tf.b0, tf.b1, tf.b2, tf.a1, tf.a2, x, y)
    if bad >= 0:
        raise DivergedSimulationError(bad, input.dt)
    return Signal(input.dt, y)


def _check_dt(sys: DiscreteStateSpace, input: Signal):
    if not math.isclose(sys.dt, input.dt, rel_tol=1e-9, abs_tol=0.0):
        raise ContractError(f"input dt {input.dt!r} does not match system dt {sys.dt!r}")


def ss_response(sys: DiscreteStateSpace, input: Signal, x0=None) -> np.ndarray:
    """All output rows of the state-space recursion, shape ``(m, N)``.

    ``x0`` defaults to the zero state. ``y[0] = C x0 + D u[0]``.
    """
    _check_dt(sys, input)
    n = sys.n_states
    state0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).reshape(n)
    u = np.ascontiguousarray(input.samples, dtype=float)
    y = np.empty((sys.n_outputs, u.size))
    bad = _ss_loop(
        np.ascontiguousarray(sys.a_d), np.ascontiguousarray(sys.b_d),
        np.ascontiguousarray(sys.c_d), np.ascontiguousarray(sys.d_d),
        state0, u, y,
    )
    if bad >= 0:
        raise DivergedSimulationError(bad, input.dt)
    return y


def ss_simulate(sys: DiscreteStateSpace, input: Signal, x0=None) -> Signal:
    """Relative displacement (first output row) of a state-space recursion."""
    return Signal(input.dt, ss_response(sys, input, x0)[0])


def newmark_input_shift(sys: DiscreteStateSpace, input: Signal) -> Signal:
    """Simulate the 3-state Newmark form, whose input enters one step ahead.

    Runs ``x[k+1] = A x[k] + B ug[k+1]`` by advancing the input one
    sample (last sample held). The initial state is at rest with the
    acceleration in equilibrium with the first input sample.
    """
    if sys.n_states != 3:
        raise ContractError("newmark_input_shift needs the 3-state Newmark form")
    x = input.samples
    advanced = np.empty_like(x)
    advanced[:-1] = x[1:]
    advanced[-1] = x[-1]
    x0 = np.array([0.0, 0.0, -x[0]])
    return ss_simulate(sys, Signal(input.dt, advanced), x0=x0)
