"""Biquad coefficients for every transfer-function discretization.

All constructors are pure functions of ``(sys, dt)``. They are valid at
``xi = 0``, where ``exp(-xi wn dt) = 1`` and ``wd = wn``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .core import Biquad, ContractError, PreconditionError, SdofError, SdofSystem

__all__ = [
    "LsqOptions",
    "LsqFit",
    "KanamoriFit",
    "DegenerateGridError",
    "KanamoriFitError",
    "ConvergenceWarning",
    "StabilityWarning",
    "zoh_tf",
    "foh_tf",
    "impulse_invariant_tf",
    "forward_euler_tf",
    "backward_euler_tf",
    "tustin_tf",
    "tustin_prewarp_tf",
    "matched_tf",
    "central_difference_tf",
    "kanamori_biquad",
    "lsq_fit",
    "lsq_tf",
    "kanamori_tf",
    "KANAMORI_BAND",
    "KANAMORI_LISTING_BAND",
]

KANAMORI_BAND = (0.01, 10.0)
KANAMORI_LISTING_BAND = (0.01, 25.0)


class DegenerateGridError(ContractError):
    """The least-squares normal equations are singular on the given grid."""


class KanamoriFitError(SdofError, RuntimeError):
    """The effective-parameter search failed; ``last`` holds its final iterate."""

    def __init__(self, message, last):
        super().__init__(message)
        self.last = last


class ConvergenceWarning(RuntimeWarning):
    pass


class StabilityWarning(RuntimeWarning):
    pass


def _check_dt(dt):
    if not (dt > 0 and math.isfinite(dt)):
        raise ContractError(f"dt must be positive, got {dt!r}")


def _decay(sys: SdofSystem, dt: float):
    """``alpha = exp(-xi wn dt)``, ``theta = wd dt`` and ``xi / sqrt(1 - xi^2)``."""
    alpha = math.exp(-sys.xi * sys.omega_n * dt)
    theta = sys.omega_d * dt
    ratio = sys.xi / math.sqrt(1.0 - sys.xi**2)
    return alpha, theta, ratio


def _exact_denominator(sys, dt):
    alpha, theta, _ = _decay(sys, dt)
    return -2.0 * alpha * math.cos(theta), alpha * alpha


def zoh_tf(sys: SdofSystem, dt: float) -> Biquad:
    """Zero-order-hold equivalent: exact for stair-like ground acceleration."""
    _check_dt(dt)
    alpha, theta, ratio = _decay(sys, dt)
    c, s = math.cos(theta), math.sin(theta)
    a1, a2 = _exact_denominator(sys, dt)
    k = -1.0 / sys.omega_n**2
    b1 = k * (1.0 - alpha * c - ratio * alpha * s)
    b2 = k * (alpha * alpha - alpha * c + ratio * alpha * s)
    return Biquad(0.0, b1, b2, a1, a2)


def foh_tf(sys: SdofSystem, dt: float) -> Biquad:
    """First-order-hold (triangle) equivalent: exact for piecewise-linear input."""
    _check_dt(dt)
    wn, xi, wd = sys.omega_n, sys.xi, sys.omega_d
    alpha, theta, _ = _decay(sys, dt)
    c, s = math.cos(theta), math.sin(theta)
    p = 2.0 * xi / wn**3
    q = (1.0 - 2.0 * xi * xi) / (wn * wn * wd)
    b0 = (p * (1.0 - alpha * c) - dt / wn**2 + q * alpha * s) / dt
    b1 = 2.0 * (0.5 * p * (alpha * alpha - 1.0) + dt / wn**2 * alpha * c - q * alpha * s) / dt
    b2 = (-(p + dt / wn**2) * alpha * alpha + p * alpha * c + q * alpha * s) / dt
    a1, a2 = _exact_denominator(sys, dt)
    return Biquad(b0, b1, b2, a1, a2)


def impulse_invariant_tf(sys: SdofSystem, dt: float) -> Biquad:
    """Impulse response equals ``dt`` times the sampled continuous IRF."""
    _check_dt(dt)
    alpha, theta, _ = _decay(sys, dt)
    a1, a2 = _exact_denominator(sys, dt)
    b1 = -(dt / sys.omega_d) * alpha * math.sin(theta)
    return Biquad(0.0, b1, 0.0, a1, a2)


def forward_euler_tf(sys: SdofSystem, dt: float) -> Biquad:
    _check_dt(dt)
    x = sys.xi * sys.omega_n * dt
    w2 = (sys.omega_n * dt) ** 2
    return Biquad(0.0, 0.0, -dt * dt, 2.0 * x - 2.0, 1.0 - 2.0 * x + w2)


def backward_euler_tf(sys: SdofSystem, dt: float) -> Biquad:
    _check_dt(dt)
    x = sys.xi * sys.omega_n * dt
    rho = 1.0 + 2.0 * x + (sys.omega_n * dt) ** 2
    return Biquad(-dt * dt / rho, 0.0, 0.0, -2.0 * (1.0 + x) / rho, 1.0 / rho)


def tustin_tf(sys: SdofSystem, dt: float) -> Biquad:
    """Bilinear (trapezoidal) map ``s = (2/dt)(z-1)/(z+1)``."""
    _check_dt(dt)
    x = 4.0 * sys.xi * sys.omega_n * dt
    w2 = (sys.omega_n * dt) ** 2
    rho = 4.0 + x + w2
    a1, a2 = (2.0 * w2 - 8.0) / rho, (4.0 - x + w2) / rho
    g = _bilinear_gain(a1, a2, sys.omega_n)
    return Biquad(g, 2.0 * g, g, a1, a2)


def _bilinear_gain(a1: float, a2: float, wn: float) -> float:
    """Numerator scale of a bilinear map, taken from the rounded denominator.

    Equal to ``-dt^2 / rho`` in exact arithmetic; deriving it from
    ``1 + a1 + a2`` keeps the stored filter's DC gain at ``-1/wn^2`` even
    when that sum suffers cancellation (small ``wn dt``).
    """
    return -(1.0 + a1 + a2) / (4.0 * wn * wn)


def tustin_prewarp_tf(sys: SdofSystem, dt: float) -> Biquad:
    """Bilinear map warped so the natural frequency maps onto itself.

    Raises
    ------
    PreconditionError
        If ``wn dt >= pi`` (natural frequency at or above Nyquist).
    """
    _check_dt(dt)
    wn, xi = sys.omega_n, sys.xi
    if wn * dt >= math.pi:
        raise PreconditionError(
            f"pre-warping needs wn*dt < pi (natural frequency below Nyquist); got {wn * dt:.6g}"
        )
    eta = wn / math.tan(0.5 * wn * dt)
    rho = eta * eta + 2.0 * eta * xi * wn + wn * wn
    a1 = (2.0 * wn * wn - 2.0 * eta * eta) / rho
    a2 = (eta * eta - 2.0 * eta * xi * wn + wn * wn) / rho
    g = _bilinear_gain(a1, a2, wn)
    return Biquad(g, 2.0 * g, g, a1, a2)


def matched_tf(sys: SdofSystem, dt: float) -> Biquad:
    """Matched pole-zero map with one zero at ``z = -1`` and DC gain fixed."""
    _check_dt(dt)
    a1, a2 = _exact_denominator(sys, dt)
    b = -(1.0 + a1 + a2) / (2.0 * sys.omega_n**2)
    return Biquad(0.0, b, b, a1, a2)


def central_difference_tf(sys: SdofSystem, dt: float) -> Biquad:
    _check_dt(dt)
    x = sys.xi * sys.omega_n * dt
    den = 1.0 + x
    return Biquad(0.0, -dt * dt / den, 0.0, ((sys.omega_n * dt) ** 2 - 2.0) / den, (1.0 - x) / den)


def kanamori_biquad(omega_eff: float, xi_eff: float, dt: float) -> Biquad:
    """Backward-difference filter at effective parameters.

    ``xi_eff`` may be negative, so this does not go through
    :class:`SdofSystem` validation.
    """
    _check_dt(dt)
    x = xi_eff * omega_eff * dt
    rho = 1.0 + 2.0 * x + (omega_eff * dt) ** 2
    return Biquad(-dt * dt / rho, 0.0, 0.0, -2.0 * (1.0 + x) / rho, 1.0 / rho)


# -- least-squares frequency-response fit ------------------------------------


@dataclass(frozen=True)
class LsqOptions:
    """Grid and iteration controls for :func:`lsq_tf`.

    ``f_max=None`` means the Nyquist frequency of the step being fitted.
    ``weights=None`` means unit weights.
    """

    freq_step: float = 0.01
    f_min: float = 0.0
    f_max: float | None = None
    weights: tuple | None = None
    max_iter: int = 100
    tol: float = 1e-5

    def __post_init__(self):
        if not self.freq_step > 0:
            raise ContractError("freq_step must be positive")
        if self.f_min < 0:
            raise ContractError("f_min must be non-negative")
        if self.f_max is not None and not self.f_max > self.f_min:
            raise ContractError("f_max must exceed f_min")
        if self.max_iter < 1:
            raise ContractError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ContractError("tol must be positive")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ContractError("weights must be finite and non-negative")
            object.__setattr__(self, "weights", tuple(w.tolist()))

    def grid(self, dt: float) -> np.ndarray:
        """Frequency grid in Hz, both ends inclusive."""
        nyquist = 0.5 / dt
        f_max = nyquist if self.f_max is None else self.f_max
        if f_max > nyquist * (1.0 + 1e-12):
            raise ContractError(f"f_max {f_max} exceeds Nyquist {nyquist}")
        n = int(math.floor((f_max - self.f_min) / self.freq_step + 1e-9)) + 1
        return self.f_min + self.freq_step * np.arange(n)


@dataclass(frozen=True)
class LsqFit:
    tf: Biquad
    converged: bool
    iterations: int
    objective: float


def _reflect_inside(a1, a2):
    """Reflect roots of ``z^2 + a1 z + a2`` with ``|p| > 1`` to ``p / |p|^2``."""
    disc = a1 * a1 - 4.0 * a2
    if disc < 0:
        # complex pair: |p|^2 = a2
        if a2 > 1.0:
            return a1 / a2, 1.0 / a2
        return a1, a2
    r = math.sqrt(disc)
    p1 = 0.5 * (-a1 - r)
    p2 = 0.5 * (-a1 + r)
    if abs(p1) > 1.0:
        p1 = 1.0 / p1
    if abs(p2) > 1.0:
        p2 = 1.0 / p2
    return -(p1 + p2), p1 * p2


def lsq_fit(sys: SdofSystem, dt: float, opts: LsqOptions | None = None) -> LsqFit:
    """Fit a stable biquad to the continuous FRF by weighted least squares.

    The linearized problem ``min |B - A F|^2`` seeds a damped Gauss-Newton
    descent on the true output-error objective ``sum W |B/A - F|^2``.
    Poles leaving the unit circle are reflected back after every trial
    step, so the returned filter is always stable.
    """
    _check_dt(dt)
    opts = opts or LsqOptions()
    f = opts.grid(dt)
    if f.size < 3:
        raise DegenerateGridError(f"frequency grid has only {f.size} points")
    omega = 2.0 * np.pi * f
    if opts.weights is None:
        sw = np.ones_like(omega)
    else:
        w = np.asarray(opts.weights, dtype=float)
        if w.size != omega.size:
            raise ContractError(f"{w.size} weights given for {omega.size} frequencies")
        sw = np.sqrt(w)
    target = sys.frf(omega)
    z1 = np.exp(-1j * omega * dt)
    z2 = z1 * z1

    D = sw[:, None] * np.column_stack([-target * z1, -target * z2, np.ones_like(z1), z1, z2])
    h = sw * target
    try:
        theta = np.linalg.solve(np.real(D.conj().T @ D), np.real(D.conj().T @ h))
    except np.linalg.LinAlgError as exc:
        raise DegenerateGridError("singular normal equations on this grid") from exc
    if not np.all(np.isfinite(theta)):
        raise DegenerateGridError("normal equations produced non-finite coefficients")
    theta[0], theta[1] = _reflect_inside(theta[0], theta[1])

    def evaluate(th):
        den = 1.0 + th[0] * z1 + th[1] * z2
        fit = (th[2] + th[3] * z1 + th[4] * z2) / den
        err = sw * (fit - target)
        return fit, den, err, float(np.vdot(err, err).real)

    fit, den, err, best = evaluate(theta)
    converged = False
    iterations = 0
    while iterations < opts.max_iter:
        iterations += 1
        J = sw[:, None] * np.column_stack(
            [-z1 * fit / den, -z2 * fit / den, 1.0 / den, z1 / den, z2 / den]
        )
        R = np.real(J.conj().T @ J)
        g = np.real(J.conj().T @ err)
        try:
            step = np.linalg.solve(R, g)
        except np.linalg.LinAlgError:
            break
        accepted = None
        scale = 1.0
        for attempt in range(20):
            if attempt == 10:
                # fall back to a scaled gradient step
                step = g / np.linalg.norm(R) * R.shape[0]
                scale = 1.0
            trial = theta - scale * step
            trial[0], trial[1] = _reflect_inside(trial[0], trial[1])
            t_fit, t_den, t_err, value = evaluate(trial)
            if value < best:
                accepted = (trial, t_fit, t_den, t_err, value)
                break
            scale *= 0.5
        if accepted is None:
            # no descent direction left at working precision
            converged = bool(np.linalg.norm(step) <= opts.tol)
            break
        theta, fit, den, err, best = accepted
        if np.linalg.norm(step) <= opts.tol:
            converged = True
            break

    tf = Biquad(theta[2], theta[3], theta[4], theta[0], theta[1])
    return LsqFit(tf, converged, iterations, best)


def lsq_tf(sys: SdofSystem, dt: float, opts: LsqOptions | None = None) -> Biquad:
    """Least-squares biquad; warns with :class:`ConvergenceWarning` if not converged."""
    fit = lsq_fit(sys, dt, opts)
    if not fit.converged:
        warnings.warn(
            f"least-squares fit stopped after {fit.iterations} iterations without "
            "meeting the step tolerance; returning the best stable iterate",
            ConvergenceWarning,
            stacklevel=2,
        )
    return fit.tf


# -- Kanamori effective parameters -------------------------------------------


@dataclass(frozen=True)
class KanamoriFit:
    tf: Biquad
    omega_eff: float
    xi_eff: float
    misfit: float


def _kanamori_amplitude(omega_eff, xi_eff, omega, dt):
    return np.abs(kanamori_biquad(omega_eff, xi_eff, dt).frf(omega, dt))


def kanamori_tf(
    sys: SdofSystem,
    dt: float,
    f_min: float = KANAMORI_BAND[0],
    f_max: float = KANAMORI_BAND[1],
    f_step: float = 0.01,
    warn: bool = True,
) -> KanamoriFit:
    """Effective ``(wn, xi)`` of the backward-difference filter.

    Minimizes the relative amplitude misfit between the filter and the
    continuous FRF over ``[f_min, f_max]`` Hz, starting from the true
    parameters, with ``0.5 wn <= wn_eff <= 1.5 wn`` and ``xi_eff`` free
    in sign. ``misfit`` is the RMS relative amplitude error on the grid.
    A :class:`StabilityWarning` is emitted when ``xi_eff < -wn_eff dt / 2``
    unless ``warn`` is false.
    """
    _check_dt(dt)
    if not (0.0 < f_min < f_max):
        raise ContractError(f"need 0 < f_min < f_max, got {f_min}, {f_max}")
    if f_max > 0.5 / dt * (1.0 + 1e-12):
        raise ContractError(f"f_max {f_max} exceeds Nyquist {0.5 / dt}")
    n = int(math.floor((f_max - f_min) / f_step + 1e-9)) + 1
    omega = 2.0 * np.pi * (f_min + f_step * np.arange(n))
    target = np.abs(sys.frf(omega))

    def residual(x):
        return _kanamori_amplitude(x[0], x[1], omega, dt) / target - 1.0

    wn = sys.omega_n
    try:
        res = least_squares(
            residual,
            x0=[wn, sys.xi],
            bounds=([0.5 * wn, -np.inf], [1.5 * wn, np.inf]),
            x_scale=[wn, 0.01],
            xtol=1e-12,
            ftol=1e-12,
            gtol=1e-12,
            max_nfev=2000,
        )
    except (ValueError, FloatingPointError) as exc:
        raise KanamoriFitError(f"effective-parameter search failed: {exc}", (wn, sys.xi)) from exc
    if res.status <= 0 or not np.all(np.isfinite(res.x)):
        raise KanamoriFitError(f"effective-parameter search failed: {res.message}", tuple(res.x))

    omega_eff, xi_eff = float(res.x[0]), float(res.x[1])
    if warn and xi_eff <= -0.5 * omega_eff * dt:
        warnings.warn(
            f"effective damping {xi_eff:.4g} <= -wn_eff*dt/2; the fitted filter is unstable",
            StabilityWarning,
            stacklevel=2,
        )
    misfit = float(np.sqrt(np.mean(res.fun**2)))
    return KanamoriFit(kanamori_biquad(omega_eff, xi_eff, dt), omega_eff, xi_eff, misfit)
