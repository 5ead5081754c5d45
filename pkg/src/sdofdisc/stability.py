"""Poles, eigenvalues and closed-form stability verdicts.

Every report carries two independent answers: the verdict from the
computed pole magnitudes, and the verdict of the method's closed-form
stability condition. They agree away from the stability boundary.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Biquad, ContractError, DiscreteStateSpace, SdofSystem
from .methods import MethodOptions, discretize, parse_method
from .steppers import NigamJenningsCoeffs
from .tf_methods import kanamori_tf

__all__ = [
    "Verdict",
    "StabilityReport",
    "MARGINAL_TOL",
    "biquad_poles",
    "dss_eigenvalues",
    "verdict_from_magnitudes",
    "kanamori_condition",
    "formula_verdict",
    "spectral_radius",
    "stability_verdict",
]

MARGINAL_TOL = 1e-12


class Verdict(str, enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StabilityReport:
    """Stability of one method at one ``(sys, dt)``.

    ``verdict`` follows the pole magnitudes (marginal within 1e-12 of 1);
    ``formula_verdict`` follows the closed-form condition in ``condition``.
    ``margin`` is ``1 - max|p|``.
    """

    method: str
    poles: tuple
    magnitudes: tuple
    verdict: Verdict
    formula_verdict: Verdict
    condition: str
    margin: float

    @property
    def is_stable(self) -> bool:
        return self.verdict is Verdict.STABLE


def _quadratic_roots(a1: float, a2: float):
    """Roots of ``z^2 + a1 z + a2``, larger magnitude last for real pairs."""
    disc = cmath.sqrt(a1 * a1 - 4.0 * a2)
    return ((-a1 - disc) / 2.0, (-a1 + disc) / 2.0)


def biquad_poles(tf: Biquad) -> tuple[complex, complex]:
    return _quadratic_roots(tf.a1, tf.a2)


def dss_eigenvalues(sys: DiscreteStateSpace) -> tuple:
    """Eigenvalues of ``A_D`` for 2-state systems and the 3-state Newmark form.

    The 3-state form has a structurally singular update (its generating
    matrix has a zero row), so one eigenvalue is exactly zero and the
    other two solve ``l^2 - tr(A) l + m2 = 0`` with ``m2`` the sum of the
    principal 2x2 minors.
    """
    a = sys.a_d
    n = sys.n_states
    if n == 2:
        tr = a[0, 0] + a[1, 1]
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        return _quadratic_roots(-tr, det)
    if n == 3:
        tr = float(np.trace(a))
        m2 = (
            a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
            + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
        )
        return (0j,) + _quadratic_roots(-tr, m2)
    raise ContractError(f"eigenvalues are implemented for 2 or 3 states, got {n}")


def verdict_from_magnitudes(magnitudes, tol: float = MARGINAL_TOL) -> Verdict:
    peak = max(magnitudes)
    if peak > 1.0 + tol:
        return Verdict.UNSTABLE
    if peak >= 1.0 - tol:
        return Verdict.MARGINAL
    return Verdict.STABLE


def _damped(xi: float) -> Verdict:
    return Verdict.STABLE if xi > 0 else Verdict.MARGINAL


def _compare(value: float, bound: float) -> Verdict:
    """Stable when ``value < bound``, marginal on the boundary."""
    if value < bound:
        return Verdict.STABLE
    if value == bound:
        return Verdict.MARGINAL
    return Verdict.UNSTABLE


def kanamori_condition(omega_eff: float, xi_eff: float, dt: float) -> Verdict:
    """Exact condition for the backward-difference filter at effective parameters.

    Stable iff ``xi_eff > -wn_eff dt / 2``; for strongly negative damping
    (``xi_eff wn_eff dt < -1``) the pole at the negative real axis also
    needs ``4 + 4 xi_eff wn_eff dt + (wn_eff dt)^2 > 0``.
    """
    w = omega_eff * dt
    x = xi_eff * w
    first = 2.0 * xi_eff + w
    second = 4.0 + 4.0 * x + w * w if x < -1.0 else 1.0
    if first > 0 and second > 0:
        return Verdict.STABLE
    if first < 0 or second < 0:
        return Verdict.UNSTABLE
    return Verdict.MARGINAL


def formula_verdict(method, sys: SdofSystem, dt: float, opts: MethodOptions | None = None):
    """Closed-form stability condition of ``method``.

    Returns
    -------
    verdict : Verdict or None
        ``None`` when the method has no closed form (LSQ, Newmark with
        ``gamma != 1/2``); the computed poles decide.
    condition : str
    """
    mid = parse_method(method)
    name = mid.name
    wn, xi = sys.omega_n, sys.xi
    if name in ("zoh", "foh", "impulse", "matched", "ss-zoh", "ss-foh", "nigam-jennings"):
        return _damped(xi), "stable for xi > 0 (|p| = exp(-xi wn dt))"
    if name in ("tustin", "tustin-prewarp", "ss-tustin"):
        return _damped(xi), "stable for xi > 0 (bilinear map preserves the left half-plane)"
    if name in ("be", "ss-be"):
        return Verdict.STABLE, "unconditionally stable (|p| = 1/sqrt(1 + 2 xi wn dt + wn^2 dt^2))"
    if name in ("fe", "ss-fe"):
        return _compare(dt, 2.0 * xi / wn), f"dt < 2 xi / wn = {2.0 * xi / wn:.6g}"
    if name == "cd":
        cond = f"xi > 0 and dt < 2 / wn = {2.0 / wn:.6g}"
        by_step = _compare(wn * dt, 2.0)
        if by_step is not Verdict.STABLE:
            return by_step, cond
        return _damped(xi), cond
    if name == "kanamori":
        opts = opts or MethodOptions()
        fit = kanamori_tf(sys, dt, *opts.kanamori_band, opts.kanamori_step, warn=False)
        bound = -fit.omega_eff * dt / 2.0
        return (
            kanamori_condition(fit.omega_eff, fit.xi_eff, dt),
            f"xi_eff > -wn_eff dt / 2 = {bound:.6g} (xi_eff = {fit.xi_eff:.6g}, wn_eff = {fit.omega_eff:.6g})",
        )
    if name == "lsq":
        return None, "|p| < 1 by computed poles (fit reflects unstable poles inside)"
    params = mid.newmark
    if params is not None and params.gamma == 0.5:
        beta = params.beta
        if beta >= 0.25:
            return _damped(xi), "gamma = 1/2, beta >= 1/4: unconditionally stable for xi > 0"
        limit = 2.0 / (wn * math.sqrt(1.0 - 4.0 * beta))
        by_step = _compare(dt, limit)
        cond = f"xi > 0 and dt < 2 / (wn sqrt(1 - 4 beta)) = {limit:.6g}"
        if by_step is not Verdict.STABLE:
            return by_step, cond
        return _damped(xi), cond
    return None, "spectral radius < 1 by computed eigenvalues"


def _realization_poles(real) -> tuple:
    if isinstance(real, Biquad):
        return biquad_poles(real)
    if isinstance(real, NigamJenningsCoeffs):
        a = real.a_hat
        return _quadratic_roots(-(a[0, 0] + a[1, 1]), a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    return dss_eigenvalues(real)


def spectral_radius(method, sys: SdofSystem, dt: float, opts: MethodOptions | None = None) -> float:
    """Largest pole or eigenvalue magnitude of the method's one-step map."""
    real = discretize(method, sys, dt, opts, quiet=True)
    return max(abs(p) for p in _realization_poles(real))


def stability_verdict(method, sys: SdofSystem, dt: float, params=None,
                      opts: MethodOptions | None = None) -> StabilityReport:
    """Poles, magnitudes and verdicts for ``method`` at step ``dt``.

    ``params`` (a :class:`~sdofdisc.steppers.NewmarkParams`) overrides the
    weights of a Newmark-family method.
    """
    mid = parse_method(method)
    if params is not None:
        if mid.newmark is None:
            raise ContractError(f"Newmark weights given for non-Newmark method {mid.name!r}")
        mid = parse_method(f"newmark:{params.gamma!r},{params.beta!r}")
    real = discretize(mid, sys, dt, opts, quiet=True)
    poles = tuple(complex(p) for p in _realization_poles(real))
    mags = tuple(abs(p) for p in poles)
    by_poles = verdict_from_magnitudes(mags)
    by_formula, condition = formula_verdict(mid, sys, dt, opts)
    if by_formula is None:
        by_formula = by_poles
    return StabilityReport(
        method=mid.name,
        poles=poles,
        magnitudes=mags,
        verdict=by_poles,
        formula_verdict=by_formula,
        condition=condition,
        margin=1.0 - max(mags),
    )
