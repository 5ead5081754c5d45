"""Method registry: parse identifiers, build realizations, run simulations.

Identifiers::

    zoh foh impulse fe be tustin tustin-prewarp matched lsq kanamori cd
    ss-zoh ss-foh ss-fe ss-be ss-tustin nigam-jennings
    newmark-avg newmark-linear newmark:<gamma>,<beta>
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from . import signals, ss_methods, steppers, tf_methods
from .core import (
    Biquad,
    ContractError,
    DiscreteStateSpace,
    SdofSystem,
    Signal,
    biquad_filter,
    newmark_input_shift,
    ss_simulate,
)
from .steppers import NewmarkParams, NigamJenningsCoeffs

__all__ = [
    "UnknownMethodError",
    "MethodId",
    "MethodOptions",
    "TF_METHODS",
    "SS_METHODS",
    "ALL_METHODS",
    "EULER_METHODS",
    "parse_method",
    "discretize",
    "simulate",
    "upsample",
    "time_history",
    "is_euler",
    "INTERPOLATIONS",
]


class UnknownMethodError(ContractError):
    pass


_TF: dict[str, Callable[[SdofSystem, float], Biquad]] = {
    "zoh": tf_methods.zoh_tf,
    "foh": tf_methods.foh_tf,
    "impulse": tf_methods.impulse_invariant_tf,
    "fe": tf_methods.forward_euler_tf,
    "be": tf_methods.backward_euler_tf,
    "tustin": tf_methods.tustin_tf,
    "tustin-prewarp": tf_methods.tustin_prewarp_tf,
    "matched": tf_methods.matched_tf,
    "cd": tf_methods.central_difference_tf,
}
_SS: dict[str, Callable[..., DiscreteStateSpace]] = {
    "ss-zoh": ss_methods.zoh_dss,
    "ss-foh": ss_methods.foh_dss,
    "ss-fe": ss_methods.fe_dss,
    "ss-be": ss_methods.be_dss,
    "ss-tustin": ss_methods.tustin_dss,
}

TF_METHODS = tuple(_TF) + ("lsq", "kanamori")
SS_METHODS = tuple(_SS)
ALL_METHODS = TF_METHODS + SS_METHODS + ("nigam-jennings", "newmark-avg", "newmark-linear")
EULER_METHODS = ("fe", "be", "ss-fe", "ss-be")


@dataclass(frozen=True)
class MethodId:
    """Parsed method identifier; ``newmark`` is set for the Newmark family."""

    name: str
    newmark: NewmarkParams | None = None

    def __str__(self) -> str:
        return self.name

    @property
    def family(self) -> str:
        if self.newmark is not None:
            return "newmark"
        if self.name in _SS:
            return "ss"
        if self.name == "nigam-jennings":
            return "stepper"
        return "tf"


def parse_method(text: Union[str, MethodId]) -> MethodId:
    """Parse a method identifier.

    Raises
    ------
    UnknownMethodError
        For unknown names or malformed/out-of-range Newmark weights.
    """
    if isinstance(text, MethodId):
        return text
    name = str(text).strip().lower()
    if name == "newmark-avg":
        return MethodId(name, NewmarkParams.average_acceleration())
    if name == "newmark-linear":
        return MethodId(name, NewmarkParams.linear_acceleration())
    if name.startswith("newmark:"):
        parts = name[len("newmark:"):].split(",")
        try:
            if len(parts) != 2:
                raise ValueError
            gamma, beta = (float(p) for p in parts)
            params = NewmarkParams(gamma, beta)
        except (ValueError, ContractError) as exc:
            raise UnknownMethodError(
                f"bad Newmark identifier {text!r}; expected newmark:<gamma>,<beta> "
                "with gamma in [0, 1] and beta in [0, 1/2]"
            ) from exc
        return MethodId(f"newmark:{gamma:g},{beta:g}", params)
    if name in ALL_METHODS:
        return MethodId(name)
    raise UnknownMethodError(f"unknown method {text!r}; choose from {', '.join(ALL_METHODS)} or newmark:<gamma>,<beta>")


@dataclass(frozen=True)
class MethodOptions:
    """Extra controls for the fitted methods."""

    lsq: tf_methods.LsqOptions = field(default_factory=tf_methods.LsqOptions)
    kanamori_band: tuple[float, float] = tf_methods.KANAMORI_BAND
    kanamori_step: float = 0.01


Realization = Union[Biquad, DiscreteStateSpace, NigamJenningsCoeffs]


def discretize(method, sys: SdofSystem, dt: float, opts: MethodOptions | None = None,
               observe_velocity: bool = False, quiet: bool = False) -> Realization:
    """Coefficients of ``method`` at step ``dt``.

    Transfer-function methods give a :class:`Biquad`, state-space methods
    and Newmark give a :class:`DiscreteStateSpace`, Nigam-Jennings gives
    its one-step coefficient matrices. ``quiet`` silences the fit
    warnings of LSQ and Kanamori, which is safe to use from worker threads.
    """
    mid = parse_method(method)
    opts = opts or MethodOptions()
    name = mid.name
    if name in _TF:
        return _TF[name](sys, dt)
    if name == "lsq":
        if quiet:
            return tf_methods.lsq_fit(sys, dt, opts.lsq).tf
        return tf_methods.lsq_tf(sys, dt, opts.lsq)
    if name == "kanamori":
        lo, hi = opts.kanamori_band
        return tf_methods.kanamori_tf(sys, dt, lo, hi, opts.kanamori_step, warn=not quiet).tf
    if name in _SS:
        return _SS[name](sys, dt, observe_velocity)
    if name == "nigam-jennings":
        return steppers.nigam_jennings_coeffs(sys, dt)
    return steppers.newmark_dss(sys, dt, mid.newmark)


def simulate(method, sys: SdofSystem, input: Signal, opts: MethodOptions | None = None,
             quiet: bool = False) -> Signal:
    """Relative displacement of ``sys`` under ``input`` using ``method``.

    Central difference runs through its transfer-function form, so it
    starts from zero history. The Newmark family and Nigam-Jennings use
    their native steppers.
    """
    mid = parse_method(method)
    if mid.newmark is not None:
        return steppers.newmark(sys, input, mid.newmark).displacement
    if mid.name == "nigam-jennings":
        return steppers.nigam_jennings(sys, input).displacement
    real = discretize(mid, sys, input.dt, opts, quiet=quiet)
    if isinstance(real, Biquad):
        return biquad_filter(real, input)
    if real.n_states == 3:
        return newmark_input_shift(real, input)
    return ss_simulate(real, input)


INTERPOLATIONS = ("none", "linear", "sinc")


def upsample(motion: Signal, factor: int, interp: str) -> Signal:
    """Resample the input for analysis; ``factor > 1`` needs an interpolation."""
    if interp not in INTERPOLATIONS:
        raise ContractError(f"interp must be one of {INTERPOLATIONS}, got {interp!r}")
    if int(factor) != factor or factor < 1:
        raise ContractError(f"upsampling factor must be a positive integer, got {factor!r}")
    if factor == 1:
        return motion
    if interp == "none":
        raise ContractError("upsampling needs interp 'linear' or 'sinc'")
    if interp == "linear":
        return signals.linear_resample(motion, factor)
    return signals.sinc_resample(motion, factor)


def time_history(method, sys: SdofSystem, motion: Signal, upsample_factor: int = 1,
                 interp: str = "none", display_factor: int = 1,
                 opts: MethodOptions | None = None) -> Signal:
    """Full pipeline: upsample the input, simulate, sinc-resample the output.

    The output step is ``motion.dt / (upsample_factor * display_factor)``.
    """
    if int(display_factor) != display_factor or display_factor < 1:
        raise ContractError(f"display factor must be a positive integer, got {display_factor!r}")
    analysis_input = upsample(motion, upsample_factor, interp)
    response = simulate(method, sys, analysis_input, opts)
    if display_factor > 1:
        response = signals.sinc_resample(response, display_factor)
    return response


def is_euler(method) -> bool:
    return parse_method(method).name in EULER_METHODS
