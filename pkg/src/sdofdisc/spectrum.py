"""Elastic response spectra over a period grid."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import ContractError, DivergedSimulationError, SdofError, SdofSystem, Signal
from .methods import INTERPOLATIONS, MethodOptions, parse_method, simulate, upsample
from .signals import sinc_resample
from .stability import Verdict, stability_verdict

__all__ = [
    "DEFAULT_PERIODS",
    "SpectrumRequest",
    "PeriodDiagnostic",
    "SpectrumResult",
    "SpectrumError",
    "response_spectrum",
]

DEFAULT_PERIODS = (
    0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.75,
    1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0,
)


class SpectrumError(SdofError, RuntimeError):
    """Every period of the spectrum failed."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        first = self.diagnostics[0].message if self.diagnostics else ""
        super().__init__(f"all {len(self.diagnostics)} periods failed; first: {first}")


@dataclass(frozen=True)
class SpectrumRequest:
    periods: tuple = DEFAULT_PERIODS
    xi: float = 0.05
    method: str = "nigam-jennings"
    upsample: int = 1
    interp: str = "none"
    display_factor: int = 1
    options: MethodOptions = field(default_factory=MethodOptions)

    def __post_init__(self):
        p = tuple(float(t) for t in self.periods)
        if not p:
            raise ContractError("period grid is empty")
        if any(not (math.isfinite(t) and t > 0) for t in p):
            raise ContractError("periods must be positive")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ContractError("periods must be strictly increasing")
        object.__setattr__(self, "periods", p)
        object.__setattr__(self, "method", str(parse_method(self.method)))
        if self.interp not in INTERPOLATIONS:
            raise ContractError(f"interp must be one of {INTERPOLATIONS}")
        for name in ("upsample", "display_factor"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ContractError(f"{name} must be a positive integer, got {v!r}")
        if self.upsample > 1 and self.interp == "none":
            raise ContractError("upsampling needs interp 'linear' or 'sinc'")


@dataclass(frozen=True)
class PeriodDiagnostic:
    period: float
    verdict: Verdict | None
    diverged: bool
    message: str = ""


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Peak displacement per period; ``sd`` is NaN where the run failed."""

    periods: np.ndarray
    sd: np.ndarray
    psv: np.ndarray
    psa: np.ndarray
    diagnostics: tuple

    @property
    def ok(self) -> np.ndarray:
        return np.isfinite(self.sd)


def _one_period(period: float, analysis_input: Signal, req: SpectrumRequest):
    sys = SdofSystem.from_period(period, req.xi)
    verdict = None
    try:
        verdict = stability_verdict(req.method, sys, analysis_input.dt, opts=req.options).verdict
        u = simulate(req.method, sys, analysis_input, req.options, quiet=True)
        if req.display_factor > 1:
            u = sinc_resample(u, req.display_factor)
        return float(np.max(np.abs(u.samples))), PeriodDiagnostic(period, verdict, False)
    except DivergedSimulationError as exc:
        return math.nan, PeriodDiagnostic(period, Verdict.UNSTABLE, True, str(exc))
    except SdofError as exc:
        return math.nan, PeriodDiagnostic(period, verdict, False, str(exc))


def response_spectrum(motion: Signal, req: SpectrumRequest | None = None,
                      max_workers: int | None = None) -> SpectrumResult:
    """Peak relative displacement for every period in ``req``.

    Periods run in parallel threads (the recursions release the GIL);
    results are assembled by period index, so output is identical for
    any worker count. A failed period gets NaN and a diagnostic.

    Raises
    ------
    SpectrumError
        If every period fails.
    """
    req = req or SpectrumRequest()
    analysis_input = upsample(motion, req.upsample, req.interp)
    workers = max_workers or min(len(req.periods), os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda t: _one_period(t, analysis_input, req), req.periods))
    else:
        outcomes = [_one_period(t, analysis_input, req) for t in req.periods]

    periods = np.array(req.periods)
    sd = np.array([o[0] for o in outcomes])
    diagnostics = tuple(o[1] for o in outcomes)
    if np.all(np.isnan(sd)):
        raise SpectrumError(diagnostics)
    omega = 2.0 * np.pi / periods
    return SpectrumResult(periods, sd, omega * sd, omega * omega * sd, diagnostics)
