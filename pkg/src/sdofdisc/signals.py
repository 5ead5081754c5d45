"""Ground-motion input, resampling, analytical oracles and error metrics."""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass

import numpy as np
from scipy.signal import upfirdn

from .core import ContractError, PreconditionError, SdofError, SdofSystem, Signal

__all__ = [
    "ParseError",
    "FormatError",
    "DegenerateReferenceError",
    "SineExcitation",
    "load_ground_motion",
    "linear_resample",
    "sinc_resample",
    "sinc_kernel",
    "sine_response",
    "sine_oracle",
    "continuous_irf",
    "peak_error",
    "rms_error",
    "SINC_HALF_WIDTH",
    "KAISER_BETA",
    "SPACING_TOLERANCE",
]

SINC_HALF_WIDTH = 16
KAISER_BETA = 8.6
SPACING_TOLERANCE = 1e-9


class ParseError(SdofError, ValueError):
    """A ground-motion file line could not be parsed.

    Attributes
    ----------
    line : int
        1-based line number of the offending line.
    """

    def __init__(self, line: int, message: str):
        self.line = int(line)
        super().__init__(f"line {self.line}: {message}")


class FormatError(SdofError, ValueError):
    """Time column is not uniformly spaced; ``max_jitter`` is relative to dt."""

    def __init__(self, max_jitter: float, message: str | None = None):
        self.max_jitter = float(max_jitter)
        super().__init__(
            message or f"non-uniform time spacing: max jitter {self.max_jitter:.3e} of dt exceeds {SPACING_TOLERANCE:g}"
        )


class DegenerateReferenceError(ContractError):
    """The reference signal is identically zero, so relative errors are undefined."""


@dataclass(frozen=True)
class SineExcitation:
    """Ground acceleration ``amplitude * sin(omega_0 t)``."""

    amplitude: float
    omega_0: float

    def __post_init__(self):
        if not math.isfinite(self.amplitude):
            raise ContractError("amplitude must be finite")
        if not (math.isfinite(self.omega_0) and self.omega_0 > 0):
            raise ContractError(f"omega_0 must be positive, got {self.omega_0!r}")

    def __call__(self, t):
        return self.amplitude * np.sin(self.omega_0 * np.asarray(t, dtype=float))

    def sample(self, dt: float, n: int) -> Signal:
        return Signal(dt, self(np.arange(n) * dt))


# -- file input ----------------------------------------------------------------

_DT_LINE = re.compile(r"^dt\s*[:=]?\s*(\S+)\s*$", re.IGNORECASE)


def _float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(lineno, f"cannot parse {token!r} as a number") from None
    if not math.isfinite(value):
        raise ParseError(lineno, f"non-finite value {token!r}")
    return value


def load_ground_motion(path: str | os.PathLike) -> Signal:
    """Read a uniformly sampled ground-acceleration record.

    Two layouts are accepted. The header layout has a ``dt <seconds>``
    line followed by one acceleration per line. The CSV layout has
    ``time,accel`` rows whose spacing must be uniform to a relative
    jitter of 1e-9; only the spacing is used, not the start time.
    Blank lines and lines starting with ``#`` are ignored in both, and
    the CSV layout may carry one non-numeric column-name row.

    Raises
    ------
    ParseError
        On a malformed line, with its line number.
    FormatError
        On non-uniform spacing, with the maximum relative jitter.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [(i + 1, raw.strip()) for i, raw in enumerate(fh)]
    lines = [(i, s) for i, s in lines if s and not s.startswith("#")]
    if not lines:
        raise ParseError(1, "no data")

    first_no, first = lines[0]
    m = _DT_LINE.match(first)
    if m:
        dt = _float(m.group(1), first_no)
        if dt <= 0:
            raise ParseError(first_no, f"dt must be positive, got {dt!r}")
        values = []
        for lineno, text in lines[1:]:
            tokens = text.split()
            if len(tokens) != 1:
                raise ParseError(lineno, "expected one value per line")
            values.append(_float(tokens[0], lineno))
        if not values:
            raise ParseError(first_no, "no samples after dt line")
        return Signal(dt, np.array(values))

    rows = lines
    if re.search(r"[A-DF-Za-df-z_]", first):
        # column-name row
        rows = lines[1:]
    times, values = [], []
    for lineno, text in rows:
        tokens = [t for t in re.split(r"[,\s]+", text) if t]
        if len(tokens) != 2:
            raise ParseError(lineno, "expected two columns 'time,accel'")
        times.append(_float(tokens[0], lineno))
        values.append(_float(tokens[1], lineno))
    if len(times) < 2:
        raise FormatError(math.nan, "a two-column record needs at least two rows to define dt")
    t = np.array(times)
    dt = (t[-1] - t[0]) / (t.size - 1)
    if not dt > 0:
        raise FormatError(math.inf, "time column must be increasing")
    jitter = float(np.max(np.abs(np.diff(t) - dt)) / dt)
    if jitter > SPACING_TOLERANCE:
        raise FormatError(jitter)
    return Signal(dt, np.array(values))


# -- resampling ----------------------------------------------------------------


def _check_factor(factor) -> int:
    if int(factor) != factor or factor < 1:
        raise ContractError(f"resampling factor must be a positive integer, got {factor!r}")
    return int(factor)


def linear_resample(sig: Signal, factor: int) -> Signal:
    """Upsample by linear interpolation; the tail extrapolates the last slope.

    Output has ``factor * len(sig)`` samples and ``out[factor * k] == sig[k]``.
    """
    u = _check_factor(factor)
    x = sig.samples
    if u == 1:
        return sig
    n = x.size
    pos = np.arange(u * n) / u
    if n == 1:
        y = np.full(u, x[0])
    else:
        idx = np.minimum(np.floor(pos).astype(np.int64), n - 2)
        frac = pos - idx
        y = x[idx] + frac * (x[idx + 1] - x[idx])
    y[::u] = x
    return Signal(sig.dt / u, y)


def sinc_kernel(factor: int, half_width: int = SINC_HALF_WIDTH, beta: float = KAISER_BETA) -> np.ndarray:
    """Kaiser-windowed interpolation kernel, ``2 * half_width * factor + 1`` taps.

    Each polyphase branch is scaled to unit DC gain, and the zero-phase
    branch is exactly a unit impulse, so original samples pass unchanged.
    """
    u = _check_factor(factor)
    n = np.arange(-half_width * u, half_width * u + 1)
    h = np.sinc(n / u) * np.kaiser(n.size, beta)
    h[(n % u == 0) & (n != 0)] = 0.0
    h[n == 0] = 1.0
    for phase in range(1, u):
        branch = h[phase::u]
        branch /= branch.sum()
    return h


def sinc_resample(sig: Signal, factor: int, half_width: int = SINC_HALF_WIDTH,
                  beta: float = KAISER_BETA) -> Signal:
    """Band-limited upsampling with a windowed-sinc kernel.

    The record is zero-padded beyond its ends, so the first and last
    ``half_width`` original samples carry edge effects.
    """
    u = _check_factor(factor)
    if u == 1:
        return sig
    h = sinc_kernel(u, half_width, beta)
    y = upfirdn(h, sig.samples, up=u)
    start = half_width * u
    out = y[start:start + u * len(sig)].copy()
    out[::u] = sig.samples
    return Signal(sig.dt / u, out)


# -- analytical oracles --------------------------------------------------------


def _sine_constants(sys: SdofSystem, exc: SineExcitation):
    wn, xi = sys.omega_n, sys.xi
    r = exc.omega_0 / wn
    if xi == 0.0 and math.isclose(r, 1.0, rel_tol=1e-12):
        raise PreconditionError("undamped resonance: the steady-state amplitude is unbounded")
    den = (1.0 - r * r) ** 2 + (2.0 * xi * r) ** 2
    g = exc.amplitude / wn**2
    c1 = -g * (1.0 - r * r) / den
    c2 = -g * (-2.0 * xi * r) / den
    c3 = g * (-2.0 * xi * r) / den
    c4 = (xi * wn * c3 - c1 * exc.omega_0) / sys.omega_d
    return c1, c2, c3, c4


def sine_response(sys: SdofSystem, exc: SineExcitation, t):
    """Displacement, velocity and acceleration from rest under a sine input.

    Returns
    -------
    u, v, a : ndarray
        Analytic relative response at times ``t``.
    """
    c1, c2, c3, c4 = _sine_constants(sys, exc)
    t = np.asarray(t, dtype=float)
    s = sys.xi * sys.omega_n
    wd, w0 = sys.omega_d, exc.omega_0
    e = np.exp(-s * t)
    sd, cd = np.sin(wd * t), np.cos(wd * t)
    s0, c0 = np.sin(w0 * t), np.cos(w0 * t)
    h = c4 * sd + c3 * cd
    hp = wd * (c4 * cd - c3 * sd)
    hpp = -wd * wd * h
    u = e * h + c1 * s0 + c2 * c0
    v = e * (hp - s * h) + w0 * (c1 * c0 - c2 * s0)
    a = e * (hpp - 2.0 * s * hp + s * s * h) - w0 * w0 * (c1 * s0 + c2 * c0)
    return u, v, a


def sine_oracle(sys: SdofSystem, exc: SineExcitation, dt: float, n: int) -> Signal:
    """Exact displacement from rest under ``exc``, sampled at ``k dt``."""
    if n < 1:
        raise ContractError("n must be at least 1")
    u, _, _ = sine_response(sys, exc, np.arange(n) * dt)
    return Signal(dt, u)


def continuous_irf(sys: SdofSystem, t):
    """Displacement per unit ground-acceleration impulse."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ContractError("impulse response is defined for t >= 0")
    return -np.exp(-sys.xi * sys.omega_n * t) * np.sin(sys.omega_d * t) / sys.omega_d


# -- metrics -------------------------------------------------------------------


def _aligned(u: Signal, u_ref: Signal):
    if len(u) != len(u_ref):
        raise ContractError(f"length mismatch: {len(u)} vs {len(u_ref)}")
    if not math.isclose(u.dt, u_ref.dt, rel_tol=1e-9):
        raise ContractError(f"dt mismatch: {u.dt} vs {u_ref.dt}")
    return u.samples, u_ref.samples


def peak_error(u: Signal, u_ref: Signal) -> float:
    """Signed percentage error of the peak absolute value."""
    x, r = _aligned(u, u_ref)
    peak_ref = np.max(np.abs(r))
    if peak_ref == 0.0:
        raise DegenerateReferenceError("reference peak is zero")
    return float((np.max(np.abs(x)) - peak_ref) / peak_ref * 100.0)


def rms_error(u: Signal, u_ref: Signal) -> float:
    """Norm of the difference relative to the reference norm, in percent."""
    x, r = _aligned(u, u_ref)
    ref = np.linalg.norm(r)
    if ref == 0.0:
        raise DegenerateReferenceError("reference energy is zero")
    return float(np.linalg.norm(x - r) / ref * 100.0)
