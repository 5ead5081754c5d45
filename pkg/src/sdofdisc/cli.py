"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 method precondition
failure, 4 diverged simulation.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .core import (
    Biquad,
    ContractError,
    DiscreteStateSpace,
    DivergedSimulationError,
    PreconditionError,
    SdofError,
    SdofSystem,
    Signal,
)
from .methods import (
    ALL_METHODS,
    INTERPOLATIONS,
    MethodOptions,
    discretize,
    parse_method,
    time_history,
)
from .signals import SineExcitation, load_ground_motion, peak_error, rms_error, sine_oracle
from .spectrum import DEFAULT_PERIODS, SpectrumError, SpectrumRequest, response_spectrum
from .stability import stability_verdict
from .steppers import NewmarkParams, NigamJenningsCoeffs
from .tf_methods import KANAMORI_BAND, KanamoriFitError, LsqOptions, kanamori_tf

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_DIVERGED = 4


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """Shortest text that keeps 17 significant digits."""
    return format(float(x), ".17g")


def to_json(obj, indent: int = 2, level: int = 0) -> str:
    """JSON text with every float written at 17 significant digits."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {to_json(v, indent, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        return fmt(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


# -- argument helpers ------------------------------------------------------------


def _pair(text: str, what: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must look like <lo>:<hi>, got {text!r}") from None
    return lo, hi


def _band(text: str):
    return _pair(text, "band")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_system(p: argparse.ArgumentParser, need_dt: bool = True):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--tn", type=float, help="natural period, s")
    g.add_argument("--wn", type=float, help="natural circular frequency, rad/s")
    p.add_argument("--xi", type=float, required=True, help="damping ratio")
    if need_dt:
        p.add_argument("--dt", type=float, required=True, help="time step, s")


def _add_fit_options(p: argparse.ArgumentParser):
    p.add_argument("--fmax", type=float, help="LSQ grid upper frequency, Hz (default Nyquist)")
    p.add_argument("--fstep", type=float, default=0.01, help="LSQ grid spacing, Hz")
    p.add_argument("--band", type=_band, default=KANAMORI_BAND,
                   help="Kanamori fitting band <fmin:fmax>, Hz")


def _add_pipeline(p: argparse.ArgumentParser):
    p.add_argument("--upsample", type=_positive_int, default=1, help="analysis upsampling factor")
    p.add_argument("--interp", choices=INTERPOLATIONS, default="none",
                   help="input interpolation when upsampling")
    p.add_argument("--display-factor", type=_positive_int, default=1,
                   help="sinc upsampling factor applied to the response")


def _system(args) -> SdofSystem:
    if args.tn is not None:
        return SdofSystem.from_period(args.tn, args.xi)
    return SdofSystem(args.wn, args.xi)


def _options(args) -> MethodOptions:
    return MethodOptions(
        lsq=LsqOptions(freq_step=args.fstep, f_max=args.fmax),
        kanamori_band=tuple(args.band),
    )


def _method_text(args) -> str:
    return str(parse_method(args.method))


# -- commands ----------------------------------------------------------------------


def cmd_coeffs(args, out) -> int:
    sys_ = _system(args)
    method = parse_method(args.method)
    opts = _options(args)
    doc: dict = {"method": str(method)}
    if method.name == "kanamori":
        fit = kanamori_tf(sys_, args.dt, *opts.kanamori_band, opts.kanamori_step)
        real = fit.tf
        doc["omega_eff"] = fit.omega_eff
        doc["xi_eff"] = fit.xi_eff
    else:
        real = discretize(method, sys_, args.dt, opts, observe_velocity=args.velocity)
    if isinstance(real, Biquad):
        doc["b"] = [real.b0, real.b1, real.b2]
        doc["a"] = [1.0, real.a1, real.a2]
    elif isinstance(real, NigamJenningsCoeffs):
        doc["a_hat"] = real.a_hat.tolist()
        doc["b_hat"] = real.b_hat.tolist()
    else:
        doc["A"] = real.a_d.tolist()
        doc["B"] = real.b_d.tolist()
        doc["C"] = real.c_d.tolist()
        doc["D"] = real.d_d.tolist()
    doc["dt"] = float(args.dt)
    out.write(to_json(doc) + "\n")
    return EXIT_OK


def _header(args, sys_: SdofSystem, extra: dict | None = None) -> list[str]:
    fields = {
        "method": getattr(args, "method", None),
        "omega_n": sys_.omega_n,
        "period": sys_.period,
        "xi": sys_.xi,
        "upsample": getattr(args, "upsample", None),
        "interp": getattr(args, "interp", None),
        "display_factor": getattr(args, "display_factor", None),
    }
    fields.update(extra or {})
    lines = [f"# sdofdisc {__version__}"]
    for k, v in fields.items():
        if v is None:
            continue
        lines.append(f"# {k} = {fmt(v) if isinstance(v, float) else v}")
    return lines


def cmd_simulate(args, out) -> int:
    sys_ = _system(args)
    motion = load_ground_motion(args.input)
    u = time_history(_method_text(args), sys_, motion, args.upsample, args.interp,
                     args.display_factor, _options(args))
    lines = _header(args, sys_, {"input": args.input, "input_dt": motion.dt, "output_dt": u.dt})
    lines.append("time,displacement")
    t = u.time
    lines.extend(f"{fmt(tk)},{fmt(uk)}" for tk, uk in zip(t, u.samples))
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _periods(args) -> tuple:
    if args.periods_file:
        values = []
        with open(args.periods_file, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                for tok in text.replace(",", " ").split():
                    try:
                        values.append(float(tok))
                    except ValueError:
                        raise UsageError(f"{args.periods_file}:{lineno}: bad period {tok!r}") from None
        return tuple(values)
    if args.periods:
        try:
            start, step, stop = (float(p) for p in args.periods.split(":"))
        except ValueError:
            raise UsageError(f"--periods must look like start:step:stop, got {args.periods!r}") from None
        if not (step > 0 and stop >= start > 0):
            raise UsageError("--periods needs 0 < start <= stop and step > 0")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(np.round(start + step * np.arange(n), 12))
    return DEFAULT_PERIODS


def cmd_spectrum(args, out) -> int:
    motion = load_ground_motion(args.input)
    req = SpectrumRequest(
        periods=_periods(args), xi=args.xi, method=_method_text(args),
        upsample=args.upsample, interp=args.interp, display_factor=args.display_factor,
        options=_options(args),
    )
    res = response_spectrum(motion, req)
    lines = [f"# sdofdisc {__version__}", f"# method = {req.method}", f"# xi = {fmt(req.xi)}",
             f"# input = {args.input}", f"# upsample = {req.upsample}", f"# interp = {req.interp}",
             f"# display_factor = {req.display_factor}"]
    for d in res.diagnostics:
        if d.message:
            lines.append(f"# Tn = {fmt(d.period)}: {d.message}")
    lines.append("Tn,Sd,PSV,PSA,stable")
    for t, sd, pv, pa, d in zip(res.periods, res.sd, res.psv, res.psa, res.diagnostics):
        verdict = d.verdict.value if d.verdict is not None else ""
        if math.isnan(sd):
            lines.append(f"{fmt(t)},,,,{verdict}")
        else:
            lines.append(f"{fmt(t)},{fmt(sd)},{fmt(pv)},{fmt(pa)},{verdict}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_stability(args, out) -> int:
    sys_ = _system(args)
    params = None
    if args.gamma is not None or args.beta is not None:
        base = parse_method(args.method)
        if base.newmark is None:
            raise UsageError("--gamma/--beta apply to Newmark methods only")
        params = NewmarkParams(
            base.newmark.gamma if args.gamma is None else args.gamma,
            base.newmark.beta if args.beta is None else args.beta,
        )
    rep = stability_verdict(args.method, sys_, args.dt, params=params, opts=_options(args))
    doc = {
        "method": rep.method,
        "poles": [[p.real, p.imag] for p in rep.poles],
        "magnitudes": list(rep.magnitudes),
        "verdict": rep.verdict.value,
        "formula_verdict": rep.formula_verdict.value,
        "condition": rep.condition,
        "margin": rep.margin,
    }
    out.write(to_json(doc) + "\n")
    return EXIT_OK


def cmd_compare(args, out) -> int:
    sys_ = _system(args)
    names = ALL_METHODS if args.methods.strip() == "all" else [
        m.strip() for m in args.methods.split(",") if m.strip()
    ]
    methods = [str(parse_method(m)) for m in names]
    if args.reference:
        if not args.input:
            raise UsageError("--reference needs --input (the excitation record)")
        motion = load_ground_motion(args.input)
        ref = _load_response(args.reference)
        source = f"reference file {args.reference}"
    else:
        if args.w0_ratio is None or args.duration is None:
            raise UsageError("--oracle sine needs --w0-ratio and --duration")
        exc = SineExcitation(args.amp, args.w0_ratio * sys_.omega_n)
        n = int(round(args.duration / args.dt)) + 1
        motion = exc.sample(args.dt, n)
        factor = args.upsample * args.display_factor
        ref = sine_oracle(sys_, exc, args.dt / factor, n * factor)
        source = f"sine oracle w0/wn = {fmt(args.w0_ratio)}, amplitude {fmt(args.amp)}"
    if not math.isclose(motion.dt, args.dt, rel_tol=1e-9):
        raise UsageError(f"--dt {args.dt} does not match the input record step {motion.dt}")

    lines = _header(args, sys_, {"dt": args.dt, "reference": source})
    lines.append("method,eps_sd,eps_rms,stable")
    opts = _options(args)
    for m in methods:
        verdict = ""
        try:
            verdict = stability_verdict(m, sys_, args.dt / args.upsample, opts=opts).verdict.value
            u = time_history(m, sys_, motion, args.upsample, args.interp, args.display_factor, opts)
            lines.append(f"{m},{fmt(peak_error(u, ref))},{fmt(rms_error(u, ref))},{verdict}")
        except DivergedSimulationError as exc:
            print(f"{m}: {exc}", file=sys.stderr)
            lines.append(f"{m},,,unstable")
        except (PreconditionError, KanamoriFitError) as exc:
            print(f"{m}: {exc}", file=sys.stderr)
            lines.append(f"{m},,,{verdict}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _load_response(path) -> Signal:
    """Read a ``time,displacement`` CSV such as ``simulate`` writes."""
    return load_ground_motion(path)


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdofdisc",
        description="Discretize, simulate and analyze a linear SDOF oscillator under ground acceleration.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="print discrete coefficients as JSON")
    p.add_argument("--method", required=True)
    _add_system(p)
    _add_fit_options(p)
    p.add_argument("--velocity", action="store_true",
                   help="state-space methods: observe velocity as a second output")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("simulate", help="relative displacement time history as CSV")
    p.add_argument("--input", required=True, help="ground-acceleration file")
    p.add_argument("--method", required=True)
    _add_system(p, need_dt=False)
    _add_fit_options(p)
    _add_pipeline(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="displacement response spectrum as CSV")
    p.add_argument("--input", required=True, help="ground-acceleration file")
    p.add_argument("--method", required=True)
    p.add_argument("--xi", type=float, required=True, help="damping ratio")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--periods", help="period grid start:step:stop, s")
    g.add_argument("--periods-file", help="file with one period per line")
    _add_fit_options(p)
    _add_pipeline(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("stability", help="poles and stability verdict as JSON")
    p.add_argument("--method", required=True)
    _add_system(p)
    _add_fit_options(p)
    p.add_argument("--gamma", type=float, help="Newmark gamma override")
    p.add_argument("--beta", type=float, help="Newmark beta override")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("compare", help="peak and RMS errors against a reference, as CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--oracle", choices=["sine"], help="analytic reference")
    src.add_argument("--reference", help="reference displacement CSV (time,displacement)")
    p.add_argument("--input", help="excitation file, required with --reference")
    p.add_argument("--w0-ratio", type=float, help="excitation to natural frequency ratio")
    p.add_argument("--amp", type=float, default=1.0, help="excitation amplitude")
    p.add_argument("--duration", type=float, help="excitation duration, s")
    p.add_argument("--methods", default="all", help="comma-separated method list or 'all'")
    _add_system(p)
    _add_fit_options(p)
    _add_pipeline(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except DivergedSimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except SpectrumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (PreconditionError, KanamoriFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (UsageError, ContractError, SdofError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
