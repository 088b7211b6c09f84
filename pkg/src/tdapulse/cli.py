"""Command-line interface.

Exit codes: 0 on success, 1 when an estimator cannot produce a result, 2 on
usage or input-format errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .errors import ParseError, PulseError
from .harness import METHODS, PLANES, SweepConfig, bench_runtime, doubling_ratios, run_sweep, runtime_csv
from .image import image_pulse_count, product_image, read_image
from .io import DEFAULT_THRESHOLD_VOLTS, load_signal, write_diagram, write_recording, write_series, write_spectrum
from .persistence import diagram_1d, extract_support
from .signal_model import DEFAULT_SEED, PulseModel, simulate_accordion, simulate_simple
from .spectral import one_sided_spectrum, rpm_fourier
from .step_detect import DEFAULT_RHO_MIN, count_from_series, rpm_persistence



class UsageError(Exception):
    pass


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None


def _emit_json(obj, out):
    with _output(out) as fh:
        fh.write(json.dumps(obj) + "\n")


def _grid(text):
    try:
        rows, cols = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 12x12, got {text!r}") from None
    return rows, cols


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# -- simulate ----------------------------------------------------------------

def _model_from_args(args):
    fields = {}
    if args.config:
        fields.update(_load_json(args.config))
    if args.rpm is not None:
        base = PulseModel.from_rpm(args.rpm, duty=args.duty, n_periods=args.periods,
                                   oversample=args.oversample)
        fields.update(T=base.T, tau=base.tau, window=base.window, dt=base.dt)
    for name in ("T", "tau", "alpha", "beta", "epsilon", "dt", "seed"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    if args.window is not None:
        fields["window"] = tuple(args.window)
    missing = {"T", "tau"} - set(fields)
    if missing:
        raise UsageError(f"simulate needs --rpm, a --config, or {sorted(missing)}")
    fields.setdefault("seed", DEFAULT_SEED)
    return PulseModel.from_dict(fields)


def cmd_simulate(args):
    model = _model_from_args(args)
    sim = simulate_simple if args.model == "simple" else simulate_accordion
    ts = sim(model)
    with _output(args.out) as fh:
        if args.volts is not None:
            write_recording(ts.times, ts.values * args.volts, fh)
        else:
            write_series(ts, fh)
    if args.model_out:
        with open(args.model_out, "w") as fh:
            json.dump(model.to_dict(), fh)
    return 0


# -- count / rpm / compare -----------------------------------------------------

def _signal(args):
    return load_signal(args.input, threshold_volts=args.threshold_volts)


def cmd_count(args):
    ts = _signal(args)
    pc = count_from_series(ts, invert=args.invert, rho_min=args.rho_min)
    if args.diagram_out:
        src = ts.inverted() if args.invert else ts
        write_diagram(diagram_1d(extract_support(src)), args.diagram_out)
    rec = {"pulse_count": pc.count, "mu": pc.mu,
           "split_ratio": pc.split_ratio if np.isfinite(pc.split_ratio) else None,
           "a_low_s": pc.a_low, "a_high_s": pc.a_high, "valid_split": pc.valid_split}
    _emit_json(rec, args.out)
    return 0


def cmd_rpm(args):
    ts = _signal(args)
    _emit_json(rpm_persistence(ts, invert=args.invert, rho_min=args.rho_min).to_record(), args.out)
    return 0


def cmd_compare(args):
    ts = _signal(args)
    records = [rpm_persistence(ts, invert=args.invert, rho_min=args.rho_min).to_record(),
               rpm_fourier(ts, w=args.w).to_record()]
    if args.spectrum_out:
        write_spectrum(one_sided_spectrum(ts), args.spectrum_out)
    _emit_json(records, args.out)
    return 0


# -- sweep / bench -------------------------------------------------------------

def _sweep_config(args):
    fields = _load_json(args.config) if args.config else {}
    overrides = {"grid": args.grid, "replicates": args.reps, "base_seed": args.seed,
                 "workers": args.workers, "w": args.w, "rho_min": args.rho_min,
                 "omega_range": args.omega_range, "alpha_fixed": args.alpha_fixed}
    fields.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "noise_range", None) is not None:
        key = "alpha_range" if args.plane == "alpha" else "epsilon_range"
        fields[key] = args.noise_range
    return SweepConfig.from_dict(fields)


def cmd_sweep(args):
    cfg = _sweep_config(args)
    result = run_sweep(cfg, args.plane, omegas=args.omegas, noise_values=args.noise_values)
    with _output(args.out) as fh:
        result.to_csv(fh)
    return 0


def cmd_bench(args):
    args.plane = None
    cfg = _sweep_config(args)
    omegas = args.omegas if args.omegas else [float(np.mean(cfg.omega_range))]
    rows = bench_runtime(cfg, methods=args.methods, omegas=omegas,
                         n_samples=args.lengths, runs=args.runs)
    with _output(args.out) as fh:
        runtime_csv(rows, fh)
    if args.lengths and len(args.lengths) > 1:
        for method in args.methods:
            ratios = ", ".join(f"{r:.2f}" for r in doubling_ratios(rows, method))
            print(f"{method} median-time ratios: {ratios}", file=sys.stderr)
    return 0


# -- image-count ---------------------------------------------------------------

def cmd_image_count(args):
    if args.image:
        img = read_image(args.image)
    elif args.rows and args.cols:
        thr = args.threshold_volts
        img = product_image(load_signal(args.rows, thr), load_signal(args.cols, thr))
    else:
        raise UsageError("image-count needs --image, or both --rows and --cols")
    res = image_pulse_count(img, level=args.level, rho_min=args.rho_min)
    if args.diagram_out:
        write_diagram(res.diagram, args.diagram_out)
    _emit_json(res.to_record(), args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="tdapulse",
                                description="Persistence-based pulse counting and RPM estimation.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, signal=True):
        sp.add_argument("--out", help="output path (default: stdout)")
        if signal:
            sp.add_argument("--in", dest="input", required=True,
                            help="CSV with header time_s,value or time_s,volts")
            sp.add_argument("--threshold-volts", type=float, default=DEFAULT_THRESHOLD_VOLTS)
            sp.add_argument("--invert", action="store_true",
                            help="count on 1 - X (high logic between valleys)")
            sp.add_argument("--rho-min", type=float, default=DEFAULT_RHO_MIN)

    s = sub.add_parser("simulate", help="generate a synthetic pulse train")
    common(s, signal=False)
    s.add_argument("--config", help="JSON model descriptor")
    s.add_argument("--model", choices=("simple", "accordion"), default="accordion")
    s.add_argument("--rpm", type=float, help="nominal RPM (sets T, tau, window, dt)")
    s.add_argument("--duty", type=float, default=0.05)
    s.add_argument("--periods", type=int, default=32)
    s.add_argument("--oversample", type=int, default=32)
    s.add_argument("--T", type=float)
    s.add_argument("--tau", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--window", type=float, nargs=2, metavar=("A", "B"))
    s.add_argument("--dt", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--volts", type=float, metavar="HIGH",
                   help="write a time_s,volts recording with the high level at HIGH volts")
    s.add_argument("--model-out", help="also write the JSON model descriptor here")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("count", help="persistence pulse count")
    common(s)
    s.add_argument("--diagram-out", help="write the gap diagram as CSV")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("rpm", help="persistence RPM estimate")
    common(s)
    s.set_defaults(func=cmd_rpm)

    s = sub.add_parser("compare", help="persistence and Fourier RPM side by side")
    common(s)
    s.add_argument("--w", type=float, default=3.0)
    s.add_argument("--spectrum-out", help="write the one-sided spectrum as CSV")
    s.set_defaults(func=cmd_compare)

    def sweep_common(sp):
        sp.add_argument("--config", help="JSON sweep config")
        sp.add_argument("--grid", type=_grid, help="ROWSxCOLS, e.g. 12x12")
        sp.add_argument("--reps", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--w", type=float)
        sp.add_argument("--rho-min", type=float)
        sp.add_argument("--omega-range", type=float, nargs=2)
        sp.add_argument("--alpha-fixed", type=float,
                        help="ringing level used when sweeping epsilon")
        sp.add_argument("--omegas", type=_floats, help="explicit nominal RPMs")

    s = sub.add_parser("sweep", help="robustness heatmap")
    common(s, signal=False)
    sweep_common(s)
    s.add_argument("--plane", choices=PLANES, required=True)
    s.add_argument("--noise-range", type=float, nargs=2)
    s.add_argument("--noise-values", type=_floats, help="explicit noise levels")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("bench", help="estimator runtime benchmark")
    common(s, signal=False)
    sweep_common(s)
    s.add_argument("--runs", type=int, default=200)
    s.add_argument("--lengths", type=_ints, help="signal lengths in samples")
    s.add_argument("--methods", type=lambda t: t.split(","), default=list(METHODS))
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("image-count", help="cluster count on a 2-D image")
    common(s, signal=False)
    s.add_argument("--image", help="grid CSV (first row: column coords; first column: row coords)")
    s.add_argument("--rows", help="series for the row axis of a product image")
    s.add_argument("--cols", help="series for the column axis of a product image")
    s.add_argument("--threshold-volts", type=float, default=DEFAULT_THRESHOLD_VOLTS)
    s.add_argument("--level", type=float, default=0.5)
    s.add_argument("--rho-min", type=float, default=DEFAULT_RHO_MIN)
    s.add_argument("--diagram-out")
    s.set_defaults(func=cmd_image_count)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ParseError, OSError) as exc:
        print(f"tdapulse {args.command}: {exc}", file=sys.stderr)
        return 2
    except PulseError as exc:
        print(f"tdapulse {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
