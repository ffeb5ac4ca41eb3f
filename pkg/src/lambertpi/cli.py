"""Command line front end: ``tune``, ``simulate``, ``sweep`` and ``compare``.

Exit status is 0 on success, 2 on usage errors and 1 on domain failures
(unstable loop, unreachable target, ...), in which case a JSON object
``{"error": ..., "message": ...}`` is written to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys

from . import __version__
from .errors import LambertPIError
from .metrics import DEFAULT_BAND_PCT, compute_metrics
from .model import FotdPlant, PiGains, gains_from_gamma, gamma_from_gains
from .simulator import DEFAULT_STEPS_PER_DELAY, LoopForm, SimConfig, simulate
from .tuner import SCHEMA_VERSION, chr_compare, sweep, sweep_to_csv, tune_no_overshoot, tune_target_overshoot


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return value


def _add_plant(p):
    p.add_argument("-K", type=_positive, required=True, help="process gain")
    p.add_argument("-T", type=_positive, required=True, help="time constant [s]")
    p.add_argument("-L", type=_positive, required=True, help="dead time [s]")


def _add_sim_opts(p):
    p.add_argument("--band", type=_positive, default=DEFAULT_BAND_PCT, help="settling band in %% (default 2)")
    p.add_argument("--horizon", type=_positive, default=None, help="simulation end time [s] (default 40 L)")
    p.add_argument("--dt", type=_positive, default=None, help="integration step [s] (default min(T, L)/500)")


def _add_output(p, formats, default):
    p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=formats, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambertpi",
        description="Lambert W tuning of PI controllers for first-order plants with dead time.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__} (schema {SCHEMA_VERSION})"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tune", help="tune PI gains and write a JSON report")
    _add_plant(p)
    spec = p.add_mutually_exclusive_group(required=True)
    spec.add_argument("--no-overshoot", action="store_true", help="critically damped tuning (gamma = 1)")
    spec.add_argument("--overshoot", type=_positive, metavar="PCT", help="target peak overshoot in %%")
    _add_sim_opts(p)
    _add_output(p, ["json"], "json")

    p = sub.add_parser("simulate", help="write the closed-loop step response")
    _add_plant(p)
    gains = p.add_mutually_exclusive_group(required=True)
    gains.add_argument("--gamma", type=_positive, help="tune with gamma = K*ki*e*L")
    gains.add_argument("--kp", type=float, help="proportional gain (requires --ki)")
    p.add_argument("--ki", type=float, help="integral gain")
    p.add_argument("--loop", choices=[f.value for f in LoopForm], default=LoopForm.GENERAL.value)
    _add_sim_opts(p)
    _add_output(p, ["csv", "json"], "csv")

    p = sub.add_parser("sweep", help="overshoot and Ts/L over a gamma grid")
    p.add_argument("--gamma-min", type=_positive, default=0.1)
    p.add_argument("--gamma-max", type=_positive, default=2.0)
    p.add_argument("--step", type=_positive, default=0.01)
    p.add_argument("--band", type=_positive, default=DEFAULT_BAND_PCT, help="settling band in %%")
    p.add_argument("--steps-per-delay", type=int, default=DEFAULT_STEPS_PER_DELAY)
    _add_output(p, ["csv", "json"], "csv")

    p = sub.add_parser("compare", help="CHR vs Lambert W gains and simulated metrics")
    _add_plant(p)
    _add_sim_opts(p)
    _add_output(p, ["json", "csv", "table"], "json")
    return parser


@contextlib.contextmanager
def _open_output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _cmd_tune(args) -> str:
    plant = FotdPlant(args.K, args.T, args.L)
    kw = dict(band_pct=args.band, step_h=args.dt, horizon=args.horizon)
    if args.no_overshoot:
        report = tune_no_overshoot(plant, **kw)
    else:
        report = tune_target_overshoot(plant, args.overshoot, **kw)
    return report.to_json() + "\n"


def _cmd_simulate(args, parser) -> str:
    plant = FotdPlant(args.K, args.T, args.L)
    if args.gamma is not None:
        if args.ki is not None:
            parser.error("--ki cannot be combined with --gamma")
        gains = gains_from_gamma(plant, args.gamma)
    else:
        if args.ki is None:
            parser.error("--kp requires --ki")
        gains = PiGains(args.kp, args.ki)
    cfg = SimConfig.for_plant(plant, step_h=args.dt, horizon=args.horizon, loop_form=args.loop)
    resp = simulate(plant, gains, cfg)
    if args.format == "csv":
        return resp.to_csv()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "plant": {"K": plant.K, "T": plant.T, "L": plant.L},
        "gains": {"kp": gains.kp, "ki": gains.ki},
        "gamma": gamma_from_gains(plant, gains).gamma if gains.ki > 0 else None,
        "loop_form": cfg.loop_form.value,
        "step_h": cfg.step_h,
        "t": resp.times.tolist(),
        "y": resp.output_y.tolist(),
        "u": resp.control_u.tolist(),
    }
    try:
        doc["metrics"] = compute_metrics(resp, args.band).to_dict()
    except LambertPIError:
        doc["metrics"] = None
    return json.dumps(doc, allow_nan=False) + "\n"


def _cmd_sweep(args, parser) -> str:
    if not args.gamma_min < args.gamma_max:
        parser.error("--gamma-min must be below --gamma-max")
    if args.steps_per_delay < 1:
        parser.error("--steps-per-delay must be at least 1")
    rows = sweep(args.gamma_min, args.gamma_max, args.step, band_pct=args.band, steps_per_delay=args.steps_per_delay)
    if args.format == "csv":
        return sweep_to_csv(rows)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "rows": [
            {"gamma": r.gamma, "overshoot_pct": r.overshoot_pct, "ts_over_L": r.ts_over_L if r.settled else None}
            for r in rows
        ],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _cmd_compare(args) -> str:
    plant = FotdPlant(args.K, args.T, args.L)
    table = chr_compare(plant, band_pct=args.band, step_h=args.dt, horizon=args.horizon)
    if args.format == "csv":
        return table.to_csv()
    if args.format == "table":
        return table.format_table() + "\n"
    return table.to_json() + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args, parser)
    except SystemExit as exc:
        # argparse usage errors (2), --help and --version (0)
        return exc.code if isinstance(exc.code, int) else 2


def _dispatch(args, parser) -> int:
    try:
        if args.command == "tune":
            text = _cmd_tune(args)
        elif args.command == "simulate":
            text = _cmd_simulate(args, parser)
        elif args.command == "sweep":
            text = _cmd_sweep(args, parser)
        else:
            text = _cmd_compare(args)
    except LambertPIError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return 1
    with _open_output(args.output) as fh:
        fh.write(text)
    return 0


def main(argv=None):
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
