"""Command line front end: ``rqaopt <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 numerical or degenerate input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import export
from .embedding import (EmbeddingParams, cao_dimensions, distance_matrix, embed,
                        mutual_information, select_delay, select_dimension)
from .radius_search import (DegenerateError, SegmentPlan, SurrogateSpec,
                            build_radius_grid, method1, method2, rules_of_thumb)
from .rqa import recurrence_plot, rqa_variables, write_coordinates, write_pbm
from .signal import (DataError, group_distribution, load_csv, operational_filter,
                     split_days, summary_stats)
from .systems import IntegrationError, LorenzParams, lorenz_trajectory

log = logging.getLogger("rqaopt")

EXIT_USAGE = 1
EXIT_NUMERIC = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return v


def _triple(text):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    return tuple(parts)


def _add_input(p, timestamps=False):
    p.add_argument("input", help="CSV file with a header row")
    p.add_argument("--column", default=None,
                   help="value column name or index (default: first column "
                        "that is not 'step' or the timestamp column)")
    p.add_argument("--timestamp-column", default="timestamp" if timestamps else None,
                   help="timestamp column (RFC 3339 or epoch seconds)")
    p.add_argument("--delimiter", default=",")


def _add_selection(p, defaults=True):
    p.add_argument("--max-lag", type=_positive_int, default=50 if defaults else None)
    p.add_argument("--bins", type=_positive_int, default=16 if defaults else None)
    p.add_argument("--d-max", type=_positive_int, default=12 if defaults else None)
    p.add_argument("--cao-theiler", type=_nonneg_int, default=None,
                   help="temporal exclusion for Cao neighbours (default: tau)")


def _add_rqa(p):
    p.add_argument("--theiler", type=_nonneg_int, default=1)
    p.add_argument("--lmin", type=_positive_int, default=2)
    p.add_argument("--vmin", type=_positive_int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rqaopt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lorenz", help="integrate the Lorenz system to CSV")
    p.add_argument("--n", type=_positive_int, default=3000)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--sigma", type=float, default=10.0)
    p.add_argument("--rho", type=float, default=28.0)
    p.add_argument("--beta", type=float, default=8.0 / 3.0)
    p.add_argument("--initial", type=_triple, default=(1.0, 1.0, 1.0))
    p.add_argument("--transient", type=_nonneg_int, default=1000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("preprocess", help="keep operational ('on') readings")
    _add_input(p, timestamps=True)
    p.add_argument("--night-start", default="22:00")
    p.add_argument("--night-end", default="06:00")
    p.add_argument("--split-days", action="store_true",
                   help="add a per-day segment column to the output")
    p.add_argument("--out", required=True, help="filtered CSV; a .json report is written beside it")

    p = sub.add_parser("params", help="select delay and embedding dimension")
    _add_input(p)
    _add_selection(p)
    p.add_argument("--out", required=True,
                   help="output prefix: writes PREFIX.json, PREFIX_mi.csv, PREFIX_cao.csv")

    p = sub.add_parser("sweep", help="optimise the recurrence radius")
    p.add_argument("input", nargs="?", help="CSV file (omit with --config)")
    p.add_argument("--config", help="re-run from the 'config' section of a sweep JSON")
    p.add_argument("--column", default=None)
    p.add_argument("--timestamp-column", default=None)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--method", type=int, choices=(1, 2), default=None)
    p.add_argument("--tau", type=_positive_int, default=None, help="default: MI selection")
    p.add_argument("--dim", type=_positive_int, default=None, help="default: Cao selection")
    p.add_argument("--alpha", type=_nonneg_float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--segments", type=_positive_int, default=None)
    p.add_argument("--segment-length", type=_positive_int, default=None)
    p.add_argument("--surrogates", type=_positive_int, default=None)
    p.add_argument("--grid-step", type=float, default=None)
    p.add_argument("--theiler", type=_nonneg_int, default=None)
    p.add_argument("--lmin", type=_positive_int, default=None)
    p.add_argument("--vmin", type=_positive_int, default=None)
    p.add_argument("--scaling", choices=("standard", "raw"), default=None,
                   help="RQA-space units for distances (default: standard)")
    _add_selection(p, defaults=False)
    p.add_argument("--out", required=True, help="output prefix: writes PREFIX.csv and PREFIX.json")

    p = sub.add_parser("rqa", help="RQA vector at a single radius")
    _add_input(p)
    p.add_argument("--tau", type=_positive_int, default=1)
    p.add_argument("--dim", type=_positive_int, default=1)
    p.add_argument("--epsilon", type=_nonneg_float, required=True)
    _add_rqa(p)
    p.add_argument("--coords", help="write recurrent cells as i,j CSV")
    p.add_argument("--pbm", help="write the plot as a PBM bitmap")
    p.add_argument("--out", default="-")

    p = sub.add_parser("stats", help="per-weekday or per-hour distribution summary")
    _add_input(p, timestamps=True)
    p.add_argument("--key", choices=("day-of-week", "hour-of-day"), default="day-of-week")
    p.add_argument("--out", default="-")
    return parser


def _emit(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        export.atomic_write(path, text)


def _read_header(path: Path, delimiter: str) -> list[str]:
    with path.open(newline="") as fh:
        return [h.strip() for h in fh.readline().rstrip("\r\n").split(delimiter)]


def _load(args, need_timestamps=False):
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    column = args.column
    if column is None:
        header = _read_header(path, args.delimiter)
        skip = {"step", "index", args.timestamp_column}
        candidates = [h for h in header if h not in skip]
        if not candidates:
            raise UsageError("cannot infer value column; pass --column")
        column = candidates[0]
    if need_timestamps and not args.timestamp_column:
        raise UsageError("this command needs --timestamp-column")
    if need_timestamps and args.timestamp_column not in _read_header(path, args.delimiter) \
            and not str(args.timestamp_column).isdigit():
        raise UsageError(f"timestamp column {args.timestamp_column!r} not in {path}")
    return load_csv(path, column, args.timestamp_column, args.delimiter), column


def cmd_lorenz(args):
    params = LorenzParams(args.sigma, args.rho, args.beta, args.dt, args.n,
                          tuple(args.initial), args.transient)
    traj = lorenz_trajectory(params)
    export.atomic_write(args.out, export.trajectory_csv(traj))
    log.info("wrote %d rows to %s", traj.shape[0], args.out)


def cmd_preprocess(args):
    ts, column = _load(args, need_timestamps=True)
    kept, threshold = operational_filter(ts, args.night_start, args.night_end)
    segments = None
    if args.split_days and len(kept):
        segments = np.concatenate([np.full(len(s), k) for k, s in enumerate(split_days(kept))])
    export.atomic_write(args.out, export.series_csv(kept, column, segments))
    report = {
        "threshold": threshold,
        "kept": len(kept),
        "total": len(ts),
        "kept_fraction": len(kept) / len(ts),
        "empty": len(kept) == 0,
        "config": {"input": str(Path(args.input).resolve()), "column": column,
                   "timestamp_column": args.timestamp_column,
                   "night_start": args.night_start, "night_end": args.night_end,
                   "split_days": args.split_days},
    }
    export.atomic_write(Path(args.out).with_suffix(".json"), export.json_text(report))


def select_params(values, max_lag, bins, d_max, cao_theiler):
    max_lag = min(max_lag, values.size - 2)
    curve = mutual_information(values, max_lag, bins)
    tau = select_delay(curve)
    curves = cao_dimensions(values, tau, d_max, cao_theiler)
    return curve, curves, tau, select_dimension(curves)


def cmd_params(args):
    ts, column = _load(args)
    curve, curves, tau, choice = select_params(ts.values, args.max_lag, args.bins,
                                               args.d_max, args.cao_theiler)
    prefix = args.out
    mi_path, cao_path = f"{prefix}_mi.csv", f"{prefix}_cao.csv"
    export.atomic_write(mi_path, export.mi_csv(curve))
    export.atomic_write(cao_path, export.cao_csv(curves))
    report = {
        "tau": tau,
        "D": choice.dim,
        "stochastic_flag": curves.stochastic_flag,
        "stochastic_capped": choice.stochastic_capped,
        "mi_curve_path": mi_path,
        "cao_curve_path": cao_path,
        "config": {"input": str(Path(args.input).resolve()), "column": column,
                   "timestamp_column": args.timestamp_column,
                   "delimiter": args.delimiter, "max_lag": args.max_lag,
                   "bins": args.bins, "d_max": args.d_max,
                   "cao_theiler": args.cao_theiler},
    }
    export.atomic_write(f"{prefix}.json", export.json_text(report))


SWEEP_DEFAULTS = {
    "method": 2, "alpha": 0.2, "seed": 0, "segments": 20, "segment_length": None,
    "surrogates": 10, "grid_step": 0.5, "theiler": 1, "lmin": 2, "vmin": 2,
    "scaling": "standard", "tau": None, "dim": None, "max_lag": 50, "bins": 16,
    "d_max": 12, "cao_theiler": None, "column": None, "timestamp_column": None,
    "delimiter": ",",
}


def _sweep_config(args) -> dict:
    config = dict(SWEEP_DEFAULTS)
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.is_file():
            raise UsageError(f"config file not found: {cfg_path}")
        saved = json.loads(cfg_path.read_text())
        config.update(saved.get("config", saved))
    for key in SWEEP_DEFAULTS:
        val = getattr(args, key)
        if val is not None:
            config[key] = val
    if args.input:
        config["input"] = args.input
    if not config.get("input"):
        raise UsageError("sweep needs an input CSV or --config")
    config["input"] = str(Path(config["input"]).resolve())
    return config


def _derived_seeds(seed: int) -> dict:
    surrogate, segments = np.random.SeedSequence(seed).spawn(2)
    return {"master": int(seed),
            "surrogate": int(surrogate.generate_state(1)[0]),
            "segments": int(segments.generate_state(1)[0])}


def cmd_sweep(args):
    config = _sweep_config(args)
    ns = argparse.Namespace(input=config["input"], column=config["column"],
                            timestamp_column=config["timestamp_column"],
                            delimiter=config["delimiter"])
    ts, column = _load(ns)
    config["column"] = column
    x = ts.values
    if config["tau"] is None or config["dim"] is None:
        _, _, tau, choice = select_params(x, config["max_lag"], config["bins"],
                                          config["d_max"], config["cao_theiler"])
        config["tau"] = config["tau"] or tau
        config["dim"] = config["dim"] or choice.dim
    params = EmbeddingParams(int(config["tau"]), int(config["dim"]))
    seeds = _derived_seeds(int(config["seed"]))
    spec = SurrogateSpec(float(config["alpha"]), seeds["surrogate"], int(config["surrogates"]))
    theiler = int(config["theiler"])
    dm = distance_matrix(embed(x, params))
    grid = build_radius_grid(dm, theiler, float(config["grid_step"]))
    markers = rules_of_thumb(x, dm, theiler)
    common = dict(l_min=int(config["lmin"]), v_min=int(config["vmin"]), theiler=theiler,
                  standardize=config["scaling"] == "standard", rule_markers=markers)
    if int(config["method"]) == 1:
        plan = SegmentPlan(int(config["segments"]), config["segment_length"], seeds["segments"])
        config["segment_length"] = plan.length_for(x.size)
        del dm
        result = method1(x, params, spec, plan, grid, **common)
    else:
        result = method2(x, params, spec, grid, dm=dm, **common)
        del dm
    summary = export.sweep_summary(result, config, seeds)
    export.atomic_write(f"{args.out}.csv", export.sweep_csv(result))
    export.atomic_write(f"{args.out}.json", export.json_text(summary))
    if result.degenerate:
        raise DegenerateError("; ".join(result.notes))


def cmd_rqa(args):
    ts, _ = _load(args)
    dm = distance_matrix(embed(ts, EmbeddingParams(args.tau, args.dim)))
    rp = recurrence_plot(dm, args.epsilon, args.theiler)
    q = rqa_variables(rp, dm, args.lmin, args.vmin)
    if args.coords:
        write_coordinates(rp, args.coords)
    if args.pbm:
        write_pbm(rp, args.pbm)
    _emit(args.out, export.rqa_csv([(args.epsilon, q)]))


def cmd_stats(args):
    ts, _ = _load(args, need_timestamps=True)
    _emit(args.out, export.groups_csv(group_distribution(ts, args.key)))
    s = summary_stats(ts)
    log.info("n=%d mean=%g std=%g min=%g max=%g", s.count, s.mean, s.std_dev, s.min, s.max)


COMMANDS = {"lorenz": cmd_lorenz, "preprocess": cmd_preprocess, "params": cmd_params,
            "sweep": cmd_sweep, "rqa": cmd_rqa, "stats": cmd_stats}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rqaopt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DegenerateError, IntegrationError) as exc:
        print(f"rqaopt: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # parameter validation in the library, e.g. impossible tau/dim
        print(f"rqaopt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
