"""Command-line benchmark harness: sweep, phase, plot, and the complexity probe."""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .. import __version__
from .config import ConfigError, load_experiment, load_phase
from .plotting import ParseError, emit_plot_data, render_figures, write_plot_script
from .runner import run_complexity_probe, run_phase_transition, run_sweep


def _add_common(parser, suppress: bool) -> None:
    # subparsers get SUPPRESS defaults so a flag placed before the
    # subcommand is not clobbered by the subparser's parse pass
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(None), metavar="U64",
                        help="override the config file's master_seed")
    parser.add_argument("--jobs", type=int, default=default(1), metavar="N",
                        help="parallel trial workers (never changes numeric output)")
    parser.add_argument("--output-dir", default=default(None), metavar="DIR",
                        help="override the output directory")
    parser.add_argument("--repeats", type=int, default=default(41), metavar="R",
                        help="timing repeats per grid point (probe mode)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gols-bench",
        description="Deterministic sparse-recovery benchmarks (OLS / GOLS / OMP).",
    )
    parser.add_argument("--version", action="version", version=f"gols-bench {__version__}")
    parser.add_argument("--complexity-probe", action="store_true",
                        help="time GOLS across the m grid and report the log-log slope")
    _add_common(parser, suppress=False)

    sub = parser.add_subparsers(dest="command")
    p_sweep = sub.add_parser("sweep", help="run the k (and L) sweep from a config file")
    p_sweep.add_argument("config", help="experiment config with a [sweep] section")
    _add_common(p_sweep, suppress=True)
    p_phase = sub.add_parser("phase", help="run the recovery-vs-n experiment")
    p_phase.add_argument("config", help="experiment config with a [phase] section")
    _add_common(p_phase, suppress=True)
    p_plot = sub.add_parser("plot", help="emit plot data and render figures from an aggregate CSV")
    p_plot.add_argument("aggregate_csv", help="aggregate.csv produced by sweep")
    _add_common(p_plot, suppress=True)
    return parser


def _cmd_sweep(args) -> int:
    spec = load_experiment(args.config, master_seed=args.seed)
    if args.output_dir is not None:
        spec = dataclasses.replace(spec, output_dir=args.output_dir)
    artifacts = run_sweep(spec, jobs=max(1, args.jobs))
    print(f"trial CSV      {artifacts.trial_csv}")
    print(f"aggregate CSV  {artifacts.aggregate_csv}")
    for r in artifacts.reports:
        capped = "  [capped]" if spec.capped(r.k, r.L) else ""
        print(f"  {r.algorithm:<5} k={r.k:<3} L={r.L:<2} trials={r.trials:<5} "
              f"err={r.err:.4f} exact={r.exact_rate:.4f} mse={r.mse:.3e} "
              f"time={r.time_mean * 1e3:.3f}ms{capped}")
    return 0


def _cmd_phase(args) -> int:
    spec = load_phase(args.config, master_seed=args.seed)
    if args.output_dir is not None:
        spec = dataclasses.replace(spec, output_dir=args.output_dir)
    artifacts = run_phase_transition(spec, jobs=max(1, args.jobs))
    print(f"phase CSV  {artifacts.phase_csv}")
    for n, rate in artifacts.rates:
        print(f"  n={n:<4} success_rate={rate:.4f}")
    if artifacts.threshold_n is None:
        print(f"no n reached success_rate >= {1.0 - spec.delta_target:.4f}")
    else:
        print(f"threshold n*={artifacts.threshold_n} "
              f"(first success_rate >= {1.0 - spec.delta_target:.4f})")
    return 0


def _cmd_plot(args) -> int:
    out_dir = (args.output_dir if args.output_dir is not None
               else os.path.dirname(os.path.abspath(args.aggregate_csv)))
    data_paths = emit_plot_data(args.aggregate_csv, output_dir=out_dir)
    figure_paths = render_figures(args.aggregate_csv, output_dir=out_dir)
    script = write_plot_script(out_dir)
    for path in data_paths.values():
        print(f"plot data  {path}")
    for path in figure_paths.values():
        print(f"figure     {path}")
    print(f"script     {script}")
    return 0


def _cmd_probe(args) -> int:
    artifacts = run_complexity_probe(
        output_dir=args.output_dir if args.output_dir is not None else "results",
        repeats=max(3, args.repeats),
        master_seed=args.seed if args.seed is not None else 0,
    )
    print(f"probe CSV  {artifacts.probe_csv}")
    for m, median in artifacts.medians:
        print(f"  m={m:<5} median={median * 1e3:.3f}ms")
    print(f"log-log slope of runtime vs m: {artifacts.slope:.3f}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.complexity_probe:
            return _cmd_probe(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "phase":
            return _cmd_phase(args)
        if args.command == "plot":
            return _cmd_plot(args)
        parser.print_help()
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
