#!/usr/bin/env python3
"""CLI entry point for the xi bootstrap toolkit."""

import argparse
import logging
import sys
import traceback
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from src import config
from src.core import (
    DataFileError,
    OracleError,
    ParameterError,
    PreconditionError,
    Statistic,
    TieBreak,
    VerificationError,
    bootstrap_distribution,
    null_p_value,
    xi_n,
)
from src.core.bootstrap import describe
from src.core.model_gen import OracleMethod
from src.sim import (
    Level,
    SimulationConfig,
    load_config_file,
    read_pairs,
    render_record,
    render_simulation,
    render_verification,
    run_simulation,
    verify_theory,
)

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_VERIFICATION = 3
EXIT_IO = 4


def status(message: str) -> None:
    """Progress line for the user; reports themselves go to stdout or --output."""
    print(message, file=sys.stderr)


def emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text, encoding="utf-8")
    except OSError as e:
        raise DataFileError(f"cannot write output: {e.strerror}", output) from e
    status(f"✓ Wrote {output}")


def cmd_xi(args) -> int:
    sample = read_pairs(args.input)
    tie_break = TieBreak.by_index() if args.tie_seed is None else TieBreak.seeded(args.tie_seed)
    summary = xi_n(sample.x, sample.y, tie_break)
    record = {
        "n": sample.n,
        "xi_general": summary.general.value,
        "xi_simple": summary.simple.value if summary.simple else None,
        "p_value_independence": null_p_value(summary.general.value, sample.n),
        "tie_break": str(tie_break),
        "x_distinct": summary.x_ties.n_distinct,
        "x_tied": summary.x_ties.n_tied,
        "y_distinct": summary.y_ties.n_distinct,
        "y_tied": summary.y_ties.n_tied,
        "y_largest_tie_block": summary.y_ties.largest_block,
    }
    emit(render_record(record, args.format or "text", title=f"xi_n for {args.input}"), args.output)
    return EXIT_OK


def cmd_bootstrap(args) -> int:
    sample = read_pairs(args.input)
    status(f"🔁 Drawing {args.boot} bootstrap replicates (n={sample.n})...")
    dist = bootstrap_distribution(sample, args.boot, args.seed, statistic=Statistic(args.statistic))
    record = describe(dist, args.alpha)
    record["alpha"] = args.alpha
    status("⚠️  " + config.INCONSISTENCY_WARNING)
    emit(render_record(record, args.format or "text", title=f"Bootstrap of xi_n for {args.input}",
                       warning=config.INCONSISTENCY_WARNING), args.output)
    return EXIT_OK


def build_simulation_config(args) -> SimulationConfig:
    """Defaults, then command-line flags, then the --config file."""
    base = SimulationConfig.full_scale() if args.full_scale else SimulationConfig()
    overrides = {"master_seed": args.seed, "statistic": Statistic(args.statistic),
                 "oracle_method": OracleMethod(args.oracle)}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.rho:
        overrides["rho_grid"] = args.rho
    if args.n:
        overrides["n_grid"] = args.n
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.boot is not None:
        overrides["bootstrap_size"] = args.boot
    if args.alpha:
        overrides["alphas"] = args.alpha
    sim_config = replace(base, **overrides)
    if args.config:
        sim_config = load_config_file(args.config, sim_config)
    return sim_config


def cmd_simulate(args) -> int:
    sim_config = build_simulation_config(args)
    status(f"🚀 Simulating {len(sim_config.rho_grid)} x {len(sim_config.n_grid)} cells, "
           f"R={sim_config.replications}, B={sim_config.bootstrap_size}, "
           f"workers={sim_config.workers}")
    result = run_simulation(sim_config)
    emit(render_simulation(result, args.format or "csv"), args.output)
    status("⚠️  " + config.INCONSISTENCY_WARNING)
    return EXIT_OK


def cmd_verify(args) -> int:
    level = Level(args.level)
    status(f"🔍 Running {level.value} theory verification (seed={args.seed})...")
    report = verify_theory(level, args.seed)
    emit(render_verification(report, args.format or "text"), args.output)
    if not report.passed:
        raise VerificationError(report.failures)
    status(f"✓ {len(report.checks)} checks passed in {report.elapsed:.1f}s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=config.MASTER_SEED, help="root random seed")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default $XI_BOOT_WORKERS or 1)")
    common.add_argument("--output", "-o", default=None, help="write the report to this file")
    common.add_argument("--format", choices=["text", "csv", "json"], default=None)
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="xi-boot",
        description="Chatterjee's xi_n, its standard bootstrap, and the simulation study.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("xi", parents=[common], help="xi_n of a two-column data file")
    p.add_argument("input")
    p.add_argument("--tie-seed", type=int, default=None,
                   help="break x ties by a seeded shuffle instead of index order")
    p.set_defaults(handler=cmd_xi)

    p = sub.add_parser("bootstrap", parents=[common], help="bootstrap diagnostics for a data file")
    p.add_argument("input")
    p.add_argument("--boot", "-B", type=int, default=config.BOOTSTRAP_SIZE)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--statistic", choices=[s.value for s in Statistic],
                   default=config.DEFAULT_STATISTIC)
    p.set_defaults(handler=cmd_bootstrap)

    p = sub.add_parser("simulate", parents=[common], help="run the bootstrap simulation study")
    p.add_argument("--rho", type=float, action="append", help="correlation (repeatable)")
    p.add_argument("--n", type=int, action="append", help="sample size (repeatable)")
    p.add_argument("--reps", type=int, default=None, help="replications R per cell")
    p.add_argument("--boot", type=int, default=None, help="bootstrap size B")
    p.add_argument("--alpha", type=float, action="append", help="interval level (repeatable)")
    p.add_argument("--statistic", choices=[s.value for s in Statistic],
                   default=config.DEFAULT_STATISTIC)
    p.add_argument("--oracle", choices=[m.value for m in OracleMethod],
                   default=OracleMethod.INTEGRATION.value)
    p.add_argument("--full-scale", action="store_true",
                   help=f"n in {config.FULL_SCALE_N_GRID}, R = B = {config.FULL_SCALE_REPLICATIONS}")
    p.add_argument("--config", default=None, help="key = value file; overrides flags")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("verify-theory", parents=[common], help="check closed forms against oracles")
    p.add_argument("--level", choices=[lv.value for lv in Level], default=Level.FAST.value)
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_PARAMETER
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (ParameterError, PreconditionError) as e:
        status(f"❌ {e}")
        return EXIT_PARAMETER
    except VerificationError as e:
        status(f"❌ {e}")
        return EXIT_VERIFICATION
    except (DataFileError, OSError) as e:
        status(f"❌ {e}")
        return EXIT_IO
    except OracleError as e:
        status(f"❌ {e}")
        return 1


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\n⏹️  Interrupted by user.")
        sys.exit(0)
    except Exception as e:
        print(f"\n❌ Error: {e}")
        traceback.print_exc()
        sys.exit(1)
