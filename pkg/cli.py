"""
Command-line front end for the smacof engine.

Subcommands: fit, init, plot, bench, validate. Exit codes:
  0 success, 1 validation violations, 2 bad flags, 3 data errors, 4 engine errors.
"""
import argparse
import json
import logging
import os
import statistics
import sys
import time
from datetime import datetime
from typing import List, Optional

import numpy as np
from pydantic import ValidationError
from pythonjsonlogger import jsonlogger

from config import BENCH_REPETITIONS, DEFAULT_SEED, LOG_DIR, LOG_LEVEL
from models import BenchReport, EngineConfig, InitResult, MDSData, MDSResult
from services.engine import PhaseTimer, SmacofEngine
from services.errors import EngineError, MDSDataError, PlotError
from services.initial import INITIALIZERS, full_dim_init, random_init
from services.mds_data import make_mds_data, matrix_print, power_weights, read_dist_file, validate
from services.plots import write_plots

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_BAD_FLAGS = 2
EXIT_DATA_ERROR = 3
EXIT_ENGINE_ERROR = 4

DEFAULTS = EngineConfig()

logger = logging.getLogger("smacof")


def setup_logging(level: str = LOG_LEVEL, log_dir: Optional[str] = LOG_DIR):
    """Console logging on stderr; JSON lines in a timestamped file when log_dir is set"""
    handlers = [logging.StreamHandler(sys.stderr)]
    handlers[0].setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))

    log_file = None
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        log_file = os.path.join(log_dir, f"smacof_{timestamp}.log")
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(jsonlogger.JsonFormatter('%(asctime)s %(name)s %(levelname)s %(message)s'))
        file_handler.setLevel(logging.DEBUG)
        handlers.append(file_handler)

    handlers[0].setLevel(level)
    logging.basicConfig(level=logging.DEBUG if log_file else level, handlers=handlers, force=True)
    if log_file:
        logger.info(f"Logging configured. Log file: {log_file}")


def _add_data_args(parser: argparse.ArgumentParser):
    parser.add_argument("--delta", required=True, metavar="PATH", help="lower-triangle dissimilarity file")
    weights = parser.add_mutually_exclusive_group()
    weights.add_argument("--weights", metavar="PATH", help="lower-triangle weight file (0 or NA drops a cell)")
    weights.add_argument("--weight-power", type=float, metavar="P", help="use weights delta**P")


def _add_engine_args(parser: argparse.ArgumentParser):
    parser.add_argument("--ndim", type=int, default=DEFAULTS.ndim, help="dimensionality (default: %(default)s)")
    parser.add_argument("--ordinal", action="store_true", help="ordinal instead of numerical (default: numerical)")
    parser.add_argument("--ties", type=int, choices=[1, 2, 3], default=None,
                        help=f"tie approach, 1 primary, 2 secondary, 3 tertiary; only with --ordinal (default: {DEFAULTS.ties})")
    parser.add_argument("--weighted", action="store_true", help="weighted least squares (default: unweighted)")
    parser.add_argument("--itmax", type=int, default=DEFAULTS.itmax, help="maximum number of iterations (default: %(default)s)")
    parser.add_argument("--eps", type=float, default=DEFAULTS.eps, help="stop when stress decreases less than this (default: %(default)s)")
    parser.add_argument("--verbose", action="store_true", help="print stress for each iteration to stdout")
    parser.add_argument("--digits", type=int, default=DEFAULTS.digits, help="digits of verbose stress (default: %(default)s)")
    parser.add_argument("--width", type=int, default=DEFAULTS.width, help="width of verbose stress (default: %(default)s)")
    start = parser.add_mutually_exclusive_group()
    start.add_argument("--init-method", choices=sorted(INITIALIZERS), default="torgerson",
                       help="initial configuration (default: %(default)s)")
    start.add_argument("--init-file", metavar="PATH", help="JSON result whose conf is the initial configuration")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed of the random start (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smacof", description="Square symmetric SMACOF multidimensional scaling")
    parser.add_argument("--log-level", default=None, help=f"console log level (default: {LOG_LEVEL})")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="run the engine and write the result as JSON")
    _add_data_args(fit)
    _add_engine_args(fit)
    fit.add_argument("--plots", metavar="STEM", help="also write <STEM>-shepard.svg, -conf.svg, -distdhat.svg")
    fit.add_argument("--out", metavar="PATH", help="result file (default: stdout)")

    init = sub.add_parser("init", help="compute an initial configuration")
    _add_data_args(init)
    init.add_argument("--method", choices=sorted(INITIALIZERS), default="torgerson", help="(default: %(default)s)")
    init.add_argument("--ndim", type=int, default=DEFAULTS.ndim, help="dimensionality (default: %(default)s)")
    init.add_argument("--weighted", action="store_true", help="weighted engine for fulldim, weighted stress for random")
    init.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed of the random method (default: %(default)s)")
    init.add_argument("--plots", metavar="STEM")
    init.add_argument("--out", metavar="PATH", help="result file (default: stdout)")

    plot = sub.add_parser("plot", help="plot a stored fit or init result")
    plot.add_argument("--result", required=True, metavar="PATH")
    plot.add_argument("--plots", required=True, metavar="STEM")
    plot.add_argument("--labels", metavar="PATH", help="text file with one object label per line")
    plot.add_argument("--dim1", type=int, default=1)
    plot.add_argument("--dim2", type=int, default=2)
    plot.add_argument("--no-fitlines", action="store_true")
    plot.add_argument("--colline", default="RED")
    plot.add_argument("--colpoint", default="BLUE")

    bench = sub.add_parser("bench", help="time repeated fits")
    _add_data_args(bench)
    _add_engine_args(bench)
    bench.add_argument("--repetitions", type=int, default=BENCH_REPETITIONS, help="(default: %(default)s)")
    bench.add_argument("--out", metavar="PATH", help="report file (default: stdout)")

    check = sub.add_parser("validate", help="check data files or a stored data structure")
    source = check.add_mutually_exclusive_group(required=True)
    source.add_argument("--delta", metavar="PATH")
    source.add_argument("--mds-data", metavar="PATH", help="JSON data structure")
    check.add_argument("--weights", metavar="PATH")
    check.add_argument("--print", action="store_true", help="print the data structure")
    return parser


def engine_config(args: argparse.Namespace) -> EngineConfig:
    return EngineConfig(
        ndim=args.ndim,
        ties=args.ties if args.ties is not None else DEFAULTS.ties,
        weighted=args.weighted,
        ordinal=args.ordinal,
        itmax=args.itmax,
        eps=args.eps,
        digits=args.digits,
        width=args.width,
        verbose=args.verbose,
    )


def load_data(args: argparse.Namespace) -> MDSData:
    delta = read_dist_file(args.delta)
    weights = None
    if getattr(args, "weights", None):
        weights = read_dist_file(args.weights)
    elif getattr(args, "weight_power", None) is not None:
        weights = power_weights(delta, args.weight_power)
    return make_mds_data(delta, weights)


def _write_json(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logger.info(f"Wrote {path}")
    else:
        print(text)


def _read_result(path: str):
    """A stored init or fit result; files that are neither are data errors"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        if not isinstance(raw, dict):
            raise MDSDataError(f"{path} does not hold a JSON object")
        return InitResult.model_validate(raw) if "method" in raw else MDSResult.model_validate(raw)
    except (ValidationError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MDSDataError(f"{path} is neither a fit nor an init result: {e}") from e


def _start_configuration(args: argparse.Namespace, data: MDSData, cfg: EngineConfig):
    if args.init_file:
        return _read_result(args.init_file).conf
    if args.init_method == "torgerson":
        return None
    if args.init_method == "random":
        return random_init(data, cfg.ndim, args.seed, weighted=cfg.weighted).conf
    if args.init_method == "fulldim":
        return full_dim_init(data, cfg.ndim, weighted=cfg.weighted).conf
    return INITIALIZERS[args.init_method](data, cfg.ndim).conf


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = engine_config(args)
    data = load_data(args)
    xinit = _start_configuration(args, data, cfg)
    result = SmacofEngine(cfg).run(data, xinit=xinit)
    _write_json(result.model_dump_json(indent=2), args.out)
    if args.plots:
        write_plots(result, args.plots)
    return EXIT_OK


def cmd_init(args: argparse.Namespace) -> int:
    data = load_data(args)
    if args.method == "random":
        result = random_init(data, args.ndim, args.seed, weighted=args.weighted)
    elif args.method == "fulldim":
        result = full_dim_init(data, args.ndim, weighted=args.weighted)
    else:
        result = INITIALIZERS[args.method](data, args.ndim)
    _write_json(result.model_dump_json(indent=2), args.out)
    if args.plots:
        write_plots(result, args.plots)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    result = _read_result(args.result)
    labels = None
    if args.labels:
        with open(args.labels, "r", encoding="utf-8") as f:
            labels = [line.strip() for line in f if line.strip()]
    write_plots(
        result,
        args.plots,
        fitlines=not args.no_fitlines,
        colline=args.colline,
        colpoint=args.colpoint,
        dim1=args.dim1,
        dim2=args.dim2,
        labels=labels,
    )
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Time repeated fits; per-phase seconds are medians over the repetitions."""
    if args.repetitions < 1:
        raise ValueError(f"--repetitions must be positive, got {args.repetitions}")
    cfg = engine_config(args).model_copy(update={"verbose": False})
    data = load_data(args)
    xinit = _start_configuration(args, data, cfg)
    engine = SmacofEngine(cfg)

    samples = []
    phases = {name: [] for name in PhaseTimer.PHASES}
    result = None
    for rep in range(args.repetitions):
        timer = PhaseTimer()
        start = time.perf_counter()
        result = engine.run(data, xinit=xinit, timer=timer)
        samples.append(time.perf_counter() - start)
        for name, seconds in timer.totals.items():
            phases[name].append(seconds)
        logger.debug(f"Repetition {rep + 1}: {samples[-1]:.6f}s")

    report = BenchReport(
        repetitions=args.repetitions,
        niter=result.niter,
        stress=result.stress,
        min_seconds=min(samples),
        median_seconds=statistics.median(samples),
        max_seconds=max(samples),
        phases={name: statistics.median(values) for name, values in phases.items()},
    )
    _write_json(report.model_dump_json(indent=2), args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    if args.mds_data:
        with open(args.mds_data, "r", encoding="utf-8") as f:
            try:
                data = MDSData.model_validate_json(f.read())
            except (ValidationError, UnicodeDecodeError) as e:
                raise MDSDataError(f"{args.mds_data} is not an MDS data structure: {e}") from e
    else:
        delta = read_dist_file(args.delta)
        weights = read_dist_file(args.weights) if args.weights else None
        try:
            data = make_mds_data(delta, weights)
        except MDSDataError as e:
            print(f"violation: {e}")
            return EXIT_VIOLATIONS

    violations = validate(data)
    for violation in violations:
        print(f"violation: {violation}")
    if args.print and not violations:
        for name in ("iind", "jind", "delta", "blocks", "weights"):
            print(f"${name}")
            print(matrix_print(getattr(data, name), digits=0 if name in ("iind", "jind", "blocks") else 6, width=4, flag=""))
        print(f"$nobj\n{data.nobj}\n$ndat\n{data.ndat}")
    return EXIT_VIOLATIONS if violations else EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "init": cmd_init,
    "plot": cmd_plot,
    "bench": cmd_bench,
    "validate": cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "ties", None) is not None and not args.ordinal:
            parser.error("--ties is only meaningful with --ordinal")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_BAD_FLAGS

    level = args.log_level.upper() if args.log_level else LOG_LEVEL
    if not isinstance(logging.getLevelName(level), int):
        print(f"error: unknown log level '{args.log_level}'", file=sys.stderr)
        return EXIT_BAD_FLAGS
    setup_logging(level)
    logger.info(f"Running '{args.command}'")

    try:
        return COMMANDS[args.command](args)
    except (MDSDataError, OSError) as e:
        return _fail(e, EXIT_DATA_ERROR)
    except (EngineError, PlotError) as e:
        return _fail(e, EXIT_ENGINE_ERROR)
    except (ValidationError, ValueError) as e:
        return _fail(e, EXIT_BAD_FLAGS)


def _fail(error: Exception, code: int) -> int:
    logger.error(f"Command failed: {error}", exc_info=True)
    print(f"error: {error}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
