# backend/app/main.py
# nrals - local search for quantifier-free nonlinear real arithmetic

import argparse
import logging
import sys
from contextlib import nullcontext
from typing import List, Optional

import structlog
from pydantic import ValidationError

from app.core.config import SolverSettings, get_settings
from app.core.monitoring import dump_metrics
from app.schemas.run import RunConfig, SearchParams
from app.services.benchmark import EXIT_INPUT_ERROR, run_file, run_suite


def configure_logging(level: str, as_json: bool) -> None:
    """Structured logging to stderr; stdout carries only answers and models."""
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level), format="%(message)s")
    logging.getLogger().setLevel(getattr(logging, level))
    renderer = (
        structlog.processors.JSONRenderer()
        if as_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


logger = structlog.get_logger()


def _add_common(parser: argparse.ArgumentParser) -> None:
    limits = parser.add_argument_group("limits")
    limits.add_argument("--timeout", type=float, dest="timeout_s", help="wall-clock seconds per instance")
    limits.add_argument("--max-steps", type=int, dest="max_steps")
    limits.add_argument("--seed", type=int)

    tuning = parser.add_argument_group("search parameters")
    tuning.add_argument("--sp", help="smoothing probability, e.g. 0.006 or 3/500")
    tuning.add_argument("--t1", type=int, help="non-improving steps before a minor restart")
    tuning.add_argument("--t2", type=int, help="minor restarts before a major restart")
    tuning.add_argument("--eps-v", dest="eps_v", help="value complexity threshold")
    tuning.add_argument("--eps-p", dest="eps_p", help="relaxation slack")
    tuning.add_argument("--relax-against", dest="relax_against", choices=["every", "some"])
    tuning.add_argument("--limit-unsat", type=int, dest="limit_unsat")
    tuning.add_argument(
        "--boundary-container", dest="boundary_container", choices=["sorted", "linear"]
    )

    modes = parser.add_argument_group("modes")
    modes.add_argument("--no-incremental", action="store_true")
    modes.add_argument("--no-relax", action="store_true")
    modes.add_argument("--full-order", action="store_true")
    modes.add_argument("--no-verify", action="store_true")

    output = parser.add_argument_group("output")
    output.add_argument("--log-json", action=argparse.BooleanOptionalAction, default=None)
    output.add_argument(
        "--log-level", type=str.upper, choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    )
    output.add_argument("--metrics-file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrals", description="Local search for QF_NRA satisfiability"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one SMT-LIB file")
    solve.add_argument("path")
    solve.add_argument("--trace", help="write one line per performed move")
    solve.add_argument("--json", action="store_true", help="also print the run record as JSON")
    _add_common(solve)

    bench = sub.add_parser("bench", help="solve every .smt2 file of a directory")
    bench.add_argument("path")
    bench.add_argument("--csv", help="CSV output path (stdout if omitted)")
    bench.add_argument("--jobs", type=int, default=1)
    _add_common(bench)
    return parser


def build_config(args: argparse.Namespace, settings: SolverSettings) -> RunConfig:
    overrides = {
        name: getattr(args, name)
        for name in (
            "timeout_s",
            "max_steps",
            "seed",
            "sp",
            "t1",
            "t2",
            "eps_v",
            "eps_p",
            "relax_against",
            "limit_unsat",
            "boundary_container",
        )
    }
    params = SearchParams.from_settings(settings, **overrides)
    return RunConfig(
        paths=[args.path],
        params=params,
        no_incremental=args.no_incremental,
        no_relax=args.no_relax,
        full_order=args.full_order,
        verify=not args.no_verify,
        output="json" if getattr(args, "json", False) else "human",
        trace_path=getattr(args, "trace", None),
        jobs=getattr(args, "jobs", 1),
    )


def _solve(config: RunConfig) -> int:
    trace_cm = open(config.trace_path, "w", encoding="utf-8") if config.trace_path else nullcontext()
    with trace_cm as trace:
        outcome = run_file(config.paths[0], config, trace=trace)
    if outcome.error is not None:
        print(f"error: {outcome.error}", file=sys.stderr)
        return outcome.exit_code
    print(outcome.record.answer)
    if outcome.model is not None:
        print(outcome.model)
    if config.output == "json":
        print(outcome.record.model_dump_json())
    return outcome.exit_code


def _bench(config: RunConfig, csv_path: Optional[str]) -> int:
    frame = run_suite(config.paths[0], config, csv_path)
    if csv_path is None:
        sys.stdout.write(frame.to_csv(index=False))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
        if args.log_level is not None or args.log_json is not None:
            settings = settings.model_copy(
                update={
                    k: v
                    for k, v in (("LOG_LEVEL", args.log_level), ("LOG_JSON", args.log_json))
                    if v is not None
                }
            )
        configure_logging(settings.LOG_LEVEL.upper(), settings.LOG_JSON)
        config = build_config(args, settings)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    logger.info("Starting nrals", command=args.command, path=args.path)
    try:
        if args.command == "solve":
            code = _solve(config)
        else:
            code = _bench(config, args.csv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    finally:
        dump_metrics(args.metrics_file)
    return code


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
