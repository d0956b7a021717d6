"""
Running the solver on files and directories of SMT-LIB scripts.

``run_file`` drives one instance through parse, preprocess, search and verification
and returns a ``RunRecord`` with the process exit code. ``run_suite`` does the same for
every ``*.smt2`` file of a directory, optionally in a process pool, and writes one CSV
row per instance plus a TOTAL row.

Example:
    from app.schemas.run import RunConfig
    from app.services.benchmark import run_suite
    frame = run_suite("backend/benchmarks/curated", RunConfig(), csv_path="out.csv")
"""

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, TextIO, Union

import pandas as pd
import structlog

from app.core.errors import PreprocessContradiction, SmtParseError
from app.core.monitoring import SolveOutcome, observe_outcome, track_solve
from app.models.formula import Assignment
from app.schemas.run import CSV_COLUMNS, RunConfig, RunRecord
from app.services.model_printer import format_model
from app.services.preprocess import back_substitute, preprocess
from app.services.search import LocalSearch
from app.services.smt_parser import parse_file
from app.services.verify import independent_check, verify_model

logger = structlog.get_logger(__name__)

EXIT_SAT = 0
EXIT_UNKNOWN = 1
EXIT_INPUT_ERROR = 2


@dataclass
class FileOutcome:
    record: RunRecord
    exit_code: int
    model: Optional[str] = None
    error: Optional[str] = None


def derive_seed(name: str, seed: int) -> int:
    """Stable per-instance seed."""
    digest = hashlib.sha256(f"{name}:{seed}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def run_file(
    path: Union[str, Path],
    config: RunConfig,
    *,
    seed: Optional[int] = None,
    trace: Optional[TextIO] = None,
) -> FileOutcome:
    """Solve one instance.

    Input errors do not raise: they come back as answer "error" with exit code 2.
    """
    path = Path(path)
    params = config.search_params()
    if seed is not None:
        params = params.model_copy(update={"seed": seed})
    started = time.perf_counter()
    log = logger.bind(instance=path.name)

    with track_solve(path.name) as outcome:
        try:
            parsed = parse_file(path)
        except (SmtParseError, OSError, UnicodeDecodeError) as exc:
            log.error("Cannot read instance", error=str(exc))
            outcome.answer = "error"
            record = RunRecord(
                instance=path.name, answer="error", time_s=time.perf_counter() - started
            )
            return FileOutcome(record, EXIT_INPUT_ERROR, error=str(exc))

        original = parsed.problem
        try:
            pre = preprocess(original)
        except PreprocessContradiction as exc:
            log.info("Preprocessing derived a contradiction", error=str(exc))
            record = RunRecord(
                instance=path.name, answer="unknown", time_s=time.perf_counter() - started
            )
            return FileOutcome(record, EXIT_UNKNOWN)

        def accept(asg: Assignment) -> bool:
            return verify_model(original.clauses, back_substitute(pre, asg))

        search = LocalSearch(
            pre.problem,
            params,
            rational_only=pre.rational_only,
            accept=accept,
            trace=trace,
        )
        result = search.solve()
        stats = result.stats
        outcome.steps = stats.steps
        outcome.minor_restarts = stats.minor_restarts
        outcome.major_restarts = stats.major_restarts
        outcome.relaxations = stats.relaxations

        answer = "unknown"
        model_text = None
        if result.is_sat:
            assert result.assignment is not None
            full = back_substitute(pre, result.assignment)
            answer = "sat"
            if config.verify and independent_check(parsed, full) is False:
                log.error("Independent evaluation rejected the model")
                answer = "unknown"
            else:
                model_text = format_model(full, original.real_names, original.bool_names)
        outcome.answer = answer

    record = RunRecord(
        instance=path.name,
        answer=answer,
        time_s=round(time.perf_counter() - started, 6),
        steps=stats.steps,
        minor_restarts=stats.minor_restarts,
        major_restarts=stats.major_restarts,
        relaxations=stats.relaxations,
        verified=answer == "sat",
    )
    return FileOutcome(record, EXIT_SAT if answer == "sat" else EXIT_UNKNOWN, model_text)


def _run_instance(path: str, config: RunConfig) -> RunRecord:
    name = Path(path).name
    try:
        return run_file(path, config, seed=derive_seed(name, config.params.seed)).record
    except Exception:
        logger.exception("Instance failed", instance=name)
        return RunRecord(instance=name, answer="error", time_s=0.0)


def _observe(record: RunRecord) -> None:
    outcome = SolveOutcome()
    outcome.answer = record.answer
    outcome.steps = record.steps
    outcome.minor_restarts = record.minor_restarts
    outcome.major_restarts = record.major_restarts
    outcome.relaxations = record.relaxations
    observe_outcome(outcome, record.time_s)


def records_frame(records: List[RunRecord]) -> pd.DataFrame:
    """One row per record plus a TOTAL row; header only when there are no records."""
    frame = pd.DataFrame([r.model_dump() for r in records], columns=CSV_COLUMNS)
    if not records:
        return frame
    solved = sum(1 for r in records if r.answer == "sat")
    total = {
        "instance": "TOTAL",
        "answer": f"{solved}/{len(records)}",
        "time_s": round(float(frame["time_s"].sum()), 6),
        "steps": int(frame["steps"].sum()),
        "minor_restarts": int(frame["minor_restarts"].sum()),
        "major_restarts": int(frame["major_restarts"].sum()),
        "relaxations": int(frame["relaxations"].sum()),
        "verified": all(r.verified for r in records if r.answer == "sat"),
    }
    return pd.concat([frame, pd.DataFrame([total], columns=CSV_COLUMNS)], ignore_index=True)


def run_suite(
    directory: Union[str, Path],
    config: RunConfig,
    csv_path: Optional[Union[str, Path]] = None,
) -> pd.DataFrame:
    """Run every .smt2 file under directory; a failing instance is recorded, never raised."""
    paths = sorted(str(p) for p in Path(directory).glob("*.smt2"))
    logger.info("Starting suite", directory=str(directory), instances=len(paths), jobs=config.jobs)

    records: List[RunRecord] = []
    if config.jobs > 1 and len(paths) > 1:
        pool = ProcessPoolExecutor(max_workers=config.jobs)
    else:
        pool = None
    with pool if pool is not None else nullcontext():
        if pool is None:
            records = [_run_instance(p, config) for p in paths]
        else:
            futures = [pool.submit(_run_instance, p, config) for p in paths]
            for fut in futures:
                record = fut.result()
                _observe(record)
                records.append(record)

    frame = records_frame(records)
    if csv_path is not None:
        frame.to_csv(csv_path, index=False)
        logger.info("Suite results written", path=str(csv_path))
    solved = sum(1 for r in records if r.answer == "sat")
    logger.info("Suite finished", solved=solved, instances=len(records))
    return frame


__all__ = [
    "EXIT_INPUT_ERROR",
    "EXIT_SAT",
    "EXIT_UNKNOWN",
    "FileOutcome",
    "derive_seed",
    "records_frame",
    "run_file",
    "run_suite",
]
