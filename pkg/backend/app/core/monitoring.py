"""
Solver run metrics.

Counters and histograms are registered on a module-level registry so a benchmark run
can dump them with ``write_to_textfile`` at the end. Per-step counts are accumulated
in ``SearchStats`` and flushed once per solve, keeping the hot loop free of locks.
"""

import time
from contextlib import contextmanager
from typing import Iterator, Optional

import structlog
from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

logger = structlog.get_logger(__name__)

registry = CollectorRegistry()

# ====================
# SOLVER METRICS
# ====================

runs_total = Counter(
    "nrals_runs_total",
    "Solver runs by answer",
    ["answer"],
    registry=registry,
)

steps_total = Counter(
    "nrals_steps_total",
    "Local search steps performed",
    registry=registry,
)

restarts_total = Counter(
    "nrals_restarts_total",
    "Restarts performed",
    ["kind"],
    registry=registry,
)

relaxations_total = Counter(
    "nrals_relaxations_total",
    "Constraint relaxations performed",
    registry=registry,
)

solve_duration = Histogram(
    "nrals_solve_duration_seconds",
    "Wall time of one solve call",
    buckets=[0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0, 300.0],
    registry=registry,
)


class SolveOutcome:
    """Mutable outcome holder filled in by the body of ``track_solve``."""

    def __init__(self) -> None:
        self.answer = "unknown"
        self.steps = 0
        self.minor_restarts = 0
        self.major_restarts = 0
        self.relaxations = 0


def observe_outcome(outcome: SolveOutcome, duration: float) -> None:
    """Record one finished run; used directly for runs done in worker processes."""
    runs_total.labels(answer=outcome.answer).inc()
    steps_total.inc(outcome.steps)
    restarts_total.labels(kind="minor").inc(outcome.minor_restarts)
    restarts_total.labels(kind="major").inc(outcome.major_restarts)
    relaxations_total.inc(outcome.relaxations)
    solve_duration.observe(duration)


@contextmanager
def track_solve(instance: str) -> Iterator[SolveOutcome]:
    """Context manager to track one solver run."""
    start_time = time.perf_counter()
    outcome = SolveOutcome()
    try:
        yield outcome
    except Exception:
        outcome.answer = "error"
        raise
    finally:
        duration = time.perf_counter() - start_time
        observe_outcome(outcome, duration)
        logger.info(
            "Solve finished",
            instance=instance,
            answer=outcome.answer,
            steps=outcome.steps,
            duration_s=round(duration, 4),
        )


def dump_metrics(path: Optional[str]) -> None:
    """Write the registry in Prometheus text format, if a path is given."""
    if path:
        write_to_textfile(path, registry)
        logger.info("Metrics written", path=path)
