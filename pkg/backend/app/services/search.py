"""
Local search over exact assignments.

Each step performs the best make-break move if it improves; otherwise clause weights
are updated and up to three critical moves on random unsatisfied clauses are tried,
falling back to a heuristic move for a stuck literal. While ``use_slack`` is set, a
one-point move to a value more complex than the threshold relaxes the contributing
clauses instead of being performed. Once every clause holds under the relaxed reading
the originals are restored and the search continues towards an exact model.

Example:
    from app.services.search import LocalSearch
    result = LocalSearch(problem, SearchParams(seed=3, max_steps=10_000)).solve()
    result.answer, result.assignment
"""

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, FrozenSet, List, Optional, TextIO

import structlog

from app.core.errors import MoveUnavailable
from app.models.formula import Assignment, Problem
from app.models.intervals import IntervalSet
from app.models.numeric import Complexity, Value, cmp_complexity, exceeds_threshold
from app.schemas.run import SearchParams, ValuePreference
from app.services.model_printer import format_value
from app.services.scoreboard import Move, MoveKind, Scoreboard, ScoreboardOptions
from app.services.stuck import lookahead_pick, movable_vars, stuck_candidates
from app.services.verify import verify_model

logger = structlog.get_logger(__name__)

CRITICAL_ATTEMPTS = 3


@dataclass
class SearchStats:
    steps: int = 0
    minor_restarts: int = 0
    major_restarts: int = 0
    relaxations: int = 0
    restorations: int = 0
    paws_updates: int = 0
    heuristic_moves: int = 0
    elapsed_s: float = 0.0


@dataclass
class SearchResult:
    answer: str
    assignment: Optional[Assignment] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def is_sat(self) -> bool:
        return self.answer == "sat"


def initial_assignment(problem: Problem) -> Assignment:
    """Reals at 0, booleans true."""
    return Assignment(
        {b: True for b in range(len(problem.bool_names))},
        {x: Fraction(0) for x in range(len(problem.real_names))},
    )


class LocalSearch:
    def __init__(
        self,
        problem: Problem,
        params: Optional[SearchParams] = None,
        *,
        rational_only: FrozenSet[int] = frozenset(),
        accept: Optional[Callable[[Assignment], bool]] = None,
        trace: Optional[TextIO] = None,
        move_hook: Optional[Callable[["LocalSearch", int, Value], None]] = None,
    ) -> None:
        self.problem = problem
        self.params = params or SearchParams()
        self.rng = random.Random(self.params.seed)
        self.asg = initial_assignment(problem)
        self.initial = self.asg.copy()
        self.accept = accept or (lambda asg: verify_model(problem.clauses, asg))
        self.trace = trace
        self.move_hook = move_hook

        preference = self.params.preference
        self.relaxation_enabled = preference is ValuePreference.RELAXATION
        options = ScoreboardOptions(
            eps_p=self.params.eps_p,
            incremental=self.params.incremental,
            limit_unsat=self.params.limit_unsat,
            container=self.params.boundary_container,
            value_cap=self.params.eps_v if preference is ValuePreference.THRESHOLD else None,
            simplest_first=preference is ValuePreference.FULL_ORDER,
            rational_only=rational_only,
        )
        self.sb = Scoreboard(problem, self.asg, self.rng, options)
        self.stats = SearchStats()
        self.use_slack = False
        self._set_slack(self.relaxation_enabled)
        self.non_improving = 0
        self.minor_count = 0
        self.best_seen = self.sb.unsat_weight()

    # ====================
    # MODE CONTROL
    # ====================

    def _set_slack(self, on: bool) -> None:
        self.use_slack = on
        self.sb.interval_cap = self.params.eps_v if on else None

    def _more_complex_than_assigned(self, x: int, v: Value) -> bool:
        others = [w for y, w in self.asg.reals.items() if y != x]
        succ = [cmp_complexity(v, w) is Complexity.SUCC for w in others]
        if self.params.relax_against == "some":
            return any(succ)
        return all(succ)

    def maybe_relax(self, move: Move) -> bool:
        """Relax the clauses behind move instead of performing it; True if relaxed."""
        if not (self.use_slack and move.kind is MoveKind.REAL and move.one_point):
            return False
        assert move.value is not None
        if not exceeds_threshold(move.value, self.params.eps_v):
            return False
        if not self._more_complex_than_assigned(move.var, move.value):
            return False
        relaxed = 0
        for cid in sorted(move.cids):
            relaxed += len(self.sb.relax(cid))
        if not relaxed:
            return False
        self.stats.relaxations += 1
        logger.info(
            "Relaxed constraints",
            var=self.problem.real_names[move.var],
            clauses=sorted(move.cids),
            step=self.stats.steps,
        )
        return True

    def _beyond_slack(self, move: Move) -> bool:
        if not (self.use_slack and move.kind is MoveKind.REAL):
            return False
        assert move.value is not None
        return exceeds_threshold(move.value, self.params.eps_v)

    def restore(self) -> None:
        self.sb.restore()
        self._set_slack(False)
        self.stats.restorations += 1
        self.non_improving = 0
        self.best_seen = self.sb.unsat_weight()
        logger.info("Restored relaxed constraints", step=self.stats.steps)

    # ====================
    # MOVES
    # ====================

    def _emit(self, name: str, old: str, new: str, score: int) -> None:
        assert self.trace is not None
        self.trace.write(
            f"step={self.stats.steps} var={name} old={old} new={new} score={score}\n"
        )

    def set_real(self, x: int, v: Value) -> None:
        before = self.sb.unsat_weight()
        old = self.asg.reals[x]
        self.asg.reals[x] = v
        self.sb.on_move(x)
        if self.move_hook is not None:
            self.move_hook(self, x, v)
        if self.trace is not None:
            score = before - self.sb.unsat_weight()
            self._emit(self.problem.real_names[x], format_value(old), format_value(v), score)

    def flip(self, b: int) -> None:
        before = self.sb.unsat_weight()
        old = self.asg.bools[b]
        self.asg.bools[b] = not old
        self.sb.on_move(b, is_bool=True)
        if self.trace is not None:
            score = before - self.sb.unsat_weight()
            self._emit(self.problem.bool_names[b], str(old).lower(), str(not old).lower(), score)

    def perform(self, move: Move) -> bool:
        """Apply move unless it triggers relaxation or is too complex while slack is on."""
        if self.maybe_relax(move):
            return False
        if self._beyond_slack(move):
            logger.debug("Discarded complex move", var=move.var, step=self.stats.steps)
            return False
        if move.kind is MoveKind.FLIP:
            self.flip(move.var)
        else:
            assert move.value is not None
            self.set_real(move.var, move.value)
        return True

    def heuristic_move(self) -> None:
        """Change a variable of a random unsatisfied clause, preferring stuck-literal candidates."""
        cid = self.rng.choice(list(self.sb.unsat))
        cls = self.problem.clauses[cid]
        arith = [i for i, lit in enumerate(cls.literals) if lit.is_arith]
        self.stats.heuristic_moves += 1
        if not arith:
            self.flip(self.rng.choice(sorted(cls.bool_vars)))
            return
        i = self.rng.choice(arith)
        lit = cls.literals[i]
        movable = movable_vars(lit, self.asg)
        if not movable:
            x = self.rng.choice(sorted(lit.real_vars))
            self.set_real(x, self._random_integer(x))
            return
        x = self.rng.choice(movable)
        relaxed = (cid, i) in self.sb.relaxed
        capped = None
        if self.use_slack or self.params.preference is ValuePreference.THRESHOLD:
            capped = self.params.eps_v
        x, values = stuck_candidates(
            lit,
            self.asg,
            self.rng,
            relaxed=relaxed,
            eps_p=self.params.eps_p,
            offset=self.params.boundary_offset,
            resolution=self.params.uniform_resolution,
            allowed=self._allowed(x),
            value_cap=capped,
            var=x,
        )
        v = lookahead_pick(
            lit, self.asg, x, values, self.rng, relaxed=relaxed, eps_p=self.params.eps_p
        )
        self.set_real(x, v)

    def _allowed(self, x: int) -> Optional[IntervalSet]:
        """Values of x outside every single-variable clause's infeasible set, when excluding."""
        if not self.sb.exclude_infeasible:
            return None
        bad = self.sb.unit_infeasible(x)
        return None if bad.is_empty() else bad.complement()

    def _random_integer(self, x: int) -> Fraction:
        r = self.params.restart_range
        return Fraction(self.rng.randint(-r, r))

    # ====================
    # RESTARTS
    # ====================

    def _reset_progress(self) -> None:
        self.non_improving = 0
        self.best_seen = self.sb.unsat_weight()

    def minor_restart(self) -> None:
        self.stats.minor_restarts += 1
        self.minor_count += 1
        if self.minor_count >= self.params.t2:
            self.major_restart()
            return
        self.sb.exclude_infeasible = not self.sb.exclude_infeasible
        if self.sb.unsat:
            cls = self.problem.clauses[self.rng.choice(list(self.sb.unsat))]
            pool = [("r", x) for x in sorted(cls.real_vars)]
            pool += [("b", b) for b in sorted(cls.bool_vars)]
            kind, var = self.rng.choice(pool)
            if kind == "r":
                self.set_real(var, self._random_integer(var))
            elif self.rng.random() < 0.5:
                self.flip(var)
        logger.debug("Minor restart", step=self.stats.steps, count=self.minor_count)
        self._reset_progress()

    def major_restart(self) -> None:
        self.stats.major_restarts += 1
        self.minor_count = 0
        for x, v0 in self.initial.reals.items():
            self.asg.reals[x] = v0 + self._random_integer(x)
        for b in self.initial.bools:
            self.asg.bools[b] = self.rng.random() < 0.5
        self.sb.reset_weights()
        self.sb.relaxed.clear()
        self.sb.exclude_infeasible = False
        self.sb.rebuild()
        self._set_slack(self.relaxation_enabled)
        logger.info("Major restart", step=self.stats.steps, count=self.stats.major_restarts)
        self._reset_progress()

    # ====================
    # MAIN LOOP
    # ====================

    def step(self) -> None:
        move = self.sb.best_move()
        if move is not None and move.score > 0:
            self.perform(move)
            return
        self.sb.paws_update(self.params.sp)
        self.stats.paws_updates += 1
        moved = False
        for _ in range(CRITICAL_ATTEMPTS):
            if not self.sb.unsat:
                break
            cid = self.rng.choice(list(self.sb.unsat))
            critical = self.sb.critical_move(cid)
            if critical is not None and self.perform(critical):
                moved = True
                break
        if not moved and self.sb.unsat:
            self.heuristic_move()

    def _out_of_time(self, started: float) -> bool:
        p = self.params
        if p.max_steps is not None and self.stats.steps >= p.max_steps:
            return True
        if p.timeout_s is not None and self.stats.steps % p.wall_check_interval == 0:
            return time.monotonic() - started > p.timeout_s
        return False

    def solve(self) -> SearchResult:
        started = time.monotonic()
        result = SearchResult("unknown", None, self.stats)
        while True:
            if not self.sb.unsat:
                if self.use_slack:
                    self.restore()
                    continue
                if self.accept(self.asg):
                    result = SearchResult("sat", self.asg.copy(), self.stats)
                    break
                logger.warning("Candidate model rejected by verification", step=self.stats.steps)
                self.major_restart()
            if self._out_of_time(started):
                break
            try:
                self.step()
            except MoveUnavailable as exc:
                logger.debug("Move unavailable", error=str(exc), step=self.stats.steps)
            self.stats.steps += 1
            weight = self.sb.unsat_weight()
            if weight < self.best_seen:
                self.best_seen = weight
                self.non_improving = 0
            else:
                self.non_improving += 1
            if self.non_improving >= self.params.t1:
                if self.relaxation_enabled and not self.use_slack:
                    self._set_slack(True)
                self.minor_restart()
        self.stats.elapsed_s = time.monotonic() - started
        logger.info(
            "Search finished",
            answer=result.answer,
            steps=self.stats.steps,
            relaxations=self.stats.relaxations,
            elapsed_s=round(self.stats.elapsed_s, 3),
        )
        return result


def solve(
    problem: Problem, params: Optional[SearchParams] = None, **kwargs
) -> SearchResult:
    return LocalSearch(problem, params, **kwargs).solve()


__all__ = ["LocalSearch", "SearchResult", "SearchStats", "initial_assignment", "solve"]
