"""
Make-break score maintenance for real and boolean moves.

For every real variable x and clause c containing it, the effect of moving x on c is
kept as a starting score (the effect of moving x towards -inf) plus a set of
boundaries ``(val, is_open, is_make, cid)`` where that effect changes. Merging the
per-clause sets of x gives the score of every interval x can move into. Weights are
applied while traversing, so reweighting never rebuilds boundaries.

After a move only the (variable, clause) pairs of clauses containing the moved
variable go stale. Stale pairs are recomputed once their variable occurs in an
unsatisfied clause; until then they stay flagged.
"""

import enum
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Protocol,
    Sequence,
    Set,
    Tuple,
)

import structlog
from sortedcontainers import SortedKeyList, SortedSet

from app.core.errors import EmptyIntervalError, MoveUnavailable
from app.models.formula import Assignment, BoolAtom, Clause, Problem
from app.models.intervals import Interval, IntervalSet
from app.models.numeric import (
    AlgebraicNumber,
    Value,
    cmp_value,
    complexity_key,
    exceeds_threshold,
    simplest_rational_in,
    value_key,
)
from app.services.roots import clause_feasible_set, unit_infeasible_set

logger = structlog.get_logger(__name__)


# ====================
# BOUNDARIES
# ====================


@dataclass(frozen=True)
class Boundary:
    val: Value
    is_open: bool
    is_make: bool
    cid: int

    def as_tuple(self) -> Tuple[Value, bool, bool, int]:
        return self.val, self.is_open, self.is_make, self.cid


def boundary_key(b: Boundary) -> Tuple[Any, bool, bool, int]:
    """By value, closed before open, makes before breaks, then clause id."""
    return value_key(b.val), b.is_open, not b.is_make, b.cid


def _same_position(a: Boundary, b: Boundary) -> bool:
    return a.is_open == b.is_open and cmp_value(a.val, b.val) == 0


class BoundaryContainer(Protocol):
    def add(self, b: Boundary) -> None: ...

    def remove(self, b: Boundary) -> None: ...

    def __iter__(self) -> Iterator[Boundary]: ...

    def __len__(self) -> int: ...


class SortedBoundaryList:
    """Ordered multiset backed by ``SortedKeyList``; logarithmic add and remove."""

    def __init__(self, items: Iterable[Boundary] = ()) -> None:
        self._items = SortedKeyList(items, key=boundary_key)

    def add(self, b: Boundary) -> None:
        self._items.add(b)

    def remove(self, b: Boundary) -> None:
        self._items.remove(b)

    def __iter__(self) -> Iterator[Boundary]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)


class LinearBoundaryList:
    """Plain sorted list with bisection; linear insertion."""

    def __init__(self, items: Iterable[Boundary] = ()) -> None:
        ordered = sorted(items, key=boundary_key)
        self._keys = [boundary_key(b) for b in ordered]
        self._items = ordered

    def add(self, b: Boundary) -> None:
        k = boundary_key(b)
        i = bisect_right(self._keys, k)
        self._keys.insert(i, k)
        self._items.insert(i, b)

    def remove(self, b: Boundary) -> None:
        k = boundary_key(b)
        for i in range(bisect_left(self._keys, k), bisect_right(self._keys, k)):
            if self._items[i] == b:
                del self._keys[i]
                del self._items[i]
                return
        raise ValueError(f"{b} not in container")

    def __iter__(self) -> Iterator[Boundary]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)


CONTAINERS = {"sorted": SortedBoundaryList, "linear": LinearBoundaryList}


@dataclass
class VarClauseScore:
    """Effect of one clause on the moves of one variable.

    ``start`` is -1, 0 or 1 and is scaled by the clause weight during traversal.
    """

    start: int
    boundaries: List[Boundary]
    feasible: IntervalSet
    dirty: bool = False


def boundaries_from(
    feasible: IntervalSet, currently_true: bool, cid: int
) -> Tuple[int, List[Boundary]]:
    """Starting score coefficient and boundaries of a clause with the given feasible set."""
    at_minus_inf = bool(feasible.intervals) and feasible.intervals[0].lo is None
    start = int(at_minus_inf) - int(currently_true)
    out: List[Boundary] = []
    for iv in feasible:
        if iv.lo is not None:
            out.append(Boundary(iv.lo, iv.lo_open, True, cid))
        if iv.hi is not None:
            out.append(Boundary(iv.hi, not iv.hi_open, False, cid))
    return start, out


# ====================
# MOVES
# ====================


class MoveKind(str, enum.Enum):
    FLIP = "flip"
    REAL = "real"


@dataclass(frozen=True)
class Region:
    interval: Interval
    score: int
    cids: FrozenSet[int] = frozenset()


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    var: int
    value: Optional[Value]
    score: int
    one_point: bool = False
    cids: FrozenSet[int] = frozenset()

    @property
    def complexity(self) -> Tuple[int, int]:
        return (0, 1) if self.value is None else complexity_key(self.value)


def _choose(moves: Sequence[Move], rng: random.Random, simplest_first: bool) -> Optional[Move]:
    if not moves:
        return None
    if simplest_first:
        top = min(moves, key=lambda m: (m.complexity, -m.score))
        tied = [m for m in moves if m.complexity == top.complexity and m.score == top.score]
    else:
        top = max(moves, key=lambda m: (m.score, [-k for k in m.complexity]))
        tied = [m for m in moves if m.score == top.score and m.complexity == top.complexity]
    return tied[0] if len(tied) == 1 else rng.choice(tied)


# ====================
# SCOREBOARD
# ====================


@dataclass
class ScoreboardOptions:
    eps_p: Fraction = Fraction(1, 10000)
    incremental: bool = True
    limit_unsat: Optional[int] = None
    container: str = "sorted"
    value_cap: Optional[Fraction] = None
    simplest_first: bool = False
    rational_only: FrozenSet[int] = frozenset()


class Scoreboard:
    """Clause weights, truth counts, relaxation flags and per-variable score data."""

    def __init__(
        self,
        problem: Problem,
        asg: Assignment,
        rng: random.Random,
        options: Optional[ScoreboardOptions] = None,
    ) -> None:
        self.problem = problem
        self.clauses: List[Clause] = problem.clauses
        self.asg = asg
        self.rng = rng
        self.options = options or ScoreboardOptions()
        self._container_cls = CONTAINERS[self.options.container]

        n_real = len(problem.real_names)
        n_bool = len(problem.bool_names)
        self.occ_real: List[List[int]] = [[] for _ in range(n_real)]
        self.occ_bool: List[List[int]] = [[] for _ in range(n_bool)]
        self.neighbours: List[Set[int]] = [set() for _ in range(n_real)]
        for cls in self.clauses:
            for x in sorted(cls.real_vars):
                self.occ_real[x].append(cls.cid)
                self.neighbours[x] |= cls.real_vars - {x}
            for b in sorted(cls.bool_vars):
                self.occ_bool[b].append(cls.cid)

        self.weights: List[int] = [1] * len(self.clauses)
        self.true_count: List[int] = [0] * len(self.clauses)
        self.unsat: SortedSet = SortedSet()
        self.relaxed: Set[Tuple[int, int]] = set()
        self._exclude_infeasible = False
        self._interval_cap: Optional[Fraction] = None
        self._unit_infeasible = self._collect_unit_infeasible(n_real)

        self.pairs: Dict[Tuple[int, int], VarClauseScore] = {}
        self.merged: List[BoundaryContainer] = [self._container_cls() for _ in range(n_real)]
        self._moves: List[Optional[List[Move]]] = [None] * n_real
        self.rebuild()

    def _collect_unit_infeasible(self, n_real: int) -> List[IntervalSet]:
        out = [IntervalSet.empty() for _ in range(n_real)]
        for cls in self.clauses:
            if cls.bool_vars or len(cls.real_vars) != 1:
                continue
            try:
                x, bad = unit_infeasible_set(cls)
            except MoveUnavailable:
                continue
            out[x] = out[x].union(bad)
        return out

    # ====================
    # CLAUSE STATUS
    # ====================

    def relaxed_flags(self, cid: int) -> List[bool]:
        n = len(self.clauses[cid].literals)
        return [(cid, i) in self.relaxed for i in range(n)]

    def _count_true(self, cid: int) -> int:
        eps = self.options.eps_p
        cls = self.clauses[cid]
        return sum(
            1
            for i, lit in enumerate(cls.literals)
            if lit.holds(self.asg, (cid, i) in self.relaxed, eps)
        )

    def _refresh_status(self, cid: int) -> None:
        count = self._count_true(cid)
        self.true_count[cid] = count
        if count:
            self.unsat.discard(cid)
        else:
            self.unsat.add(cid)

    def is_satisfied(self, cid: int) -> bool:
        return self.true_count[cid] > 0

    def unsat_weight(self) -> int:
        return sum(self.weights[cid] for cid in self.unsat)

    @property
    def exclude_infeasible(self) -> bool:
        return self._exclude_infeasible

    @exclude_infeasible.setter
    def exclude_infeasible(self, value: bool) -> None:
        if value != self._exclude_infeasible:
            self._exclude_infeasible = value
            self._moves = [None] * len(self._moves)

    @property
    def interval_cap(self) -> Optional[Fraction]:
        """Complexity cap on values picked inside non-degenerate intervals."""
        return self._interval_cap

    @interval_cap.setter
    def interval_cap(self, value: Optional[Fraction]) -> None:
        if value != self._interval_cap:
            self._interval_cap = value
            self._moves = [None] * len(self._moves)

    def unit_infeasible(self, x: int) -> IntervalSet:
        return self._unit_infeasible[x]

    # ====================
    # PER-PAIR DATA
    # ====================

    def boundaries_for(self, x: int, cid: int) -> VarClauseScore:
        """Fresh score data of clause cid for moves of x."""
        cls = self.clauses[cid]
        try:
            feasible = clause_feasible_set(
                cls, self.asg, x, self.relaxed_flags(cid), self.options.eps_p
            )
        except MoveUnavailable:
            return VarClauseScore(0, [], IntervalSet.empty())
        start, bounds = boundaries_from(feasible, self.true_count[cid] > 0, cid)
        return VarClauseScore(start, bounds, feasible)

    def _recompute_pair(self, x: int, cid: int) -> None:
        merged = self.merged[x]
        old = self.pairs.get((x, cid))
        if old is not None:
            for b in old.boundaries:
                merged.remove(b)
        fresh = self.boundaries_for(x, cid)
        for b in fresh.boundaries:
            merged.add(b)
        self.pairs[(x, cid)] = fresh

    def _mark(self, cid: int) -> Set[int]:
        touched = set()
        for y in self.clauses[cid].real_vars:
            self.pairs[(y, cid)].dirty = True
            self._moves[y] = None
            touched.add(y)
        return touched

    def in_unsat_clause(self, x: int) -> bool:
        return any(cid in self.unsat for cid in self.occ_real[x])

    def refresh(self, x: int, force: bool = False) -> None:
        """Flush stale pairs of x and its cached moves."""
        for cid in self.occ_real[x]:
            pair = self.pairs[(x, cid)]
            if force or pair.dirty:
                self._recompute_pair(x, cid)
        self._moves[x] = self._compute_moves(x)

    def rebuild(self) -> None:
        """Recompute every status and every pair from scratch."""
        for cls in self.clauses:
            self._refresh_status(cls.cid)
        self.merged = [self._container_cls() for _ in self.occ_real]
        self.pairs = {}
        for x, cids in enumerate(self.occ_real):
            for cid in cids:
                self._recompute_pair(x, cid)
        self._moves = [None] * len(self.occ_real)

    # ====================
    # UPDATES
    # ====================

    def on_move(self, var: int, is_bool: bool = False) -> None:
        """Account for a changed value of var; the assignment is already updated."""
        cids = self.occ_bool[var] if is_bool else self.occ_real[var]
        touched: Set[int] = set()
        for cid in cids:
            self._refresh_status(cid)
            touched |= self._mark(cid)
        if not self.options.incremental:
            return
        for y in sorted(touched):
            if self.in_unsat_clause(y):
                self.refresh(y)

    def on_relax(self, cids: Iterable[int]) -> None:
        for cid in cids:
            self._refresh_status(cid)
            self._mark(cid)

    def on_weights_changed(self, cids: Iterable[int]) -> None:
        for cid in cids:
            for y in self.clauses[cid].real_vars:
                self._moves[y] = None

    def relax(self, cid: int) -> List[int]:
        """Relax every relaxable literal of cid; returns the literal indices relaxed."""
        done = []
        for i, lit in enumerate(self.clauses[cid].literals):
            if lit.relaxable and (cid, i) not in self.relaxed:
                self.relaxed.add((cid, i))
                done.append(i)
        if done:
            self.on_relax([cid])
        return done

    def restore(self) -> None:
        """Return every relaxed literal to its original form."""
        cids = sorted({cid for cid, _ in self.relaxed})
        self.relaxed.clear()
        self.on_relax(cids)

    def paws_update(self, sp: Fraction) -> bool:
        """One PAWS step; True when the smoothing (decrease) branch was taken."""
        if self.rng.random() < sp:
            changed = [
                c.cid
                for c in self.clauses
                if self.true_count[c.cid] > 0 and self.weights[c.cid] > 1
            ]
            for cid in changed:
                self.weights[cid] -= 1
            self.on_weights_changed(changed)
            return True
        changed = list(self.unsat)
        for cid in changed:
            self.weights[cid] += 1
        self.on_weights_changed(changed)
        return False

    def reset_weights(self) -> None:
        self.weights = [1] * len(self.clauses)
        self._moves = [None] * len(self._moves)

    # ====================
    # QUERIES
    # ====================

    def start_score(self, x: int) -> int:
        return sum(self.pairs[(x, cid)].start * self.weights[cid] for cid in self.occ_real[x])

    def boundaries(self, x: int) -> List[Boundary]:
        return list(self.merged[x])

    def combine(self, x: int) -> Tuple[int, List[Boundary]]:
        """Clean starting score and merged boundary sequence of x."""
        self._ensure_clean(x)
        return self.start_score(x), self.boundaries(x)

    def regions(self, x: int) -> List[Region]:
        """Intervals of x with the make-break score of moving into each."""
        score = self.start_score(x)
        bounds = list(self.merged[x])
        out: List[Region] = []
        lower: Optional[Value] = None
        lower_open = True
        lower_cids: FrozenSet[int] = frozenset()
        i = 0
        while i < len(bounds):
            head = bounds[i]
            delta = 0
            group: Set[int] = set()
            j = i
            while j < len(bounds) and _same_position(head, bounds[j]):
                b = bounds[j]
                delta += self.weights[b.cid] if b.is_make else -self.weights[b.cid]
                group.add(b.cid)
                j += 1
            iv = Interval(lower, head.val, lower_open, not head.is_open)
            if not _is_empty(iv):
                out.append(Region(iv, score, lower_cids | frozenset(group)))
            score += delta
            lower, lower_open, lower_cids = head.val, head.is_open, frozenset(group)
            i = j
        out.append(Region(Interval(lower, None, lower_open, True), score, lower_cids))
        return out

    def interval_scores(self, x: int) -> List[Tuple[Interval, int]]:
        self._ensure_clean(x)
        return [(r.interval, r.score) for r in self.regions(x)]

    def _admissible(self, x: int, v: Value, point: bool) -> bool:
        cap = self.options.value_cap
        if cap is not None and exceeds_threshold(v, cap):
            return False
        cap = self._interval_cap
        if cap is not None and not point and exceeds_threshold(v, cap):
            return False
        if isinstance(v, AlgebraicNumber):
            if x in self.options.rational_only:
                return False
            if any(not isinstance(self.asg.reals[y], Fraction) for y in self.neighbours[x]):
                return False
        return True

    def pick_value(self, x: int, iv: Interval) -> Optional[Value]:
        """Simplest admissible value of x inside iv, or None."""
        pieces = IntervalSet([iv])
        if self._exclude_infeasible:
            pieces = pieces.difference(self._unit_infeasible[x])
        best: Optional[Value] = None
        for piece in pieces:
            if piece.is_point:
                v: Value = piece.lo  # type: ignore[assignment]
            else:
                try:
                    v = simplest_rational_in(piece.lo, piece.hi, piece.lo_open, piece.hi_open)
                except EmptyIntervalError:
                    continue
            if not self._admissible(x, v, piece.is_point):
                continue
            if best is None or _simplicity(v) < _simplicity(best):
                best = v
        return best

    def _compute_moves(self, x: int) -> List[Move]:
        cur = self.asg.reals[x]
        out: List[Move] = []
        for region in self.regions(x):
            iv = region.interval
            if iv.contains(cur):
                continue
            v = self.pick_value(x, iv)
            if v is None:
                continue
            out.append(Move(MoveKind.REAL, x, v, region.score, iv.is_point, region.cids))
        return out

    def _ensure_clean(self, x: int) -> None:
        if not self.options.incremental:
            self.refresh(x, force=True)
        elif self._moves[x] is None or any(
            self.pairs[(x, cid)].dirty for cid in self.occ_real[x]
        ):
            self.refresh(x)

    def moves_of(self, x: int) -> List[Move]:
        self._ensure_clean(x)
        moves = self._moves[x]
        assert moves is not None
        return moves

    def bool_flip_score(self, b: int) -> int:
        total = 0
        for cid in self.occ_bool[b]:
            cur = self.true_count[cid]
            new = cur
            for i, lit in enumerate(self.clauses[cid].literals):
                if isinstance(lit.atom, BoolAtom) and lit.atom.var == b:
                    new += -1 if lit.holds(self.asg) else 1
            total += self.weights[cid] * (int(new > 0) - int(cur > 0))
        return total

    def flip_move(self, b: int) -> Move:
        return Move(MoveKind.FLIP, b, None, self.bool_flip_score(b))

    def candidate_clauses(self) -> List[int]:
        limit = self.options.limit_unsat
        return list(self.unsat) if limit is None else list(self.unsat[:limit])

    def candidate_vars(self) -> Tuple[List[int], List[int]]:
        reals: Set[int] = set()
        bools: Set[int] = set()
        for cid in self.candidate_clauses():
            reals |= self.clauses[cid].real_vars
            bools |= self.clauses[cid].bool_vars
        return sorted(reals), sorted(bools)

    def best_move(self) -> Optional[Move]:
        """Best move over variables of unsatisfied clauses; None when there are none."""
        reals, bools = self.candidate_vars()
        moves: List[Move] = [self.flip_move(b) for b in bools]
        for x in reals:
            moves.extend(self.moves_of(x))
        if self.options.simplest_first:
            improving = [m for m in moves if m.score > 0]
            if improving:
                return _choose(improving, self.rng, True)
        return _choose(moves, self.rng, False)

    def critical_move(self, cid: int) -> Optional[Move]:
        """Best-scoring move (possibly negative) that satisfies clause cid."""
        cls = self.clauses[cid]
        moves: List[Move] = []
        for b in sorted(cls.bool_vars):
            if any(
                isinstance(lit.atom, BoolAtom) and lit.atom.var == b and not lit.holds(self.asg)
                for lit in cls.literals
            ):
                moves.append(self.flip_move(b))
        for x in sorted(cls.real_vars):
            options = self.moves_of(x)
            feasible = self.pairs[(x, cid)].feasible
            moves.extend(m for m in options if m.value is not None and feasible.contains(m.value))
        return _choose(moves, self.rng, False)


def _simplicity(v: Value) -> Tuple[Tuple[int, int], Fraction]:
    return complexity_key(v), abs(v) if isinstance(v, Fraction) else Fraction(0)


def _is_empty(iv: Interval) -> bool:
    if iv.lo is None or iv.hi is None:
        return False
    c = cmp_value(iv.lo, iv.hi)
    return c > 0 or (c == 0 and (iv.lo_open or iv.hi_open))


__all__ = [
    "Boundary",
    "BoundaryContainer",
    "LinearBoundaryList",
    "Move",
    "MoveKind",
    "Region",
    "Scoreboard",
    "ScoreboardOptions",
    "SortedBoundaryList",
    "VarClauseScore",
    "boundaries_from",
    "boundary_key",
]
