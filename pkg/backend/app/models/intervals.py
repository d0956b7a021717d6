"""
Intervals and interval sets over exact values.

``None`` marks an infinite endpoint, which is always open. An ``IntervalSet`` keeps its
intervals sorted, pairwise disjoint and maximally merged; every set operation goes
through the same sweep over the breakpoints of its operands, so results are always in
that normal form.
"""

from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence

from app.models.numeric import Value, cmp_value, simplest_rational_in, value_key


@dataclass(frozen=True)
class Interval:
    lo: Optional[Value]
    hi: Optional[Value]
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self) -> None:
        if self.lo is None and not self.lo_open:
            object.__setattr__(self, "lo_open", True)
        if self.hi is None and not self.hi_open:
            object.__setattr__(self, "hi_open", True)

    @property
    def is_point(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        return cmp_value(self.lo, self.hi) == 0

    def contains(self, v: Value) -> bool:
        if self.lo is not None:
            c = cmp_value(self.lo, v)
            if c > 0 or (c == 0 and self.lo_open):
                return False
        if self.hi is not None:
            c = cmp_value(v, self.hi)
            if c > 0 or (c == 0 and self.hi_open):
                return False
        return True

    def same_as(self, other: "Interval") -> bool:
        return (
            _endpoint_eq(self.lo, other.lo)
            and _endpoint_eq(self.hi, other.hi)
            and self.lo_open == other.lo_open
            and self.hi_open == other.hi_open
        )

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "+inf" if self.hi is None else str(self.hi)
        return f"{left}{lo}, {hi}{right}"


def _endpoint_eq(a: Optional[Value], b: Optional[Value]) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return cmp_value(a, b) == 0


class IntervalSet:
    """Sorted, disjoint, maximally merged union of intervals."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Sequence[Interval] = ()) -> None:
        self.intervals: List[Interval] = list(intervals)

    # ====================
    # CONSTRUCTORS
    # ====================

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls()

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls([Interval(None, None)])

    @classmethod
    def point(cls, v: Value) -> "IntervalSet":
        return cls([Interval(v, v)])

    @classmethod
    def of(cls, intervals: Sequence[Interval]) -> "IntervalSet":
        """Normalize an arbitrary collection of intervals."""
        raw = cls(intervals)
        return _sweep([raw], lambda inside: inside[0])

    @classmethod
    def from_pieces(
        cls,
        points: Sequence[Value],
        gap_in: Sequence[bool],
        point_in: Sequence[bool],
    ) -> "IntervalSet":
        """Assemble the set from membership of each piece of the line.

        ``points`` are distinct and increasing; they cut the line into
        len(points) + 1 open gaps, and ``gap_in[i]`` is membership of the gap left of
        ``points[i]`` (the last entry is the gap to +inf).
        """
        runs: List[Interval] = []
        start: Optional[tuple] = None
        n = len(points)
        for i in range(n + 1):
            left = points[i - 1] if i > 0 else None
            if gap_in[i]:
                if start is None:
                    start = (left, True)
            elif start is not None:
                runs.append(Interval(start[0], left, start[1], False))
                start = None
            if i == n:
                break
            p = points[i]
            if point_in[i]:
                if start is None:
                    start = (p, False)
            elif start is not None:
                runs.append(Interval(start[0], p, start[1], True))
                start = None
        if start is not None:
            runs.append(Interval(start[0], None, start[1], True))
        return cls(runs)

    # ====================
    # QUERIES
    # ====================

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def is_full(self) -> bool:
        if len(self.intervals) != 1:
            return False
        only = self.intervals[0]
        return only.lo is None and only.hi is None

    def contains(self, v: Value) -> bool:
        return any(iv.contains(v) for iv in self.intervals)

    def endpoints(self) -> List[Value]:
        pts: List[Value] = []
        for iv in self.intervals:
            if iv.lo is not None:
                pts.append(iv.lo)
            if iv.hi is not None:
                pts.append(iv.hi)
        return pts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return len(self.intervals) == len(other.intervals) and all(
            a.same_as(b) for a, b in zip(self.intervals, other.intervals)
        )

    def __repr__(self) -> str:
        if not self.intervals:
            return "IntervalSet(empty)"
        return "IntervalSet(" + " U ".join(str(iv) for iv in self.intervals) + ")"

    # ====================
    # SET OPERATIONS
    # ====================

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep([self, other], any)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep([self, other], all)

    def complement(self) -> "IntervalSet":
        return _sweep([self], lambda inside: not inside[0])

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep([self, other], lambda inside: inside[0] and not inside[1])


def _sweep(sets: Sequence[IntervalSet], keep: Callable[[List[bool]], bool]) -> IntervalSet:
    """Membership of every breakpoint and every gap between them, combined by ``keep``."""
    raw = sorted((p for s in sets for p in s.endpoints()), key=value_key)
    points: List[Value] = []
    for p in raw:
        if not points or cmp_value(points[-1], p) != 0:
            points.append(p)
    gap_in: List[bool] = []
    for i in range(len(points) + 1):
        left = points[i - 1] if i > 0 else None
        right = points[i] if i < len(points) else None
        rep = simplest_rational_in(left, right, True, True)
        gap_in.append(keep([s.contains(rep) for s in sets]))
    point_in = [keep([s.contains(p) for s in sets]) for p in points]
    return IntervalSet.from_pieces(points, gap_in, point_in)


__all__ = ["Interval", "IntervalSet"]
