import random
from fractions import Fraction

import pytest

from app.models.formula import Assignment
from app.models.intervals import Interval, IntervalSet
from app.models.numeric import value_eq, value_key
from app.services.scoreboard import (
    Boundary,
    LinearBoundaryList,
    MoveKind,
    Scoreboard,
    ScoreboardOptions,
    SortedBoundaryList,
    boundaries_from,
)
from app.tests.factories import (
    X,
    Y,
    boolean,
    eq,
    ge,
    lt,
    problem_of,
    random_problem,
    random_rational,
    sqrt,
)

F = Fraction


class FixedRandom(random.Random):
    def __init__(self, value: float) -> None:
        super().__init__(0)
        self.value = value

    def random(self) -> float:
        return self.value


def tuples(bounds):
    return [b.as_tuple() for b in bounds]


def weighted_unsat(problem, weights, asg):
    return sum(weights[c.cid] for c in problem.clauses if not c.holds(asg))


# ====================
# WORKED EXAMPLE
# ====================


def test_pairs_of_x(worked_scoreboard):
    sb = worked_scoreboard
    assert sb.unsat == {1, 2}

    circle = sb.pairs[(0, 1)]
    assert circle.start == 0
    assert tuples(circle.boundaries) == [(0, False, True, 1), (0, True, False, 1)]

    line = sb.pairs[(0, 2)]
    assert line.start * sb.weights[2] == 3
    assert tuples(line.boundaries) == [(0, False, False, 2)]

    half_plane = sb.pairs[(0, 3)]
    assert half_plane.start * sb.weights[3] == -2
    assert tuples(half_plane.boundaries) == [(-1, True, True, 3)]

    fresh = sb.boundaries_for(0, 2)
    assert fresh.start == line.start
    assert tuples(fresh.boundaries) == tuples(line.boundaries)


def test_combine_variable_without_clauses():
    problem = problem_of([[lt(X)]], n_real=2)
    asg = Assignment({}, {0: F(1), 1: F(0)})
    sb = Scoreboard(problem, asg, random.Random(0), ScoreboardOptions())
    assert sb.combine(1) == (0, [])


def test_merged_boundaries_and_scores_of_x(worked_scoreboard):
    sb = worked_scoreboard
    start, bounds = sb.combine(0)
    assert start == 1
    assert tuples(bounds) == [
        (-1, True, True, 3),
        (0, False, True, 1),
        (0, False, False, 2),
        (0, True, False, 1),
    ]

    expected = [
        (Interval(None, F(-1), True, False), 1),
        (Interval(F(-1), F(0), True, True), 3),
        (Interval(F(0), F(0)), 1),
        (Interval(F(0), None, True, True), 0),
    ]
    got = sb.interval_scores(0)
    assert len(got) == len(expected)
    for (iv, score), (want_iv, want_score) in zip(got, expected):
        assert iv.same_as(want_iv), (iv, want_iv)
        assert score == want_score


def test_moves_of_x(worked_scoreboard):
    moves = {m.value: m for m in worked_scoreboard.moves_of(0)}
    assert set(moves) == {F(-1), F(-1, 2), F(0)}
    assert moves[F(-1, 2)].score == 3
    assert moves[F(-1, 2)].cids == frozenset({1, 2, 3})
    assert moves[F(-1)].score == 1
    assert moves[F(0)].score == 1 and moves[F(0)].one_point


def test_best_move_prefers_simpler_value_on_ties(worked_scoreboard):
    move = worked_scoreboard.best_move()
    assert move.kind is MoveKind.REAL
    assert (move.var, move.value, move.score) == (1, F(-1), 3)


def test_critical_move_satisfies_its_clause(worked_scoreboard):
    sb = worked_scoreboard
    move = sb.critical_move(2)
    assert (move.var, move.value, move.score) == (1, F(-1), 3)

    move = sb.critical_move(1)
    assert move.score == 1 and move.value == 0


def test_update_after_moving_y(worked_scoreboard):
    sb = worked_scoreboard
    untouched = sb.pairs[(2, 3)]
    sb.asg.reals[1] = F(-2)
    sb.on_move(1)

    assert sb.unsat == {1}
    assert sb.pairs[(2, 3)] is untouched and not untouched.dirty
    assert not sb.pairs[(0, 1)].dirty
    assert sb.start_score(0) == -2
    assert tuples(sb.boundaries(0)) == [(-1, True, True, 3), (3, False, False, 2)]


def test_limit_unsat_restricts_candidates(worked_problem, worked_assignment):
    sb = Scoreboard(
        worked_problem, worked_assignment, random.Random(0), ScoreboardOptions(limit_unsat=1)
    )
    assert sb.candidate_clauses() == [1]
    assert sb.candidate_vars() == ([0, 1], [])


@pytest.mark.parametrize("container", ["sorted", "linear"])
@pytest.mark.parametrize("incremental", [True, False])
def test_modes_agree_on_worked_example(worked_problem, worked_assignment, container, incremental):
    sb = Scoreboard(
        worked_problem,
        worked_assignment,
        random.Random(0),
        ScoreboardOptions(container=container, incremental=incremental),
    )
    sb.weights[1], sb.weights[2], sb.weights[3] = 1, 3, 2
    sb.on_weights_changed([1, 2, 3])
    assert [s for _, s in sb.interval_scores(0)] == [1, 3, 1, 0]
    sb.asg.reals[1] = F(-2)
    sb.on_move(1)
    assert [s for _, s in sb.interval_scores(0)] == [-2, 0, -3]
    assert sb.start_score(0) == -2


# ====================
# CONTAINERS
# ====================


def test_boundary_containers_keep_the_same_order():
    rng = random.Random(4)
    bounds = [
        Boundary(F(rng.randint(-3, 3)), rng.random() < 0.5, rng.random() < 0.5, cid)
        for cid in range(40)
    ]
    sorted_list, linear = SortedBoundaryList(bounds[:20]), LinearBoundaryList(bounds[:20])
    for b in bounds[20:]:
        sorted_list.add(b)
        linear.add(b)
    for b in bounds[::3]:
        sorted_list.remove(b)
        linear.remove(b)
    assert list(sorted_list) == list(linear)
    assert len(linear) == 40 - len(bounds[::3])
    with pytest.raises(ValueError):
        linear.remove(bounds[0])


def test_boundaries_from_an_unbounded_set():
    feasible = IntervalSet([Interval(None, F(-1), True, False), Interval(F(2), None)])
    start, bounds = boundaries_from(feasible, currently_true=False, cid=5)
    assert start == 1
    assert tuples(bounds) == [(-1, True, False, 5), (2, False, True, 5)]
    start, _ = boundaries_from(IntervalSet.empty(), currently_true=True, cid=5)
    assert start == -1


# ====================
# ONE-POINT MOVES AND VALUE SELECTION
# ====================


def test_one_point_move_to_a_root():
    problem = problem_of([[eq(X * X - 2)]], n_real=1)
    sb = Scoreboard(problem, Assignment({}, {0: F(0)}), random.Random(0))
    move = sb.best_move()
    assert move.score == 1 and move.one_point
    assert move.cids == frozenset({0})
    assert value_eq(move.value, sqrt(2)) or value_eq(move.value, sqrt(2, positive=False))


def test_value_cap_drops_irrational_points():
    problem = problem_of([[eq(X * X - 2)]], n_real=1)
    sb = Scoreboard(
        problem,
        Assignment({}, {0: F(0)}),
        random.Random(0),
        ScoreboardOptions(value_cap=F(1, 100)),
    )
    assert sorted(m.value for m in sb.moves_of(0)) == [F(-2), F(2)]
    assert sb.best_move().score == 0


def test_irrational_neighbour_blocks_irrational_moves():
    problem = problem_of([[eq(X * X - 2), lt(X + Y)]], n_real=2)
    sb = Scoreboard(problem, Assignment({}, {0: F(5), 1: sqrt(3)}), random.Random(0))
    assert sb.moves_of(0)
    assert all(isinstance(m.value, Fraction) for m in sb.moves_of(0))


def test_rational_only_variables():
    problem = problem_of([[eq(X * X - 2)]], n_real=1)
    sb = Scoreboard(
        problem,
        Assignment({}, {0: F(0)}),
        random.Random(0),
        ScoreboardOptions(rational_only=frozenset({0})),
    )
    assert all(isinstance(m.value, Fraction) for m in sb.moves_of(0))


def test_exclude_infeasible_skips_unit_infeasible_values():
    problem = problem_of([[ge(X - 5)], [lt(X * Y - 1)]], n_real=2)
    sb = Scoreboard(problem, Assignment({}, {0: F(0), 1: F(0)}), random.Random(0))
    assert sb.unit_infeasible(0) == IntervalSet([Interval(None, F(5), True, True)])
    assert sb.pick_value(0, Interval(None, None)) == 0
    sb.exclude_infeasible = True
    assert sb.pick_value(0, Interval(None, None)) == 5


def test_interval_cap_applies_to_proper_intervals_only():
    problem = problem_of([[ge(X)]], n_real=1)
    sb = Scoreboard(problem, Assignment({}, {0: F(-1)}), random.Random(0))
    narrow = Interval(F(0), F(1, 1000), True, True)
    assert sb.pick_value(0, narrow) == F(1, 1001)
    sb.interval_cap = F(1, 100)
    assert sb.pick_value(0, narrow) is None
    assert sb.pick_value(0, Interval(F(1, 1001), F(1, 1001))) == F(1, 1001)


# ====================
# BOOLEANS, WEIGHTS, RELAXATION
# ====================


def test_bool_flip_scores():
    problem = problem_of([[boolean(0)], [boolean(1)], [boolean(1, True)]], n_real=0, n_bool=3)
    sb = Scoreboard(problem, Assignment({0: False, 1: True, 2: False}, {}), random.Random(0))
    sb.weights = [2, 3, 1]
    assert sb.bool_flip_score(0) == 2
    assert sb.bool_flip_score(1) == -2
    assert sb.bool_flip_score(2) == 0
    assert sb.flip_move(0).kind is MoveKind.FLIP


def test_paws_increase_and_smoothing():
    problem = problem_of([[boolean(0)], [boolean(0, True)]], n_real=0, n_bool=1)
    sb = Scoreboard(problem, Assignment({0: True}, {}), FixedRandom(0.9))
    assert sb.paws_update(F(6, 1000)) is False
    assert sb.weights == [1, 2]

    sb.weights = [3, 2]
    sb.rng = FixedRandom(0.0)
    assert sb.paws_update(F(6, 1000)) is True
    assert sb.weights == [2, 2]

    sb.reset_weights()
    assert sb.weights == [1, 1]


def test_relax_and_restore(worked_scoreboard):
    sb = worked_scoreboard
    assert sb.relax(2) == []
    assert sb.relax(1) == [0]
    assert sb.relax(1) == []
    assert 1 in sb.unsat
    sb.moves_of(0)
    assert sb.pairs[(0, 1)].feasible == IntervalSet(
        [Interval(F(-1, 100), F(1, 100), True, True)]
    )

    sb.restore()
    assert not sb.relaxed
    sb.moves_of(0)
    assert sb.pairs[(0, 1)].feasible == IntervalSet.point(F(0))


# ====================
# RANDOMISED AGREEMENT
# ====================


def snapshot(sb, x):
    moves = sb.moves_of(x)
    return (
        sb.start_score(x),
        [(value_key(b.val), b.is_open, b.is_make, b.cid) for b in sb.boundaries(x)],
        [(value_key(m.value), m.score, m.one_point, m.cids) for m in moves],
    )


def rebuilt(sb):
    fresh = Scoreboard(
        sb.problem,
        sb.asg.copy(),
        random.Random(0),
        ScoreboardOptions(incremental=False, rational_only=sb.options.rational_only),
    )
    fresh.weights = list(sb.weights)
    fresh.relaxed = set(sb.relaxed)
    fresh.rebuild()
    return fresh


def random_walk(seed, steps, n_real=4, n_clauses=8):
    rng = random.Random(seed)
    problem = random_problem(rng, n_real=n_real, n_bool=2, n_clauses=n_clauses, max_degree=3)
    asg = Assignment(
        {b: rng.random() < 0.5 for b in range(2)},
        {x: random_rational(rng) for x in range(n_real)},
    )
    sb = Scoreboard(
        problem,
        asg,
        random.Random(seed),
        ScoreboardOptions(rational_only=frozenset(range(n_real))),
    )
    for _ in range(steps):
        roll = rng.random()
        if roll < 0.1:
            sb.paws_update(F(1, 2))
        elif roll < 0.2 and sb.unsat:
            sb.relax(rng.choice(list(sb.unsat)))
        elif roll < 0.25:
            sb.restore()
        elif roll < 0.35:
            b = rng.randrange(2)
            asg.bools[b] = not asg.bools[b]
            sb.on_move(b, is_bool=True)
        else:
            move = sb.best_move() if roll < 0.6 else None
            if move is not None and move.kind is MoveKind.REAL:
                x, v = move.var, move.value
            else:
                x, v = rng.randrange(n_real), random_rational(rng)
            asg.reals[x] = v
            sb.on_move(x)
        yield sb


def check_against_rebuild(sb):
    fresh = rebuilt(sb)
    assert list(sb.unsat) == list(fresh.unsat)
    for x in range(len(sb.problem.real_names)):
        if sb.occ_real[x]:
            assert snapshot(sb, x) == snapshot(fresh, x)


@pytest.mark.parametrize("seed", range(10))
def test_incremental_matches_rebuild(seed):
    for sb in random_walk(seed, 40):
        check_against_rebuild(sb)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_incremental_matches_rebuild_long(seed):
    for sb in random_walk(1000 + seed, 1000, n_real=8, n_clauses=20):
        check_against_rebuild(sb)


@pytest.mark.parametrize("seed", range(10))
def test_scores_equal_the_change_in_unsatisfied_weight(seed):
    rng = random.Random(seed)
    problem = random_problem(rng, n_real=3, n_bool=2, n_clauses=8, max_degree=2)
    asg = Assignment(
        {b: rng.random() < 0.5 for b in range(2)},
        {x: random_rational(rng) for x in range(3)},
    )
    sb = Scoreboard(
        problem, asg, random.Random(seed), ScoreboardOptions(rational_only=frozenset(range(3)))
    )
    sb.weights = [rng.randint(1, 4) for _ in problem.clauses]
    sb.on_weights_changed(range(len(problem.clauses)))

    before = weighted_unsat(problem, sb.weights, asg)
    assert before == sb.unsat_weight()
    for x in range(3):
        if not sb.occ_real[x]:
            continue
        for move in sb.moves_of(x):
            trial = asg.copy()
            trial.reals[x] = move.value
            assert before - weighted_unsat(problem, sb.weights, trial) == move.score
    for b in range(2):
        trial = asg.copy()
        trial.bools[b] = not trial.bools[b]
        assert before - weighted_unsat(problem, sb.weights, trial) == sb.bool_flip_score(b)
