import random
from fractions import Fraction
from pathlib import Path

import pytest

from app.core.config import get_settings
from app.models.formula import Assignment, Problem
from app.services.scoreboard import Scoreboard, ScoreboardOptions
from app.tests.factories import X, Y, Z, boolean, gt, le, lt, problem_of

CURATED = Path(__file__).resolve().parents[2] / "benchmarks" / "curated"


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def curated_dir() -> Path:
    return CURATED


@pytest.fixture
def worked_problem() -> Problem:
    """x^2+y^2 <= 1, x+y < 1, x+z > 0 as clauses 1..3; clause 0 is a satisfied boolean unit."""
    return problem_of(
        [
            [boolean(0)],
            [le(X * X + Y * Y - 1)],
            [lt(X + Y - 1)],
            [gt(X + Z)],
        ],
        n_real=3,
        n_bool=1,
    )


@pytest.fixture
def worked_assignment() -> Assignment:
    return Assignment({0: True}, {0: Fraction(1), 1: Fraction(1), 2: Fraction(1)})


@pytest.fixture
def worked_scoreboard(worked_problem, worked_assignment) -> Scoreboard:
    sb = Scoreboard(worked_problem, worked_assignment, random.Random(0), ScoreboardOptions())
    sb.weights[1], sb.weights[2], sb.weights[3] = 1, 3, 2
    sb.on_weights_changed([1, 2, 3])
    return sb
