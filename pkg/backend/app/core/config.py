"""
Configuration settings for the NRA local-search solver.

Parameters of the search (PAWS smoothing probability, restart thresholds, relaxation
thresholds), of the input pipeline (CNF blowup factor) and of the ambient stack
(logging) are parsed from environment variables prefixed with ``NRALS_`` or from a
``.env`` file. Rational-valued settings are kept exact as ``fractions.Fraction``.

Example:
    NRALS_EPS_V=1/100000 NRALS_T1=50 nrals solve circle.smt2
"""

from fractions import Fraction
from functools import lru_cache
from typing import Any, Literal, Optional

import structlog
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = structlog.get_logger(__name__)


def parse_fraction(v: Any) -> Fraction:
    """Parse ints, floats, decimal strings ("1e-4") or ratios ("1/10000") exactly.

    Floats are converted through their shortest repr so 0.006 becomes 3/500.

    Raises:
        ValueError: If the value cannot be read as a rational number.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise ValueError("boolean is not a rational number")
    if isinstance(v, (int, float)):
        return Fraction(repr(v)) if isinstance(v, float) else Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {v!r}") from exc
    raise ValueError(f"not a rational number: {v!r}")


class SolverSettings(BaseSettings):
    """
    Solver settings, parsed from environment variables or .env file.

    Attributes:
        SP: PAWS smoothing probability.
        T1: Non-improving steps before a minor restart.
        T2: Minor restarts before a major restart.
        EPS_V: Complexity threshold for assigned values (denominator > 1/EPS_V is complex).
        EPS_P: Amount by which relaxed polynomial constraints are loosened.
        MAX_STEPS: Step limit of one solve call (None = unlimited).
        TIMEOUT_S: Wall-clock limit of one solve call in seconds (None = unlimited).
        SEED: Default random seed.
        BOUNDARY_OFFSET: Distance of boundary-adjacent candidate values.
        UNIFORM_RESOLUTION: Grid size for uniformly drawn candidate values.
        RESTART_RANGE: Restarts draw integers uniformly from [-RESTART_RANGE, RESTART_RANGE].
        CNF_BLOWUP_FACTOR: Distribution limit before definition variables are introduced.
        WALL_CHECK_INTERVAL: Steps between wall-clock checks.
        RELAX_AGAINST: Whether a relaxing value must be more complex than every or
            some currently assigned value.
        LOG_LEVEL: Minimum log level.
        LOG_JSON: Render logs as JSON lines instead of console output.
    """

    model_config = SettingsConfigDict(
        env_prefix="NRALS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        arbitrary_types_allowed=True,
    )

    # Search parameters
    SP: Fraction = Fraction(3, 500)
    T1: int = Field(default=100, ge=1)
    T2: int = Field(default=100, ge=1)
    EPS_V: Fraction = Fraction(1, 10000)
    EPS_P: Fraction = Fraction(1, 10000)
    MAX_STEPS: Optional[int] = Field(default=None, ge=0)
    TIMEOUT_S: Optional[float] = Field(default=None, gt=0)
    SEED: int = 0

    # Candidate generation
    BOUNDARY_OFFSET: Fraction = Fraction(1, 10000)
    UNIFORM_RESOLUTION: int = Field(default=1000, ge=2)
    RESTART_RANGE: int = Field(default=10, ge=1)

    # Input pipeline
    CNF_BLOWUP_FACTOR: int = Field(default=8, ge=1)

    # Loop control
    WALL_CHECK_INTERVAL: int = Field(default=256, ge=1)
    RELAX_AGAINST: Literal["every", "some"] = "every"

    # Observability
    LOG_LEVEL: str = "WARNING"
    LOG_JSON: bool = True

    @field_validator("SP", "EPS_V", "EPS_P", "BOUNDARY_OFFSET", mode="before")
    @classmethod
    def parse_rational(cls, v: Any) -> Fraction:
        """Accept "1e-4", "1/10000", 0.0001 or a Fraction."""
        return parse_fraction(v)

    @field_validator("SP")
    @classmethod
    def validate_sp(cls, v: Fraction) -> Fraction:
        if not 0 < v < 1:
            raise ValueError("SP must lie strictly between 0 and 1")
        return v

    @field_validator("EPS_V", "EPS_P", "BOUNDARY_OFFSET")
    @classmethod
    def validate_positive(cls, v: Fraction) -> Fraction:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return level


@lru_cache()
def get_settings() -> SolverSettings:
    """Get cached settings instance."""
    logger.debug("Loading solver settings")
    return SolverSettings()


__all__ = ["SolverSettings", "get_settings", "parse_fraction"]
