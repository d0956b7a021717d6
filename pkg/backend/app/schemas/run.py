import enum
from fractions import Fraction
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import SolverSettings, parse_fraction


class ValuePreference(str, enum.Enum):
    RELAXATION = "relaxation"
    THRESHOLD = "threshold"
    FULL_ORDER = "full_order"


class SearchParams(BaseModel):
    """Parameters of one solve call."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sp: Fraction = Fraction(3, 500)
    t1: int = Field(default=100, ge=1)
    t2: int = Field(default=100, ge=1)
    eps_v: Fraction = Fraction(1, 10000)
    eps_p: Fraction = Fraction(1, 10000)
    max_steps: Optional[int] = Field(default=None, ge=0)
    timeout_s: Optional[float] = Field(default=None, gt=0)
    seed: int = 0
    boundary_offset: Fraction = Fraction(1, 10000)
    uniform_resolution: int = Field(default=1000, ge=2)
    restart_range: int = Field(default=10, ge=1)
    wall_check_interval: int = Field(default=256, ge=1)
    relax_against: str = "every"
    preference: ValuePreference = ValuePreference.RELAXATION
    incremental: bool = True
    limit_unsat: Optional[int] = Field(default=None, ge=1)
    boundary_container: str = "sorted"

    @field_validator("sp", "eps_v", "eps_p", "boundary_offset", mode="before")
    @classmethod
    def parse_rational(cls, v: Any) -> Fraction:
        return parse_fraction(v)

    @field_validator("sp")
    @classmethod
    def validate_sp(cls, v: Fraction) -> Fraction:
        if not 0 < v < 1:
            raise ValueError("sp must lie strictly between 0 and 1")
        return v

    @field_validator("eps_v", "eps_p", "boundary_offset")
    @classmethod
    def validate_positive(cls, v: Fraction) -> Fraction:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("relax_against")
    @classmethod
    def validate_relax_against(cls, v: str) -> str:
        if v not in ("every", "some"):
            raise ValueError("relax_against must be 'every' or 'some'")
        return v

    @field_validator("boundary_container")
    @classmethod
    def validate_container(cls, v: str) -> str:
        if v not in ("sorted", "linear"):
            raise ValueError("boundary_container must be 'sorted' or 'linear'")
        return v

    @classmethod
    def from_settings(cls, settings: SolverSettings, **overrides: Any) -> "SearchParams":
        """Settings-derived defaults with non-None overrides applied."""
        base = {
            "sp": settings.SP,
            "t1": settings.T1,
            "t2": settings.T2,
            "eps_v": settings.EPS_V,
            "eps_p": settings.EPS_P,
            "max_steps": settings.MAX_STEPS,
            "timeout_s": settings.TIMEOUT_S,
            "seed": settings.SEED,
            "boundary_offset": settings.BOUNDARY_OFFSET,
            "uniform_resolution": settings.UNIFORM_RESOLUTION,
            "restart_range": settings.RESTART_RANGE,
            "wall_check_interval": settings.WALL_CHECK_INTERVAL,
            "relax_against": settings.RELAX_AGAINST,
        }
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)


class RunConfig(BaseModel):
    """What to run and how to report it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    paths: List[str] = Field(default_factory=list)
    params: SearchParams = Field(default_factory=SearchParams)
    no_incremental: bool = False
    no_relax: bool = False
    full_order: bool = False
    verify: bool = True
    output: str = "human"
    trace_path: Optional[str] = None
    jobs: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_modes(self) -> "RunConfig":
        if self.no_relax and self.full_order:
            raise ValueError("--no-relax and --full-order are mutually exclusive")
        return self

    def search_params(self) -> SearchParams:
        """params with the mode flags folded in."""
        preference = self.params.preference
        if self.no_relax:
            preference = ValuePreference.THRESHOLD
        elif self.full_order:
            preference = ValuePreference.FULL_ORDER
        return self.params.model_copy(
            update={
                "preference": preference,
                "incremental": self.params.incremental and not self.no_incremental,
            }
        )


class RunRecord(BaseModel):
    """One CSV row."""

    instance: str
    answer: str
    time_s: float
    steps: int = 0
    minor_restarts: int = 0
    major_restarts: int = 0
    relaxations: int = 0
    verified: bool = False

    @model_validator(mode="after")
    def sat_is_verified(self) -> "RunRecord":
        if self.answer == "sat" and not self.verified:
            raise ValueError("a sat record must carry a verified model")
        return self


CSV_COLUMNS = list(RunRecord.model_fields)

__all__ = ["CSV_COLUMNS", "RunConfig", "RunRecord", "SearchParams", "ValuePreference"]
