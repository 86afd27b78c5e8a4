from pydantic import BaseModel, Field, validator

# Operator images and validated vectors are always pruned at this magnitude.
PRUNE_FLOOR = 1e-12


class Construct(BaseModel):
    _level: int

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True


class CoreConstruct(Construct):
    """Vectors and operators: the objects computations act on."""

    _level = 0


class AnalysisConstruct(Construct):
    """Results and reports derived from core constructs."""

    _level = 1


class Tolerances(Construct):
    """Numerical thresholds shared by every routine."""

    zero_eps: float = Field(
        PRUNE_FLOOR,
        description="Entries at or below this magnitude are pruned. "
        "Never below the operator-layer floor of 1e-12.",
    )
    residual_tol: float = Field(
        1e-9, description="Largest accepted residual of a certified solution."
    )
    trend_tol: float = Field(
        1e-6, description="Slope threshold of the heuristic trend verdicts."
    )
    identity_tol: float = Field(
        1e-10, description="Largest accepted gap of an exact norm identity."
    )

    @validator("zero_eps", "residual_tol", "trend_tol", "identity_tol")
    def check_positive(cls, v):
        if not v > 0:
            raise ValueError("tolerances must be strictly positive")
        return v

    @validator("zero_eps")
    def check_floor(cls, v):
        if v < PRUNE_FLOOR:
            raise ValueError(f"zero_eps must be at least {PRUNE_FLOOR!r}")
        return v


DEFAULT_TOLERANCES = Tolerances()
