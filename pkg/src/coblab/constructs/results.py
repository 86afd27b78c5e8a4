"""Results and reports produced by the analysis layer."""

import enum
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import Field, root_validator, validator

from coblab.constructs.common import PRUNE_FLOOR, AnalysisConstruct
from coblab.constructs.vectors import CoeffVector, Space
from coblab.errors import SpaceMismatchError


class OrbitEnd(str, enum.Enum):
    EMPTY = "empty"
    UNITARY = "unitary"
    TRUNCATED = "truncated"


class AdjointOrbit(AnalysisConstruct):
    """The vectors x, T*x, T*^2 x, ... up to the first stopping point.

    With ``end == EMPTY`` the last vector is the zero vector; with
    ``end == UNITARY`` the last vector lies in the unitary part of T and
    every further iterate keeps its norm; with ``end == TRUNCATED`` the
    cutoff was reached.
    """

    vectors: List[CoeffVector]
    end: OrbitEnd

    @property
    def exact(self) -> bool:
        return self.end is OrbitEnd.EMPTY

    @property
    def certified(self) -> bool:
        return self.end is not OrbitEnd.TRUNCATED


class WoldSplit(AnalysisConstruct):
    """Shift components x_0..x_J of x plus the residual R_J.

    ``residual`` equals T^(J+1) T*^(J+1) x, which is the unitary part of
    x when the split is exact.
    """

    components: List[CoeffVector]
    residual: CoeffVector
    j_max: int = Field(..., description="Index J of the last component.")
    exact: bool
    orbit_end: OrbitEnd


class DecayFit(AnalysisConstruct):
    beta: float
    fit_residual: float
    levels: List[int]


class Verdict(str, enum.Enum):
    SOLVED = "solved"
    NOT_COBOUNDARY = "not_coboundary"
    INCONCLUSIVE = "inconclusive"


class ConditionReport(AnalysisConstruct):
    """Values and verdicts of the coboundary conditions for one input."""

    summab_value: float = Field(..., description="Sum of k * |T*^k x| over the orbit.")
    summab_exact: bool
    orbit_end: OrbitEnd
    ergodic_limit: Optional[float] = Field(
        None, description="Exact limit of |sum_{k<=n} T^k x|^2 / n."
    )
    unitary_norm: float = 0.0
    browder_sup: float = 0.0
    browder_bounded: bool = True
    browder_bounded_up_to: int = 0
    sqrt_ratio_last: Optional[float] = None
    osqrt_holds: Optional[bool] = None
    defect_slope: Optional[float] = None
    defect_o_n: Optional[bool] = None
    kronecker_sum: Optional[float] = None
    kronecker_converges: Optional[bool] = None
    valuation_sum: Optional[float] = None
    level_decay_alpha: Optional[float] = None
    notes: List[str] = []


class SolveResult(AnalysisConstruct):
    verdict: Verdict
    solution: Optional[CoeffVector] = None
    residual: float
    growth_constant: Optional[float] = None
    partial_energy: Optional[float] = None
    isometric_constraint: bool = False
    diagnostics: ConditionReport


class BrowderBound(AnalysisConstruct):
    sup: float
    bounded: bool
    horizon: int


class ContractionConditions(AnalysisConstruct):
    """Profiles and heuristic verdicts for a contraction and a vector.

    ``sqrt_ratios[n-1]`` is |S_n x| / sqrt(n), ``defect_partial_sums[n-1]``
    is the sum over k <= n of |S_k x|^2 - |T S_k x|^2, and
    ``kronecker_partial_sums`` divides each term by k.
    """

    horizon: int
    sqrt_ratios: List[float]
    osqrt_holds: bool
    defect_partial_sums: List[float]
    defect_slope: float
    defect_o_n: bool
    kronecker_partial_sums: List[float]
    kronecker_tail: float
    kronecker_converges: bool
    summab_value: float
    summab_exact: bool
    heuristic: bool = True


class FourierSeries(AnalysisConstruct):
    """A trigonometric polynomial with zero mean and a dilation base.

    With ``hermitian`` set, the coefficients must satisfy
    a_(-n) = conj(a_n), i.e. the polynomial is real-valued.
    """

    coeffs: CoeffVector
    base: int = 2
    hermitian: bool = False

    @validator("coeffs")
    def check_space(cls, v):
        if v.space is not Space.FOURIER:
            raise SpaceMismatchError(v.space_tag, (Space.FOURIER, None))
        return v

    @validator("base")
    def check_base(cls, v):
        if v < 2:
            raise ValueError("base must be at least 2")
        return v

    @root_validator(skip_on_failure=True)
    def check_hermitian(cls, values):
        if values["hermitian"]:
            entries = values["coeffs"].entries
            for mode, c in entries.items():
                mirror = entries.get(-mode, 0j)
                if abs(mirror - c.conjugate()) > PRUNE_FLOOR:
                    raise ValueError(
                        f"coefficients of modes {mode} and {-mode} are not conjugate"
                    )
        return values


class Obstruction(AnalysisConstruct):
    mode: int = Field(..., description="Chain root m, not divisible by the base.")
    chain_sum: complex


class ChainVerdict(AnalysisConstruct):
    solvable: bool
    g: Optional[FourierSeries] = None
    obstructions: List[Obstruction] = []
    residual: float = 0.0


class BlockEnergyProfile(AnalysisConstruct):
    levels: List[Tuple[int, float]]
    alpha: Optional[float] = None
    fit_residual: Optional[float] = None


class Window(AnalysisConstruct):
    indices: List[Any]
    overflow: List[Any] = []
    closed: bool = False


class WindowMatrix(AnalysisConstruct):
    """T restricted to a window plus the block of rows leaving it."""

    window: Window
    matrix: np.ndarray
    overflow_matrix: np.ndarray
    lost_mass: List[float]


class OracleComparison(AnalysisConstruct):
    constructive: SolveResult
    lsq_solution: CoeffVector
    lsq_residual: float
    discrepancy: Optional[float] = None
    window_size: int
    agree: bool


class DilationCheck(AnalysisConstruct):
    """Largest observed gaps of the dilation identities over a batch."""

    trials: int
    pythagoras_gap: float
    isometry_gap: float
    summability_gap: float
    summability_agrees: bool
    lift_identity_gap: float
    passed: bool
