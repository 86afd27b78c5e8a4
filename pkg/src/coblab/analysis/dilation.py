"""Isometric dilation of a contraction and the contraction solution path.

For a contraction T with defect D = (I - T*T)^(1/2), the operator
R(x_0, x_1, ...) = (T x_0, D x_0, x_1, ...) is an isometry on the
sequence space over H. A solution of (I - R)y~ = (x, 0, 0, ...) has
the form y~ = (y, 0, 0, ...) with x = (I - T)y and Dy = 0.
"""

import enum
import logging
import math
from typing import List

import numpy as np

from coblab.constructs.common import DEFAULT_TOLERANCES, Tolerances
from coblab.constructs.operators import (
    DilationOperator,
    MatrixContraction,
    OperatorClass,
    OperatorSpec,
    classify_matrix,
)
from coblab.constructs.results import (
    ContractionConditions,
    DilationCheck,
    SolveResult,
    Verdict,
)
from coblab.constructs.vectors import CoeffVector, SeqVector
from coblab.core import ErgodicAccumulator, inner, norm, norm_squared
from coblab.errors import NotContractionError
from coblab.analysis.solver import (
    DEFAULT_HORIZON,
    solve_isometry,
    summability,
    tail_slope,
    verify_coboundary,
)
from coblab.operators.actions import check_space

logger = logging.getLogger(__name__)


class Direction(str, enum.Enum):
    FORWARD = "forward"
    ADJOINT = "adjoint"


def require_contraction(op: OperatorSpec) -> None:
    if op.classify() is OperatorClass.NOT_CONTRACTION:
        largest = (
            classify_matrix(op.matrix)[1]
            if isinstance(op, MatrixContraction)
            else math.inf
        )
        raise NotContractionError(largest)


def defect_apply(op: OperatorSpec, v: CoeffVector) -> CoeffVector:
    """Dv for the defect operator D = (I - T*T)^(1/2) of a contraction."""
    require_contraction(op)
    check_space(op, v)
    return op.defect(v)


def dilation_of(op: OperatorSpec) -> DilationOperator:
    require_contraction(op)
    return DilationOperator(base=op)


def dilation_apply(
    dilation: DilationOperator, v: SeqVector, direction: Direction
) -> SeqVector:
    """R v or R* v on a sequence of vectors from the base space."""
    for slot in v.slots:
        check_space(dilation.base, slot)
    if Direction(direction) is Direction.FORWARD:
        return dilation.forward_seq(v)
    return dilation.adjoint_seq(v)


def _defect_terms(op: OperatorSpec, x: CoeffVector, horizon: int) -> List[float]:
    """|S_n x|^2 - |T S_n x|^2 for n = 1..horizon, from running sums only.

    Uses T S_n x = S_(n+1) x - x, so
    |T S_n x|^2 = |S_(n+1) x|^2 - 2 Re <S_(n+1) x, x> + |x|^2.
    """
    if op.classify().isometric or x.is_empty:
        return [0.0] * horizon
    x_squared = norm_squared(x)
    total = ErgodicAccumulator(x)
    term = x
    total.add(term)
    cross = inner(term, x)
    previous = total.norm_squared
    terms = []
    for _ in range(horizon):
        term = op.forward(term)
        total.add(term)
        cross += inner(term, x)
        current = total.norm_squared
        image = current - 2 * cross.real + x_squared
        terms.append(max(previous - image, 0.0))
        previous = current
    return terms


def _sqrt_ratios(op: OperatorSpec, x: CoeffVector, horizon: int) -> List[float]:
    total = ErgodicAccumulator(x)
    term = x
    ratios = []
    for n in range(1, horizon + 1):
        total.add(term)
        ratios.append(math.sqrt(total.norm_squared / n))
        if not term.is_empty:
            term = op.forward(term)
    return ratios


def contraction_conditions(
    op: OperatorSpec,
    x: CoeffVector,
    horizon: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
) -> ContractionConditions:
    """Profiles of the sufficient conditions for a contraction coboundary.

    All three verdicts are trend heuristics over the second half of the
    profiles and never certify that x is not a coboundary.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    require_contraction(op)
    check_space(op, x)
    half = horizon // 2

    ratios = _sqrt_ratios(op, x, horizon)
    if x.is_empty:
        osqrt_holds = True
    else:
        logs = np.log(np.maximum(np.array(ratios[half:]), tolerances.zero_eps))
        positions = np.log(np.arange(half + 1, horizon + 1, dtype=float))
        slope = float(np.polyfit(positions, logs, 1)[0]) if logs.size > 1 else 0.0
        osqrt_holds = slope < -tolerances.trend_tol

    terms = _defect_terms(op, x, horizon)
    partial_sums = list(np.cumsum(terms))
    kronecker = list(np.cumsum([t / k for k, t in enumerate(terms, start=1)]))
    defect_slope = tail_slope(partial_sums, half)
    kronecker_tail = kronecker[-1] - (kronecker[half - 1] if half else 0.0)

    value, exact = summability(op, x, cutoff)
    return ContractionConditions(
        horizon=horizon,
        sqrt_ratios=ratios,
        osqrt_holds=osqrt_holds,
        defect_partial_sums=[float(s) for s in partial_sums],
        defect_slope=defect_slope,
        defect_o_n=defect_slope <= tolerances.trend_tol,
        kronecker_partial_sums=[float(s) for s in kronecker],
        kronecker_tail=float(kronecker_tail),
        kronecker_converges=abs(kronecker_tail) <= tolerances.trend_tol,
        summab_value=value,
        summab_exact=exact,
    )


def solve_contraction(
    op: OperatorSpec,
    x: CoeffVector,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
    horizon: int = DEFAULT_HORIZON,
) -> SolveResult:
    """Look for y with x = (I - T)y and Dy = 0 through the dilation.

    Isometries go straight to :func:`solve_isometry`. Otherwise a
    negative verdict only rules out solutions on which T acts
    isometrically and is flagged with ``isometric_constraint``.
    """
    check_space(op, x)
    x = x.pruned(tolerances.zero_eps)
    if op.classify().isometric:
        return solve_isometry(op, x, tolerances, cutoff, horizon)

    dilation = dilation_of(op)
    lifted = solve_isometry(
        dilation, SeqVector.lift(x).flatten(), tolerances, cutoff, horizon
    )
    conditions = contraction_conditions(op, x, horizon, tolerances, cutoff)
    notes = list(lifted.diagnostics.notes)
    notes.append("residual and growth constant refer to the dilation")
    diagnostics = lifted.diagnostics.copy(
        update=dict(
            sqrt_ratio_last=conditions.sqrt_ratios[-1],
            osqrt_holds=conditions.osqrt_holds,
            defect_slope=conditions.defect_slope,
            defect_o_n=conditions.defect_o_n,
            kronecker_sum=conditions.kronecker_partial_sums[-1],
            kronecker_converges=conditions.kronecker_converges,
            notes=notes,
        )
    )
    update = dict(isometric_constraint=True, diagnostics=diagnostics)

    if lifted.verdict is not Verdict.SOLVED:
        logger.info("solve_contraction(%s): %s", op.kind, lifted.verdict.value)
        return lifted.copy(update=update)

    y = dilation.unflatten(lifted.solution).slot(0, op.zero())
    residual = verify_coboundary(op, x, y, tolerances)
    defect_norm = norm(op.defect(y))
    isometry_gap = abs(norm(op.forward(y)) - norm(y))
    if max(residual, defect_norm, isometry_gap) > tolerances.residual_tol:
        notes.append(
            f"lifted solution fails verification: residual {residual!r}, "
            f"|Dy| {defect_norm!r}, ||Ty| - |y|| {isometry_gap!r}"
        )
        logger.info("solve_contraction(%s): inconclusive", op.kind)
        return lifted.copy(
            update=dict(update, verdict=Verdict.INCONCLUSIVE, solution=None)
        )
    logger.info("solve_contraction(%s): solved", op.kind)
    return lifted.copy(update=dict(update, solution=y, residual=residual))


def lift_identity_gap(op: OperatorSpec, x: CoeffVector, n: int) -> float:
    """Relative gap in
    |sum_{k<=n} R^k x~|^2 = |sum_{k<=n} T^k x|^2 + sum_{k<n} |D S_(k+1) x|^2.

    Both sides grow like n^2, so the absolute gap is divided by
    max(1, right-hand side).
    """
    dilation = dilation_of(op)
    lifted = SeqVector.lift(x).flatten()
    dilated_total = ErgodicAccumulator(lifted)
    total = ErgodicAccumulator(x)
    term, dilated_term = x, lifted
    defect_energy = []
    for k in range(n + 1):
        total.add(term)
        dilated_total.add(dilated_term)
        if k < n:
            defect_energy.append(norm_squared(op.defect(total.value())))
        term = op.forward(term)
        dilated_term = dilation.forward(dilated_term)
    expected = total.norm_squared + math.fsum(defect_energy)
    return abs(dilated_total.norm_squared - expected) / max(1.0, expected)


def check_dilation(
    samples: List[CoeffVector],
    operators: List[OperatorSpec],
    n: int = 200,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
) -> DilationCheck:
    """Evaluate the dilation identities on paired operators and vectors.

    The Pythagoras and isometry gaps are relative to max(1, |u|^2) and
    max(1, |v|) and must stay within ``identity_tol``. The summability
    values of T on x and of R on the lifted x must agree within
    ``residual_tol`` relative, and so must the lift identity.
    """
    pythagoras = isometry = summab = lift = 0.0
    agrees = True
    for op, u in zip(operators, samples):
        dilation = dilation_of(op)
        u_squared = norm_squared(u)
        pythagoras = max(
            pythagoras,
            abs(
                norm_squared(op.forward(u))
                + norm_squared(defect_apply(op, u))
                - u_squared
            )
            / max(1.0, u_squared),
        )
        v = SeqVector.of([u, op.forward(u), u])
        image = dilation_apply(dilation, v, Direction.FORWARD)
        v_norm = norm(v.flatten())
        isometry = max(
            isometry,
            abs(norm(image.flatten()) - v_norm) / max(1.0, v_norm),
        )
        value, exact = summability(op, u, cutoff)
        dilated_value, dilated_exact = summability(
            dilation, SeqVector.lift(u).flatten(), cutoff
        )
        agrees = agrees and exact == dilated_exact
        summab = max(summab, abs(value - dilated_value) / max(1.0, value))
        lift = max(lift, lift_identity_gap(op, u, n))

    agrees = agrees and summab <= tolerances.residual_tol
    passed = (
        pythagoras <= tolerances.identity_tol
        and isometry <= tolerances.identity_tol
        and agrees
        and lift <= tolerances.residual_tol
    )
    logger.info("dilation check over %d trials: passed=%s", len(samples), passed)
    return DilationCheck(
        trials=len(samples),
        pythagoras_gap=pythagoras,
        isometry_gap=isometry,
        summability_gap=summab,
        summability_agrees=agrees,
        lift_identity_gap=lift,
        passed=passed,
    )
