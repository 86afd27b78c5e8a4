"""Constructive solution of (I - T)y = x for isometries.

The solver follows the recursion y_0 = x_0, y_r = x_r + T y_(r-1) over
the Wold components of x. When the adjoint orbit of x terminates, the
components vanish past J, so y_(J+m) = T^m y_J keeps the norm of y_J
forever: the series of |y_r|^2 converges exactly when y_J = 0, and
then y = y_0 + ... + y_(J-1).
"""

import logging
import math
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from coblab.constructs.common import DEFAULT_TOLERANCES, Tolerances
from coblab.constructs.operators import OperatorSpec
from coblab.constructs.results import (
    AdjointOrbit,
    BrowderBound,
    ConditionReport,
    OrbitEnd,
    SolveResult,
    Verdict,
    WoldSplit,
)
from coblab.constructs.vectors import CoeffVector
from coblab.core import ErgodicAccumulator, combine, inner, norm, norm_squared
from coblab.errors import LimitNotComputableError
from coblab.analysis.wold import _split_from_orbit, orbit_end_note, require_isometry
from coblab.operators.actions import adjoint_orbit, check_space

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 64

CONVENTION_NOTE = (
    "growth profile sums T^k x for k = 0..n; Browder sums S_n use n terms"
)


def _summability_from_orbit(orbit: AdjointOrbit) -> float:
    return math.fsum(k * norm(v) for k, v in enumerate(orbit.vectors))


def summability(
    op: OperatorSpec, x: CoeffVector, cutoff: int = None
) -> Tuple[float, bool]:
    """Sum of k |T*^k x| over the adjoint orbit of x.

    Returns:
      The sum and whether the orbit terminated exactly, i.e. whether
      the sum is the full series rather than a partial sum.
    """
    orbit = adjoint_orbit(op, x, cutoff)
    return _summability_from_orbit(orbit), orbit.exact


def _ergodic_limit_from_orbit(orbit: AdjointOrbit) -> float:
    x = orbit.vectors[0]
    cross = sum((inner(v, x) for v in orbit.vectors[1:]), 0j)
    return norm_squared(x) + 2 * cross.real


def ergodic_limit(op: OperatorSpec, x: CoeffVector, cutoff: int = None) -> float:
    """Exact value of lim |sum_{k<=n} T^k x|^2 / n for an isometry.

    Equal to |x|^2 + 2 Re sum_{k>=1} <T*^k x, x>, a finite sum when the
    adjoint orbit terminates.
    """
    require_isometry(op)
    orbit = adjoint_orbit(op, x, cutoff)
    if not orbit.exact:
        raise LimitNotComputableError()
    return _ergodic_limit_from_orbit(orbit)


def ergodic_sums(
    op: OperatorSpec, x: CoeffVector, n_max: int
) -> Iterator[Tuple[int, float]]:
    """Yield (n, |S_n(T)x|^2) for n = 1..n_max, where S_n has n terms."""
    check_space(op, x)
    total = ErgodicAccumulator(x)
    term = x
    for n in range(1, n_max + 1):
        total.add(term)
        yield n, total.norm_squared
        if not term.is_empty:
            term = op.forward(term)


def growth_profile(
    op: OperatorSpec, x: CoeffVector, ns: Sequence[int]
) -> List[Tuple[int, float]]:
    """Cesaro profile (n, |sum_{k=0}^n T^k x|^2 / n) at the requested n."""
    ns = list(ns)
    if any(n < 1 for n in ns) or any(a >= b for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing positive integers")
    if not ns:
        return []
    wanted = set(ns)
    profile = []
    for terms, squared in ergodic_sums(op, x, ns[-1] + 1):
        n = terms - 1
        if n in wanted:
            profile.append((n, squared / n))
    return profile


def tail_slope(values: Sequence[float], start: int) -> float:
    """Least-squares slope of values[start:] against n = start + 1, ..."""
    tail = np.asarray(values[start:], dtype=float)
    if tail.size < 2:
        return 0.0
    positions = np.arange(start + 1, start + 1 + tail.size, dtype=float)
    return float(np.polyfit(positions, tail, 1)[0])


def browder_bound(
    op: OperatorSpec,
    x: CoeffVector,
    horizon: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> BrowderBound:
    """Running supremum of |S_n(T)x| for n <= horizon.

    The bounded flag is a heuristic: the least-squares slope of |S_n x|
    over the last quarter of the profile must not exceed trend_tol.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    norms = [math.sqrt(squared) for _, squared in ergodic_sums(op, x, horizon)]
    start = min(horizon - max(horizon // 4, 1), horizon - 1)
    slope = tail_slope(norms, start)
    return BrowderBound(
        sup=max(norms),
        bounded=abs(slope) <= tolerances.trend_tol,
        horizon=horizon,
    )


def verify_coboundary(
    op: OperatorSpec,
    x: CoeffVector,
    y: CoeffVector,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """The certificate |x - (y - Ty)|, with x pruned at ``zero_eps``."""
    check_space(op, x)
    check_space(op, y)
    eps = tolerances.zero_eps
    image = combine(1, y, -1, op.forward(y), eps)
    return norm(combine(1, x.pruned(eps), -1, image, eps))


def _report_from_orbit(
    op: OperatorSpec,
    x: CoeffVector,
    orbit: AdjointOrbit,
    split: WoldSplit,
    tolerances: Tolerances,
    horizon: int,
) -> ConditionReport:
    bound = browder_bound(op, x, horizon, tolerances)
    limit = None
    if orbit.exact and op.classify().isometric:
        limit = _ergodic_limit_from_orbit(orbit)
    return ConditionReport(
        summab_value=_summability_from_orbit(orbit),
        summab_exact=orbit.exact,
        orbit_end=orbit.end,
        ergodic_limit=limit,
        unitary_norm=norm(split.residual) if split.exact else 0.0,
        browder_sup=bound.sup,
        browder_bounded=bound.bounded,
        browder_bounded_up_to=bound.horizon,
        notes=[orbit_end_note(orbit.end), CONVENTION_NOTE],
    )


def condition_report(
    op: OperatorSpec,
    x: CoeffVector,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
    horizon: int = DEFAULT_HORIZON,
) -> ConditionReport:
    """Summability, ergodic limit and Browder boundedness for x."""
    x = x.pruned(tolerances.zero_eps)
    orbit = adjoint_orbit(op, x, cutoff)
    split = _split_from_orbit(op, orbit, tolerances)
    return _report_from_orbit(op, x, orbit, split, tolerances, horizon)


def _recursion(op: OperatorSpec, split: WoldSplit) -> List[CoeffVector]:
    ys = [split.components[0]]
    for component in split.components[1:]:
        ys.append(combine(1, component, 1, op.forward(ys[-1])))
    return ys


def solve_isometry(
    op: OperatorSpec,
    x: CoeffVector,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
    horizon: int = DEFAULT_HORIZON,
) -> SolveResult:
    """Decide whether x = (I - T)y for an isometry T and construct y.

    Args:
      op:
        An isometric operator.
      x:
        The right-hand side.
      tolerances:
        Thresholds; ``residual_tol`` decides whether y_J vanishes.
      cutoff:
        Largest number of adjoint applications.
      horizon:
        Horizon of the Browder diagnostic attached to the result.

    Returns:
      Solved with y and its residual, NotCoboundary with the growth
      constant |y_J|^2, or Inconclusive when the adjoint orbit was
      truncated or the unitary part could not be solved.
    """
    require_isometry(op)
    check_space(op, x)
    x = x.pruned(tolerances.zero_eps)

    orbit = adjoint_orbit(op, x, cutoff)
    split = _split_from_orbit(op, orbit, tolerances)
    report = _report_from_orbit(op, x, orbit, split, tolerances, horizon)
    notes = list(report.notes)

    ys = _recursion(op, split)
    partial_energy = math.fsum(norm_squared(y) for y in ys)
    candidate = ErgodicAccumulator(x)
    for y in ys[:-1]:
        candidate.add(y)
    solution = candidate.value()
    last_norm = norm(ys[-1])

    def result(verdict: Verdict, **kwargs) -> SolveResult:
        logger.info("solve_isometry(%s): %s", op.kind, verdict.value)
        return SolveResult(
            verdict=verdict,
            residual=verify_coboundary(
                op, x, kwargs.pop("y", solution), tolerances
            ),
            partial_energy=partial_energy,
            diagnostics=report.copy(update={"notes": notes}),
            **kwargs,
        )

    if not split.exact:
        notes.append(
            f"partial energy sum |y_r|^2 over r <= {split.j_max}: {partial_energy!r}"
        )
        return result(Verdict.INCONCLUSIVE)

    if last_norm > tolerances.residual_tol:
        if orbit.end is OrbitEnd.UNITARY:
            notes.append("growth constant refers to the shift part of x")
        return result(Verdict.NOT_COBOUNDARY, growth_constant=last_norm**2)

    if norm(split.residual) > tolerances.residual_tol:
        unitary_solution = op.unitary_solve(split.residual, tolerances)
        if unitary_solution is None:
            notes.append(
                "x has a unitary-part component that is not a coboundary of "
                "the structured unitary part; summability fails there"
            )
            return result(Verdict.INCONCLUSIVE)
        solution = combine(1, solution, 1, unitary_solution)

    residual = verify_coboundary(op, x, solution, tolerances)
    if residual > tolerances.residual_tol:
        notes.append(f"certificate residual {residual!r} exceeds residual_tol")
        return result(Verdict.INCONCLUSIVE, y=solution)
    return result(Verdict.SOLVED, y=solution, solution=solution)
