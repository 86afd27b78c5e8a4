"""Brute-force cross-check: (I - T)y = x as a dense least-squares problem.

The operator is materialized on a finite window of indices. Rows for
indices that the window columns are mapped to but that lie outside the
window are kept as an overflow block, so the windowed residual is the
true residual |x - (I - T)y| of the windowed candidate y.
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.linalg

from coblab.constructs.common import DEFAULT_TOLERANCES, Tolerances
from coblab.constructs.operators import OperatorSpec
from coblab.constructs.results import (
    OracleComparison,
    Verdict,
    Window,
    WindowMatrix,
)
from coblab.constructs.vectors import CoeffVector, basis, from_tag
from coblab.core import norm, subtract
from coblab.analysis.dilation import solve_contraction
from coblab.operators.actions import adjoint_orbit, check_space

logger = logging.getLogger(__name__)

WINDOW_CAP = 4096
RANK_TOLERANCE = 1e-10
AGREEMENT_TOL = 1e-8


def _overflow(op: OperatorSpec, indices: List[Any]) -> List[Any]:
    inside = set(indices)
    overflow: Dict[Any, None] = {}
    for index in indices:
        for image in op.forward(basis(op.space_tag, index)).entries:
            if image not in inside:
                overflow.setdefault(image)
    return list(overflow)


def build_window(
    op: OperatorSpec,
    x: CoeffVector,
    depth: int = None,
    cap: int = WINDOW_CAP,
    cutoff: int = None,
) -> Window:
    """Forward closure of support(x) to ``depth`` applications of T.

    Args:
      op:
        Operator whose forward action generates the window.
      x:
        Vector whose support seeds the window.
      depth:
        Number of closure rounds. Defaults to three times the number of
        Wold components of x.
      cap:
        Largest window size; the closure stops once it is reached.
      cutoff:
        Adjoint-orbit cutoff used for the default depth.
    """
    check_space(op, x)
    if depth is None:
        depth = 3 * max(len(adjoint_orbit(op, x, cutoff).vectors) - 1, 1)

    indices: Dict[Any, None] = dict.fromkeys(x.support())
    frontier = list(indices)
    for _ in range(depth):
        if not frontier or len(indices) >= cap:
            break
        reached = []
        for index in frontier:
            for image in op.forward(basis(op.space_tag, index)).entries:
                if image not in indices and len(indices) < cap:
                    indices[image] = None
                    reached.append(image)
        frontier = reached

    ordered = list(indices)
    overflow = _overflow(op, ordered)
    logger.debug("window of %d indices, %d overflow", len(ordered), len(overflow))
    return Window(indices=ordered, overflow=overflow, closed=not overflow)


def materialize(op: OperatorSpec, window: Window) -> WindowMatrix:
    """Dense matrix of T on the window and the block of overflow rows.

    Column j holds the image of the j-th window basis vector.
    """
    if not window.indices:
        raise ValueError("window is empty")
    position = {index: i for i, index in enumerate(window.indices)}
    overflow = _overflow(op, window.indices)
    overflow_position = {index: i for i, index in enumerate(overflow)}

    matrix = np.zeros((len(position), len(position)), dtype=complex)
    overflow_matrix = np.zeros((len(overflow), len(position)), dtype=complex)
    lost_mass = []
    for j, index in enumerate(window.indices):
        lost = 0.0
        for image, c in op.forward(basis(op.space_tag, index)).entries.items():
            if image in position:
                matrix[position[image], j] = c
            else:
                overflow_matrix[overflow_position[image], j] = c
                lost += abs(c) ** 2
        lost_mass.append(float(np.sqrt(lost)))

    return WindowMatrix(
        window=window.copy(update=dict(overflow=overflow, closed=not overflow)),
        matrix=matrix,
        overflow_matrix=overflow_matrix,
        lost_mass=lost_mass,
    )


def lsq_solve(
    op: OperatorSpec, x: CoeffVector, window: Window = None
) -> Tuple[CoeffVector, float]:
    """Minimum-norm least-squares solution of (I - T)y = x on a window.

    Returns:
      The windowed y and the residual over window and overflow rows.
    """
    check_space(op, x)
    if x.is_empty:
        return op.zero(), 0.0
    window = build_window(op, x) if window is None else window
    materialized = materialize(op, window)
    position = {index: i for i, index in enumerate(window.indices)}
    missing = [index for index in x.entries if index not in position]
    if missing:
        raise ValueError(f"support of x leaves the window: {missing[:5]!r}")

    size = len(position)
    system = np.vstack(
        [np.eye(size) - materialized.matrix, -materialized.overflow_matrix]
    )
    rhs = np.zeros(system.shape[0], dtype=complex)
    for index, c in x.entries.items():
        rhs[position[index]] = c

    solution = scipy.linalg.lstsq(
        system, rhs, cond=RANK_TOLERANCE, lapack_driver="gelsd"
    )[0]
    residual = float(np.linalg.norm(system @ solution - rhs))
    y = from_tag(
        op.space_tag,
        {index: complex(solution[i]) for index, i in position.items()},
    )
    return y, residual


def compare(
    op: OperatorSpec,
    x: CoeffVector,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
    depth: int = None,
) -> OracleComparison:
    """Run the constructive solver and the windowed least squares side by side.

    Solved cases agree when both solutions coincide within 1e-8;
    certified negatives agree when the windowed residual stays above
    ``residual_tol``. Inconclusive runs and negatives that only exclude
    solutions with Dy = 0 have nothing to contradict.
    """
    constructive = solve_contraction(op, x, tolerances, cutoff)
    window = build_window(op, x, depth, cutoff=cutoff)
    y, residual = lsq_solve(op, x, window)

    discrepancy = None
    agree = True
    if constructive.verdict is Verdict.SOLVED:
        discrepancy = norm(subtract(constructive.solution, y))
        agree = discrepancy <= AGREEMENT_TOL
    elif (
        constructive.verdict is Verdict.NOT_COBOUNDARY
        and not constructive.isometric_constraint
    ):
        agree = residual > tolerances.residual_tol
    logger.info(
        "oracle: verdict=%s lsq residual=%.3g agree=%s",
        constructive.verdict.value,
        residual,
        agree,
    )
    return OracleComparison(
        constructive=constructive,
        lsq_solution=y,
        lsq_residual=residual,
        discrepancy=discrepancy,
        window_size=len(window.indices),
        agree=agree,
    )
