"""Wold decomposition of a vector under an isometry.

The projections onto the wandering subspaces T^j K, K = H - TH, are
assembled from forward and adjoint applications only:
P_j = T^j (I - TT*) T*^j. No basis of K is ever formed.
"""

import logging
import math

import numpy as np

from coblab.constructs.common import DEFAULT_TOLERANCES, Tolerances
from coblab.constructs.operators import OperatorSpec
from coblab.constructs.results import AdjointOrbit, DecayFit, OrbitEnd, WoldSplit
from coblab.constructs.vectors import CoeffVector
from coblab.core import combine, norm, subtract
from coblab.errors import (
    InexactSplitError,
    InsufficientDataError,
    NotIsometryError,
)
from coblab.operators.actions import (
    adjoint_orbit,
    apply_adjoint_power,
    apply_power,
    check_space,
)

logger = logging.getLogger(__name__)


def require_isometry(op: OperatorSpec) -> None:
    if not op.classify().isometric:
        raise NotIsometryError(op.kind)


def wandering_project(op: OperatorSpec, v: CoeffVector) -> CoeffVector:
    """Projection (I - TT*)v onto the wandering subspace K."""
    require_isometry(op)
    check_space(op, v)
    return subtract(v, op.forward(op.adjoint(v)))


def wold_component(op: OperatorSpec, x: CoeffVector, j: int) -> CoeffVector:
    """The component x_j = T^j (I - TT*) T*^j x of x in T^j K."""
    if j < 0:
        raise ValueError(f"component index must be nonnegative, got {j}")
    require_isometry(op)
    lowered = apply_adjoint_power(op, x, j)
    return apply_power(op, wandering_project(op, lowered), j)


def _split_from_orbit(
    op: OperatorSpec, orbit: AdjointOrbit, tolerances: Tolerances
) -> WoldSplit:
    vectors = list(orbit.vectors)
    j_max = max(len(vectors) - 2, 0)
    while len(vectors) < j_max + 2:
        vectors.append(op.adjoint(vectors[-1]))

    components = []
    for j in range(j_max + 1):
        projected = combine(
            1, vectors[j], -1, op.forward(vectors[j + 1]), tolerances.zero_eps
        )
        components.append(apply_power(op, projected, j))
    residual = apply_power(op, vectors[j_max + 1], j_max + 1)
    return WoldSplit(
        components=components,
        residual=residual,
        j_max=j_max,
        exact=orbit.certified,
        orbit_end=orbit.end,
    )


def wold_split(
    op: OperatorSpec,
    x: CoeffVector,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
) -> WoldSplit:
    """Split x into shift components x_0..x_J and the residual R_J.

    The split is exact when the adjoint orbit of x vanishes or reaches
    the unitary part of T. Otherwise it stops at the cutoff, J is the
    last index computed, and every verdict built on it is inconclusive.
    """
    require_isometry(op)
    x = x.pruned(tolerances.zero_eps)
    split = _split_from_orbit(op, adjoint_orbit(op, x, cutoff), tolerances)
    logger.debug(
        "wold split: J=%d exact=%s residual norm=%.3g",
        split.j_max,
        split.exact,
        norm(split.residual),
    )
    return split


def component_decay(
    op: OperatorSpec,
    x: CoeffVector,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
) -> DecayFit:
    """Fit |x_j| ~ 2^(-beta j) over the nonzero components of an exact split."""
    split = wold_split(op, x, tolerances, cutoff)
    levels = [
        j
        for j, component in enumerate(split.components)
        if norm(component) > tolerances.zero_eps
    ]
    if not split.exact:
        raise InexactSplitError(split.j_max)
    if len(levels) < 3:
        raise InsufficientDataError(len(levels), 3)

    exponents = np.array([math.log2(norm(split.components[j])) for j in levels])
    slope, intercept = np.polyfit(np.array(levels, dtype=float), exponents, 1)
    fitted = slope * np.array(levels, dtype=float) + intercept
    fit_residual = float(np.sqrt(np.mean((exponents - fitted) ** 2)))
    return DecayFit(beta=float(-slope), fit_residual=fit_residual, levels=levels)


def orbit_end_note(end: OrbitEnd) -> str:
    return {
        OrbitEnd.EMPTY: "adjoint orbit terminates exactly",
        OrbitEnd.UNITARY: "adjoint orbit reaches the unitary part",
        OrbitEnd.TRUNCATED: "adjoint orbit truncated at the cutoff",
    }[end]
