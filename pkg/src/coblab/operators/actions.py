"""Space-checked operator application and adjoint orbits."""

import logging
from typing import List

from coblab.common import get_cutoff
from coblab.constructs.operators import OperatorClass, OperatorSpec
from coblab.constructs.results import AdjointOrbit, OrbitEnd
from coblab.constructs.vectors import CoeffVector
from coblab.core import ErgodicAccumulator
from coblab.errors import SpaceMismatchError

logger = logging.getLogger(__name__)


def check_space(op: OperatorSpec, v: CoeffVector) -> None:
    if v.space_tag != op.space_tag:
        raise SpaceMismatchError(op.space_tag, v.space_tag)


def apply(op: OperatorSpec, v: CoeffVector) -> CoeffVector:
    """Exact image Tv."""
    check_space(op, v)
    return op.forward(v)


def apply_adjoint(op: OperatorSpec, v: CoeffVector) -> CoeffVector:
    """Exact image T*v."""
    check_space(op, v)
    return op.adjoint(v)


def apply_power(op: OperatorSpec, v: CoeffVector, k: int) -> CoeffVector:
    check_space(op, v)
    for _ in range(k):
        if v.is_empty:
            break
        v = op.forward(v)
    return v


def apply_adjoint_power(op: OperatorSpec, v: CoeffVector, k: int) -> CoeffVector:
    check_space(op, v)
    for _ in range(k):
        if v.is_empty:
            break
        v = op.adjoint(v)
    return v


def classify(op: OperatorSpec) -> OperatorClass:
    return op.classify()


def power_sum(op: OperatorSpec, x: CoeffVector, n: int) -> CoeffVector:
    """S_n(T)x = x + Tx + ... + T^(n-1)x."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    check_space(op, x)
    total = ErgodicAccumulator(x)
    term = x
    for _ in range(n):
        if term.is_empty:
            break
        total.add(term)
        term = op.forward(term)
    return total.value()


def adjoint_orbit(op: OperatorSpec, x: CoeffVector, cutoff: int = None) -> AdjointOrbit:
    """Iterate T* on x until the orbit dies, enters the unitary part, or
    ``cutoff`` adjoint applications have been made.

    Args:
      op:
        Operator whose adjoint is iterated.
      x:
        Starting vector.
      cutoff:
        Largest number of adjoint applications. Defaults to
        :func:`coblab.common.get_cutoff`.

    Returns:
      At most ``cutoff + 1`` vectors x, T*x, ... with the reason the
      iteration stopped.
    """
    cutoff = get_cutoff() if cutoff is None else cutoff
    if cutoff < 1:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    check_space(op, x)

    vectors: List[CoeffVector] = [x]
    current = x
    while True:
        if current.is_empty:
            end = OrbitEnd.EMPTY
            break
        if op.unitary_contains(current):
            end = OrbitEnd.UNITARY
            break
        if len(vectors) > cutoff:
            end = OrbitEnd.TRUNCATED
            break
        current = op.adjoint(current)
        vectors.append(current)
    logger.debug("adjoint orbit of length %d ended: %s", len(vectors), end.value)
    return AdjointOrbit(vectors=vectors, end=end)
