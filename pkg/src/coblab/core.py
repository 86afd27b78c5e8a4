"""Hilbert-space primitives on coefficient vectors."""

import math
from typing import Any, Dict

from coblab.constructs.vectors import CoeffVector, check_same_space


def inner(u: CoeffVector, v: CoeffVector) -> complex:
    """Inner product, linear in ``u`` and conjugate-linear in ``v``."""
    check_same_space(u, v)
    if len(u.entries) > len(v.entries):
        small, large, swap = v.entries, u.entries, True
    else:
        small, large, swap = u.entries, v.entries, False
    total = 0j
    for index, c in small.items():
        d = large.get(index)
        if d is not None:
            total += d * c.conjugate() if swap else c * d.conjugate()
    return total


def norm_squared(u: CoeffVector) -> float:
    return math.fsum(c.real * c.real + c.imag * c.imag for c in u.entries.values())


def norm(u: CoeffVector) -> float:
    return math.sqrt(norm_squared(u))


def combine(
    alpha: complex,
    u: CoeffVector,
    beta: complex,
    v: CoeffVector,
    eps: float = None,
) -> CoeffVector:
    """Return alpha*u + beta*v, pruned at ``eps``."""
    check_same_space(u, v)
    entries: Dict[Any, complex] = {}
    if alpha != 0:
        entries = {index: alpha * c for index, c in u.entries.items()}
    if beta != 0:
        for index, c in v.entries.items():
            entries[index] = entries.get(index, 0j) + beta * c
    return u.derive(entries, eps)


def add(u: CoeffVector, v: CoeffVector) -> CoeffVector:
    return combine(1, u, 1, v)


def subtract(u: CoeffVector, v: CoeffVector) -> CoeffVector:
    return combine(1, u, -1, v)


def scale(alpha: complex, u: CoeffVector) -> CoeffVector:
    return u.derive({index: alpha * c for index, c in u.entries.items()})


class ErgodicAccumulator:
    """Running sum of vectors with an incrementally maintained norm.

    Adding a vector costs time proportional to its own support, which
    keeps ergodic-sum profiles linear in the number of terms.
    """

    def __init__(self, like: CoeffVector):
        self._like = like
        self._entries: Dict[Any, complex] = {}
        self._norm_squared = 0.0

    def add(self, v: CoeffVector) -> None:
        check_same_space(self._like, v)
        entries = self._entries
        delta = 0.0
        for index, c in v.entries.items():
            old = entries.get(index, 0j)
            new = old + c
            delta += abs(new) ** 2 - abs(old) ** 2
            entries[index] = new
        self._norm_squared = max(self._norm_squared + delta, 0.0)

    @property
    def norm_squared(self) -> float:
        return self._norm_squared

    def value(self) -> CoeffVector:
        return self._like.derive(self._entries)
