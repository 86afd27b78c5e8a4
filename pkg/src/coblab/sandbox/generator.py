from typing import Optional, Tuple

import numpy as np

from coblab.constructs.operators import (
    DiagonalUnitary,
    DirectSum,
    MatrixContraction,
    OperatorSpec,
    WeightedShift,
)
from coblab.constructs.results import FourierSeries
from coblab.constructs.vectors import CoeffVector, SeqVector, ShiftIndex, Space
from coblab.core import combine
from coblab.sandbox import common


class SampleGenerator:
    """Seeded source of random vectors, operators and coboundaries.

    Everything is drawn from one numpy generator, so a fixed seed
    reproduces the whole sequence of samples.
    """

    def __init__(self, seed: Optional[int] = None):
        self._rng = common.make_rng(seed)

    @property
    def rng(self) -> np.random.Generator:
        return self._rng

    def shift_vector(
        self, multiplicity: int = 1, levels: int = 8, count: int = 4
    ) -> CoeffVector:
        cells = common.random_support(self._rng, levels * multiplicity, count)
        indices = [ShiftIndex(*divmod(int(c), multiplicity)) for c in cells]
        values = common.random_complex(self._rng, len(indices))
        return CoeffVector.shift(common.as_entries(indices, values), multiplicity)

    def fourier_vector(
        self, max_mode: int = 64, count: int = 4, hermitian: bool = False
    ) -> CoeffVector:
        modes = [int(m) + 1 for m in common.random_support(self._rng, max_mode, count)]
        if not hermitian:
            signs = self._rng.choice([-1, 1], size=len(modes))
            modes = [int(s) * m for s, m in zip(signs, modes)]
        values = common.random_complex(self._rng, len(modes))
        entries = common.as_entries(modes, values)
        if hermitian:
            entries.update({-m: c.conjugate() for m, c in list(entries.items())})
        return CoeffVector.fourier(entries)

    def dense_vector(self, dimension: int) -> CoeffVector:
        return CoeffVector.dense(common.random_complex(self._rng, dimension))

    def trig_polynomial(
        self,
        base: int = 2,
        max_mode: int = 64,
        count: int = 4,
        hermitian: bool = False,
    ) -> FourierSeries:
        return FourierSeries(
            coeffs=self.fourier_vector(max_mode, count, hermitian),
            base=base,
            hermitian=hermitian,
        )

    def _unitary_matrix(self, dimension: int) -> np.ndarray:
        gaussian = common.random_complex(self._rng, dimension * dimension).reshape(
            dimension, dimension
        )
        q, r = np.linalg.qr(gaussian)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    def contraction(self, dimension: int, largest: float = 0.9) -> MatrixContraction:
        """U diag(s) V* with singular values s drawn from [0, largest]."""
        if not 0 <= largest <= 1:
            raise ValueError("largest singular value must lie in [0, 1]")
        singular_values = largest * self._rng.random(dimension)
        left = self._unitary_matrix(dimension)
        right = self._unitary_matrix(dimension)
        return MatrixContraction(matrix=(left * singular_values) @ right.conj().T)

    def unitary(self, dimension: int) -> MatrixContraction:
        return MatrixContraction(matrix=self._unitary_matrix(dimension))

    def diag_unitary(self, dimension: int) -> DiagonalUnitary:
        return DiagonalUnitary(phases=common.random_unit_phases(self._rng, dimension))

    def weighted_shift(self, length: int = 4, tail: complex = 1) -> WeightedShift:
        moduli = self._rng.random(length)
        return WeightedShift(
            weights=moduli * common.random_unit_phases(self._rng, length), tail=tail
        )

    def vector_for(self, op: OperatorSpec, count: int = 4) -> CoeffVector:
        """A random vector in the space of ``op``."""
        space, size = op.space_tag
        if space is Space.SHIFT:
            return self.shift_vector(size, count=count)
        if space is Space.FOURIER:
            return self.fourier_vector(count=count)
        if space is Space.DENSE:
            return self.dense_vector(size)
        if isinstance(op, DirectSum):
            return op.join([self.vector_for(part, count) for part in op.parts])
        raise ValueError(f"no sampler for the {space.value} space")

    def seq_vector(self, op: OperatorSpec, slots: int = 3) -> SeqVector:
        return SeqVector.of(self.vector_for(op) for _ in range(slots))

    def coboundary(
        self, op: OperatorSpec, y: CoeffVector = None
    ) -> Tuple[CoeffVector, CoeffVector]:
        """A pair (x, y) with x = (I - T)y."""
        y = self.vector_for(op) if y is None else y
        return combine(1, y, -1, op.forward(y)), y
