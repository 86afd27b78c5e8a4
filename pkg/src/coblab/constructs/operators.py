"""Structured operator families with exact forward and adjoint actions.

Every operator acts on finitely supported vectors of one index space
and maps them to finitely supported vectors of the same space, so the
images below are exact up to pruning.
"""

import enum
import math
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Type

import numpy as np
import scipy.linalg
from pydantic import PositiveInt, root_validator, validator

from coblab.common import as_complex
from coblab.constructs.common import (
    DEFAULT_TOLERANCES,
    PRUNE_FLOOR,
    CoreConstruct,
    Tolerances,
)
from coblab.constructs.vectors import (
    CoeffVector,
    SeqVector,
    ShiftIndex,
    Space,
    SpaceTag,
    coerce_index,
    from_tag,
    zero,
)
from coblab.errors import NotContractionError
from coblab.operators.cache import defect_matrix


class OperatorClass(str, enum.Enum):
    UNITARY = "unitary"
    ISOMETRY = "isometry"
    PROPER_CONTRACTION = "proper_contraction"
    NOT_CONTRACTION = "not_contraction"

    @property
    def isometric(self) -> bool:
        return self in (OperatorClass.UNITARY, OperatorClass.ISOMETRY)


class OperatorSpec(CoreConstruct):
    """Base class of the operator families."""

    kind: str

    @property
    def space_tag(self) -> SpaceTag:
        raise NotImplementedError

    def zero(self) -> CoeffVector:
        return zero(self.space_tag)

    def forward(self, v: CoeffVector) -> CoeffVector:
        """Tv, for a vector already known to live in this space."""
        raise NotImplementedError

    def adjoint(self, v: CoeffVector) -> CoeffVector:
        """T*v, for a vector already known to live in this space."""
        raise NotImplementedError

    def classify(self) -> OperatorClass:
        raise NotImplementedError

    def defect(self, v: CoeffVector) -> CoeffVector:
        """Dv with D = (I - T*T)^(1/2)."""
        return self.zero()

    def unitary_contains(self, v: CoeffVector) -> bool:
        """Whether v lies in the structurally known unitary part of T."""
        return v.is_empty

    def unitary_solve(
        self, v: CoeffVector, tolerances: Tolerances = DEFAULT_TOLERANCES
    ) -> Optional[CoeffVector]:
        """Solve (I - T)y = v for v in the unitary part, if possible."""
        return self.zero() if v.is_empty else None


class UnilateralShift(OperatorSpec):
    """Shift of multiplicity m: (level n, slot s) -> (n + 1, s)."""

    kind: Literal["shift"] = "shift"
    multiplicity: PositiveInt = 1

    @property
    def space_tag(self) -> SpaceTag:
        return Space.SHIFT, self.multiplicity

    def forward(self, v):
        return v.derive(
            {ShiftIndex(i.level + 1, i.slot): c for i, c in v.entries.items()}
        )

    def adjoint(self, v):
        return v.derive(
            {
                ShiftIndex(i.level - 1, i.slot): c
                for i, c in v.entries.items()
                if i.level > 0
            }
        )

    def classify(self):
        return OperatorClass.ISOMETRY


class DoublingKoopman(OperatorSpec):
    """Koopman operator f(t) -> f(bt) on zero-mean Fourier coefficients."""

    kind: Literal["doubling"] = "doubling"
    base: int = 2

    @validator("base")
    def check_base(cls, v):
        if v < 2:
            raise ValueError("base must be at least 2")
        return v

    @property
    def space_tag(self) -> SpaceTag:
        return Space.FOURIER, None

    def forward(self, v):
        b = self.base
        return v.derive({b * mode: c for mode, c in v.entries.items()})

    def adjoint(self, v):
        b = self.base
        return v.derive(
            {mode // b: c for mode, c in v.entries.items() if mode % b == 0}
        )

    def classify(self):
        return OperatorClass.ISOMETRY


def _parse_scalars(values: Any) -> Tuple[complex, ...]:
    return tuple(as_complex(value) for value in values)


class DiagonalUnitary(OperatorSpec):
    """Multiplication by unit-modulus phases on a dense space."""

    kind: Literal["diag_unitary"] = "diag_unitary"
    phases: Tuple[complex, ...]

    @validator("phases", pre=True)
    def parse_phases(cls, v):
        phases = _parse_scalars(v)
        if not phases:
            raise ValueError("at least one phase is required")
        for phase in phases:
            if abs(abs(phase) - 1) > PRUNE_FLOOR:
                raise ValueError(f"phase {phase!r} does not have unit modulus")
        return phases

    @property
    def space_tag(self) -> SpaceTag:
        return Space.DENSE, len(self.phases)

    def forward(self, v):
        return v.derive({i: self.phases[i] * c for i, c in v.entries.items()})

    def adjoint(self, v):
        return v.derive(
            {i: self.phases[i].conjugate() * c for i, c in v.entries.items()}
        )

    def classify(self):
        return OperatorClass.UNITARY

    def unitary_contains(self, v):
        return True

    def unitary_solve(self, v, tolerances=DEFAULT_TOLERANCES):
        solution = {}
        for i, c in v.entries.items():
            gap = 1 - self.phases[i]
            if abs(gap) <= tolerances.zero_eps:
                return None
            solution[i] = c / gap
        return v.derive(solution)


def classify_matrix(
    matrix: np.ndarray, zero_eps: float = PRUNE_FLOOR
) -> Tuple[OperatorClass, float]:
    """Classify a square matrix by its singular values.

    Returns:
      The class and the largest singular value.
    """
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    largest = float(singular_values.max()) if singular_values.size else 0.0
    if largest > 1 + zero_eps:
        return OperatorClass.NOT_CONTRACTION, largest
    if np.all(np.abs(singular_values - 1) <= zero_eps):
        return OperatorClass.UNITARY, largest
    return OperatorClass.PROPER_CONTRACTION, largest


class MatrixContraction(OperatorSpec):
    """A dense complex d x d matrix of operator norm at most 1."""

    kind: Literal["matrix"] = "matrix"
    matrix: np.ndarray

    @validator("matrix", pre=True)
    def parse_matrix(cls, v):
        if isinstance(v, np.ndarray):
            matrix = v.astype(complex)
        else:
            matrix = np.array([_parse_scalars(row) for row in v], dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or not matrix.size:
            raise ValueError("matrix must be square and nonempty")
        operator_class, largest = classify_matrix(matrix)
        if operator_class is OperatorClass.NOT_CONTRACTION:
            raise NotContractionError(largest)
        matrix.setflags(write=False)
        return matrix

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def space_tag(self) -> SpaceTag:
        return Space.DENSE, self.dimension

    def _dense(self, v: CoeffVector) -> np.ndarray:
        array = np.zeros(self.dimension, dtype=complex)
        for i, c in v.entries.items():
            array[i] = c
        return array

    def _sparse(self, array: np.ndarray) -> CoeffVector:
        return from_tag(self.space_tag, {i: complex(c) for i, c in enumerate(array)})

    def forward(self, v):
        if v.is_empty:
            return v
        return self._sparse(self.matrix @ self._dense(v))

    def adjoint(self, v):
        if v.is_empty:
            return v
        return self._sparse(self.matrix.conj().T @ self._dense(v))

    def classify(self):
        return classify_matrix(self.matrix)[0]

    def defect(self, v):
        if v.is_empty:
            return v
        matrix = defect_matrix(self.matrix, PRUNE_FLOOR)
        return self._sparse(matrix @ self._dense(v))

    def unitary_contains(self, v):
        return v.is_empty or self.classify() is OperatorClass.UNITARY

    def unitary_solve(self, v, tolerances=DEFAULT_TOLERANCES):
        if v.is_empty:
            return v
        if self.classify() is not OperatorClass.UNITARY:
            return None
        system = np.eye(self.dimension) - self.matrix
        rhs = self._dense(v)
        solution = scipy.linalg.lstsq(system, rhs, lapack_driver="gelsd")[0]
        if np.linalg.norm(system @ solution - rhs) > tolerances.residual_tol:
            return None
        return self._sparse(solution)


class WeightedShift(OperatorSpec):
    """e_k -> w_k e_(k+1); weights past the given ones equal ``tail``."""

    kind: Literal["weighted_shift"] = "weighted_shift"
    weights: Tuple[complex, ...] = ()
    tail: complex = 1 + 0j

    @validator("weights", pre=True)
    def parse_weights(cls, v):
        return _parse_scalars(v)

    @validator("tail", pre=True)
    def parse_tail(cls, v):
        return as_complex(v)

    @root_validator(skip_on_failure=True)
    def check_contraction(cls, values):
        moduli = [abs(w) for w in values["weights"]] + [abs(values["tail"])]
        if max(moduli) > 1 + PRUNE_FLOOR:
            raise NotContractionError(max(moduli))
        return values

    @property
    def space_tag(self) -> SpaceTag:
        return Space.SHIFT, 1

    def weight(self, k: int) -> complex:
        return self.weights[k] if k < len(self.weights) else self.tail

    def forward(self, v):
        return v.derive(
            {
                ShiftIndex(i.level + 1, 0): self.weight(i.level) * c
                for i, c in v.entries.items()
            }
        )

    def adjoint(self, v):
        return v.derive(
            {
                ShiftIndex(i.level - 1, 0): self.weight(i.level - 1).conjugate() * c
                for i, c in v.entries.items()
                if i.level > 0
            }
        )

    def classify(self):
        eps = PRUNE_FLOOR
        if all(abs(abs(w) - 1) <= eps for w in self.weights + (self.tail,)):
            return OperatorClass.ISOMETRY
        return OperatorClass.PROPER_CONTRACTION

    def defect(self, v):
        return v.derive(
            {
                i: math.sqrt(max(1 - abs(self.weight(i.level)) ** 2, 0.0)) * c
                for i, c in v.entries.items()
            }
        )


class DirectSum(OperatorSpec):
    """Block-diagonal operator; indices are (part, index within the part)."""

    kind: Literal["direct_sum"] = "direct_sum"
    parts: Tuple[Any, ...]

    @validator("parts", pre=True)
    def parse_parts(cls, v):
        parts = tuple(
            p if isinstance(p, OperatorSpec) else parse_operator(p) for p in v
        )
        if not parts:
            raise ValueError("a direct sum needs at least one part")
        return parts

    @property
    def space_tag(self) -> SpaceTag:
        return Space.SUM, len(self.parts)

    def split(self, v: CoeffVector) -> List[CoeffVector]:
        grouped: List[Dict[Any, complex]] = [{} for _ in self.parts]
        for (part, index), c in v.entries.items():
            grouped[part][coerce_index(self.parts[part].space_tag[0], index)] = c
        return [from_tag(p.space_tag, g) for p, g in zip(self.parts, grouped)]

    def join(self, pieces: List[CoeffVector]) -> CoeffVector:
        return from_tag(
            self.space_tag,
            {
                (part, index): c
                for part, piece in enumerate(pieces)
                for index, c in piece.entries.items()
            },
        )

    def _blockwise(self, method: str, v: CoeffVector) -> CoeffVector:
        return self.join(
            [getattr(p, method)(piece) for p, piece in zip(self.parts, self.split(v))]
        )

    def forward(self, v):
        return self._blockwise("forward", v)

    def adjoint(self, v):
        return self._blockwise("adjoint", v)

    def defect(self, v):
        return self._blockwise("defect", v)

    def classify(self):
        classes = {p.classify() for p in self.parts}
        if OperatorClass.NOT_CONTRACTION in classes:
            return OperatorClass.NOT_CONTRACTION
        if classes == {OperatorClass.UNITARY}:
            return OperatorClass.UNITARY
        if all(c.isometric for c in classes):
            return OperatorClass.ISOMETRY
        return OperatorClass.PROPER_CONTRACTION

    def unitary_contains(self, v):
        return all(
            p.unitary_contains(piece) for p, piece in zip(self.parts, self.split(v))
        )

    def unitary_solve(self, v, tolerances=DEFAULT_TOLERANCES):
        pieces = []
        for p, piece in zip(self.parts, self.split(v)):
            solution = p.unitary_solve(piece, tolerances)
            if solution is None:
                return None
            pieces.append(solution)
        return self.join(pieces)


class DilationOperator(OperatorSpec):
    """The isometry R(x_0, x_1, ...) = (T x_0, D x_0, x_1, x_2, ...).

    Acts on flattened sequence vectors whose indices are
    (position, index in H).
    """

    kind: Literal["dilation"] = "dilation"
    base: Any

    @validator("base", pre=True)
    def parse_base(cls, v):
        return v if isinstance(v, OperatorSpec) else parse_operator(v)

    @property
    def space_tag(self) -> SpaceTag:
        return Space.SEQUENCE, None

    def unflatten(self, v: CoeffVector) -> SeqVector:
        return SeqVector.unflatten(v, self.base.space_tag)

    def forward_seq(self, s: SeqVector) -> SeqVector:
        if not s.slots:
            return s
        head = s.slots[0]
        return SeqVector.of(
            [self.base.forward(head), self.base.defect(head), *s.slots[1:]]
        )

    def adjoint_seq(self, s: SeqVector) -> SeqVector:
        if not s.slots:
            return s
        zero_vector = self.base.zero()
        head = self.base.adjoint(s.slots[0])
        lifted = self.base.defect(s.slot(1, zero_vector))
        entries = dict(head.entries)
        for index, c in lifted.entries.items():
            entries[index] = entries.get(index, 0j) + c
        return SeqVector.of([head.derive(entries), *s.slots[2:]])

    def forward(self, v):
        return self.forward_seq(self.unflatten(v)).flatten()

    def adjoint(self, v):
        return self.adjoint_seq(self.unflatten(v)).flatten()

    def classify(self):
        return OperatorClass.ISOMETRY

    def unitary_contains(self, v):
        s = self.unflatten(v)
        return len(s.slots) <= 1 and self.base.unitary_contains(
            s.slot(0, self.base.zero())
        )

    def unitary_solve(self, v, tolerances=DEFAULT_TOLERANCES):
        s = self.unflatten(v)
        if len(s.slots) > 1:
            return None
        solution = self.base.unitary_solve(s.slot(0, self.base.zero()), tolerances)
        return None if solution is None else SeqVector.lift(solution).flatten()


_OPERATOR_KINDS: Mapping[str, Type[OperatorSpec]] = {
    "shift": UnilateralShift,
    "doubling": DoublingKoopman,
    "diag_unitary": DiagonalUnitary,
    "matrix": MatrixContraction,
    "weighted_shift": WeightedShift,
    "direct_sum": DirectSum,
    "dilation": DilationOperator,
}


def parse_operator(data: Mapping[str, Any]) -> OperatorSpec:
    """Build an operator from its JSON description, dispatching on ``kind``."""
    kind = data.get("kind")
    if kind not in _OPERATOR_KINDS:
        raise ValueError(
            f"unknown operator kind {kind!r}; expected one of {sorted(_OPERATOR_KINDS)}"
        )
    return _OPERATOR_KINDS[kind].parse_obj(data)
