"""Finitely supported coefficient vectors over typed index sets."""

import enum
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from pydantic import Field, root_validator

from coblab.common import as_complex
from coblab.constructs.common import PRUNE_FLOOR, CoreConstruct
from coblab.errors import SpaceMismatchError, ZeroModeError


class Space(str, enum.Enum):
    SHIFT = "shift"
    FOURIER = "fourier"
    DENSE = "dense"
    SUM = "sum"
    SEQUENCE = "sequence"


SpaceTag = Tuple[Space, Optional[int]]


class ShiftIndex(NamedTuple):
    level: int
    slot: int = 0


def freeze(index: Any) -> Any:
    """Turn JSON-style nested lists into hashable nested tuples."""
    if isinstance(index, (list, tuple)):
        return tuple(freeze(i) for i in index)
    return index


def _normalize_index(space: Space, index: Any, size: Optional[int]) -> Any:
    if space is Space.SHIFT:
        level, slot = (index, 0) if isinstance(index, int) else freeze(index)
        if level < 0 or not 0 <= slot < (size or 1):
            raise ValueError(f"shift index {index!r} out of range")
        return ShiftIndex(int(level), int(slot))
    if space is Space.FOURIER:
        if int(index) == 0:
            raise ZeroModeError()
        return int(index)
    if space is Space.DENSE:
        if size is None or not 0 <= int(index) < size:
            raise ValueError(f"coordinate {index!r} outside dimension {size}")
        return int(index)
    outer, inner = freeze(index)
    if outer < 0 or (space is Space.SUM and size is not None and outer >= size):
        raise ValueError(f"{space.value} index {index!r} out of range")
    return int(outer), inner


def coerce_index(space: Space, index: Any) -> Any:
    """Restore the typed form of an index carried inside a composite index."""
    if space is Space.SHIFT and not isinstance(index, ShiftIndex):
        return ShiftIndex(*index) if isinstance(index, tuple) else ShiftIndex(index)
    return index


class CoeffVector(CoreConstruct):
    """A finitely supported map from indices to complex coefficients.

    Every vector carries the tag of the index space it lives in. Entries
    whose magnitude does not exceed ``zero_eps`` are pruned on
    construction and after every arithmetic operation, so an empty
    mapping is exactly the zero vector.
    """

    space: Space
    multiplicity: Optional[int] = None
    dimension: Optional[int] = None
    parts: Optional[int] = None
    entries: Dict[Any, complex] = Field(default_factory=dict)

    @root_validator(pre=True)
    def normalize_entries(cls, values):
        space = Space(values.get("space"))
        values["space"] = space
        if space is Space.SHIFT and values.get("multiplicity") is None:
            values["multiplicity"] = 1
        if space is Space.DENSE and values.get("dimension") is None:
            raise ValueError("dense vectors need a dimension")
        size = _tag_size(space, values)
        eps = PRUNE_FLOOR
        entries: Dict[Any, complex] = {}
        for index, value in dict(values.get("entries") or {}).items():
            key = _normalize_index(space, index, size)
            entries[key] = entries.get(key, 0j) + as_complex(value)
        values["entries"] = {k: c for k, c in entries.items() if abs(c) > eps}
        return values

    @property
    def space_tag(self) -> SpaceTag:
        return self.space, _tag_size(self.space, self.__dict__)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def support(self) -> List[Any]:
        return sorted(self.entries)

    def items(self) -> List[Tuple[Any, complex]]:
        return sorted(self.entries.items())

    def derive(
        self, entries: Mapping[Any, complex], eps: Optional[float] = None
    ) -> "CoeffVector":
        """Build a vector in the same space from trusted entries."""
        return from_tag(self.space_tag, entries, eps)

    def pruned(self, eps: float) -> "CoeffVector":
        return self.derive(self.entries, eps)

    @classmethod
    def shift(
        cls, entries: Mapping[Any, Any], multiplicity: int = 1
    ) -> "CoeffVector":
        return cls(space=Space.SHIFT, multiplicity=multiplicity, entries=entries)

    @classmethod
    def fourier(cls, entries: Mapping[int, Any]) -> "CoeffVector":
        return cls(space=Space.FOURIER, entries=entries)

    @classmethod
    def dense(cls, values: Iterable[Any], dimension: int = None) -> "CoeffVector":
        if isinstance(values, Mapping):
            entries = dict(values)
        else:
            entries = dict(enumerate(values))
            dimension = dimension or len(entries)
        return cls(space=Space.DENSE, dimension=dimension, entries=entries)

    @classmethod
    def direct_sum(cls, entries: Mapping[Any, Any], parts: int) -> "CoeffVector":
        return cls(space=Space.SUM, parts=parts, entries=entries)


def _tag_size(space: Space, values: Mapping[str, Any]) -> Optional[int]:
    if space is Space.SHIFT:
        return values.get("multiplicity") or 1
    if space is Space.DENSE:
        return values.get("dimension")
    if space is Space.SUM:
        return values.get("parts")
    return None


_SIZE_FIELD = {
    Space.SHIFT: "multiplicity",
    Space.DENSE: "dimension",
    Space.SUM: "parts",
}


def from_tag(
    tag: SpaceTag, entries: Mapping[Any, complex], eps: float = None
) -> CoeffVector:
    """Build a vector from already normalized indices, pruning small entries.

    Skips pydantic validation; callers guarantee the indices belong to
    the tagged space.
    """
    eps = PRUNE_FLOOR if eps is None else eps
    space, size = tag
    fields: Dict[str, Any] = dict(
        space=space,
        multiplicity=None,
        dimension=None,
        parts=None,
        entries={k: c for k, c in entries.items() if abs(c) > eps},
    )
    if space in _SIZE_FIELD:
        fields[_SIZE_FIELD[space]] = size
    return CoeffVector.construct(**fields)


def zero(tag: SpaceTag) -> CoeffVector:
    return from_tag(tag, {})


def basis(tag: SpaceTag, index: Any) -> CoeffVector:
    return from_tag(tag, {index: 1 + 0j})


def check_same_space(u: CoeffVector, v: CoeffVector) -> None:
    if u.space_tag != v.space_tag:
        raise SpaceMismatchError(u.space_tag, v.space_tag)


class SeqVector(CoreConstruct):
    """An element (x_0, x_1, x_2, ...) of the sequence space over H.

    Only finitely many slots are stored; trailing empty slots are
    trimmed, so ``slots`` ends with the highest nonzero position.
    """

    slots: Tuple[CoeffVector, ...] = ()

    @classmethod
    def of(cls, slots: Iterable[CoeffVector]) -> "SeqVector":
        slots = list(slots)
        while slots and slots[-1].is_empty:
            slots.pop()
        return cls.construct(slots=tuple(slots))

    @classmethod
    def lift(cls, x: CoeffVector) -> "SeqVector":
        """The embedding x -> (x, 0, 0, ...)."""
        return cls.of([x])

    def slot(self, position: int, zero_vector: CoeffVector) -> CoeffVector:
        if position < len(self.slots):
            return self.slots[position]
        return zero_vector

    def flatten(self) -> CoeffVector:
        entries = {
            (position, index): c
            for position, vector in enumerate(self.slots)
            for index, c in vector.entries.items()
        }
        return from_tag((Space.SEQUENCE, None), entries)

    @classmethod
    def unflatten(cls, v: CoeffVector, base: SpaceTag) -> "SeqVector":
        if v.space is not Space.SEQUENCE:
            raise SpaceMismatchError(v.space_tag, (Space.SEQUENCE, None))
        grouped: Dict[int, Dict[Any, complex]] = {}
        for (position, index), c in v.entries.items():
            grouped.setdefault(position, {})[coerce_index(base[0], index)] = c
        length = max(grouped) + 1 if grouped else 0
        return cls.of(from_tag(base, grouped.get(p, {})) for p in range(length))
