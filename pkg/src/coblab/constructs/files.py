"""On-disk formats: coefficient vector files, operator files and reports."""

import enum
import json
import pathlib
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from coblab.constructs.operators import DirectSum, OperatorSpec, parse_operator
from coblab.constructs.vectors import CoeffVector, Space, freeze
from coblab.errors import SpaceMismatchError

PathLike = Union[str, pathlib.Path]


class EntryRecord(BaseModel):
    index: Any = Field(
        ...,
        description="[level, slot], a Fourier mode, a coordinate, or [part, index].",
    )
    re: float = 0.0
    im: float = 0.0


class VectorFile(BaseModel):
    """The coefficient vector file format shared by every command."""

    space: Space
    multiplicity: Optional[int] = None
    dimension: Optional[int] = None
    parts: Optional[int] = None
    entries: List[EntryRecord] = []

    def to_vector(self) -> CoeffVector:
        coefficients: Dict[Any, complex] = {}
        for record in self.entries:
            key = freeze(record.index)
            value = complex(record.re, record.im)
            coefficients[key] = coefficients.get(key, 0j) + value
        return CoeffVector(
            space=self.space,
            multiplicity=self.multiplicity,
            dimension=self.dimension,
            parts=self.parts,
            entries=coefficients,
        )

    @classmethod
    def from_vector(cls, v: CoeffVector) -> "VectorFile":
        return cls(
            space=v.space,
            multiplicity=v.multiplicity,
            dimension=v.dimension,
            parts=v.parts,
            entries=[
                EntryRecord(index=encode_index(index), re=c.real, im=c.imag)
                for index, c in v.items()
            ],
        )


def encode_index(index: Any) -> Any:
    if isinstance(index, tuple):
        return [encode_index(i) for i in index]
    return index


def conform(v: CoeffVector, op: OperatorSpec) -> CoeffVector:
    """Check v against the operator's space, validating direct-sum pieces.

    Inner indices of a sum-space vector are re-validated in the space of
    their part, so they take the same typed form the operator produces.
    """
    if v.space_tag != op.space_tag:
        raise SpaceMismatchError(op.space_tag, v.space_tag)
    if not isinstance(op, DirectSum):
        return v
    pieces = []
    for part, piece in zip(op.parts, op.split(v)):
        pieces.append(conform(_revalidate(piece, part), part))
    return op.join(pieces)


def _revalidate(piece: CoeffVector, part: OperatorSpec) -> CoeffVector:
    space, size = part.space_tag
    fields: Dict[str, Any] = {}
    if space is Space.SHIFT:
        fields["multiplicity"] = size
    elif space is Space.DENSE:
        fields["dimension"] = size
    elif space is Space.SUM:
        fields["parts"] = size
    return CoeffVector(space=space, entries=piece.entries, **fields)


def read_json(path: PathLike) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def load_vector(path: PathLike, op: OperatorSpec = None) -> CoeffVector:
    v = VectorFile.parse_obj(read_json(path)).to_vector()
    return v if op is None else conform(v, op)


def load_operator(path: PathLike) -> OperatorSpec:
    return parse_operator(read_json(path))


def normalize_float(value: float) -> float:
    return float(f"{value:.17g}")


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data for results, vectors, enums, complex and numpy values."""
    if isinstance(obj, CoeffVector):
        return to_jsonable(VectorFile.from_vector(obj).dict())
    if isinstance(obj, BaseModel):
        return {name: to_jsonable(getattr(obj, name)) for name in obj.__fields__}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return normalize_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [normalize_float(obj.real), normalize_float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(encode_index(k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(item) for item in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, normalized floats."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"

