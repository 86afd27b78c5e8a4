import json

from coblab.constructs.operators import (
    DiagonalUnitary,
    DirectSum,
    DoublingKoopman,
    MatrixContraction,
    UnilateralShift,
)
from coblab.constructs.vectors import CoeffVector
from coblab.core import norm, subtract
from coblab.sandbox.generator import SampleGenerator

SHIFT = UnilateralShift()
DOUBLING = DoublingKoopman()
ZERO_1 = MatrixContraction(matrix=[[0]])
HALF_1 = MatrixContraction(matrix=[[0.5]])
SHIFT_PLUS_FLIP = DirectSum(parts=[UnilateralShift(), DiagonalUnitary(phases=[-1])])
SHIFT_PLUS_ZERO = DirectSum(parts=[UnilateralShift(), MatrixContraction(matrix=[[0]])])


def e(*levels, multiplicity=1):
    """Sum of the shift basis vectors at the given levels."""
    return CoeffVector.shift({level: 1 for level in levels}, multiplicity)


def shift_vector(entries, multiplicity=1):
    return CoeffVector.shift(entries, multiplicity)


def fourier(entries):
    return CoeffVector.fourier(entries)


def distance(u, v):
    return norm(subtract(u, v))


def generator(seed=0):
    return SampleGenerator(seed)


def write_json(directory, name, data):
    path = directory / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def shift_file(entries):
    """Vector file payload for a multiplicity-one shift vector."""
    return {
        "space": "shift",
        "entries": [
            {"index": [level, 0], "re": c.real, "im": c.imag}
            for level, c in ((k, complex(v)) for k, v in entries.items())
        ],
    }


def fourier_file(entries):
    return {
        "space": "fourier",
        "entries": [
            {"index": mode, "re": complex(c).real, "im": complex(c).imag}
            for mode, c in entries.items()
        ],
    }
