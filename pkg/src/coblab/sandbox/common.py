from typing import Any, Dict, Optional

import numpy as np

Entries = Dict[Any, complex]


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_complex(
    rng: np.random.Generator, size: int, scale: float = 1.0
) -> np.ndarray:
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def random_unit_phases(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(size))


def random_support(rng: np.random.Generator, pool: int, count: int) -> np.ndarray:
    """``count`` distinct integers from range(pool), in increasing order."""
    return np.sort(rng.choice(pool, size=min(count, pool), replace=False))


def as_entries(indices, values) -> Entries:
    return {index: complex(value) for index, value in zip(indices, values)}
