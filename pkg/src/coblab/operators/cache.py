from typing import Dict, Tuple

import numpy as np
import scipy.linalg

MatrixKey = Tuple[Tuple[int, ...], bytes, float]


def matrix_key(matrix: np.ndarray, zero_eps: float) -> MatrixKey:
    return matrix.shape, np.ascontiguousarray(matrix).tobytes(), zero_eps


class DefectCache:
    """Defect square roots, computed once per matrix and never rewritten."""

    _cache: Dict[MatrixKey, np.ndarray] = {}

    def __getitem__(self, item):
        return self._cache[item]

    def __setitem__(self, key, value):
        self._cache.setdefault(key, value)

    def __contains__(self, item):
        return item in self._cache


_defects = DefectCache()


def defect_matrix(matrix: np.ndarray, zero_eps: float) -> np.ndarray:
    """The positive square root of I - A*A.

    Eigenvalues of I - A*A at or below ``zero_eps`` are clamped to 0 so
    the result stays positive semidefinite despite roundoff.
    """
    key = matrix_key(matrix, zero_eps)
    if key in _defects:
        return _defects[key]

    gram = np.eye(matrix.shape[1]) - matrix.conj().T @ matrix
    eigenvalues, eigenvectors = scipy.linalg.eigh((gram + gram.conj().T) / 2)
    eigenvalues = np.where(eigenvalues > zero_eps, eigenvalues, 0.0)
    defect = (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.conj().T
    defect.setflags(write=False)
    _defects[key] = defect
    return _defects[key]
