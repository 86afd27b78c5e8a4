import math

import numpy as np
import pytest

from coblab.analysis.oracle import build_window, compare, lsq_solve, materialize
from coblab.constructs.results import Verdict, Window
from coblab.constructs.vectors import CoeffVector, ShiftIndex
from coblab.errors import SpaceMismatchError
from tests.fixtures import (
    DOUBLING,
    HALF_1,
    SHIFT,
    ZERO_1,
    distance,
    e,
    fourier,
    generator,
    shift_vector,
)


class TestWindow:
    def test_shift_window(self):
        window = build_window(SHIFT, e(0), depth=3)
        assert window.indices == [ShiftIndex(level) for level in range(4)]
        assert window.overflow == [ShiftIndex(4)]
        assert not window.closed

        materialized = materialize(SHIFT, window)
        assert np.array_equal(materialized.matrix, np.eye(4, k=-1))
        assert np.array_equal(materialized.overflow_matrix, [[0, 0, 0, 1]])
        assert materialized.lost_mass == [0, 0, 0, 1]

    def test_doubling_window(self):
        window = build_window(DOUBLING, fourier({1: 1}), depth=2)
        assert window.indices == [1, 2, 4]
        assert window.overflow == [8]

    def test_closed_window(self):
        window = build_window(ZERO_1, CoeffVector.dense([1]))
        assert window.closed
        assert np.array_equal(materialize(ZERO_1, window).matrix, [[0]])

    def test_default_depth(self):
        window = build_window(SHIFT, shift_vector({0: 1, 1: -1}))
        assert len(window.indices) == 8

    def test_cap(self):
        window = build_window(SHIFT, e(0), depth=100, cap=10)
        assert len(window.indices) == 10

    def test_empty_window(self):
        with pytest.raises(ValueError):
            materialize(SHIFT, Window(indices=[]))


class TestLeastSquares:
    def test_coboundary(self):
        x = shift_vector({0: 1, 1: -1})
        y, residual = lsq_solve(SHIFT, x, build_window(SHIFT, x, depth=9))
        assert distance(y, e(0)) < 1e-12
        assert residual <= 1e-12

    def test_zero_vector(self):
        y, residual = lsq_solve(SHIFT, shift_vector({}))
        assert y.is_empty
        assert residual == 0

    @pytest.mark.parametrize("size", [16, 64, 256])
    def test_residual_of_a_non_coboundary(self, size):
        window = build_window(SHIFT, e(0), depth=size - 1)
        _, residual = lsq_solve(SHIFT, e(0), window)
        assert residual >= 1 / math.sqrt(size + 1) - 1e-12

    def test_residual_decreases_with_the_window(self):
        residuals = [
            lsq_solve(SHIFT, e(0), build_window(SHIFT, e(0), depth=size))[1]
            for size in (4, 16, 64)
        ]
        assert residuals == sorted(residuals, reverse=True)

    def test_support_outside_the_window(self):
        with pytest.raises(ValueError):
            lsq_solve(SHIFT, e(0, 5), Window(indices=[ShiftIndex(0)]))


class TestCompare:
    @pytest.mark.parametrize("op", [SHIFT, DOUBLING])
    def test_random_coboundaries(self, op):
        samples = generator(17)
        for _ in range(5):
            x, y = samples.coboundary(op)
            comparison = compare(op, x)
            assert comparison.constructive.verdict is Verdict.SOLVED
            assert comparison.agree
            assert comparison.discrepancy <= 1e-8
            assert distance(comparison.lsq_solution, y) < 1e-8

    def test_certified_negative(self):
        comparison = compare(SHIFT, e(0))
        assert comparison.constructive.verdict is Verdict.NOT_COBOUNDARY
        assert comparison.lsq_residual > 1e-9
        assert comparison.agree

    def test_contraction_without_isometric_solution(self):
        comparison = compare(HALF_1, CoeffVector.dense([1]))
        assert comparison.agree
        assert distance(comparison.lsq_solution, CoeffVector.dense([2])) < 1e-10
        assert comparison.lsq_residual < 1e-10

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            compare(SHIFT, fourier({1: 1}))
