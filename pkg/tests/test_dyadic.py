import math

import pytest

from coblab.analysis.dyadic import (
    block_energy_profile,
    chain_root,
    chain_solve,
    dyadic_report,
    ergodic_integral,
    ergodic_integral_quadrature,
    ergodic_sum,
    koopman,
    summability_bound,
    synthesize_samples,
    val2,
    valuation_condition,
)
from coblab.analysis.solver import ergodic_limit, solve_isometry
from coblab.constructs.common import Tolerances
from coblab.constructs.results import FourierSeries, Verdict
from coblab.constructs.vectors import CoeffVector
from coblab.errors import SpaceMismatchError
from tests.fixtures import distance, e, fourier, generator


def series(entries, base=2):
    return FourierSeries(coeffs=fourier(entries), base=base)


class TestValuation:
    @pytest.mark.parametrize(
        "n, base, expected",
        [(1, 2, 0), (12, 2, 2), (-8, 2, 3), (7, 2, 0), (18, 3, 2), (1024, 2, 10)],
    )
    def test_val2(self, n, base, expected):
        assert val2(n, base) == expected

    def test_val2_of_zero(self):
        with pytest.raises(ValueError):
            val2(0)

    def test_chain_root(self):
        assert chain_root(12) == (3, 2)
        assert chain_root(-6) == (-3, 1)
        assert chain_root(45, 3) == (5, 2)


class TestChainSolve:
    def test_telescoping_chain(self):
        verdict = chain_solve(series({1: 1, 2: -1}))
        assert verdict.solvable
        assert verdict.g.coeffs == fourier({1: 1})
        assert verdict.residual == 0

    def test_obstruction(self):
        verdict = chain_solve(series({2: 1}))
        assert not verdict.solvable
        assert verdict.g is None
        assert [(o.mode, o.chain_sum) for o in verdict.obstructions] == [(1, 1)]

    def test_chains_are_independent(self):
        verdict = chain_solve(series({3: 2, 6: -1, 24: -1, 5: 1}))
        assert not verdict.solvable
        assert [o.mode for o in verdict.obstructions] == [5]

    def test_negative_modes(self):
        verdict = chain_solve(series({-1: 1j, -2: -1j, 1: -1j, 2: 1j}))
        assert verdict.solvable
        assert verdict.g.coeffs == fourier({-1: 1j, 1: -1j})

    def test_base_three(self):
        verdict = chain_solve(series({2: 1, 6: 1, 18: -2}, base=3))
        assert verdict.solvable
        assert verdict.g.base == 3
        assert verdict.g.coeffs == fourier({2: 1, 6: 2})

    def test_matches_the_isometry_solver(self):
        samples = generator(13)
        for _ in range(10):
            x, _ = samples.coboundary(koopman(series({1: 1})))
            verdict = chain_solve(FourierSeries(coeffs=x))
            result = solve_isometry(koopman(series({1: 1})), x)
            assert verdict.solvable
            assert result.verdict is Verdict.SOLVED
            assert distance(verdict.g.coeffs, result.solution) < 1e-10

    def test_obstructions_match_the_isometry_solver(self):
        samples = generator(14)
        f = samples.trig_polynomial()
        result = solve_isometry(koopman(f), f.coeffs)
        assert chain_solve(f).solvable == (result.verdict is Verdict.SOLVED)

    @pytest.mark.parametrize("seed", range(20))
    def test_agrees_with_the_isometry_solver(self, seed):
        samples = generator(100 + seed)
        for i in range(10):
            if i % 2:
                x, _ = samples.coboundary(koopman(series({1: 1})))
                f = FourierSeries(coeffs=x)
            else:
                f = samples.trig_polynomial()
            verdict = chain_solve(f)
            result = solve_isometry(koopman(f), f.coeffs)
            assert verdict.solvable == (result.verdict is Verdict.SOLVED)
            if verdict.solvable:
                assert distance(verdict.g.coeffs, result.solution) <= 1e-10
                assert verdict.residual <= 1e-12

    @pytest.mark.parametrize(
        "entries, solvable",
        [
            ({1: 1, 2: -1 + 1e-10}, True),
            ({1: 1, 2: -1 + 1e-8}, False),
            ({1: 1, 2: -1 + 8e-10, 3: 1, 6: -1 + 8e-10}, False),
            ({1: 1, 2: -1 + 5e-10, 3: 1, 6: -1 + 5e-10}, True),
        ],
    )
    def test_threshold_matches_the_isometry_solver(self, entries, solvable):
        f = series(entries)
        verdict = chain_solve(f)
        result = solve_isometry(koopman(f), f.coeffs)
        assert verdict.solvable is solvable
        assert (result.verdict is Verdict.SOLVED) is solvable
        if not solvable:
            assert [o.mode for o in verdict.obstructions] == sorted(
                m for m in entries if m % 2
            )

    def test_coarse_zero_threshold(self):
        f = series({1: 1, 2: -1, 4: 1e-8})
        assert not chain_solve(f).solvable
        verdict = chain_solve(f, Tolerances(zero_eps=1e-6))
        assert verdict.solvable
        assert verdict.g.coeffs == fourier({1: 1})


class TestFourierSeries:
    def test_hermitian(self):
        FourierSeries(coeffs=fourier({1: 1j, -1: -1j}), hermitian=True)
        with pytest.raises(ValueError):
            FourierSeries(coeffs=fourier({1: 1j, -1: 1j}), hermitian=True)

    def test_generated_hermitian(self):
        f = generator(2).trig_polynomial(hermitian=True)
        assert f.hermitian

    def test_space(self):
        with pytest.raises(SpaceMismatchError):
            FourierSeries(coeffs=e(1))

    def test_base(self):
        with pytest.raises(ValueError):
            FourierSeries(coeffs=fourier({1: 1}), base=1)


class TestConditions:
    def test_valuation_condition(self):
        assert valuation_condition(series({1: 1, 3: 2}), 1) == 0
        assert valuation_condition(series({4: 1}), 1) == 32
        assert valuation_condition(series({}), 1) == 0
        with pytest.raises(ValueError):
            valuation_condition(series({1: 1}), 0)

    def test_valuation_condition_by_levels(self):
        f = series({1: 1, 2: 2, 4: 1j, 12: 0.5, 16: 1})
        profile = block_energy_profile(f)
        expected = math.fsum(i**5 * energy for i, energy in profile.levels)
        assert valuation_condition(f, 1) == pytest.approx(expected)

    def test_block_energy_profile(self):
        profile = block_energy_profile(series({1: 1, 2: math.sqrt(0.5), 4: 0.5}))
        assert profile.levels == [
            (0, pytest.approx(1)),
            (1, pytest.approx(0.5)),
            (2, pytest.approx(0.25)),
        ]
        assert profile.alpha == pytest.approx(1)
        assert profile.fit_residual == pytest.approx(0, abs=1e-12)

    def test_block_energy_profile_without_a_fit(self):
        profile = block_energy_profile(series({3: 1, 5: 1}), i_max=2)
        assert profile.levels == [(0, 2), (1, 0), (2, 0)]
        assert profile.alpha is None

    def test_summability_bound(self):
        samples = generator(21)
        for epsilon in (0.5, 1.0, 2.0):
            f = samples.trig_polynomial(max_mode=256, count=6)
            value, bound = summability_bound(f, epsilon)
            assert value <= bound + 1e-12

    @pytest.mark.parametrize("seed", range(20))
    def test_summability_bound_on_random_series(self, seed):
        samples = generator(200 + seed)
        for _ in range(10):
            f = samples.trig_polynomial(max_mode=1024, count=5)
            value, bound = summability_bound(f, 1.0)
            assert value <= bound + 1e-10

    def test_dyadic_report(self):
        report = dyadic_report(series({1: 1, 2: -1}))
        assert report.summab_exact
        assert report.ergodic_limit == pytest.approx(0)
        assert report.valuation_sum == pytest.approx(1)
        assert report.level_decay_alpha == pytest.approx(0)
        assert "verdicts hold for the given finite truncation" in report.notes


class TestErgodicIntegral:
    def test_values(self):
        assert ergodic_integral(series({1: 1, 2: -1}), 100) == pytest.approx(0.02)
        assert ergodic_integral(series({1: 1}), 100) == pytest.approx(1.01)
        assert ergodic_integral(series({}), 100) == 0

    def test_ergodic_sum(self):
        assert ergodic_sum(series({1: 1}), 2) == fourier({1: 1, 2: 1, 4: 1})
        with pytest.raises(ValueError):
            ergodic_sum(series({1: 1}), 0)

    def test_synthesize_samples(self):
        values = synthesize_samples(fourier({1: 1}), 4)
        assert values == pytest.approx([1, 1j, -1, -1j])
        assert synthesize_samples(CoeffVector.fourier({}), 3) == [0, 0, 0]
        with pytest.raises(ValueError):
            synthesize_samples(fourier({1: 1}), 0)

    def test_large_modes(self):
        values = synthesize_samples(fourier({2**70: 1}), 8)
        assert values == pytest.approx([1] * 8)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_quadrature(self, n):
        f = generator(n).trig_polynomial(max_mode=8, count=3)
        assert ergodic_integral_quadrature(f, n) == pytest.approx(
            ergodic_integral(f, n), abs=1e-9
        )

    def test_approaches_the_limit(self):
        f = series({1: 1, 2: 0.5, 3: -0.25})
        limit = ergodic_limit(koopman(f), f.coeffs)
        assert ergodic_integral(f, 10**4) == pytest.approx(limit, abs=1e-2)
