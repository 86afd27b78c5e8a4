import pytest

from coblab.analysis.wold import (
    component_decay,
    wandering_project,
    wold_component,
    wold_split,
)
from coblab.constructs.operators import DirectSum, UnilateralShift
from coblab.constructs.results import OrbitEnd
from coblab.constructs.vectors import CoeffVector
from coblab.core import ErgodicAccumulator, inner, norm, norm_squared
from coblab.errors import InexactSplitError, InsufficientDataError, NotIsometryError
from coblab.operators.actions import apply_adjoint_power
from tests.fixtures import (
    DOUBLING,
    HALF_1,
    SHIFT,
    SHIFT_PLUS_FLIP,
    distance,
    e,
    fourier,
    generator,
    shift_vector,
)


def reassemble(split):
    total = ErgodicAccumulator(split.residual)
    for component in split.components:
        total.add(component)
    total.add(split.residual)
    return total.value()


class TestWoldSplit:
    def test_coboundary_of_the_shift(self):
        split = wold_split(SHIFT, shift_vector({0: 1, 1: -1}))
        assert split.j_max == 1
        assert split.exact
        assert split.orbit_end is OrbitEnd.EMPTY
        assert split.components == [e(0), shift_vector({1: -1})]
        assert split.residual.is_empty

    def test_single_level(self):
        split = wold_split(SHIFT, e(0))
        assert split.j_max == 0
        assert split.components == [e(0)]

    def test_zero_vector(self):
        split = wold_split(SHIFT, shift_vector({}))
        assert split.j_max == 0
        assert split.exact
        assert all(c.is_empty for c in split.components)

    def test_unitary_residual(self):
        x = CoeffVector.direct_sum({(0, (1, 0)): 1, (1, 0): 1}, parts=2)
        split = wold_split(SHIFT_PLUS_FLIP, x)
        assert split.orbit_end is OrbitEnd.UNITARY
        assert split.exact
        assert split.j_max == 1
        assert split.components[0].is_empty
        expected = CoeffVector.direct_sum({(0, (1, 0)): 1}, parts=2)
        assert distance(split.components[1], expected) == 0
        assert norm(split.residual) == pytest.approx(1)

    def test_truncated(self):
        split = wold_split(SHIFT, e(50), cutoff=10)
        assert split.j_max == 9
        assert not split.exact
        assert split.orbit_end is OrbitEnd.TRUNCATED

    def test_requires_an_isometry(self):
        with pytest.raises(NotIsometryError):
            wold_split(HALF_1, CoeffVector.dense([1]))

    @pytest.mark.parametrize("seed", range(25))
    @pytest.mark.parametrize(
        "op", [SHIFT, UnilateralShift(multiplicity=2), DOUBLING, SHIFT_PLUS_FLIP]
    )
    def test_identities(self, op, seed):
        samples = generator(seed)
        for x in [samples.vector_for(op) for _ in range(4)]:
            split = wold_split(op, x)
            pieces = split.components + [split.residual]
            for i, u in enumerate(pieces):
                for v in pieces[i + 1 :]:
                    assert abs(inner(u, v)) < 1e-10
            assert distance(reassemble(split), x) < 1e-10
            energy = sum(norm_squared(piece) for piece in pieces)
            assert energy == pytest.approx(norm_squared(x), abs=1e-9)


class TestComponents:
    def test_wandering_project(self):
        assert wandering_project(SHIFT, e(0, 1)) == e(0)
        assert wandering_project(DOUBLING, fourier({1: 1, 2: 1, -3: 1})) == fourier(
            {1: 1, -3: 1}
        )

    def test_wold_component(self):
        x = shift_vector({0: 1, 2: 3j})
        assert wold_component(SHIFT, x, 2) == shift_vector({2: 3j})
        assert wold_component(SHIFT, x, 1).is_empty
        with pytest.raises(ValueError):
            wold_component(SHIFT, x, -1)

    def test_matches_split(self):
        samples = generator(11)
        x = samples.fourier_vector()
        split = wold_split(DOUBLING, x)
        for j, component in enumerate(split.components):
            assert distance(wold_component(DOUBLING, x, j), component) < 1e-12

    @pytest.mark.parametrize("op", [UnilateralShift(multiplicity=2), DOUBLING])
    def test_components_are_idempotent(self, op):
        samples = generator(12)
        for _ in range(10):
            x = samples.vector_for(op)
            for j in range(4):
                component = wold_component(op, x, j)
                again = wold_component(op, component, j)
                assert distance(again, component) <= 1e-10

    @pytest.mark.parametrize("seed", range(10))
    def test_unitary_part_is_what_remains(self, seed):
        samples = generator(seed)
        op = DirectSum(parts=[UnilateralShift(), samples.diag_unitary(3)])
        x = samples.vector_for(op)
        split = wold_split(op, x)
        assert split.orbit_end is OrbitEnd.UNITARY
        lowered = apply_adjoint_power(op, x, split.j_max + 1)
        unitary_part = op.split(x)[1]
        assert abs(norm(lowered) - norm(unitary_part)) <= 1e-9
        assert abs(norm(split.residual) - norm(lowered)) <= 1e-10

    def test_residual_norm_of_a_truncated_split(self):
        x = e(3, 30)
        split = wold_split(SHIFT, x, cutoff=10)
        lowered = apply_adjoint_power(SHIFT, x, split.j_max + 1)
        assert norm(split.residual) == pytest.approx(norm(lowered), abs=1e-10)
        assert norm(split.residual) == pytest.approx(1)


class TestComponentDecay:
    def test_geometric_decay(self):
        x = shift_vector({j: 2.0**-j for j in range(6)})
        fit = component_decay(SHIFT, x)
        assert fit.beta == pytest.approx(1)
        assert fit.fit_residual == pytest.approx(0, abs=1e-9)
        assert fit.levels == list(range(6))

    def test_too_few_levels(self):
        with pytest.raises(InsufficientDataError):
            component_decay(SHIFT, e(0))

    def test_truncated_orbit(self):
        with pytest.raises(InexactSplitError, match="split not exact"):
            component_decay(SHIFT, e(0, 1, 2, 40), cutoff=10)
