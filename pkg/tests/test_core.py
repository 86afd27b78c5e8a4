import pytest

from coblab.common import DEFAULT_CUTOFF, as_complex, get_cutoff
from coblab.constructs.common import Tolerances
from coblab.constructs.vectors import CoeffVector, SeqVector, ShiftIndex, Space
from coblab.core import (
    ErgodicAccumulator,
    add,
    combine,
    inner,
    norm,
    norm_squared,
    scale,
)
from coblab.errors import (
    CoblabError,
    ConfigurationError,
    SpaceMismatchError,
    ZeroModeError,
)
from tests.fixtures import e, fourier, generator, shift_vector


class TestCoeffVector:
    def test_shift_indices(self):
        v = shift_vector({0: 1, (2, 1): 2j}, multiplicity=2)
        assert v.support() == [ShiftIndex(0, 0), ShiftIndex(2, 1)]
        assert v.space_tag == (Space.SHIFT, 2)

    def test_prunes_small_entries(self):
        v = shift_vector({0: 1e-13, 1: 1})
        assert v.support() == [ShiftIndex(1, 0)]
        assert shift_vector({0: 0}).is_empty

    def test_accepts_scalar_encodings(self):
        v = fourier({1: [1, 2], -3: {"re": 0.5}, 5: 2})
        assert v.entries == {1: 1 + 2j, -3: 0.5, 5: 2}

    def test_fourier_mode_zero(self):
        with pytest.raises(ZeroModeError):
            fourier({0: 1})

    def test_slot_out_of_range(self):
        with pytest.raises(ValueError):
            shift_vector({(0, 1): 1})

    def test_dense_dimension(self):
        v = CoeffVector.dense([1, 0, 2])
        assert v.space_tag == (Space.DENSE, 3)
        assert v.support() == [0, 2]
        with pytest.raises(ValueError):
            CoeffVector.dense({5: 1}, dimension=3)

    def test_direct_sum(self):
        v = CoeffVector.direct_sum({(0, (1, 0)): 1, (1, 0): 2}, parts=2)
        assert v.space_tag == (Space.SUM, 2)
        with pytest.raises(ValueError):
            CoeffVector.direct_sum({(2, 0): 1}, parts=2)

    def test_sequence_round_trip(self):
        x = e(0, 3)
        s = SeqVector.of([x, shift_vector({}), e(1), shift_vector({})])
        assert len(s.slots) == 3
        assert SeqVector.unflatten(s.flatten(), x.space_tag) == s


class TestArithmetic:
    def test_inner_is_conjugate_linear_in_second_argument(self):
        u = shift_vector({0: 1j})
        v = e(0)
        assert inner(u, v) == 1j
        assert inner(v, u) == -1j

    def test_norm(self):
        v = shift_vector({0: 3, 1: 4j})
        assert norm_squared(v) == 25
        assert norm(v) == 5

    def test_combine_cancels(self):
        v = shift_vector({0: 1, 1: 2})
        assert combine(1, v, -1, v).is_empty
        assert add(v, scale(-1, v)).is_empty

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            add(e(0), fourier({1: 1}))
        with pytest.raises(SpaceMismatchError):
            inner(e(0), e(0, multiplicity=2))

class TestNormIdentities:
    @pytest.mark.parametrize("seed", range(20))
    def test_parallelogram(self, seed):
        samples = generator(seed)
        for _ in range(10):
            u = samples.shift_vector(multiplicity=2, count=6)
            v = samples.shift_vector(multiplicity=2, count=6)
            lhs = norm_squared(combine(1, u, 1, v)) + norm_squared(combine(1, u, -1, v))
            rhs = 2 * norm_squared(u) + 2 * norm_squared(v)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)

    @pytest.mark.parametrize("seed", range(20))
    def test_cauchy_schwarz(self, seed):
        samples = generator(seed)
        for _ in range(10):
            u = samples.fourier_vector(max_mode=16, count=6)
            v = samples.fourier_vector(max_mode=16, count=6)
            assert abs(inner(u, v)) <= norm(u) * norm(v) + 1e-12

    def test_cauchy_schwarz_is_sharp_on_parallel_vectors(self):
        u = shift_vector({0: 1, 2: 1j})
        assert abs(inner(u, scale(2j, u))) == pytest.approx(norm(u) * 2 * norm(u))


class TestErgodicAccumulator:
    def test_running_norm_matches_value(self):
        samples = generator(3)
        accumulator = ErgodicAccumulator(e(0))
        for _ in range(20):
            accumulator.add(samples.shift_vector(levels=5))
            assert accumulator.norm_squared == pytest.approx(
                norm_squared(accumulator.value()), rel=1e-9
            )

    def test_rejects_other_spaces(self):
        with pytest.raises(SpaceMismatchError):
            ErgodicAccumulator(e(0)).add(fourier({1: 1}))


class TestConfiguration:
    def test_default_cutoff(self, monkeypatch):
        monkeypatch.delenv("COBLAB_CUTOFF", raising=False)
        assert get_cutoff() == DEFAULT_CUTOFF == 512

    def test_cutoff_from_environment(self, monkeypatch):
        monkeypatch.setenv("COBLAB_CUTOFF", "32")
        assert get_cutoff() == 32

    @pytest.mark.parametrize("raw", ["abc", "0", "-4"])
    def test_bad_cutoff(self, monkeypatch, raw):
        monkeypatch.setenv("COBLAB_CUTOFF", raw)
        with pytest.raises(ConfigurationError):
            get_cutoff()

    def test_tolerances_must_be_positive(self):
        with pytest.raises(ValueError):
            Tolerances(zero_eps=0)
        with pytest.raises(ValueError):
            Tolerances(zero_eps=1e-15)
        assert Tolerances(residual_tol=1e-6).residual_tol == 1e-6

    def test_as_complex(self):
        assert as_complex(2) == 2
        assert as_complex([1, -1]) == 1 - 1j
        assert as_complex({"im": 2}) == 2j
        with pytest.raises(ValueError):
            as_complex(True)
        with pytest.raises(ValueError):
            as_complex("1")


class TestErrors:
    def test_messages_are_prefixed(self):
        error = ZeroModeError()
        assert isinstance(error, CoblabError)
        assert str(error).startswith("coblab: ")

