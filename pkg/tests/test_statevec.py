import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groverqss import (
    ConfigurationError,
    Letter,
    MarkedSet,
    ProductState,
    StateVector,
    apply_diffusion,
    apply_oracle,
    expand_product,
    inner_product,
    make_rng,
    measure_distribution,
    sample_measurement,
)

R2 = 1 / math.sqrt(2)
FOUR_MARKED = MarkedSet((4, 6, 8, 11))


def oracle_matrix(n, marked):
    return np.diag([-1.0 if i in marked else 1.0 for i in range(2**n)])


def reflection_matrix(about):
    a = about.amplitudes
    return 2 * np.outer(a, a.conj()) - np.eye(len(a))


def product_by_index(p):
    """Amplitude of |i> is the product of each letter's component at that bit."""
    n = p.qubits
    out = np.empty(2**n, dtype=complex)
    for i in range(2**n):
        amp = 1.0 + 0j
        for q, letter in enumerate(p.letters):
            amp *= letter.vector[(i >> (n - 1 - q)) & 1]
        out[i] = amp
    return out


def random_state(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(v / np.linalg.norm(v))


def random_marked(rng, n):
    m = int(rng.integers(1, 2**n + 1))
    return MarkedSet(tuple(rng.choice(2**n, size=m, replace=False)))


words = st.lists(st.sampled_from(list(Letter)), min_size=1, max_size=6).map(
    lambda xs: ProductState(tuple(xs))
)


class TestExpandProduct:
    def test_two_plus(self):
        s = expand_product(ProductState.parse("+,+"))
        np.testing.assert_allclose(s.amplitudes, [0.5] * 4, atol=1e-15)

    def test_plus_i(self):
        s = expand_product(ProductState.parse(["plus_i"]))
        np.testing.assert_allclose(s.amplitudes, [R2, 1j * R2], atol=1e-15)

    @given(words)
    def test_matches_index_formula_and_is_normalized(self, p):
        s = expand_product(p)
        np.testing.assert_allclose(s.amplitudes, product_by_index(p), atol=1e-15)
        assert abs(s.norm() - 1) < 1e-12

    def test_bit_order_is_msb_first(self):
        # |0>|1> lives at index 1 for both the + and - letters on qubit 1
        s = expand_product(ProductState.parse("+,-"))
        assert s[1] == pytest.approx(-0.5)
        assert s[2] == pytest.approx(0.5)

    def test_letter_aliases(self):
        assert ProductState.parse("+,-,+i,-i") == ProductState.parse(["plus", "minus", "plus_i", "minus-i"])
        with pytest.raises(ConfigurationError):
            Letter.parse("zero")

    def test_empty_word_rejected(self):
        with pytest.raises(ConfigurationError):
            ProductState(())


class TestOracle:
    def test_two_qubit_marks_10(self):
        s = apply_oracle(StateVector.uniform(2), MarkedSet.parse("10", 2))
        np.testing.assert_allclose(s.amplitudes, [0.5, 0.5, -0.5, 0.5], atol=1e-15)

    def test_four_marked_signs(self):
        s = apply_oracle(StateVector.uniform(4), FOUR_MARKED)
        signs = np.sign(s.amplitudes.real).astype(int)
        expected = [1, 1, 1, 1, -1, 1, -1, 1, -1, 1, 1, -1, 1, 1, 1, 1]
        assert signs.tolist() == expected
        np.testing.assert_allclose(np.abs(s.amplitudes), 0.25, atol=1e-15)

    def test_untouched_amplitudes_bit_identical(self):
        rng = np.random.default_rng(3)
        s = random_state(rng, 5)
        w = MarkedSet((1, 7, 30))
        out = apply_oracle(s, w)
        keep = [i for i in range(32) if i not in w]
        assert np.array_equal(out.amplitudes[keep], s.amplitudes[keep])

    def test_all_marked_is_global_phase(self):
        s = StateVector.uniform(3)
        out = apply_oracle(s, MarkedSet(tuple(range(8))))
        assert out.allclose(-s)
        np.testing.assert_array_equal(measure_distribution(out), measure_distribution(s))

    def test_out_of_range(self):
        with pytest.raises(ConfigurationError):
            apply_oracle(StateVector.uniform(2), MarkedSet((4,)))

    def test_matches_dense_matrix(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            s, w = random_state(rng, n), random_marked(rng, n)
            np.testing.assert_allclose(
                apply_oracle(s, w).amplitudes, oracle_matrix(n, w) @ s.amplitudes, atol=1e-15
            )


class TestDiffusion:
    def test_two_qubit_recovers_10(self):
        sent = apply_oracle(StateVector.uniform(2), MarkedSet((2,)))
        out = apply_diffusion(sent, StateVector.uniform(2))
        assert out.allclose(StateVector.basis(2, 2))

    def test_about_self_is_identity(self):
        rng = np.random.default_rng(5)
        s = random_state(rng, 4)
        assert apply_diffusion(s, s).allclose(s)

    def test_zero_overlap_about_minus_pattern_with_table1_set(self):
        # with marked {1,3,5,7}, |+-+-> is orthogonal to P_w|++++>
        sent = apply_oracle(StateVector.uniform(4), MarkedSet((1, 3, 5, 7)))
        about = expand_product(ProductState.parse("+,-,+,-"))
        assert abs(inner_product(about, sent)) < 1e-15
        assert apply_diffusion(sent, about).allclose(-sent)

    def test_minus_pattern_not_orthogonal_to_four_marked_state(self):
        # direct summation: <+-+-|P_w S1> = -2/16 * (-1 -1 +1 -1) = 1/4
        sent = apply_oracle(StateVector.uniform(4), FOUR_MARKED)
        about = expand_product(ProductState.parse("+,-,+,-"))
        assert inner_product(about, sent) == pytest.approx(0.25, abs=1e-15)

    def test_matches_dense_matrix(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            s, a = random_state(rng, n), random_state(rng, n)
            np.testing.assert_allclose(
                apply_diffusion(s, a).amplitudes, reflection_matrix(a) @ s.amplitudes, atol=1e-13
            )

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            apply_diffusion(StateVector.uniform(2), StateVector.uniform(3))


class TestInnerProduct:
    def test_self_overlap(self):
        s = StateVector.uniform(4)
        assert inner_product(s, s) == pytest.approx(1.0, abs=1e-15)

    def test_plus_minus_orthogonal(self):
        plus, minus = (expand_product(ProductState.parse(x)) for x in ("+", "-"))
        assert abs(inner_product(plus, minus)) < 1e-16

    def test_conjugates_first_argument(self):
        pi, one = expand_product(ProductState.parse("+i")), StateVector.basis(1, 1)
        assert inner_product(pi, one) == pytest.approx(-1j * R2)

    def test_mismatch(self):
        with pytest.raises(ConfigurationError):
            inner_product(StateVector.uniform(1), StateVector.uniform(2))


class TestMeasurement:
    def test_basis_state(self):
        np.testing.assert_array_equal(measure_distribution(StateVector.basis(2, 2)), [0, 0, 1, 0])

    def test_three_qubit_two_iterations(self):
        u = StateVector.uniform(3)
        w = MarkedSet.parse("110", 3)
        s = apply_diffusion(apply_oracle(apply_diffusion(apply_oracle(u, w), u), w), u)
        assert measure_distribution(s)[6] == pytest.approx(121 / 128, abs=1e-12)

    def test_basis_sampling_deterministic(self):
        for seed in (0, 1, 99):
            assert sample_measurement(StateVector.basis(2, 2), make_rng(seed)) == 2

    def test_golden_draws(self):
        # pinned PCG64 stream, inverse CDF over ascending indices
        u = StateVector.uniform(2)
        rng = make_rng(0)
        assert [sample_measurement(u, rng) for _ in range(8)] == [2, 1, 0, 0, 3, 3, 2, 2]
        rng = make_rng(2**64 - 1)
        assert [sample_measurement(u, rng) for _ in range(4)] == [2, 3, 0, 3]

    def test_same_seed_same_index(self):
        s = StateVector.uniform(5)
        assert sample_measurement(s, make_rng(77)) == sample_measurement(s, make_rng(77))

    def test_frequencies(self):
        u = StateVector.uniform(2)
        rng = make_rng(2024)
        draws = np.array([sample_measurement(u, rng) for _ in range(100_000)])
        freq = np.bincount(draws, minlength=4) / len(draws)
        assert np.all(np.abs(freq - 0.25) < 0.01)


class TestStateVectorType:
    def test_rejects_unnormalized(self):
        with pytest.raises(ConfigurationError):
            StateVector([1, 1])

    def test_rejects_bad_length(self):
        with pytest.raises(ConfigurationError):
            StateVector([1, 0, 0])

    def test_qubit_cap(self):
        with pytest.raises(ConfigurationError):
            StateVector.basis(21, 0)

    def test_read_only(self):
        s = StateVector.uniform(2)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 1

    def test_marked_parse(self):
        assert MarkedSet.parse("0100,0110,1000,1011", 4).indices == (4, 6, 8, 11)
        assert MarkedSet.parse(["|10>"]).indices == (2,)
        assert MarkedSet.parse("11,3", 4).indices == (3, 11)
        with pytest.raises(ConfigurationError):
            MarkedSet.parse("4,4")
        with pytest.raises(ConfigurationError):
            MarkedSet.parse("16", 4)


@pytest.mark.parametrize("seed", range(4))
def test_norm_preservation_and_involutions(seed):
    """1000 random (state, marked set, reflection axis) cases with n <= 10."""
    rng = np.random.default_rng(seed)
    for _ in range(250):
        n = int(rng.integers(1, 11))
        s, a, w = random_state(rng, n), random_state(rng, n), random_marked(rng, n)
        o = apply_oracle(s, w)
        d = apply_diffusion(s, a)
        assert abs(o.norm() - s.norm()) < 1e-12
        assert abs(d.norm() - s.norm()) < 1e-12
        assert np.max(np.abs(apply_oracle(o, w).amplitudes - s.amplitudes)) <= 1e-15
        assert apply_diffusion(d, a).allclose(s, 1e-12)
        assert abs(measure_distribution(s).sum() - 1) < 1e-12


@settings(max_examples=200)
@given(words, st.data())
def test_zero_overlap_reflection_negates(p, data):
    n = p.qubits
    about = expand_product(p)
    w = MarkedSet(tuple(data.draw(st.sets(st.integers(0, 2**n - 1), min_size=1))))
    s = apply_oracle(StateVector.uniform(n), w)
    if abs(inner_product(about, s)) < 1e-12:
        assert apply_diffusion(s, about).allclose(-s)
