import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridlab.infotheory import (
    ConditionalPmf,
    DistortionMeasure,
    InvalidDistributionError,
    JointPmf,
    Pmf,
    compose_joint,
    conditional_mutual_information,
    empirical_distortion,
    entropy,
    is_typical,
    mutual_information,
)


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def random_pmf(rng, k):
    v = rng.random(k) + 1e-3
    return Pmf(v / v.sum())


class TestConstruction:
    def test_negative_probability_rejected(self):
        with pytest.raises(InvalidDistributionError):
            Pmf([1.2, -0.2])

    def test_bad_sum_rejected(self):
        with pytest.raises(InvalidDistributionError):
            Pmf([0.5, 0.4])

    def test_renormalizes_tiny_drift(self):
        p = Pmf([0.5 + 4e-10, 0.5])
        assert abs(p.probs.sum() - 1.0) <= 1e-12

    def test_kernel_rows_validated(self):
        with pytest.raises(InvalidDistributionError):
            ConditionalPmf([[0.5, 0.5], [0.9, 0.2]])

    def test_joint_validated(self):
        with pytest.raises(InvalidDistributionError):
            JointPmf([[0.5, 0.5], [0.5, 0.5]])

    def test_immutable(self):
        p = Pmf([0.5, 0.5])
        with pytest.raises(ValueError):
            p.probs[0] = 0.3

    def test_deterministic_kernel(self):
        k = ConditionalPmf.deterministic([[0, 1], [1, 0]], 2)
        assert np.array_equal(k.rows, [[1, 0], [0, 1], [0, 1], [1, 0]])


class TestEntropy:
    def test_uniform_binary(self):
        assert entropy(Pmf.uniform(2)) == pytest.approx(1.0, abs=1e-12)

    def test_point_mass(self):
        assert entropy(Pmf.point_mass(3, 1)) == 0.0

    def test_uniform_ternary(self):
        assert entropy(Pmf.uniform(3)) == pytest.approx(math.log2(3), abs=1e-12)

    @given(st.lists(st.floats(1e-3, 1.0), min_size=2, max_size=6))
    def test_bounded_by_log_alphabet(self, weights):
        p = Pmf(np.asarray(weights) / sum(weights))
        h = entropy(p)
        assert -1e-12 <= h <= math.log2(p.alphabet_size) + 1e-12

    @given(st.integers(2, 6))
    def test_uniform_maximizes(self, k):
        rng = np.random.default_rng(k)
        for _ in range(20):
            assert entropy(random_pmf(rng, k)) <= entropy(Pmf.uniform(k)) + 1e-12


class TestMutualInformation:
    def test_product_joint_zero(self):
        j = JointPmf.product(Pmf([0.3, 0.7]), Pmf([0.6, 0.4]))
        assert mutual_information(j, [0], [1]) == pytest.approx(0.0, abs=1e-12)

    def test_identity_coupling_one_bit(self):
        j = JointPmf(np.eye(2) / 2)
        assert mutual_information(j, [0], [1]) == pytest.approx(1.0, abs=1e-12)

    def test_bsc_uniform_input(self):
        j = compose_joint(JointPmf.from_pmf(Pmf.uniform(2)),
                          [(ConditionalPmf.bsc(0.1), [0])])
        assert mutual_information(j, [0], [1]) == pytest.approx(1 - h2(0.1), abs=1e-12)

    def test_overlapping_axes_rejected(self):
        j = JointPmf(np.eye(2) / 2)
        with pytest.raises(ValueError):
            mutual_information(j, [0], [0])

    @given(st.integers(0, 1000))
    @settings(max_examples=30)
    def test_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.random((3, 4)) + 1e-3
        j = JointPmf(m / m.sum())
        assert mutual_information(j, [0], [1]) == pytest.approx(
            mutual_information(j, [1], [0]), abs=1e-12)

    def test_conditional_mi_chain(self):
        # I(A;B|C) on a Markov chain A - C - B is zero.
        pa = Pmf([0.5, 0.5])
        j = compose_joint(JointPmf.from_pmf(pa),
                          [(ConditionalPmf.bsc(0.2), [0]),
                           (ConditionalPmf.bsc(0.3), [1])])
        assert conditional_mutual_information(j, [0], [2], [1]) == pytest.approx(0.0, abs=1e-12)


class TestComposeJoint:
    def test_identity_kernel(self):
        j = compose_joint(JointPmf.from_pmf(Pmf([0.3, 0.7])),
                          [(ConditionalPmf.identity(2), [0])])
        assert np.allclose(j.probs, [[0.3, 0], [0, 0.7]])

    def test_bsc_product(self):
        j = compose_joint(JointPmf.from_pmf(Pmf.uniform(2)),
                          [(ConditionalPmf.bsc(0.25), [0])])
        assert float(j.probs[0, 1] + j.probs[1, 0]) == pytest.approx(0.25, abs=1e-12)

    def test_data_processing(self):
        # Brute-force check on a small chain: I(S;Y) <= I(S;U).
        j = compose_joint(JointPmf.from_pmf(Pmf([0.4, 0.6])),
                          [(ConditionalPmf.bsc(0.1), [0]),
                           (ConditionalPmf.bsc(0.2), [1])])
        assert mutual_information(j, [0], [2]) <= mutual_information(j, [0], [1]) + 1e-12

    @given(st.integers(0, 500))
    @settings(max_examples=30)
    def test_marginal_recovers_source(self, seed):
        rng = np.random.default_rng(seed)
        src = random_pmf(rng, 3)
        rows = rng.random((3, 2)) + 1e-3
        rows /= rows.sum(axis=1, keepdims=True)
        j = compose_joint(JointPmf.from_pmf(src), [(ConditionalPmf(rows), [0])])
        assert np.allclose(j.marginal([0]).probs, src.probs, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            compose_joint(JointPmf.from_pmf(Pmf.uniform(3)),
                          [(ConditionalPmf.bsc(0.1), [0])])


class TestTypicality:
    def test_exact_empirical_always_typical(self):
        seq = [0, 0, 1, 1]
        assert is_typical(seq, Pmf.uniform(2), 1e-9)

    def test_all_zeros_not_typical(self):
        assert not is_typical([0, 0, 0, 0], Pmf.uniform(2), 0.1)

    def test_zero_probability_symbol_forces_false(self):
        assert not is_typical([0, 1, 2, 0], Pmf([0.5, 0.5, 0.0]), 5.0)

    def test_joint_tuple(self):
        j = JointPmf(np.eye(2) / 2)
        assert is_typical(([0, 1], [0, 1]), j, 0.1)
        assert not is_typical(([0, 1], [1, 0]), j, 0.9)

    def test_length_mismatch(self):
        j = JointPmf(np.eye(2) / 2)
        with pytest.raises(ValueError):
            is_typical(([0, 1], [0]), j, 0.1)

    @given(st.lists(st.integers(0, 1), min_size=4, max_size=12),
           st.floats(0.05, 1.0), st.floats(0.01, 1.0))
    @settings(max_examples=60)
    def test_monotone_in_epsilon(self, seq, eps, shrink):
        ref = Pmf([0.4, 0.6])
        smaller = eps * min(shrink, 0.999)
        if is_typical(seq, ref, smaller):
            assert is_typical(seq, ref, eps)


class TestDistortion:
    def test_identical_zero(self):
        d = DistortionMeasure.hamming(2)
        assert empirical_distortion([0, 1, 0], [0, 1, 0], d) == 0.0

    def test_complementary_one(self):
        d = DistortionMeasure.hamming(2)
        assert empirical_distortion([0, 1], [1, 0], d) == 1.0

    def test_quarter(self):
        d = DistortionMeasure.hamming(2)
        assert empirical_distortion([0, 1, 0, 1], [0, 1, 1, 1], d) == 0.25

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            empirical_distortion([0, 1], [0], DistortionMeasure.hamming(2))
