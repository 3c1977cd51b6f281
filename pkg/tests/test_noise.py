import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chisquare

from pgrand.noise import (
    BellDiagonalState,
    DepolarizingParams,
    binomial_pmf,
    count_patterns,
    count_patterns_upto,
    enumerate_patterns,
    log2_count_patterns,
    log2_pattern_probability,
    pattern_probability,
    sample_codes,
    sample_error,
    weight_class_codes,
    werner_entropy,
    werner_from_fidelity,
)
from pgrand.pauli import PauliString

from conftest import pauli_matrix


def test_p_zero_gives_identity():
    params = DepolarizingParams(20, 0.0)
    for seed in range(5):
        assert sample_error(params, seed).weight == 0


def test_p_three_quarters_rejected():
    with pytest.raises(ValueError):
        DepolarizingParams(3, 0.75)
    with pytest.raises(ValueError):
        DepolarizingParams(3, -0.1)


def test_mean_weight_concentrates():
    n, p = 100_000, 0.1
    w = sample_error(DepolarizingParams(n, p), 2024).weight
    sigma = math.sqrt(n * p * (1 - p))
    assert abs(w - n * p) < 3 * sigma


def test_weight_histogram_matches_binomial():
    n, p, shots = 12, 0.15, 100_000
    codes = sample_codes(DepolarizingParams(n, p), np.random.default_rng(3), shots)
    hist = np.bincount(np.count_nonzero(codes, axis=1), minlength=n + 1)
    expected = np.array([binomial_pmf(n, p, w) for w in range(n + 1)]) * shots
    # pool sparse tail bins so every expected count is at least 5
    keep = expected >= 5
    obs = np.append(hist[keep], hist[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    assert chisquare(obs, exp * obs.sum() / exp.sum()).pvalue > 1e-3


def test_nonidentity_paulis_uniform():
    codes = sample_codes(DepolarizingParams(50, 0.3), np.random.default_rng(8), 20_000)
    counts = np.bincount(codes[codes > 0], minlength=4)[1:]
    assert chisquare(counts).pvalue > 1e-3


class TestPatternProbability:
    def test_identity(self):
        assert pattern_probability(PauliString.identity(1), DepolarizingParams(1, 0.3)) == pytest.approx(0.7)

    def test_weight_one(self):
        assert pattern_probability(PauliString.from_string("Y"), DepolarizingParams(1, 0.3)) == pytest.approx(0.1)

    @given(st.floats(0.001, 0.749), st.integers(0, 7), st.integers(0, 7))
    def test_lighter_is_likelier(self, p, w1, w2):
        n = 8
        params = DepolarizingParams(n, p)
        e1 = PauliString.from_codes([1] * w1 + [0] * (n - w1))
        e2 = PauliString.from_codes([3] * w2 + [0] * (n - w2))
        if w1 < w2:
            assert log2_pattern_probability(e1, params) > log2_pattern_probability(e2, params)

    def test_sums_to_one(self):
        params = DepolarizingParams(3, 0.2)
        total = sum(pattern_probability(e, params) for e in enumerate_patterns(3, 3))
        assert total == pytest.approx(1.0, abs=1e-12)


class TestCounts:
    def test_examples(self):
        assert count_patterns(7, 0) == 1
        assert count_patterns(2, 1) == 6
        assert count_patterns(32, 5) == 48_934_368

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            count_patterns(3, 4)

    @pytest.mark.parametrize("n", [1, 5, 17, 64])
    def test_total_is_four_to_n(self, n):
        assert count_patterns_upto(n, n) == 4**n

    def test_log2_matches_exact(self):
        for n, w in [(32, 5), (128, 4), (256, 100)]:
            assert log2_count_patterns(n, w) == pytest.approx(math.log2(count_patterns(n, w)), rel=1e-12)


class TestBinomial:
    def test_zero_weight(self):
        assert binomial_pmf(20, 0.1, 0) == pytest.approx(0.9**20)

    def test_symmetric(self):
        assert binomial_pmf(4, 0.5, 2) == pytest.approx(0.375)

    def test_normalized(self):
        total = math.fsum(binomial_pmf(128, 0.05, w) for w in range(129))
        assert abs(total - 1.0) < 1e-12


class TestEnumeration:
    def test_t0(self):
        assert list(enumerate_patterns(2, 0)) == [PauliString.identity(2)]

    def test_t1(self):
        pats = list(enumerate_patterns(2, 1))
        assert len(pats) == 7 and pats[0].weight == 0

    def test_length(self):
        assert sum(1 for _ in enumerate_patterns(5, 2)) == 106

    def test_within_weight_order(self):
        pats = [str(p) for p in enumerate_patterns(2, 1)]
        assert pats == ["II", "XI", "ZI", "YI", "IX", "IZ", "IY"]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_likelihood_non_increasing(self, n):
        params = DepolarizingParams(n, 0.2)
        probs = [log2_pattern_probability(e, params) for e in enumerate_patterns(n, n)]
        assert all(a >= b for a, b in zip(probs, probs[1:]))
        assert len(set(map(str, enumerate_patterns(n, n)))) == 4**n

    def test_weight_class_codes_match_stream(self):
        n, w = 5, 2
        supports, paulis = weight_class_codes(n, w)
        flat = []
        for sup in supports:
            for pa in paulis:
                codes = [0] * n
                for q, c in zip(sup, pa):
                    codes[q] = int(c)
                flat.append(PauliString.from_codes(codes))
        stream = [e for e in enumerate_patterns(n, w) if e.weight == w]
        assert flat == stream


class TestWerner:
    def test_perfect(self):
        assert werner_from_fidelity(1.0).as_tuple() == (1.0, 0.0, 0.0, 0.0)
        assert werner_entropy(1.0) == 0.0

    def test_maximally_mixed(self):
        assert werner_from_fidelity(0.25).as_tuple() == pytest.approx((0.25,) * 4)
        assert werner_entropy(0.25) == pytest.approx(2.0)

    def test_entropy_value(self):
        expected = -0.9 * math.log2(0.9) - 0.1 * math.log2(0.1 / 3)
        assert werner_entropy(0.9) == pytest.approx(expected, rel=1e-14)
        mp.mp.dps = 50
        F = mp.mpf("0.9")
        oracle = -F * mp.log(F, 2) - (1 - F) * mp.log((1 - F) / 3, 2)
        assert werner_entropy(0.9) == pytest.approx(float(oracle), rel=1e-13)
        assert round(werner_entropy(0.9), 3) == 0.627

    def test_invalid(self):
        with pytest.raises(ValueError):
            werner_from_fidelity(0.2)
        with pytest.raises(ValueError):
            BellDiagonalState(0.5, 0.5, 0.5, -0.5)
        with pytest.raises(ValueError):
            BellDiagonalState(0.5, 0.2, 0.2, 0.2)

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.3, 0.6])
    @pytest.mark.parametrize("which", [0, 1])
    def test_channel_on_one_half_of_bell_pair(self, p, which):
        phi_plus = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
        rho = np.outer(phi_plus, phi_plus.conj())
        out = (1 - p) * rho
        for c in (1, 2, 3):
            op = PauliString.from_codes([c, 0] if which == 0 else [0, c])
            m = pauli_matrix(op)
            out += p / 3 * m @ rho @ m.conj().T
        bell = {
            "A": np.array([1, 0, 0, 1]) / math.sqrt(2),   # phi+
            "B": np.array([0, 1, -1, 0]) / math.sqrt(2),  # psi-
            "C": np.array([0, 1, 1, 0]) / math.sqrt(2),   # psi+
            "D": np.array([1, 0, 0, -1]) / math.sqrt(2),  # phi-
        }
        weights = tuple(float(np.real(v.conj() @ out @ v)) for v in bell.values())
        assert werner_from_fidelity(1 - p).as_tuple() == pytest.approx(weights, abs=1e-12)
