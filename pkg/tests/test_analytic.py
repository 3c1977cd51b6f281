import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgrand import analytic as an
from pgrand.analytic import (
    HashingBoundParams,
    PgrandModelPoint,
    PurificationUnattainable,
    avg_correctable_fraction,
    binary_entropy,
    delta_optimal,
    delta_prime,
    delta_reference,
    error_probability,
    hamming_bound_root,
    hamming_bound_yield,
    hashing_entropy_terms,
    hashing_fidelity_bound,
    hashing_min_pairs,
    max_yield,
    min_fidelity,
    min_pairs,
    typical_set_bounds,
)
from pgrand.noise import log2_pattern_probability, DepolarizingParams, werner_entropy
from pgrand.pauli import PauliString


def f_oracle(n, k, w):
    """50-digit evaluation of the random-code correctable fraction."""
    mp.mp.dps = 50
    S = mp.mpf(2) ** (n - k)
    N = [mp.binomial(n, i) * mp.mpf(3) ** i for i in range(w + 1)]
    cum = mp.fsum(N[:w])
    f = S / N[w] * mp.exp(-cum / S) * -mp.expm1(-N[w] / S)
    return min(f, mp.mpf(1))


class TestCorrectableFraction:
    def test_weight_zero_large_s(self):
        assert avg_correctable_fraction(PgrandModelPoint(32, 1, 0.01, 3), 0) == pytest.approx(1.0, abs=1e-9)

    def test_above_t_is_zero(self):
        assert avg_correctable_fraction(PgrandModelPoint(32, 16, 0.01, 3), 4) == 0.0

    def test_reference_value(self):
        got = avg_correctable_fraction(PgrandModelPoint(32, 16, 0.01, 2), 2)
        assert 0 < got <= 1
        assert got == pytest.approx(float(f_oracle(32, 16, 2)), rel=1e-12)

    def test_grid_against_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n = int(rng.integers(4, 260))
            k = int(rng.integers(1, n))
            w = int(rng.integers(0, min(n, 12) + 1))
            got = math.exp(an.log_correctable_fractions(n, k, w)[w])
            want = f_oracle(n, k, w)
            if want < mp.mpf("1e-300"):
                assert got < 1e-290
            else:
                assert got == pytest.approx(float(want), rel=1e-10), (n, k, w)

    def test_clamped(self):
        assert np.all(an.log_correctable_fractions(6, 5, 6) <= 0.0)


class TestErrorProbability:
    def test_noiseless(self):
        assert error_probability(PgrandModelPoint(32, 16, 0.0, 4)) == 0.0
        # as p -> 0 only the identity term survives, leaving 1 - <f_0> ~ 1/(2S)
        S = 2.0**16
        floor = 1 - S * -math.expm1(-1 / S)
        assert error_probability(PgrandModelPoint(32, 16, 1e-12, 4)) == pytest.approx(floor, rel=1e-6)
        assert error_probability(PgrandModelPoint(64, 4, 1e-12, 4)) < 1e-12

    def test_no_correction(self):
        n, p = 64, 0.02
        assert error_probability(PgrandModelPoint(n, 1, p, 0)) == pytest.approx(1 - (1 - p) ** n, abs=1e-9)

    def test_monotone_in_t(self):
        pes = [error_probability(PgrandModelPoint(48, 12, 0.03, t)) for t in range(0, 49)]
        assert all(a >= b - 1e-15 for a, b in zip(pes, pes[1:]))

    def test_monotone_in_p_and_k(self):
        ps = np.linspace(0.001, 0.3, 40)
        by_p = [error_probability(PgrandModelPoint(40, 8, float(p), 40)) for p in ps]
        assert all(a <= b + 1e-15 for a, b in zip(by_p, by_p[1:]))
        by_k = [error_probability(PgrandModelPoint(40, k, 0.05, 40)) for k in range(1, 40)]
        assert all(a <= b + 1e-15 for a, b in zip(by_k, by_k[1:]))

    def test_point_validation(self):
        with pytest.raises(ValueError):
            PgrandModelPoint(10, 0, 0.1, 2)
        with pytest.raises(ValueError):
            PgrandModelPoint(10, 2, 0.8, 2)
        with pytest.raises(ValueError):
            PgrandModelPoint(10, 2, 0.1, 11)


class TestHamming:
    def test_noiseless(self):
        assert hamming_bound_yield(0.0) == 1.0

    def test_root(self):
        assert hamming_bound_yield(0.1893) == pytest.approx(0.0, abs=5e-4)
        assert hamming_bound_root() == pytest.approx(0.1893, abs=5e-4)

    def test_value(self):
        mp.mp.dps = 50
        p = mp.mpf("0.01")
        want = 1 - p * mp.log(3, 2) + p * mp.log(p, 2) + (1 - p) * mp.log(1 - p, 2)
        assert hamming_bound_yield(0.01) == pytest.approx(float(want), rel=1e-12)
        assert hamming_bound_yield(0.01) == pytest.approx(0.9034, abs=1e-4)

    def test_entropy_limits(self):
        assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == 1.0


class TestSolvers:
    def test_table1_endpoints(self):
        assert min_fidelity(30, 6) == pytest.approx(0.8695, abs=1e-3)
        assert min_fidelity(61, 12) == pytest.approx(0.8499, abs=1e-3)

    def test_unrestricted_floor(self):
        floor = 1 - hamming_bound_root()
        fs = [min_fidelity(n) for n in (10, 20, 40, 80, 160, 320)]
        assert all(a >= b - 1e-5 for a, b in zip(fs, fs[1:]))
        assert all(f > floor for f in fs)
        assert fs[-1] - floor < 0.03

    def test_min_pairs_examples(self):
        assert min_pairs(0.95) == 10
        assert min_pairs(0.90) == 16
        assert abs(min_pairs(0.83) - 251) <= 1

    def test_min_pairs_below_floor(self):
        with pytest.raises(PurificationUnattainable):
            min_pairs(0.80)

    def test_min_pairs_non_increasing(self):
        ns = [min_pairs(F) for F in np.arange(0.84, 0.99, 0.01)]
        assert all(a >= b for a, b in zip(ns, ns[1:]))

    def test_max_yield_noiseless(self):
        assert max_yield(20, 1.0, 0.01) == 19 / 20

    @pytest.mark.parametrize("n,F,target", [(50, 0.95, 0.05), (100, 0.9, 0.1), (200, 0.97, 0.01)])
    def test_max_yield_below_hamming(self, n, F, target):
        y = max_yield(n, F, target)
        assert y < hamming_bound_yield(1 - F)
        if y > 0:
            k = round(y * n)
            assert error_probability(PgrandModelPoint(n, k, 1 - F, n)) < target

    def test_max_yield_close_to_hamming(self):
        """At 500 pairs the yield should already sit near the capacity bound."""
        y = max_yield(500, 0.95, 0.05)
        assert abs(y - hamming_bound_yield(0.05)) <= 0.02


class TestHashing:
    def test_terms_positive(self):
        terms = hashing_entropy_terms(0.9)
        assert terms["S"] == pytest.approx(werner_entropy(0.9))
        assert terms["a"] > 0 and terms["g"] > 0

    def test_large_n_limit(self):
        F = 0.95
        d = 0.5 * (1 - werner_entropy(F))
        assert hashing_fidelity_bound(HashingBoundParams(20000, 1, F, d)) == pytest.approx(1.0, abs=1e-9)

    def test_bound_clamped(self):
        v = hashing_fidelity_bound(HashingBoundParams(4, 3, 0.6, 0.5))
        assert 0.0 <= v <= 1.0

    def test_params_validation(self):
        with pytest.raises(ValueError):
            HashingBoundParams(10, 1, 1.0, 0.1)
        with pytest.raises(ValueError):
            HashingBoundParams(10, 1, 0.9, 0.0)

    def test_delta_reference(self):
        assert delta_reference(164, 0.95) == pytest.approx(0.5 * (163 / 164 - werner_entropy(0.95)))

    def test_delta_prime_full_budget(self):
        assert delta_prime(40, 40, 0.9) == pytest.approx(2 - werner_entropy(0.9), abs=1e-12)

    def test_delta_optimal_maximizes(self):
        n, k, F = 120, 1, 0.95
        d = delta_optimal(n, k, F)
        best = hashing_fidelity_bound(HashingBoundParams(n, k, F, d))
        hi = 1 - werner_entropy(F)
        for other in np.linspace(hi * 1e-3, hi * 0.999, 300):
            assert hashing_fidelity_bound(HashingBoundParams(n, k, F, float(other))) <= best + 1e-9

    def test_table2_examples(self):
        assert abs(hashing_min_pairs(0.95, "optimal") - 71) <= 2
        assert abs(hashing_min_pairs(0.90, "reference") - 412) <= 2
        assert abs(hashing_min_pairs(0.99, "optimal") - 45) <= 2

    def test_printed_exponent_is_delta_blind(self):
        # the literal exponent makes the last term negligible, so the bound no longer trades delta
        a = an._hashing_raw(64, 1, 0.95, 0.05, printed_sign=True)
        b = an._hashing_raw(64, 1, 0.95, 0.05, printed_sign=False)
        assert a >= b

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            hashing_min_pairs(0.9, "random")


class TestTypicalSet:
    def test_vacuous(self):
        ts = typical_set_bounds(30, 0.9, 50.0)
        assert ts["mass_inside"] == pytest.approx(1.0)
        assert ts["mass_outside"] == pytest.approx(0.0, abs=1e-15)

    def test_flags_match_pattern_probability(self):
        n, F, d = 128, 0.9, 0.1
        ts = typical_set_bounds(n, F, d)
        params = DepolarizingParams(n, 1 - F)
        for w in range(n + 1):
            lp = log2_pattern_probability(PauliString.from_codes([2] * w + [0] * (n - w)), params)
            assert lp == pytest.approx(ts["log2_pattern_probability"][w], rel=1e-12)
            assert bool(ts["inside"][w]) == (ts["log2_p_low"] <= lp <= ts["log2_p_high"])
        assert ts["log2_max_count"] == pytest.approx(n * (werner_entropy(F) + d))
        assert ts["mass_inside"] + ts["mass_outside"] == pytest.approx(1.0)

    def test_outside_mass_lower_bounds_failure(self):
        n, F, d = 64, 0.9, 0.1
        ts = typical_set_bounds(n, F, d)
        bound = hashing_fidelity_bound(HashingBoundParams(n, 1, F, d))
        assert 1 - bound >= ts["mass_outside"] - 1e-12 or bound == 0.0


@given(st.integers(5, 120), st.floats(0.001, 0.3), st.data())
def test_error_probability_in_unit_interval(n, p, data):
    k = data.draw(st.integers(1, n - 1))
    t = data.draw(st.integers(0, n))
    pe = error_probability(PgrandModelPoint(n, k, p, t))
    assert 0.0 <= pe <= 1.0
