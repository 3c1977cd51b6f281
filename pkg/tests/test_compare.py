import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgrand.analytic import PgrandModelPoint, error_probability
from pgrand.compare import (
    MbNoiseParams,
    ProtocolOutcome,
    effective_yield,
    external_protocol,
    mb_input_fidelity,
    mb_output_fidelity,
    mb_purification_range,
    mb_threshold_q,
    oxford_protocol,
    oxford_round,
    pgrand_outcome,
    register_external_protocol,
)
from pgrand.noise import BellDiagonalState, werner_from_fidelity


def bell_states():
    return (
        st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4)
        .filter(lambda v: sum(v) > 1e-3)
        .map(lambda v: BellDiagonalState(*(np.array(v) / sum(v))))
    )


class TestOxfordRound:
    def test_fixpoint(self):
        out, N = oxford_round(BellDiagonalState(1, 0, 0, 0))
        assert out.as_tuple() == (1, 0, 0, 0) and N == 1

    def test_werner_07(self):
        out, N = oxford_round(werner_from_fidelity(0.7))
        assert N == pytest.approx(0.68)
        assert out.A == pytest.approx(0.5 / 0.68)
        assert out.A == pytest.approx(0.7353, abs=1e-4)

    def test_degenerate(self):
        class Zero:
            def as_tuple(self):
                return (0.0, 0.0, 0.0, 0.0)

        with pytest.raises(ValueError):
            oxford_round(Zero())


@given(bell_states())
def test_round_preserves_normalization(state):
    out, N = oxford_round(state)
    assert 0 < N <= 1 + 1e-12
    assert sum(out.as_tuple()) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.5001, 0.999))
def test_iteration_converges(F):
    state = werner_from_fidelity(F)
    history = [state.A]
    for _ in range(200):
        state, _ = oxford_round(state)
        history.append(state.A)
        if 1 - state.A < 1e-9:
            break
    assert 1 - state.A < 1e-9
    # eventually monotone: after the first few rounds A never decreases again
    tail = history[len(history) // 2:]
    assert all(b >= a - 1e-12 for a, b in zip(tail, tail[1:]))


def test_hundred_random_inputs_converge():
    rng = np.random.default_rng(100)
    for F in rng.uniform(0.5, 1.0, 100):
        state = werner_from_fidelity(float(F))
        for _ in range(200):
            state, _ = oxford_round(state)
        assert sum(state.as_tuple()) == pytest.approx(1.0, abs=1e-12)
        assert 1 - state.A < 1e-9


class TestOxfordProtocol:
    def test_perfect(self):
        for r in (1, 3):
            o = oxford_protocol(1.0, r)
            assert o.F_out == 1.0 and o.P_suc == 1.0

    def test_single_round(self):
        o = oxford_protocol(0.7, 1)
        assert o.F_out == pytest.approx(0.7353, abs=1e-4)
        assert o.P_suc == pytest.approx(0.68) and o.yield_ == 0.5

    def test_multi_round_accounting(self):
        o = oxford_protocol(0.8, 3)
        assert o.n_in == 8 and o.yield_ == 1 / 8
        assert o.expected_cost == pytest.approx(8 / o.P_suc)

    def test_non_convergent_flag(self):
        o = oxford_protocol(0.5, 2)
        assert not o.converges and 0 < o.F_out < 1

    def test_preconditions(self):
        with pytest.raises(ValueError):
            oxford_protocol(0.9, 0)
        with pytest.raises(ValueError):
            oxford_protocol(0.25, 1)


class TestEffectiveYield:
    def test_no_gain(self):
        assert effective_yield(ProtocolOutcome(1.0, 0.9, 0.9, 4, 1)) == 0.0

    def test_negative_gain_floored(self):
        assert effective_yield(ProtocolOutcome(1.0, 0.9, 0.8, 4, 1)) == 0.0

    def test_pgrand(self):
        o = pgrand_outcome(32, 4, 0.95)
        pe = error_probability(PgrandModelPoint(32, 4, 0.05, 32))
        assert effective_yield(o) == pytest.approx(max(0.0, (4 / 32) * ((1 - pe) - 0.95)))

    def test_oxford(self):
        assert effective_yield(oxford_protocol(0.7, 1)) == pytest.approx(0.68 * 0.5 * (0.5 / 0.68 - 0.7))
        assert effective_yield(oxford_protocol(0.7, 1)) == pytest.approx(0.0120, abs=1e-4)

    @given(st.floats(0.26, 1.0), st.integers(1, 5))
    def test_range(self, F, rounds):
        assert 0.0 <= effective_yield(oxford_protocol(F, rounds)) <= 1.0

    def test_outcome_validation(self):
        with pytest.raises(ValueError):
            ProtocolOutcome(1.2, 0.9, 0.95, 2, 1)
        with pytest.raises(ValueError):
            ProtocolOutcome(0.5, 0.9, 0.95, 2, 3)


class TestTransferMaps:
    def test_noiseless_resource(self):
        assert mb_input_fidelity(0.1, 0.0) == pytest.approx(0.9)

    def test_equal_noise(self):
        q = 0.03
        assert mb_input_fidelity(q, q) == pytest.approx(1 - 2 * q + 4 / 3 * q * q)

    def test_value(self):
        assert mb_input_fidelity(0.05, 0.02) == pytest.approx(0.931333, abs=1e-6)

    @given(st.floats(0, 0.999), st.floats(0, 0.999))
    def test_symmetric(self, a, b):
        assert mb_input_fidelity(a, b) == mb_input_fidelity(b, a)
        assert mb_output_fidelity(a, b) == mb_output_fidelity(b, a)

    def test_params(self):
        with pytest.raises(ValueError):
            MbNoiseParams(0.1, 1.0)


class TestThreshold:
    def test_no_floor_gap(self):
        assert mb_threshold_q(1.0) == 0.0

    def test_quadratic_root(self):
        assert mb_threshold_q(0.9) == pytest.approx(0.0518, abs=1e-4)
        q = mb_threshold_q(0.9)
        assert 4 / 3 * q * q - 2 * q + 0.1 == pytest.approx(0.0, abs=1e-12)

    def test_no_real_root(self):
        with pytest.raises(ValueError):
            mb_threshold_q(0.2)


class TestPurificationRange:
    def test_table_spot_checks(self):
        r = mb_purification_range(128, 0.01)
        assert r.attainable
        assert r.F_min_eff == pytest.approx(0.8479, abs=2e-3)
        assert r.F_max_eff == pytest.approx(0.9899, abs=2e-3)

    def test_small_n_high_q_empty(self):
        assert not mb_purification_range(16, 0.03).attainable

    @pytest.mark.parametrize("n", [16, 64, 256])
    def test_empty_beyond_floor_threshold(self, n):
        assert not mb_purification_range(n, mb_threshold_q() + 0.005).attainable

    def test_range_is_consistent(self):
        r = mb_purification_range(64, 0.02)
        assert 0 <= r.p_low < r.p_high
        assert r.F_min_eff == pytest.approx(1 - r.p_high)
        mid = 0.5 * (r.p_low + r.p_high)
        assert mb_output_fidelity(
            error_probability(PgrandModelPoint(64, 1, 1 - mb_input_fidelity(mid, 0.02), 64)), 0.02
        ) > 1 - mid


class TestExternalProtocols:
    def test_self_consistency_with_oxford(self):
        grid = np.linspace(0.55, 0.99, 89)
        rows = [(F, oxford_protocol(F, 1).P_suc, oxford_protocol(F, 1).F_out, 0.5) for F in grid]
        h = register_external_protocol("recurrence-table", rows)
        for F in (0.6, 0.73, 0.91):
            got, want = h(F), oxford_protocol(F, 1)
            assert got.F_out == pytest.approx(want.F_out, abs=1e-4)
            assert got.P_suc == pytest.approx(want.P_suc, abs=1e-4)
            assert got.yield_ == 0.5
        assert external_protocol("recurrence-table") is h

    def test_empty(self):
        with pytest.raises(ValueError):
            register_external_protocol("empty", [])

    def test_midpoint(self):
        h = register_external_protocol("two-point", {0.6: (0.5, 0.7, 0.25), 0.9: (0.9, 0.95, 0.25)})
        o = h(0.75)
        assert o.P_suc == pytest.approx(0.7) and o.F_out == pytest.approx(0.825)

    def test_non_monotone(self):
        with pytest.raises(ValueError):
            register_external_protocol("bad", [(0.9, 1, 0.95, 0.5), (0.6, 1, 0.7, 0.5)])

    def test_outside_grid(self):
        h = register_external_protocol("short", [(0.6, 1, 0.7, 0.5), (0.7, 1, 0.8, 0.5)])
        with pytest.raises(ValueError):
            h(0.95)
