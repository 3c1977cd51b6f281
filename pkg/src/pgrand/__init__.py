"""Entanglement purification by guessing the noise pattern.

Alice and Bob encode their noisy Bell pairs with the same random Clifford
circuit, compare measured syndromes, and undo the most likely error found in a
precomputed lookup table. The package covers the GF(2) Pauli algebra, the
Clifford encoder, the table decoder, Monte Carlo estimation, the analytic
performance models and the comparisons with hashing and recurrence protocols.
"""

__version__ = "0.1.0"

from .pauli import BitMatrix, DimensionMismatch, PauliString, compose, gf2_rank, symplectic_product, weight
from .clifford import (
    GROUP_ORDER,
    CliffordCircuit,
    CliffordGate,
    ParityCheckMatrix,
    apply_measurement_update,
    build_parity_check,
    clifford_group,
    default_gate_count,
    gate_cost_estimate,
    logical_operators,
    sample_random_encoder,
    syndrome,
)
from .noise import (
    BellDiagonalState,
    DepolarizingParams,
    count_patterns,
    enumerate_patterns,
    pattern_probability,
    sample_error,
    werner_from_fidelity,
)
from .decoder import ResourceLimitError, SyndromeTable, build_table, decode, empirical_correctable_fraction
from .analytic import (
    HashingBoundParams,
    PgrandModelPoint,
    PurificationUnattainable,
    avg_correctable_fraction,
    delta_optimal,
    delta_prime,
    delta_reference,
    error_probability,
    hamming_bound_root,
    hamming_bound_yield,
    hashing_fidelity_bound,
    hashing_min_pairs,
    max_yield,
    min_fidelity,
    min_pairs,
    typical_set_bounds,
)
from .simulation import SimConfig, SimResult, estimate_error_probability, run_trial
from .compare import (
    MbNoiseParams,
    ProtocolOutcome,
    effective_yield,
    mb_input_fidelity,
    mb_output_fidelity,
    mb_purification_range,
    mb_threshold_q,
    mb_threshold_search,
    oxford_protocol,
    oxford_round,
    register_external_protocol,
)
