"""Monte Carlo estimate of the purification protocol's error probability.

One encoder is drawn per encoder seed, its lookup table is built once, and
the depolarizing errors for that encoder are decoded in vectorized batches.
Alice's measurement outcomes only flip syndrome bits that Bob flips back, so
by default trials work with the net syndrome directly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .clifford import (
    ParityCheckMatrix,
    build_parity_check,
    default_gate_count,
    logical_operators,
    sample_random_encoder,
)
from .decoder import (
    DEFAULT_MEM_BUDGET,
    SyndromeTable,
    build_table,
    codes_to_dense_words,
    dense_words_to_codes,
    table_fingerprint,
)
from .noise import DepolarizingParams, sample_codes
from .pauli import PauliString

EXACT = "exact-identification"
LOGICAL = "logical-equivalence"
CRITERIA = (EXACT, LOGICAL)


@dataclass(frozen=True)
class SimConfig:
    n: int
    k: int
    t: int
    p: float
    num_gates: int | None = None
    trials: int = 20_000
    seed: int = 0
    success_criterion: str = EXACT
    encoders: int = 20
    explicit_mask: bool = False
    batch: int = 50_000
    mem_budget: int = DEFAULT_MEM_BUDGET

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ValueError(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.encoders < 1:
            raise ValueError(f"encoders must be >= 1, got {self.encoders}")
        if not 0 <= self.t <= self.n:
            raise ValueError(f"need 0 <= t <= n, got t={self.t}")
        if self.success_criterion not in CRITERIA:
            raise ValueError(f"success_criterion must be one of {CRITERIA}")
        DepolarizingParams(self.n, self.p)

    @property
    def gates(self) -> int:
        return default_gate_count(self.n) if self.num_gates is None else self.num_gates

    def shots_per_encoder(self) -> list[int]:
        e = min(self.encoders, self.trials)
        base, extra = divmod(self.trials, e)
        return [base + (1 if i < extra else 0) for i in range(e)]


@dataclass
class SimResult:
    config: SimConfig
    trials: int
    failures: int
    p_e_hat: float
    stderr: float
    fidelity_lower_bound: float
    yield_: float
    weight_trials: list[int]
    weight_successes: list[int]
    encoder_pe: list[float]
    provenance: list[dict] = field(default_factory=list)

    def csv_row(self) -> dict:
        c = self.config
        return {
            "n": c.n, "k": c.k, "t": c.t, "p": c.p, "num_gates": c.gates,
            "trials": self.trials, "pe_hat": self.p_e_hat, "stderr": self.stderr,
            "fidelity_lb": self.fidelity_lower_bound, "yield": self.yield_,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["config"] = asdict(self.config)
        return d


CSV_FIELDS = ("n", "k", "t", "p", "num_gates", "trials", "pe_hat", "stderr", "fidelity_lb", "yield")


def fidelity_lower_bound(p_e: float) -> float:
    """``1 - p_e``: a lower bound on the mean output fidelity, not the fidelity itself."""
    if not 0.0 <= p_e <= 1.0:
        raise ValueError(f"p_e must lie in [0, 1], got {p_e}")
    return 1.0 - p_e


@dataclass
class Decoder:
    """Everything a trial needs for one encoder."""

    H: ParityCheckMatrix
    table: SyndromeTable
    logicals: ParityCheckMatrix | None = None

    @classmethod
    def for_circuit(cls, circuit, k: int, t: int, p: float, with_logicals: bool = False,
                    mem_budget: int = DEFAULT_MEM_BUDGET) -> Decoder:
        H = build_parity_check(circuit, k=k)
        table = build_table(H, t, p, encoder_seed=circuit.seed, num_gates=len(circuit),
                            mem_budget=mem_budget)
        logicals = None
        if with_logicals:
            kept = [q for q in range(circuit.n) if q not in set(H.measured)]
            logicals = ParityCheckMatrix.from_rows(logical_operators(circuit, kept))
        return cls(H, table, logicals)


def run_trials(dec: Decoder, codes: np.ndarray, criterion: str = EXACT,
               mask_rng: np.random.Generator | None = None) -> np.ndarray:
    """Success flags for a batch of error patterns given as ``(m, n)`` codes."""
    syn = dec.H.syndrome_codes(codes)
    if mask_rng is not None:
        # Alice's outcomes flip Bob's measured bits; Bob XORs them back out
        r = dec.H.r
        mask = mask_rng.integers(0, 2**64, size=syn.shape, dtype=np.uint64)
        full, rem = divmod(r, 64)
        if rem:
            mask[:, full] &= np.uint64((1 << rem) - 1)
            mask[:, full + 1:] = 0
        bob = syn ^ mask
        syn = bob ^ mask
    found, guess = dec.table.lookup(syn)
    if criterion == EXACT:
        actual = codes_to_dense_words(codes)
        return found & np.all(guess == actual, axis=1)
    if criterion == LOGICAL:
        if dec.logicals is None:
            raise ValueError("decoder was built without logical operators")
        residual = dense_words_to_codes(guess, dec.H.n) ^ codes
        clean = ~np.any(dec.logicals.syndrome_codes(residual), axis=1)
        return found & clean
    raise ValueError(f"unknown criterion {criterion!r}")


def run_trial(dec: Decoder, error: PauliString, criterion: str = EXACT,
              rng: np.random.Generator | None = None) -> bool:
    """Decode a single error; ``rng`` enables explicit measurement masking."""
    codes = np.array([error.codes()], dtype=np.uint8)
    return bool(run_trials(dec, codes, criterion, mask_rng=rng)[0])


def _encoder_streams(seed: int, count: int) -> list[tuple[int, np.random.SeedSequence]]:
    out = []
    for child in np.random.SeedSequence(seed).spawn(count):
        enc, noise = child.spawn(2)
        out.append((int(enc.generate_state(1, dtype=np.uint64)[0]), noise))
    return out


def _run_encoder(config: SimConfig, encoder_seed: int, noise_seq: np.random.SeedSequence, shots: int) -> dict:
    circuit = sample_random_encoder(config.n, config.gates, encoder_seed)
    dec = Decoder.for_circuit(circuit, config.k, config.t, config.p,
                              with_logicals=config.success_criterion == LOGICAL,
                              mem_budget=config.mem_budget)
    rng = np.random.default_rng(noise_seq)
    mask_rng = rng.spawn(1)[0] if config.explicit_mask else None
    params = DepolarizingParams(config.n, config.p)
    w_trials = np.zeros(config.n + 1, dtype=np.int64)
    w_succ = np.zeros(config.n + 1, dtype=np.int64)
    done = 0
    while done < shots:
        m = min(config.batch, shots - done)
        codes = sample_codes(params, rng, m)
        ok = run_trials(dec, codes, config.success_criterion, mask_rng)
        weights = np.count_nonzero(codes, axis=1)
        w_trials += np.bincount(weights, minlength=config.n + 1)
        w_succ += np.bincount(weights[ok], minlength=config.n + 1)
        done += m
    return {
        "encoder_seed": encoder_seed,
        "shots": shots,
        "failures": int(shots - w_succ.sum()),
        "weight_trials": w_trials,
        "weight_successes": w_succ,
        "table_size": dec.table.size,
        "table_sha256": table_fingerprint(dec.table),
    }


def estimate_error_probability(config: SimConfig, workers: int = 1) -> SimResult:
    """Pool all encoders' trials into one estimate with a Wald standard error."""
    shots = config.shots_per_encoder()
    streams = _encoder_streams(config.seed, len(shots))
    args = [(config, es, ns, s) for (es, ns), s in zip(streams, shots)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_encoder, *zip(*args)))
    else:
        parts = [_run_encoder(*a) for a in args]
    trials = sum(p["shots"] for p in parts)
    failures = sum(p["failures"] for p in parts)
    pe = failures / trials
    stderr = math.sqrt(pe * (1 - pe) / trials)
    w_trials = sum(p["weight_trials"] for p in parts)
    w_succ = sum(p["weight_successes"] for p in parts)
    provenance = [
        {k: p[k] for k in ("encoder_seed", "shots", "failures", "table_size", "table_sha256")}
        for p in parts
    ]
    return SimResult(
        config=config,
        trials=trials,
        failures=failures,
        p_e_hat=pe,
        stderr=stderr,
        fidelity_lower_bound=fidelity_lower_bound(pe),
        yield_=config.k / config.n,
        weight_trials=[int(v) for v in w_trials],
        weight_successes=[int(v) for v in w_succ],
        encoder_pe=[p["failures"] / p["shots"] for p in parts],
        provenance=provenance,
    )
