"""Local depolarizing noise: sampling, pattern statistics and Werner-state bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator

import numpy as np
from scipy.special import gammaln

from .pauli import PauliString

LOG2_3 = math.log2(3)

# per-qubit Pauli codes in within-weight enumeration order: X < Z < Y
_ENUM_CODES = (1, 2, 3)


@dataclass(frozen=True)
class DepolarizingParams:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= self.p < 0.75:
            raise ValueError(f"depolarizing probability must lie in [0, 3/4), got {self.p}")


@dataclass(frozen=True)
class BellDiagonalState:
    """Weights of Phi+, Psi-, Psi+, Phi- (in that order)."""

    A: float
    B: float
    C: float
    D: float

    def __post_init__(self):
        comps = (self.A, self.B, self.C, self.D)
        if min(comps) < -1e-15:
            raise ValueError(f"negative Bell-diagonal weight in {comps}")
        if abs(sum(comps) - 1.0) > 1e-12:
            raise ValueError(f"Bell-diagonal weights sum to {sum(comps)!r}, not 1")

    @property
    def fidelity(self) -> float:
        return self.A

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.A, self.B, self.C, self.D)


def sample_codes(params: DepolarizingParams, rng: np.random.Generator, shots: int) -> np.ndarray:
    """``(shots, n)`` array of per-qubit Pauli codes (0=I, 1=X, 2=Z, 3=Y)."""
    hit = rng.random((shots, params.n)) < params.p
    which = rng.integers(1, 4, size=(shots, params.n), dtype=np.uint8)
    return np.where(hit, which, 0).astype(np.uint8)


def sample_error(params: DepolarizingParams, rng: np.random.Generator | int | None = None) -> PauliString:
    """One i.i.d. depolarizing pattern: I w.p. 1-p, else X/Y/Z uniformly."""
    rng = np.random.default_rng(rng)
    return PauliString.from_codes(sample_codes(params, rng, 1)[0])


def log2_pattern_probability(e: PauliString, params: DepolarizingParams) -> float:
    if e.n != params.n:
        raise ValueError(f"pattern on {e.n} qubits, channel on {params.n}")
    w = e.weight
    p = params.p
    if p == 0.0:
        return 0.0 if w == 0 else -math.inf
    return w * math.log2(p / 3) + (params.n - w) * math.log2(1 - p)


def pattern_probability(e: PauliString, params: DepolarizingParams) -> float:
    """``(p/3)^w (1-p)^(n-w)`` for a pattern of weight ``w``."""
    return 2.0 ** log2_pattern_probability(e, params)


def count_patterns(n: int, w: int) -> int:
    """Exact number of weight-``w`` Pauli patterns on ``n`` qubits."""
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} out of range for n={n}")
    return math.comb(n, w) * 3**w


def log2_count_patterns(n: int, w: int) -> float:
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} out of range for n={n}")
    return float((gammaln(n + 1) - gammaln(w + 1) - gammaln(n - w + 1)) / math.log(2) + w * LOG2_3)


def count_patterns_upto(n: int, t: int) -> int:
    return sum(count_patterns(n, w) for w in range(min(t, n) + 1))


def log_binom_coeffs(n: int, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w)
    return gammaln(n + 1) - gammaln(w + 1) - gammaln(n - w + 1)


def log_binomial_pmf(n: int, p: float, w) -> np.ndarray:
    """Natural-log binomial pmf, vectorized over ``w``."""
    w = np.asarray(w, dtype=float)
    lc = log_binom_coeffs(n, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.where(w > 0, w * np.log(p) if p > 0 else -np.inf, 0.0)
        lq = np.where(n - w > 0, (n - w) * np.log1p(-p) if p < 1 else -np.inf, 0.0)
    return lc + lp + lq


def binomial_pmf(n: int, p: float, w: int) -> float:
    if not 0 <= w <= n:
        raise ValueError(f"w={w} out of range for n={n}")
    return float(np.exp(log_binomial_pmf(n, p, w)))


def enumerate_patterns(n: int, t: int) -> Iterator[PauliString]:
    """All patterns of weight <= ``t``, lightest first.

    Within a weight class the order is lexicographic in (support positions,
    per-qubit Pauli with X < Z < Y).
    """
    if t > n:
        raise ValueError(f"t={t} exceeds n={n}")
    for w in range(t + 1):
        for support in combinations(range(n), w):
            for paulis in product(_ENUM_CODES, repeat=w):
                x = z = 0
                for q, c in zip(support, paulis):
                    x |= (c & 1) << q
                    z |= (c >> 1) << q
                yield PauliString(n, x, z)


def weight_class_codes(n: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    """Array form of one weight class of :func:`enumerate_patterns`.

    Returns ``(supports, paulis)`` with shapes ``(C(n,w), w)`` and ``(3^w, w)``;
    pattern ``i * 3^w + j`` places ``paulis[j]`` on ``supports[i]``.
    """
    if w == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros((1, 0), dtype=np.uint8)
    supports = np.fromiter(
        (q for comb in combinations(range(n), w) for q in comb), dtype=np.int64
    ).reshape(-1, w)
    paulis = np.array(list(product(_ENUM_CODES, repeat=w)), dtype=np.uint8).reshape(-1, w)
    return supports, paulis


def werner_from_fidelity(F: float) -> BellDiagonalState:
    if not 0.25 <= F <= 1.0:
        raise ValueError(f"Werner fidelity must lie in [1/4, 1], got {F}")
    r = (1.0 - F) / 3.0
    return BellDiagonalState(F, r, r, 1.0 - F - 2 * r)


def werner_entropy(F: float) -> float:
    """Entropy in bits of the Werner Bell-diagonal distribution."""
    if not 0.0 < F <= 1.0:
        raise ValueError(f"fidelity must lie in (0, 1], got {F}")
    if F == 1.0:
        return 0.0
    return -F * math.log2(F) - (1 - F) * math.log2((1 - F) / 3)
