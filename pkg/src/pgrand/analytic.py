"""Closed-form performance models for noise-guessing purification and hashing.

All pattern counts and probabilities are handled in natural-log space; the
number of weight-``w`` patterns spans hundreds of orders of magnitude once
``n`` reaches a few hundred pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import LOG2_3, log_binom_coeffs, log_binomial_pmf, werner_entropy

LN2 = math.log(2.0)
LN3 = math.log(3.0)
HAMMING_ROOT_P = 0.18929  # zero of the quantum Hamming bound, refined by hamming_bound_root()


class PurificationUnattainable(ValueError):
    """No parameter value in the searched range achieves purification."""


@dataclass(frozen=True)
class PgrandModelPoint:
    n: int
    k: int
    p: float
    t: int

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ValueError(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if not 0.0 <= self.p < 0.75:
            raise ValueError(f"need 0 <= p < 3/4, got {self.p}")
        if not 0 <= self.t <= self.n:
            raise ValueError(f"need 0 <= t <= n, got t={self.t}")

    @property
    def log_syndromes(self) -> float:
        return (self.n - self.k) * LN2


@dataclass(frozen=True)
class HashingBoundParams:
    n: int
    k: int
    F: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.F < 1.0:
            raise ValueError(f"fidelity must lie in (0, 1), got {self.F}")
        if self.delta <= 0:
            raise ValueError("delta must be positive")


# ---------------------------------------------------------------------------
# pattern statistics


def log_pattern_counts(n: int, t: int | None = None) -> np.ndarray:
    """``ln N_w`` for ``w = 0..t``."""
    t = n if t is None else t
    w = np.arange(t + 1)
    return log_binom_coeffs(n, w) + w * LN3


def log_correctable_fractions(n: int, k: int, t: int) -> np.ndarray:
    """``ln <f_w>`` for ``w = 0..t`` from the random-code collision model.

    ``<f_w> = (S/N_w) exp(-N_{<=w-1}/S) (1 - exp(-N_w/S))`` with ``S = 2^(n-k)``,
    clamped to at most 1.
    """
    log_s = (n - k) * LN2
    log_n = log_pattern_counts(n, t)
    log_cum_prev = np.concatenate([[-np.inf], np.logaddexp.accumulate(log_n)[:-1]])
    with np.errstate(over="ignore"):
        occupied = np.exp(log_cum_prev - log_s)
        ratio = np.exp(log_n - log_s)
    log_f = log_s - log_n - occupied + np.log(-np.expm1(-ratio))
    return np.minimum(log_f, 0.0)


def avg_correctable_fraction(point: PgrandModelPoint, w: int) -> float:
    if w < 0 or w > point.n:
        raise ValueError(f"weight {w} out of range")
    if w > point.t:
        return 0.0
    return float(np.exp(log_correctable_fractions(point.n, point.k, w)[w]))


def _error_probability(n: int, k: int, p: float, t: int) -> float:
    if p == 0.0:
        return 0.0
    w = np.arange(t + 1)
    terms = np.exp(log_correctable_fractions(n, k, t) + log_binomial_pmf(n, p, w))
    return float(max(0.0, 1.0 - math.fsum(terms)))


def error_probability(point: PgrandModelPoint) -> float:
    """Probability that the stored pattern for the measured syndrome is not the true error."""
    return _error_probability(point.n, point.k, point.p, point.t)


def success_margin(n: int, F: float, t: int | None = None, k: int = 1) -> float:
    """``(1 - p_e) - F`` for Werner input of fidelity ``F``; positive means purification."""
    t = n if t is None else t
    return 1.0 - _error_probability(n, k, 1.0 - F, t) - F


# ---------------------------------------------------------------------------
# Hamming bound and purification thresholds


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def hamming_bound_yield(p: float) -> float:
    """Non-degenerate stabilizer-code rate bound ``1 - p log2 3 - H(p)``."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    return 1.0 - p * LOG2_3 - binary_entropy(p)


def hamming_bound_root() -> float:
    """Depolarizing probability where the Hamming-bound yield reaches zero."""
    from scipy.optimize import brentq

    return brentq(hamming_bound_yield, 0.05, 0.5, xtol=1e-14)


def min_fidelity(n: int, t: int | None = None, k: int = 1, tol: float = 1e-5) -> float:
    """Smallest Werner fidelity ``F`` with ``1 - p_e > F``.

    The margin is scanned on a grid to bracket the first sign change, then
    bisected to ``tol``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    t = n if t is None else t
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}")
    grid = np.linspace(0.2501, 1.0 - 1e-6, 600)
    margins = np.array([success_margin(n, F, t, k) for F in grid])
    hits = np.flatnonzero(margins > 0)
    if hits.size == 0:
        raise PurificationUnattainable(f"no fidelity in (1/4, 1) purifies with n={n}, t={t}")
    i = hits[0]
    if i == 0:
        return float(grid[0])
    lo, hi = grid[i - 1], grid[i]
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if success_margin(n, mid, t, k) > 0:
            hi = mid
        else:
            lo = mid
    return float(hi)


def min_pairs(F: float, t: int | None = None, n_max: int = 5000) -> int:
    """Smallest ``n`` (one output pair) whose analytic ``1 - p_e`` exceeds ``F``."""
    floor = 1.0 - hamming_bound_root()
    if F <= floor:
        raise PurificationUnattainable(f"F={F} is at or below the purification floor {floor:.4f}")
    for n in range(2, n_max + 1):
        tn = n if t is None else min(t, n)
        if success_margin(n, F, tn) > 0:
            return n
    raise PurificationUnattainable(f"no n <= {n_max} purifies F={F}")


def max_yield(n: int, F: float, pe_target: float, t: int | None = None) -> float:
    """Largest ``k/n`` whose analytic error probability is strictly below ``pe_target``.

    Returns 0.0 when no ``k >= 1`` qualifies.
    """
    p = 1.0 - F
    if p == 0.0:
        return (n - 1) / n
    t = n if t is None else t
    best = 0
    for k in range(1, n):
        if _error_probability(n, k, p, t) < pe_target:
            best = k
    return best / n


# ---------------------------------------------------------------------------
# hashing protocol


def _hashing_terms(F: float) -> tuple[float, float, float]:
    s = werner_entropy(F)
    l2f = math.log2(F)
    l2e = math.log2((1 - F) / 3)
    a = abs(l2e) + s
    g = (F * l2f**2 + (1 - F) * l2e**2 - s**2) / a
    return s, a, g


def hashing_entropy_terms(F: float) -> dict[str, float]:
    """``S(F)``, ``a(F)`` and ``g(F)`` of the hashing fidelity bound."""
    s, a, g = _hashing_terms(F)
    return {"S": s, "a": a, "g": g}


def _hashing_raw(n: int, k: int, F: float, delta: float, printed_sign: bool = False) -> float:
    s, a, g = _hashing_terms(F)
    if g <= 0:
        raise ValueError(f"g(F) = {g} is not positive")
    expo = -(n / a) * ((g + delta) * math.log1p(delta / g) - delta)
    first = 2.0 * math.exp(expo)
    if printed_sign:
        e2 = -n * (s + delta) - (n - k)
    else:
        e2 = n * (s + delta) - (n - k)
    second = 2.0 ** min(e2, 1000.0)
    return 1.0 - first - second


def hashing_fidelity_bound(params: HashingBoundParams, printed_sign: bool = False) -> float:
    """Lower bound on the output fidelity of hashing, clamped to [0, 1].

    The last term is ``2^(n(S+delta) - (n-k))``; ``printed_sign=True`` evaluates
    ``2^(-n(S+delta) - (n-k))`` instead.
    """
    v = _hashing_raw(params.n, params.k, params.F, params.delta, printed_sign)
    return min(1.0, max(0.0, v))


def delta_reference(n: int, F: float) -> float:
    return 0.5 * ((n - 1) / n - werner_entropy(F))


def delta_prime(n: int, t: int, F: float) -> float:
    """``(1/n) log2 N_{<=t} - S(F)``: the slack matching a weight-``t`` pattern budget."""
    log_cum = np.logaddexp.reduce(log_pattern_counts(n, t))
    return float(log_cum / LN2 / n) - werner_entropy(F)


_GOLDEN = (math.sqrt(5) - 1) / 2


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def _is_unimodal(values: np.ndarray) -> bool:
    d = np.sign(np.diff(values))
    d = d[d != 0]
    # at most one change from rising to falling
    return np.count_nonzero(np.diff(d) < 0) <= 1 and not np.any(np.diff(d) > 0)


def delta_optimal(n: int, k: int, F: float, printed_sign: bool = False, tol: float = 1e-6) -> float:
    """Slack maximizing the hashing bound at fixed ``(n, k, F)``.

    Golden-section search on ``(0, 1 - S(F))``. A 200-point scan checks
    unimodality first; if it fails, the search is narrowed to the bracket
    around the best grid point.
    """
    s = werner_entropy(F)
    hi = 1.0 - s
    if hi <= 0:
        raise PurificationUnattainable(f"S(F) = {s:.4f} >= 1 leaves no feasible delta")
    f = lambda d: _hashing_raw(n, k, F, d, printed_sign)  # noqa: E731
    grid = np.linspace(hi * 1e-4, hi * (1 - 1e-9), 200)
    vals = np.array([f(d) for d in grid])
    if _is_unimodal(vals):
        lo_b, hi_b = grid[0], grid[-1]
    else:
        i = int(np.argmax(vals))
        lo_b, hi_b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    # the peak can sit on a flat plateau at 1; keep the grid winner if it is better
    d = _golden_max(f, lo_b, hi_b, tol)
    i = int(np.argmax(vals))
    return d if f(d) >= vals[i] else float(grid[i])


def hashing_min_pairs(F: float, strategy: str = "optimal", k: int = 1,
                      printed_sign: bool = False, n_max: int = 20000) -> int:
    """Smallest ``n`` for which the hashing bound beats ``F`` (``strategy``: optimal | reference)."""
    for n in range(max(2, k + 1), n_max + 1):
        if strategy == "optimal":
            d = delta_optimal(n, k, F, printed_sign)
        elif strategy == "reference":
            d = delta_reference(n, F)
            if d <= 0:
                continue
        else:
            raise ValueError(f"unknown delta strategy {strategy!r}")
        if _hashing_raw(n, k, F, d, printed_sign) > F:
            return n
    raise PurificationUnattainable(f"no n <= {n_max} purifies F={F} with hashing")


# ---------------------------------------------------------------------------
# typical set


def typical_set_bounds(n: int, F: float, delta: float) -> dict:
    """Probability window of the delta-typical set and its per-weight make-up.

    Returns log2 bounds on a member's probability, the log2 size cap
    ``n(S+delta)``, and per-weight arrays: inclusion flag, log2 pattern
    probability, log2 count and binomial mass. ``mass_inside`` and
    ``mass_outside`` sum the mass of included / excluded weight classes.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    s = werner_entropy(F)
    p = 1.0 - F
    w = np.arange(n + 1)
    if p == 0.0:
        log2_prob = np.where(w == 0, 0.0, -np.inf)
    else:
        log2_prob = w * math.log2(p / 3) + (n - w) * math.log2(F)
    low, high = -n * (s + delta), -n * (s - delta)
    inside = (log2_prob >= low) & (log2_prob <= high)
    mass = np.exp(log_binomial_pmf(n, p, w))
    return {
        "log2_p_low": low,
        "log2_p_high": high,
        "log2_max_count": n * (s + delta),
        "weights": w,
        "inside": inside,
        "log2_pattern_probability": log2_prob,
        "log2_count": log_pattern_counts(n) / LN2,
        "mass": mass,
        "mass_inside": float(mass[inside].sum()),
        "mass_outside": float(mass[~inside].sum()),
    }
