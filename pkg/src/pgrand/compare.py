"""Recurrence baselines, the effective-yield metric and the measurement-based transfer layer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .analytic import _error_probability
from .noise import BellDiagonalState, werner_from_fidelity

PURIFICATION_FLOOR = 0.8107


@dataclass(frozen=True)
class ProtocolOutcome:
    P_suc: float
    F_in: float
    F_out: float
    n_in: int | float
    k_out: int | float
    converges: bool = True

    def __post_init__(self):
        if not 0.0 <= self.P_suc <= 1.0 + 1e-12:
            raise ValueError(f"success probability {self.P_suc} outside [0, 1]")
        if not 0 < self.k_out <= self.n_in:
            raise ValueError(f"need 0 < k_out <= n_in, got {self.k_out}/{self.n_in}")

    @property
    def yield_(self) -> float:
        return self.k_out / self.n_in

    @property
    def expected_cost(self) -> float:
        """Input pairs consumed per output pair once failed attempts are retried."""
        return math.inf if self.P_suc == 0 else (self.n_in / self.k_out) / self.P_suc


@dataclass(frozen=True)
class MbNoiseParams:
    p: float
    q: float

    def __post_init__(self):
        for name, v in (("p", self.p), ("q", self.q)):
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {v}")


# ---------------------------------------------------------------------------
# recurrence protocol


def oxford_round(state: BellDiagonalState) -> tuple[BellDiagonalState, float]:
    A, B, C, D = state.as_tuple()
    N = (A + B) ** 2 + (C + D) ** 2
    if N <= 0.0:
        raise ValueError("degenerate Bell-diagonal input: success probability is zero")
    out = BellDiagonalState((A * A + B * B) / N, 2 * C * D / N, (C * C + D * D) / N, 2 * A * B / N)
    return out, N


def oxford_protocol(F_i: float, rounds: int) -> ProtocolOutcome:
    """Chain ``rounds`` recurrence steps on a Werner input.

    Pair accounting follows the binary tree: ``2**rounds`` inputs per output.
    Inputs with ``F_i <= 1/2`` are still evaluated but flagged non-convergent.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not 0.25 < F_i <= 1.0:
        raise ValueError(f"need 1/4 < F_i <= 1, got {F_i}")
    state = werner_from_fidelity(F_i)
    p_suc = 1.0
    for _ in range(rounds):
        state, N = oxford_round(state)
        p_suc *= N
    return ProtocolOutcome(min(p_suc, 1.0), F_i, state.A, 2**rounds, 1, converges=F_i > 0.5)


def effective_yield(outcome: ProtocolOutcome) -> float:
    """``P_suc * Y * (F_out - F_in)``, floored at zero."""
    gain = outcome.F_out - outcome.F_in
    return max(0.0, outcome.P_suc * outcome.yield_ * gain)


def pgrand_outcome(n: int, k: int, F_i: float, t: int | None = None) -> ProtocolOutcome:
    """Deterministic outcome of the noise-guessing protocol, with ``1 - p_e`` as output fidelity."""
    t = n if t is None else t
    pe = _error_probability(n, k, 1.0 - F_i, t)
    return ProtocolOutcome(1.0, F_i, 1.0 - pe, n, k)


# ---------------------------------------------------------------------------
# externally tabulated protocols


class ExternalProtocol:
    """A protocol known only through a tabulated ``F_i -> (P_suc, F_out, yield)`` map."""

    def __init__(self, name: str, F_grid, P_suc, F_out, yields):
        self.name = name
        self.F_grid = np.asarray(F_grid, dtype=float)
        self.P_suc = np.asarray(P_suc, dtype=float)
        self.F_out = np.asarray(F_out, dtype=float)
        self.yields = np.asarray(yields, dtype=float)

    def __call__(self, F_i: float) -> ProtocolOutcome:
        lo, hi = self.F_grid[0], self.F_grid[-1]
        if not lo <= F_i <= hi:
            raise ValueError(f"{self.name}: F_i={F_i} outside tabulated range [{lo}, {hi}]")
        y = float(np.interp(F_i, self.F_grid, self.yields))
        return ProtocolOutcome(
            P_suc=float(np.interp(F_i, self.F_grid, self.P_suc)),
            F_in=F_i,
            F_out=float(np.interp(F_i, self.F_grid, self.F_out)),
            n_in=1.0 / y,
            k_out=1.0,
        )

    def __repr__(self):
        return f"ExternalProtocol({self.name!r}, {len(self.F_grid)} points)"


_REGISTRY: dict[str, ExternalProtocol] = {}


def register_external_protocol(
    name: str, outcome_map: Mapping[float, Sequence[float]] | Sequence[Sequence[float]]
) -> ExternalProtocol:
    """Register a tabulated protocol.

    ``outcome_map`` is either ``{F_i: (P_suc, F_out, yield)}`` or a sequence of
    ``(F_i, P_suc, F_out, yield)`` rows. The ``F_i`` column must be strictly
    increasing in the order given.
    """
    rows = [(F, *v) for F, v in outcome_map.items()] if isinstance(outcome_map, Mapping) \
        else [tuple(r) for r in outcome_map]
    if not rows:
        raise ValueError(f"{name}: empty outcome table")
    if any(len(r) != 4 for r in rows):
        raise ValueError(f"{name}: each row needs F_i, P_suc, F_out, yield")
    arr = np.array(rows, dtype=float)
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ValueError(f"{name}: F_i grid is not strictly increasing")
    if np.any((arr[:, 3] <= 0) | (arr[:, 3] > 1)):
        raise ValueError(f"{name}: yields must lie in (0, 1]")
    handle = ExternalProtocol(name, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])
    _REGISTRY[name] = handle
    return handle


def external_protocol(name: str) -> ExternalProtocol:
    return _REGISTRY[name]


# ---------------------------------------------------------------------------
# measurement-based implementation


def mb_input_fidelity(p: float, q: float) -> float:
    # grouping keeps the result bit-identical under exchange of the arguments
    return 1.0 - (p + q) + (4.0 / 3.0) * (p * q)


def mb_output_fidelity(p_e: float, q: float) -> float:
    return 1.0 - (p_e + q) + (4.0 / 3.0) * (p_e * q)


def mb_threshold_q(F_floor: float = PURIFICATION_FLOOR) -> float:
    """Smaller root of ``(4/3) q^2 - 2 q + (1 - F_floor) = 0``."""
    c = 1.0 - F_floor
    disc = 4.0 - 4.0 * (4.0 / 3.0) * c
    if disc < 0:
        raise ValueError(f"no real threshold for F_floor={F_floor}")
    # numerically stable form of (2 - sqrt(disc)) / (8/3)
    return 2.0 * c / (2.0 + math.sqrt(disc))


@dataclass(frozen=True)
class MbRange:
    n: int
    q: float
    attainable: bool
    p_low: float = math.nan
    p_high: float = math.nan
    F_min_eff: float = math.nan
    F_max_eff: float = math.nan


def _mb_margin(n: int, k: int, t: int, p: float, q: float) -> tuple[float, float]:
    """Output fidelity and its margin over the raw pair fidelity ``1 - p``."""
    p_eff = 1.0 - mb_input_fidelity(p, q)
    pe = _error_probability(n, k, p_eff, t) if p_eff < 0.75 else 1.0
    Fa = mb_output_fidelity(pe, q)
    return Fa, Fa - (1.0 - p)


def _refine(f, lo: float, hi: float, tol: float) -> float:
    """Bisect a sign change of ``f`` (``f(lo) > 0 >= f(hi)`` or the reverse)."""
    s_lo = f(lo) > 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == s_lo:
            lo = mid
        else:
            hi = mid
    return lo if s_lo else hi


def mb_purification_range(n: int, q: float, t: int | None = None, k: int = 1,
                          p_max: float = 0.3, grid: int = 1500, tol: float = 1e-7) -> MbRange:
    """Range of Bell-pair noise ``p`` that the measurement-based protocol improves.

    A point purifies when the delivered fidelity beats the raw pairs,
    ``F_a(p_e(p'), q) > 1 - p`` with ``p' = 1 - F_i(p, q)``. ``F_min_eff`` is
    ``1 - p_high`` and ``F_max_eff`` the best delivered fidelity in range.
    """
    MbNoiseParams(0.0, q)
    t = n if t is None else t
    ps = np.linspace(0.0, p_max, grid)
    vals = np.array([_mb_margin(n, k, t, p, q) for p in ps])
    good = np.flatnonzero(vals[:, 1] > 0)
    if good.size == 0:
        return MbRange(n, q, False)
    margin = lambda p: _mb_margin(n, k, t, p, q)[1]  # noqa: E731
    i, j = good[0], good[-1]
    p_lo = ps[i] if i == 0 else _refine(margin, ps[i - 1], ps[i], tol)
    p_hi = ps[j] if j == grid - 1 else _refine(margin, ps[j], ps[j + 1], tol)
    F_max = max(float(vals[good, 0].max()), _mb_margin(n, k, t, p_lo, q)[0])
    return MbRange(n, q, True, p_lo, p_hi, 1.0 - p_hi, F_max)


def mb_threshold_search(n: int, t: int | None = None, k: int = 1, tol: float = 1e-5) -> float:
    """Largest resource-state noise ``q`` leaving a nonempty purification range."""
    lo, hi = 0.0, mb_threshold_q()
    if not mb_purification_range(n, lo, t, k).attainable:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mb_purification_range(n, mid, t, k, p_max=max(0.3, mid)).attainable:
            lo = mid
        else:
            hi = mid
    return lo
