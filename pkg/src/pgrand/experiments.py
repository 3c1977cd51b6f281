"""Row generators for every table and figure data set.

Each generator returns ``(fields, rows)`` with rows as plain dicts, ready for
:func:`pgrand.cli.write_csv`. Nothing here touches the filesystem.
"""

from __future__ import annotations

import math

import numpy as np

from . import analytic as an
from .analytic import PurificationUnattainable
from .compare import (
    effective_yield,
    mb_purification_range,
    mb_threshold_search,
    oxford_protocol,
    pgrand_outcome,
)
from .simulation import CSV_FIELDS, EXACT, SimConfig, estimate_error_probability

Rows = tuple[tuple[str, ...], list[dict]]

TABLE1_POINTS = ((6, 30), (7, 35), (8, 40), (9, 45), (10, 50), (11, 56), (12, 61))
TABLE2_FIDELITIES = (0.83, 0.85, 0.90, 0.95, 0.99)
TABLE3_SIZES = (16, 32, 64, 128, 256)
MB_Q_COLUMNS = (0.01, 0.02, 0.03, 0.04, 0.05, 0.06)


def _na(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except PurificationUnattainable:
        return "n/a"


# ---------------------------------------------------------------------------
# tables


def table1() -> Rows:
    rows = [{"t": t, "n": n, "F_min": round(an.min_fidelity(n, t), 6)} for t, n in TABLE1_POINTS]
    return ("t", "n", "F_min"), rows


def table2(fidelities=TABLE2_FIDELITIES) -> Rows:
    rows = []
    for F in fidelities:
        rows.append({
            "F_i": F,
            "pgrand": _na(an.min_pairs, F),
            "hashing_delta_optimal": _na(an.hashing_min_pairs, F, "optimal"),
            "hashing_delta_reference": _na(an.hashing_min_pairs, F, "reference"),
        })
    return ("F_i", "pgrand", "hashing_delta_optimal", "hashing_delta_reference"), rows


def table3(sizes=TABLE3_SIZES) -> Rows:
    rows = [{"n": n, "q_threshold": round(mb_threshold_search(n), 6)} for n in sizes]
    return ("n", "q_threshold"), rows


def mb_grid(sizes=TABLE3_SIZES, qs=MB_Q_COLUMNS) -> Rows:
    """Purification range of the measurement-based protocol per (n, q)."""
    rows = []
    for n in sizes:
        for q in qs:
            r = mb_purification_range(n, q)
            rows.append({
                "n": n, "q": q, "attainable": int(r.attainable),
                "p_low": round(r.p_low, 6) if r.attainable else "n/a",
                "p_high": round(r.p_high, 6) if r.attainable else "n/a",
                "F_min": round(r.F_min_eff, 6) if r.attainable else "n/a",
                "F_max": round(r.F_max_eff, 6) if r.attainable else "n/a",
            })
    return ("n", "q", "attainable", "p_low", "p_high", "F_min", "F_max"), rows


def _pivot(column: str, sizes=TABLE3_SIZES, qs=MB_Q_COLUMNS) -> Rows:
    _, flat = mb_grid(sizes, qs)
    fields = ("routine",) + tuple(f"q={q:g}" for q in qs)
    rows = []
    for n in sizes:
        row = {"routine": f"{n}-to-1"}
        for r in flat:
            if r["n"] == n:
                row[f"q={r['q']:g}"] = r[column]
        rows.append(row)
    return fields, rows


def table5(sizes=TABLE3_SIZES, qs=MB_Q_COLUMNS) -> Rows:
    return _pivot("F_min", sizes, qs)


def table6(sizes=TABLE3_SIZES, qs=MB_Q_COLUMNS) -> Rows:
    return _pivot("F_max", sizes, qs)


TABLES = {1: table1, 2: table2, 3: table3, 4: mb_grid, 5: table5, 6: table6}


# ---------------------------------------------------------------------------
# figures


def fig2_analytic(n: int = 32, ts=(1, 2, 3, 4), p: float = 0.01) -> Rows:
    """Analytic ``p_e`` against yield for each weight cap ``t``."""
    rows = []
    for t in ts:
        for k in range(1, n):
            pe = an.error_probability(an.PgrandModelPoint(n, k, p, t))
            rows.append({"n": n, "t": t, "k": k, "yield": k / n, "p": p, "pe": pe})
    return ("n", "t", "k", "yield", "p", "pe"), rows


def fig2_simulated(n: int = 32, ks=(16, 8, 4), t: int = 4, p: float = 0.01, gates: int = 120,
                   trials: int = 20_000, seed: int = 0, workers: int = 1, encoders: int = 20,
                   criterion: str = EXACT) -> Rows:
    rows = []
    for k in ks:
        cfg = SimConfig(n, k, t, p, gates, trials=trials, seed=seed, encoders=encoders,
                        success_criterion=criterion)
        res = estimate_error_probability(cfg, workers=workers)
        row = res.csv_row()
        row["pe_analytic"] = an.error_probability(an.PgrandModelPoint(n, k, p, t))
        rows.append(row)
    return CSV_FIELDS + ("pe_analytic",), rows


def fig3(ns=(50, 100, 200, 300, 400, 500), F: float = 0.95, targets=(0.1, 0.05, 0.01)) -> Rows:
    rows = []
    hb = an.hamming_bound_yield(1.0 - F)
    for n in ns:
        for pe in targets:
            rows.append({"n": n, "F_i": F, "pe_target": pe,
                         "max_yield": an.max_yield(n, F, pe), "hamming_bound": hb})
    return ("n", "F_i", "pe_target", "max_yield", "hamming_bound"), rows


def fig4(ns=range(10, 101, 10), ts=(3, 5, 7, 9, 12)) -> Rows:
    rows = []
    for t in ts:
        for n in ns:
            if t > n:
                continue
            rows.append({"t": t, "n": n, "F_min": _na(an.min_fidelity, n, t)})
    return ("t", "n", "F_min"), rows


def fig5(n: int = 256, F: float = 0.95, ks=None) -> Rows:
    """Output fidelity against yield for noise guessing and hashing."""
    ks = ks if ks is not None else range(1, n, max(1, n // 32))
    rows = []
    for k in ks:
        pg = 1.0 - an._error_probability(n, k, 1.0 - F, n)
        d_opt = an.delta_optimal(n, k, F)
        d_ref = an.delta_reference(n, F)
        h_opt = an.hashing_fidelity_bound(an.HashingBoundParams(n, k, F, d_opt))
        h_ref = an.hashing_fidelity_bound(an.HashingBoundParams(n, k, F, d_ref)) if d_ref > 0 else 0.0
        rows.append({"n": n, "k": k, "yield": k / n, "F_i": F, "pgrand": pg,
                     "hashing_delta_optimal": h_opt, "hashing_delta_reference": h_ref})
    return ("n", "k", "yield", "F_i", "pgrand", "hashing_delta_optimal", "hashing_delta_reference"), rows


def fig6(ns=range(8, 129, 8), ts=range(1, 13)) -> Rows:
    rows = []
    for n in ns:
        for t in ts:
            if t <= n:
                lc = float(np.logaddexp.reduce(an.log_pattern_counts(n, t)))
                rows.append({"n": n, "t": t, "log10_patterns": lc / math.log(10)})
    return ("n", "t", "log10_patterns"), rows


def fig8(fidelities=None) -> Rows:
    fidelities = fidelities if fidelities is not None else np.round(np.arange(0.83, 0.995, 0.01), 2)
    return table2(tuple(float(f) for f in fidelities))


def fig12(n: int = 64, F: float = 0.9, ts=range(1, 11)) -> Rows:
    """Both protocols under the same weight budget ``t``."""
    rows = []
    for t in ts:
        d = an.delta_prime(n, t, F)
        h = an.hashing_fidelity_bound(an.HashingBoundParams(n, 1, F, d)) if d > 0 else 0.0
        pg = 1.0 - an._error_probability(n, 1, 1.0 - F, t)
        rows.append({"n": n, "t": t, "F_i": F, "delta_prime": d, "hashing": h, "pgrand": pg})
    return ("n", "t", "F_i", "delta_prime", "hashing", "pgrand"), rows


def fig13(n: int = 128, F: float = 0.9, delta: float = 0.1) -> Rows:
    ts = an.typical_set_bounds(n, F, delta)
    rows = [
        {"n": n, "F_i": F, "delta": delta, "w": int(w), "inside": int(ins),
         "log2_pattern_probability": lp, "log2_count": lc, "mass": m}
        for w, ins, lp, lc, m in zip(ts["weights"], ts["inside"], ts["log2_pattern_probability"],
                                     ts["log2_count"], ts["mass"])
    ]
    return ("n", "F_i", "delta", "w", "inside", "log2_pattern_probability", "log2_count", "mass"), rows


def fig10(sizes=TABLE3_SIZES, qs=None) -> Rows:
    qs = qs if qs is not None else np.round(np.arange(0.0, 0.0705, 0.0025), 4)
    return mb_grid(sizes, tuple(float(q) for q in qs))


def fig11(F_grid=None, pgrand_sizes=((16, 1), (32, 1), (64, 4))) -> Rows:
    """Effective yield over input fidelity for noise guessing and one- or two-round recurrence."""
    F_grid = F_grid if F_grid is not None else np.round(np.arange(0.6, 0.991, 0.01), 3)
    rows = []
    for F in F_grid:
        F = float(F)
        for rounds in (1, 2):
            o = oxford_protocol(F, rounds)
            rows.append({"protocol": f"recurrence-{rounds}", "F_i": F, "P_suc": o.P_suc,
                         "F_out": o.F_out, "yield": o.yield_, "Y_E": effective_yield(o)})
        for n, k in pgrand_sizes:
            o = pgrand_outcome(n, k, F)
            rows.append({"protocol": f"pgrand-{n}-{k}", "F_i": F, "P_suc": o.P_suc,
                         "F_out": o.F_out, "yield": o.yield_, "Y_E": effective_yield(o)})
    return ("protocol", "F_i", "P_suc", "F_out", "yield", "Y_E"), rows


def fig14(F_grid=None, rounds=(1, 2, 3)) -> Rows:
    F_grid = F_grid if F_grid is not None else np.round(np.arange(0.30, 1.0001, 0.01), 3)
    rows = []
    for r in rounds:
        for F in F_grid:
            o = oxford_protocol(float(F), r)
            rows.append({"rounds": r, "F_i": float(F), "P_suc": o.P_suc, "F_out": o.F_out,
                         "converges": int(o.converges)})
    return ("rounds", "F_i", "P_suc", "F_out", "converges"), rows


FIGURES = {
    "2": fig2_analytic, "2mc": fig2_simulated, "3": fig3, "4": fig4, "5": fig5, "6": fig6,
    "7": table1, "8": fig8, "10": fig10, "11": fig11, "12": fig12, "13": fig13, "14": fig14,
}
