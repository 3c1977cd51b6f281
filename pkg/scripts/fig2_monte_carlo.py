"""Monte Carlo points for the error-probability plots, next to the analytic model.

Panel ``a`` is the n=32 setup: 1% depolarizing noise, t=4, 120
encoder gates, yields 1/2, 1/4 and 1/8, and 20 encoders with 1000 shots each.
Panel ``b`` is the n=128 setup with 1000 gates, scaled down to t=3 so the
lookup tables stay at desk size. Any default can be overridden, e.g.
``--gates 1000`` shows panel ``a`` with thoroughly mixed encoders.
"""

import argparse
import os
import sys

from pgrand.cli import main

PANELS = {
    "a": {"n": 32, "k": "16,8,4", "t": 4, "gates": 120},
    "b": {"n": 128, "k": "64,32,16", "t": 3, "gates": 1000},
}

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--panel", choices=sorted(PANELS), default="a")
    ap.add_argument("--n", type=int)
    ap.add_argument("--k")
    ap.add_argument("--t", type=int)
    ap.add_argument("--gates", type=int)
    ap.add_argument("--p", type=float, default=0.01)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out")
    a = ap.parse_args()
    cfg = dict(PANELS[a.panel])
    for key in ("n", "k", "t", "gates"):
        if getattr(a, key) is not None:
            cfg[key] = getattr(a, key)
    out = a.out or f"results/fig2{a.panel}_mc.csv"
    sys.exit(main(["simulate", "--n", str(cfg["n"]), "--k", str(cfg["k"]), "--t", str(cfg["t"]),
                   "--p", str(a.p), "--gates", str(cfg["gates"]), "--trials", str(a.trials),
                   "--encoders", "20", "--seed", str(a.seed), "--workers", str(a.workers),
                   "--out", out]))
