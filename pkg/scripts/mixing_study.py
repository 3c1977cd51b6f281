"""How the encoder gate count moves the lookup table towards the random-code model.

For n=32, k=16, t=3 this prints, per gate count, the mean stored share of each
weight class over several encoders next to the analytic correctable fraction.
"""

import argparse

import numpy as np

from pgrand.analytic import PgrandModelPoint, avg_correctable_fraction
from pgrand.clifford import build_parity_check, sample_random_encoder
from pgrand.decoder import build_table, empirical_correctable_fraction

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--t", type=int, default=3)
    ap.add_argument("--gates", type=int, nargs="+", default=[60, 120, 200, 400, 1000])
    ap.add_argument("--encoders", type=int, default=5)
    a = ap.parse_args()
    point = PgrandModelPoint(a.n, a.k, 0.01, a.t)
    model = [avg_correctable_fraction(point, w) for w in range(a.t + 1)]
    print("gates," + ",".join(f"f{w}" for w in range(a.t + 1)))
    print("model," + ",".join(f"{f:.4f}" for f in model))
    for g in a.gates:
        fr = []
        for seed in range(a.encoders):
            H = build_parity_check(sample_random_encoder(a.n, g, seed), k=a.k)
            T = build_table(H, a.t)
            fr.append([empirical_correctable_fraction(T, w) for w in range(a.t + 1)])
        print(f"{g}," + ",".join(f"{f:.4f}" for f in np.mean(fr, axis=0)))
