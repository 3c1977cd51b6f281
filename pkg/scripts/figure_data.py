"""Emit the CSV data behind every analytic figure into one directory."""

import argparse
import sys
from pathlib import Path

from pgrand.cli import main

JOBS = {
    "fig2_model.csv": ["analytic", "--fig", "2"],
    "fig3.csv": ["analytic", "--fig", "3"],
    "fig4.csv": ["analytic", "--fig", "4"],
    "fig5.csv": ["hashing", "--fig", "5"],
    "fig6.csv": ["analytic", "--fig", "6"],
    "fig7.csv": ["analytic", "--fig", "7"],
    "fig8.csv": ["hashing", "--fig", "8"],
    "fig10.csv": ["mb-range"],
    "fig11.csv": ["compare", "--fig", "11"],
    "fig12.csv": ["hashing", "--fig", "12"],
    "fig13.csv": ["hashing", "--fig", "13"],
    "fig14.csv": ["compare", "--fig", "14"],
}

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/figures")
    ap.add_argument("--only", nargs="*", help="subset of file names to write")
    args = ap.parse_args()
    out = Path(args.out)
    status = 0
    for name, cmd in JOBS.items():
        if args.only and name not in args.only:
            continue
        extra = ["--q", "0,0.01,0.02,0.03,0.04,0.05,0.06,0.07"] if cmd[0] == "mb-range" else []
        status |= main(cmd + extra + ["--out", str(out / name)])
    sys.exit(status)
