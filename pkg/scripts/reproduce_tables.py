"""Write the six reference tables as CSV into a results directory.

    python scripts/reproduce_tables.py [--out results/tables]
"""

import argparse
import sys

from pgrand.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/tables")
    ap.add_argument("--which", default="1,2,3,4,5,6")
    args = ap.parse_args()
    sys.exit(main(["tables", "--which", args.which, "--out", args.out]))
