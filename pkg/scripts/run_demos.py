"""Run every demo pipeline and write reports, certificates and a summary table.

usage: python scripts/run_demos.py [--out results] [--skip free]
"""

import argparse
import sys

from coarsedim.cli import main as cli_main
from coarsedim.demos import DEMOS


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--skip", nargs="*", default=[], choices=sorted(DEMOS))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    codes = {}
    for name in sorted(DEMOS):
        if name in args.skip:
            continue
        print(f"== {name}", flush=True)
        codes[name] = cli_main(["demo", name, "--out", args.out, "--seed", str(args.seed)])
    print("\n".join(f"{'PASS' if c == 0 else 'FAIL'}\t{n}\texit {c}" for n, c in codes.items()))
    return max(codes.values(), default=0)


if __name__ == "__main__":
    sys.exit(main())
