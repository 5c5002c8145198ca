"""Ball sizes and enumeration times per group, to size windows before a run.

usage: python scripts/window_sizes.py [--group Z2 F2 Dyadic(6)] [--max-r 12] [--cap 2000000]
Stops a group at the first radius whose ball exceeds the cap.
"""

import argparse
import sys
import time

from coarsedim.errors import ResourceLimitError
from coarsedim.groups import model_from_json


def main() -> int:
    ap = argparse.ArgumentParser(description="ball sizes per radius")
    ap.add_argument("--group", nargs="*", default=["Z", "Z2", "Z3", "F2", "F3", "Dyadic(6)"])
    ap.add_argument("--max-r", type=int, default=12)
    ap.add_argument("--cap", type=int, default=2 * 10**6)
    args = ap.parse_args()
    print("group\tr\tsize\tseconds")
    for g in args.group:
        model = model_from_json(g)
        for r in range(args.max_r + 1):
            t = time.perf_counter()
            try:
                n = len(model.ball(r, cap=args.cap))
            except ResourceLimitError:
                print(f"{g}\t{r}\t>{args.cap}\t-")
                break
            print(f"{g}\t{r}\t{n}\t{time.perf_counter() - t:.3f}", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
