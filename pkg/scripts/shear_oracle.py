"""Compare the shear criterion for E ⊆ G(A x A) against brute-force realization search.

usage: python scripts/shear_oracle.py [--cases 200] [--seed 0] [--group Z2 F2 ...]
Prints one TSV row per group: cases, agreements, and how many cases were members.
"""

import argparse
import random
import sys

from coarsedim.coarse import EntourageSample, GapSet, entourage_membership, entourage_membership_bruteforce
from coarsedim.groups import model_from_json


def run(model, cases: int, seed: int, r: int = 2):
    rng = random.Random(seed)
    small = list(model.ball(r).elements)
    win = model.ball(3 * r)  # contains every candidate g = x a^-1
    agree = members = 0
    disagreements = []
    for i in range(cases):
        A = GapSet.of(model, rng.sample(small, rng.randint(1, min(4, len(small)))))
        pairs = []
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.5:
                g = rng.choice(small)
                a, b = rng.choice(sorted(A.elements)), rng.choice(sorted(A.elements))
                pairs.append((model.mul(g, a), model.mul(g, b)))
            else:
                pairs.append((rng.choice(small), rng.choice(small)))
        E = EntourageSample.of(model, pairs)
        fast = entourage_membership(E, A)
        slow = entourage_membership_bruteforce(E, A, win)
        agree += fast == slow
        members += fast
        if fast != slow:
            disagreements.append(i)
    return agree, members, disagreements


def main() -> int:
    ap = argparse.ArgumentParser(description="shear criterion vs brute force")
    ap.add_argument("--cases", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--group", nargs="*", default=["Z2", "F2"])
    args = ap.parse_args()
    print("group\tcases\tagree\tmembers\tdisagreements")
    bad = False
    for g in args.group:
        agree, members, dis = run(model_from_json(g), args.cases, args.seed)
        print(f"{g}\t{args.cases}\t{agree}\t{members}\t{dis[:10]}")
        bad |= agree != args.cases
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
