"""Acceptance criteria 1-10.

Each test records one ``PASS``/``FAIL`` line (printed in the pytest terminal
summary, or directly when run as a script) and then asserts the criterion.
Pinned tolerances: runtimes in ``LIMITS``; oracle agreement must be 100%;
color counts are exact.
"""

from __future__ import annotations

import random
import time

import pytest

from coarsedim.coarse import (
    EntourageSample,
    FamilyView,
    GapSet,
    close_family,
    completion_membership,
    completion_view,
    entourage_in_family,
    entourage_membership,
    entourage_membership_bruteforce,
    family_axioms_check,
)
from coarsedim.constructors import separation_oracle, tree_cover_free
from coarsedim.covers import verify_certificate
from coarsedim.demos import (
    demo_chain,
    demo_dyadic,
    demo_extension,
    demo_restrict,
    demo_translate_2z,
    demo_z,
    demo_zerodim,
    demo_zn,
)
from coarsedim.errors import BudgetError
from coarsedim.groups import FreeAbelian, FreeGroup, Integers, clear_search_caches
from oracles import bfs_distance, free_inv, free_mul

LIMITS = {1: 5.0, 2: 60.0, 7: 10.0}   # seconds
ORACLE_CASES = 200
FAMILY_CASES = 100
SEED = 0

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, text: str) -> None:
    RESULTS[n] = f"{'PASS' if ok else 'FAIL'}\tcriterion {n}\t{text}"


def timed(fn):
    clear_search_caches()
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# 1 ------------------------------------------------------------------------

def test_criterion_1_Z_upper_bound():
    res, dt = timed(lambda: demo_z(scales=(2, 8, 32), window_factor=20))
    certs = [s.certificate for s in res.stages]
    ok_each = [bool(verify_certificate(c)) and c.colors == 2 and c.window.radius == 20 * R
               for c, R in zip(certs, (2, 8, 32))]
    ok = all(ok_each) and len(certs) == 3 and dt < LIMITS[1]
    record(1, ok, f"Z: 2-color certificates at R=2,8,32 on B(20R): {ok_each}; {dt:.2f}s (limit {LIMITS[1]}s)")
    assert ok


# 2 ------------------------------------------------------------------------

def test_criterion_2_Zn_upper_bound():
    res, dt = timed(lambda: demo_zn(ranks=(1, 2, 3), R=2))
    parts = []
    for n, s in zip((1, 2, 3), res.stages):
        c = s.certificate
        parts.append(bool(verify_certificate(c)) and c.colors == n + 1 == c.cover.n_colors
                     and c.window.radius == 3 * c.meta["L"])
    ok = all(parts) and dt < LIMITS[2]
    record(2, ok, f"Z^n bricks n=1,2,3 at R=2 with exactly n+1 colors on B(3L): {parts}; "
                  f"{dt:.2f}s (limit {LIMITS[2]}s)")
    assert ok


# 3 ------------------------------------------------------------------------

def _sampled_pair_distances(cert, R, pairs, seed):
    """Independent check on sampled points: the nearest point of another same-colored cell is > R away.

    The nearest point is found with the reduced-word metric and the distance
    to it is confirmed by breadth-first search in the Cayley graph.
    """
    F = cert.model
    rng = random.Random(seed)
    by_color: dict = {}
    for c in cert.cover.cells:
        by_color.setdefault(c.color, []).append(c)
    gens = F.generators.elements
    bad = 0
    for _ in range(pairs):
        cs = by_color[rng.choice(sorted(by_color))]
        A, B = rng.sample(cs, 2)
        x = rng.choice(sorted(A.members))
        xi = free_inv(x)
        y = min(sorted(B.members), key=lambda z: len(free_mul(xi, z)))
        if len(free_mul(xi, y)) <= R or bfs_distance(x, y, gens, free_mul, R) is not None:
            bad += 1
    return bad


def test_criterion_3_free_group():
    lines = []
    ok_all = True
    for R in (2, 4):
        try:
            cert = tree_cover_free(2, R, 6 * R, ball_cap=2 * 10**6)
        except BudgetError as exc:
            ok_all = False
            lines.append(f"R={R}: FAIL window B({6 * R}) not enumerable ({type(exc).__name__}: {exc})")
            continue
        rep = verify_certificate(cert)
        sep = separation_oracle(cert, R, samples=100, seed=SEED)
        bad = _sampled_pair_distances(cert, R, 200, SEED)
        ok = bool(rep) and cert.colors == 2 and bool(sep) and bad == 0
        ok_all &= ok
        lines.append(f"R={R}: {'ok' if ok else 'FAIL'} 2 colors on B({6 * R}), "
                     f"BFS violations {sep.details['violations']}/{sep.details['pairs']} cell pairs, "
                     f"{bad}/200 sampled point pairs")
    # supplementary, does not affect the verdict: R=4 on a reduced window
    cert = tree_cover_free(2, 4, 10, enforce_window=False)
    sep = separation_oracle(cert, 4, samples=100, seed=SEED)
    lines.append(f"[supplementary R=4 on B(10): verify={cert.report.passed}, "
                 f"BFS violations {sep.details['violations']}]")
    record(3, ok_all, "F2 tree covers; " + "; ".join(lines))
    assert ok_all


# 4 ------------------------------------------------------------------------

def test_criterion_4_extension():
    res = demo_extension(scale_r=3, window_r=60)
    final = res.stages[-1].certificate
    ok = res.passed and final.colors == 4 and final.window.radius == 60 and bool(verify_certificate(final))
    record(4, ok, f"1->Z->Z^2->Z->1 at K=B(3) on B(60): colors {final.colors} (expected 4 = (1+1)(1+1)), "
                  f"rho'={final.meta['rho_prime']}, bound {final.uniform_bound_radius}")
    assert ok


# 5 ------------------------------------------------------------------------

def test_criterion_5_subgroup():
    res = demo_restrict(n=2, R=2)
    full, sub = res.stages[0].certificate, res.stages[1].certificate
    ok = res.passed and bool(verify_certificate(sub)) and sub.colors <= full.colors
    record(5, ok, f"Z^2 brick restricted to Zx{{0}}: colors {full.colors} -> {sub.colors}, "
                  f"bound {full.uniform_bound_radius} -> {sub.uniform_bound_radius}, scale |K∩H|={len(sub.scale)}")
    assert ok


# 6 ------------------------------------------------------------------------

def test_criterion_6_supremum():
    a = demo_translate_2z()
    b = demo_dyadic(kmax=6, j=4)
    ca, cb = a.stages[-1].certificate, b.stages[-1].certificate
    ok = a.passed and b.passed and ca.colors == 2 and cb.colors == 2
    record(6, ok, f"2Z over {{0,1}}: {a.passed} ({ca.colors} colors); "
                  f"Dyadic(6) over <2^-4> cosets: {b.passed} ({cb.colors} colors)")
    assert ok


# 7 ------------------------------------------------------------------------

def test_criterion_7_dimension_zero():
    res, dt = timed(lambda: demo_zerodim(bound_r=5, window_r=20))
    cyc, ints = res.stages
    ok = (cyc.details["verdict"] == "CERTIFICATE" and len(cyc.certificate.cover.cells) == 1
          and ints.details["verdict"] == "NO-CERTIFICATE" and ints.report.passed and dt < LIMITS[7])
    record(7, ok, f"Z/7 -> {cyc.details['verdict']}; Z with K={{-1,0,1}} -> {ints.details['verdict']} "
                  f"with chain {ints.details['chain']}; {dt:.2f}s (limit {LIMITS[7]}s)")
    assert ok


# 8 ------------------------------------------------------------------------

def _oracle_cases(model, small, big, win, seed):
    rng = random.Random(seed)
    agree = positives = 0
    for _ in range(ORACLE_CASES):
        A = GapSet.of(model, rng.sample(small, rng.randint(1, 4)))
        pairs = []
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.5:
                g = rng.choice(big)
                a, b = rng.choice(sorted(A.elements)), rng.choice(sorted(A.elements))
                pairs.append((model.mul(g, a), model.mul(g, b)))
            else:
                pairs.append((rng.choice(big), rng.choice(big)))
        E = EntourageSample.of(model, pairs)
        fast = entourage_membership(E, A)
        agree += fast == entourage_membership_bruteforce(E, A, win)
        positives += fast
    return agree, positives


def test_criterion_8_shear_oracle():
    Z2, F2 = FreeAbelian(2), FreeGroup(2)
    # x in B(2) * B(2), a in B(2): every candidate g = x a^-1 lies in B(6)
    z = _oracle_cases(Z2, list(Z2.ball(2).elements), list(Z2.ball(2).elements), Z2.ball(6), SEED)
    f = _oracle_cases(F2, list(F2.ball(2).elements), list(F2.ball(2).elements), F2.ball(6), SEED)
    ok = z[0] == ORACLE_CASES and f[0] == ORACLE_CASES
    record(8, ok, f"shear criterion vs brute-force realization: Z^2 {z[0]}/{ORACLE_CASES} "
                  f"({z[1]} members), F2 {f[0]}/{ORACLE_CASES} ({f[1]} members); seed {SEED}")
    assert ok


# 10 -----------------------------------------------------------------------

def _family_cases(model, win, seed):
    rng = random.Random(seed)
    small = list(model.ball(2).elements)
    fails = []
    for case in range(FAMILY_CASES):
        seeds = [rng.sample(small, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        F = close_family(seeds, win)
        ax = family_axioms_check(F, win, samples=20, seed=case)
        # completion idempotence
        C = completion_view(F)
        idem = completion_view(C) == C
        probes = [GapSet.of(model, rng.sample(list(win.elements), rng.randint(0, 4))) for _ in range(10)]
        probes += [GapSet(model, frozenset(rng.sample(sorted(F.members[0].elements),
                                                      min(3, len(F.members[0].elements)))))]
        same = all(bool(completion_membership(P, F)) == bool(completion_membership(P, C)) for P in probes)
        # equal completions, different generating lists: same entourages
        G = FamilyView.explicit(model, list(F.members) + [P for P in probes if completion_membership(P, F)],
                                window_radius=win.radius)
        ents = [EntourageSample.of(model, [(rng.choice(win.elements), rng.choice(win.elements))
                                           for _ in range(rng.randint(1, 3))]) for _ in range(10)]
        ents.append(EntourageSample.of(model, [(x, x) for x in rng.sample(list(win.elements), 3)]))
        cor = all(entourage_in_family(E, F) == entourage_in_family(E, G) for E in ents)
        diag = entourage_in_family(ents[-1], F)
        if not (ax and idem and same and cor and diag):
            fails.append(case)
    return fails


def test_criterion_10_family_axioms():
    Z, F2 = Integers(), FreeGroup(2)
    fz = _family_cases(Z, Z.ball(12), SEED)
    ff = _family_cases(F2, F2.ball(3), SEED)
    ok = not fz and not ff
    record(10, ok, f"random window-closed families: Z {FAMILY_CASES - len(fz)}/{FAMILY_CASES}, "
                   f"F2 {FAMILY_CASES - len(ff)}/{FAMILY_CASES} satisfy closure, idempotence and "
                   f"equal-completion equivalence; seed {SEED}")
    assert ok


# 9 ------------------------------------------------------------------------

def test_criterion_9_conversion_chain():
    res = demo_chain(n=2, R=2)
    a, b, c = res.stages
    mult = c.details["multiplicity"]
    ok = a.report.passed and b.report.passed and c.report.passed and mult <= 3
    record(9, ok, f"Z^2 brick, K=B(2): A-form at K^-1K {a.report.passed}, B-form max count "
                  f"{b.details['max_count']} <= 3 {b.report.passed}, C-form multiplicity {mult} <= 3 and "
                  f"Lebesgue {c.report.passed}")
    assert ok


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for t in tests:
        try:
            t()
        except AssertionError:
            pass
    for n in sorted(RESULTS):
        print(RESULTS[n])
