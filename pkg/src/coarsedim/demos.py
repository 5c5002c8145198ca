"""End-to-end pipelines shared by the CLI, the scripts and the acceptance tests.

Each demo returns a ``DemoResult``: named stages, each with a report and
(usually) a certificate.  Nothing here records wall-clock time, so equal
inputs give identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .coarse import GapSet
from .constructors import (
    CosetDecomposition,
    ExtensionData,
    ball_set,
    brick_cover_Zn,
    check_chain,
    extension_combine,
    extension_requirements,
    interval_cover_on,
    interval_cover_Z,
    restrict_certificate,
    separation_oracle,
    translate_certificate,
    tree_cover_free,
    zero_dim_analysis,
)
from .covers import Certificate, convert_A_to_B, convert_B_to_C
from .groups import Dyadic, FreeAbelian, GroupModel, Integers
from .homs import coordinate_subgroup, dyadic_subgroup, multiples, projection
from .reports import Report

#: ball cap used by the free-group demo: B(12) in F_2 has 1,062,881 elements
FREE_DEMO_BALL_CAP = 2 * 10**6


@dataclass
class Stage:
    name: str
    report: Report
    certificate: Certificate | None = None
    details: dict = field(default_factory=dict)


@dataclass
class DemoResult:
    name: str
    stages: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.report.passed for s in self.stages)

    def add(self, name: str, report: Report, cert: Certificate | None = None, **details) -> Stage:
        st = Stage(name, report, cert, details)
        self.stages.append(st)
        return st


def _summary(cert: Certificate) -> dict:
    return {"colors": cert.colors, "window_r": cert.window.radius, "scale_size": len(cert.scale),
            "uniform_bound": cert.uniform_bound_radius, "cells": len(cert.cover.cells)}


def demo_z(scales=(2, 8, 32), window_factor: int = 20) -> DemoResult:
    """Two-color interval certificates for Z on windows B(20R)."""
    res = DemoResult("z")
    for R in scales:
        cert = interval_cover_Z(R, window_factor * R)
        res.add(f"Z_R{R}", cert.report, cert, **_summary(cert))
    return res


def demo_zn(ranks=(1, 2, 3), R: int = 2) -> DemoResult:
    """Staggered brick certificates for Z^n with n+1 colors on windows B(3L)."""
    res = DemoResult("zn")
    for n in ranks:
        cert = brick_cover_Zn(n, R)
        exact = Report("colors=n+1", cert.colors == n + 1 and cert.cover.n_colors == n + 1,
                       details={"colors": cert.colors, "n": n})
        rep = Report(f"Z{n}", cert.report.passed and exact.passed, children=[cert.report, exact])
        res.add(f"Z{n}_R{R}", rep, cert, L=cert.meta["L"], **_summary(cert))
    return res


def demo_free(k: int = 2, scales=(2,), window_factor: int = 6, ball_cap: int | None = None,
              samples: int = 50, seed: int = 0) -> DemoResult:
    """Tree-cover certificates for F_k with a breadth-first separation check."""
    res = DemoResult("free")
    cap = FREE_DEMO_BALL_CAP if ball_cap is None else ball_cap
    for R in scales:
        cert = tree_cover_free(k, R, window_factor * R, ball_cap=cap)
        sep = separation_oracle(cert, R, samples=samples, seed=seed)
        rep = Report(f"F{k}_R{R}", cert.report.passed and sep.passed, children=[cert.report, sep])
        res.add(f"F{k}_R{R}", rep, cert, **_summary(cert))
    return res


def demo_restrict(n: int = 2, R: int = 2) -> DemoResult:
    """Restrict the Z^n brick certificate to the first coordinate axis."""
    res = DemoResult("restrict")
    cert = brick_cover_Zn(n, R)
    res.add(f"Z{n}_brick", cert.report, cert, **_summary(cert))
    H = coordinate_subgroup(FreeAbelian(n), 0)
    sub = restrict_certificate(cert, H)
    mono = Report("no_growth", sub.colors <= cert.colors and sub.uniform_bound_radius <= cert.uniform_bound_radius,
                  details={"colors": (cert.colors, sub.colors),
                           "bound": (str(cert.uniform_bound_radius), str(sub.uniform_bound_radius))})
    res.add("restricted_to_axis", Report("restricted", sub.report.passed and mono.passed,
                                         children=[sub.report, mono]), sub, **_summary(sub))
    return res


def demo_translate_2z(R: int = 3, window_r: int = 40) -> DemoResult:
    """Interval certificate on H = 2Z (induced norm) translated over Z = {0, 1}."""
    res = DemoResult("translate_2Z")
    Z = Integers()
    H = multiples(Z, 2)
    win = Z.ball(window_r)
    cosets = CosetDecomposition.from_representatives(H, win, [0, 1])
    K = GapSet(Z, frozenset(2 * t for t in range(-R, R + 1)))
    hcert = interval_cover_on(H.window(window_r + 1), GapSet(H.model, H.meet(K.elements)), "interval cover of 2Z")
    res.add("H_certificate", hcert.report, hcert, **_summary(hcert))
    cert = translate_certificate(hcert, cosets, scale=K)
    keep = Report("colors_preserved", cert.colors == hcert.colors == 2
                  and cert.uniform_bound_radius == hcert.uniform_bound_radius)
    res.add("translated", Report("translated", cert.report.passed and keep.passed, children=[cert.report, keep]),
            cert, **_summary(cert))
    return res


def demo_dyadic(kmax: int = 6, j: int = 4, scale_r: int = 5, window_r: int = 12) -> DemoResult:
    """Truncated dyadic group: certificate on <2^-j> translated over coset representatives.

    ``K = B(scale_r)`` must lie in ``<2^-j>``; with weights ``k+1`` this holds
    for ``scale_r <= j + 1``.
    """
    res = DemoResult("dyadic")
    D = Dyadic(kmax)
    H = dyadic_subgroup(D, j)
    K = ball_set(D, scale_r)
    win = D.ball(window_r)
    cosets = CosetDecomposition.build(H, win)
    res.add("cosets", cosets.check(), None, representatives=[D.format(z) for z in cosets.representatives])
    zmax = max(win.norm_of(z) for z in cosets.representatives)
    hcert = interval_cover_on(H.window(Fraction(window_r) + zmax), GapSet(H.model, H.meet(K.elements)),
                              f"interval cover of <2^-{j}>")
    res.add("H_certificate", hcert.report, hcert, **_summary(hcert))
    cert = translate_certificate(hcert, cosets, scale=K)
    keep = Report("colors_preserved", cert.colors == hcert.colors == 2)
    res.add("translated", Report("translated", cert.report.passed and keep.passed, children=[cert.report, keep]),
            cert, **_summary(cert))
    return res


def extension_pipeline(scale_r: int = 3, window_r: int = 60, quotient_R: int | None = None):
    """1 -> Z -> Z^2 -> Z -> 1 with the first axis as kernel; returns (ext, cert_Q, cert_N, K, requirements)."""
    G = FreeAbelian(2)
    N = coordinate_subgroup(G, 0)
    pi = projection(G, 1)
    ext = ExtensionData.build(G, N, pi, window_r)
    K = ball_set(G, scale_r)
    cert_Q = interval_cover_Z(quotient_R or scale_r, window_r)
    req = extension_requirements(ext, cert_Q, K)
    cert_N = interval_cover_on(N.window(req["kernel_window"]), GapSet(N.model, req["kernel_scale"]),
                               "interval cover of the kernel")
    return ext, cert_Q, cert_N, K, req


def demo_extension(scale_r: int = 3, window_r: int = 60) -> DemoResult:
    res = DemoResult("extension")
    ext, cert_Q, cert_N, K, req = extension_pipeline(scale_r, window_r)
    res.add("extension_data", ext.check())
    res.add("quotient_certificate", cert_Q.report, cert_Q, **_summary(cert_Q))
    res.add("kernel_certificate", cert_N.report, cert_N, rho_prime=req["rho_prime"],
            kernel_scale_radius=max(req["kernel_scale"]), **_summary(cert_N))
    cert = extension_combine(ext, cert_Q, cert_N, K)
    four = Report("colors=(n+1)(k+1)", cert.colors == cert_Q.colors * cert_N.colors == 4,
                  details={"colors": cert.colors})
    res.add("combined", Report("combined", cert.report.passed and four.passed, children=[cert.report, four]),
            cert, **_summary(cert))
    return res


def demo_zerodim(model: GroupModel | None = None, K=None, bound_r=5, window_r=20) -> DemoResult:
    """Dimension-zero analysis: Z/7 gets {G}; Z at K = {-1, 0, 1} gets a propagation chain."""
    from .groups import Cyclic

    res = DemoResult("zerodim")
    cases = []
    if model is None:
        cases.append((Cyclic(7), list(range(7))))
        cases.append((Integers(), [-1, 0, 1]))
    else:
        cases.append((model, K if K is not None else list(model.ball(1).elements)))
    for m, Ks in cases:
        v = zero_dim_analysis(m, Ks, bound_r, window_r)
        if v.has_certificate:
            ok = v.report.passed
        else:
            ok = check_chain(m, v.chain, Ks, bound_r)
        rep = Report(f"{m.name}:{v.verdict}", ok, witnesses=[m.format(x) for x in v.chain],
                     details={"verdict": v.verdict, "bound_r": Fraction(bound_r)}, children=[v.report])
        res.add(f"{m.name}", rep, v.certificate, verdict=v.verdict, chain=[m.format(x) for x in v.chain])
    return res


def demo_chain(n: int = 2, R: int = 2, K_r: int | None = None) -> DemoResult:
    """A -> B -> C conversions on the Z^n brick certificate (built at R, tested at K = B(K_r), default R)."""
    res = DemoResult("conversions")
    cert = brick_cover_Zn(n, R)
    K = ball_set(FreeAbelian(n), R if K_r is None else K_r)
    ab = convert_A_to_B(cert.cover, K)
    res.add("A_form", ab.child("a_form"), cert)
    res.add("B_form", ab.child("b_form"), None, max_count=ab.child("b_form").details["max_count"])
    c = convert_B_to_C(cert.cover, K)
    res.add("C_form", c.report, None, multiplicity=c.multiplicity.details["multiplicity"],
            lebesgue_core_r=c.lebesgue.details["core_r"])
    return res


DEMOS = {
    "z": demo_z,
    "zn": demo_zn,
    "free": demo_free,
    "dyadic": demo_dyadic,
    "extension": demo_extension,
    "zerodim": demo_zerodim,
    "restrict": demo_restrict,
    "translate": demo_translate_2z,
    "conversions": demo_chain,
}
