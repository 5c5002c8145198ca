"""Certificate constructors and transports.

Model covers:

* ``interval_cover_Z``: intervals of length ``2R``, two alternating colors;
* ``brick_cover_Zn``: ``n+1`` diagonally staggered families of shrunk cubes;
* ``tree_cover_free``: annuli of width ``2R`` around the identity in ``F_k``,
  split by the length-``(2Rm - R)`` prefix.

Transports:

* ``restrict_certificate``: cells ``U ∩ H`` at scale ``K ∩ H``;
* ``translate_certificate``: cells ``gU`` over left coset representatives;
* ``extension_combine``: cells ``(g_U V K') ∩ U`` from a quotient and a
  kernel certificate, with ``(n+1)(k+1)`` colors;
* ``zero_dim_analysis``: one-color covers at a scale, or the chain forced
  by ``B = BK`` when none exists with the requested bound.

Every constructor verifies its output; a failure is an internal defect and
raises ``VerificationError``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .coarse import GapSet
from .covers import Cell, Certificate, Cover, k_disjoint_check, uniform_bound, verify_certificate
from .errors import BudgetError, ConfigError, PreconditionError, ResourceLimitError, VerificationError
from .groups import FreeAbelian, FreeGroup, GroupModel, Integers, as_fraction
from .homs import GroupHom, Subgroup
from .reports import Report, combine
from .windows import Window


def ball_set(model: GroupModel, r: Any) -> GapSet:
    return GapSet(model, frozenset(model.ball(r).elements))


def _finish(model: GroupModel, window: Window, groups: dict, scale: GapSet, colors: int, bound: Any,
            trace: list, meta: dict | None = None, verify: bool = True) -> Certificate:
    """Assemble a certificate from ``{key: (color, members, center)}`` and verify it."""
    cells = [Cell(c, frozenset(ms), ctr) for _, (c, ms, ctr) in sorted(groups.items(), key=lambda kv: kv[0])]
    cover = Cover(model, cells, window)
    cert = Certificate(cover, scale, colors, as_fraction(bound), None, list(trace), dict(meta or {}))
    if verify:
        rep = verify_certificate(cert)
        if not rep:
            raise VerificationError(f"constructed certificate fails verification: {trace[0] if trace else ''}",
                                    report=rep)
    return cert


# ---------------------------------------------------------------------------
# Z: intervals
# ---------------------------------------------------------------------------


def interval_cover_on(window: Window, scale: GapSet, trace_name: str = "interval cover") -> Certificate:
    """Two-color interval cover of a window of an ``Integers`` model (any norm on it).

    With ``D = max(1, max |t| over the scale)`` the cells are
    ``[2Dm, 2D(m+1) - 1]``, colored ``m mod 2``; same-colored cells are
    ``2D + 1`` apart.  The declared bound is the exact uniform bound.
    """
    model = window.model
    if not isinstance(model, Integers):
        raise ConfigError("interval covers need an Integers model")
    D = max([1] + [abs(t) for t in scale.elements])
    groups: dict = {}
    for t in window.elements:
        m = t // (2 * D)
        groups.setdefault(m, (m % 2, set(), None))[1].add(t)
    cells = [Cell(c, frozenset(ms)) for _, (c, ms, _) in sorted(groups.items())]
    bound = uniform_bound(Cover(model, cells, window))
    trace = [f"{trace_name}: cells [2Dm, 2D(m+1)-1] with D={D}, colored m mod 2",
             f"same-colored cells differ by at least 2D+1={2 * D + 1} > max|K|"]
    return _finish(model, window, groups, scale, 2, bound, trace, {"D": D})


def interval_cover_Z(R: int, window_r: int) -> Certificate:
    """Two-color certificate for ``Z`` at scale ``B(R)`` on the window ``B(window_r)``."""
    if R < 1:
        raise ConfigError("R must be a positive integer")
    if window_r < 4 * R:
        raise PreconditionError(f"window radius {window_r} < 4R = {4 * R}")
    Z = Integers()
    win = Z.ball(window_r)
    scale = GapSet(Z, frozenset(range(-R, R + 1)))
    groups: dict = {}
    for t in win.elements:
        m = t // (2 * R)
        groups.setdefault(m, (m % 2, set(), None))[1].add(t)
    trace = [f"asdim(Z) <= 1 upper bound: intervals [2Rm, 2R(m+1)-1], R={R}, colored m mod 2",
             f"same-colored intervals are 2R+1={2 * R + 1} apart; uniform bound 2R-1={2 * R - 1}"]
    return _finish(Z, win, groups, scale, 2, 2 * R - 1, trace, {"R": R})


# ---------------------------------------------------------------------------
# Z^n: staggered bricks
# ---------------------------------------------------------------------------


def brick_groups(n: int, R: int, L: int, win: Window, colors: int | None = None) -> tuple[dict, int]:
    """Cells of the staggered shrunk-cube cover on ``win``; returns (groups, center radius).

    Color ``j`` uses cubes of side ``L`` shifted by ``j * s`` along the
    diagonal (``s = L // (n+1)``), shrunk by ``R`` on every side.
    """
    colors = n + 1 if colors is None else colors
    s = L // colors
    vecs = np.array(win.elements, dtype=np.int64).reshape(len(win), n)
    mid = R + (L - 2 * R - 1) // 2
    rad = n * max(mid - R, L - R - 1 - mid)
    groups: dict = {}
    for j in range(colors):
        off = vecs - j * s
        q = np.floor_divide(off, L)
        rem = off - q * L
        inside = np.all((rem >= R) & (rem < L - R), axis=1)
        idx = np.nonzero(inside)[0]
        if not len(idx):
            continue
        keys, inv = np.unique(q[idx], axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        order = np.argsort(inv, kind="stable")
        bounds = np.searchsorted(inv[order], np.arange(len(keys) + 1))
        for c in range(len(keys)):
            pos = idx[order[bounds[c]:bounds[c + 1]]]
            key = tuple(int(v) for v in keys[c])
            center = tuple(int(v) * L + j * s + mid for v in keys[c])
            groups[(j, key)] = (j, {win.elements[int(p)] for p in pos}, center)
    return groups, rad


def brick_cover_Zn(n: int, R: int, L: int | None = None, window_r: int | None = None,
                   max_doublings: int = 3) -> Certificate:
    """``(n+1)``-color certificate for ``Z^n`` at scale ``B(R)``.

    Default ``L = (n+1)(2R+1)`` and window ``B(3L)``.  On a verification
    failure ``L`` is doubled (up to ``max_doublings`` times) before giving up.
    """
    if n < 1 or R < 1:
        raise ConfigError("need n >= 1 and R >= 1")
    L = (n + 1) * (2 * R + 1) if L is None else L
    G = FreeAbelian(n)
    last: Exception | None = None
    for _ in range(max_doublings + 1):
        wr = 3 * L if window_r is None else window_r
        win = G.ball(wr)
        scale = GapSet(G, frozenset(G.ball(R).elements))
        groups, rad = brick_groups(n, R, L, win)
        trace = [f"asdim(Z^{n}) <= {n} upper bound: {n + 1} staggered families of cubes, side L={L}, "
                 f"stagger {L // (n + 1)}, shrunk by R={R}",
                 f"each coordinate rules out at most one family, so every point is covered; "
                 f"same-family cubes are 2R+1={2 * R + 1} apart"]
        try:
            return _finish(G, win, groups, scale, n + 1, 2 * rad, trace, {"n": n, "R": R, "L": L})
        except VerificationError as exc:
            last = exc
            L *= 2
    raise VerificationError(f"brick cover failed verification up to L={L // 2}; try a larger L",
                            report=getattr(last, "report", None))


# ---------------------------------------------------------------------------
# free groups: annuli split by prefixes
# ---------------------------------------------------------------------------


def tree_cover_free(k: int, R: int, window_r: int, ball_cap: int | None = None,
                    enforce_window: bool = True) -> Certificate:
    """Two-color certificate for ``F_k`` at scale ``B(R)``.

    ``A_m = {2Rm <= |x| < 2R(m+1)}`` is split by the prefix of length
    ``2Rm - R`` (the component of ``{|x| >= 2Rm - R}`` containing ``x``);
    cells are colored ``m mod 2``.  Declared uniform bound ``6R - 2``.
    """
    if R < 1:
        raise ConfigError("R must be a positive integer")
    if enforce_window and window_r < 6 * R:
        raise PreconditionError(f"window radius {window_r} < 6R = {6 * R}")
    F = FreeGroup(k)
    win = F.ball(window_r, cap=ball_cap)
    scale = GapSet(F, frozenset(F.ball(R).elements))
    two_r = 2 * R
    groups: dict = {}
    for x in win.elements:
        m = len(x) // two_r
        p = two_r * m - R if m else 0
        key = (m, x[:p])
        g = groups.get(key)
        if g is None:
            g = groups[key] = (m % 2, set(), x[:p])
        g[1].add(x)
    trace = [f"tree of F_{k}: annuli of width 2R={two_r} split by prefixes of length 2Rm-R, colored m mod 2",
             "a geodesic between distinct same-colored cells passes through an annulus of width 2R "
             f"or through a branch point at depth 2Rm-R; uniform bound 6R-2={6 * R - 2}"]
    return _finish(F, win, groups, scale, 2, 6 * R - 2, trace, {"k": k, "R": R})


def cell_neighborhood(model: GroupModel, cell, depth: int) -> set:
    """All elements within word distance ``depth`` of ``cell`` (breadth-first, unit weights)."""
    gens = model.generators.elements
    seen = set(cell)
    frontier = list(cell)
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for s in gens:
                y = model.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def separation_oracle(cert: Certificate, R: int, samples: int = 50, seed: int = 0) -> Report:
    """Breadth-first check that same-colored distinct cells are more than ``R`` apart.

    For each sampled cell ``A`` the ``R``-neighborhood of ``A`` is grown in
    the Cayley graph and compared against every other cell of the same color
    (one sampled pair per such cell).
    """
    cells = cert.cover.cells
    rng = random.Random(seed)
    owner: dict = {}
    for i, c in enumerate(cells):
        for x in c.members:
            owner.setdefault(x, []).append(i)
    picks = rng.sample(range(len(cells)), min(samples, len(cells)))
    pairs = 0
    bad = []
    for a in sorted(picks):
        color = cells[a].color
        near = cell_neighborhood(cert.model, cells[a].members, R)
        hit = set()
        for y in near:
            for b in owner.get(y, ()):
                if b != a and cells[b].color == color:
                    hit.add(b)
        pairs += sum(1 for c in cells if c.color == color) - 1
        bad.extend((a, b) for b in sorted(hit))
    return Report("bfs_separation", not bad, witnesses=bad[:20],
                  details={"sampled_cells": len(picks), "pairs": pairs, "violations": len(bad), "R": R})


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------


def restrict_certificate(cert: Certificate, H: Subgroup) -> Certificate:
    """Cells ``U ∩ H`` on the window of ``H`` (induced norm), scale ``K ∩ H``, same colors."""
    if not cert.model.same_group(H.ambient):
        raise ConfigError("subgroup does not live in the certificate's group")
    hwin = H.window(cert.window.radius)
    groups: dict = {}
    for i, c in enumerate(cert.cover.cells):
        ms = H.meet(c.members)
        if ms:
            groups[i] = (c.color, ms, None)
    scale = GapSet(H.model, H.meet(cert.scale.elements))
    cells = [Cell(col, frozenset(ms)) for _, (col, ms, _) in sorted(groups.items())]
    bound = uniform_bound(Cover(H.model, cells, hwin))
    trace = [f"restriction to {H.name}: cells U ∩ H, scale K ∩ H ({len(scale)} elements), colors kept",
             "distinct restricted cells of one color are still (K ∩ H)-disjoint; diameters only shrink "
             "under the induced norm"] + list(cert.trace)
    out = _finish(H.model, hwin, groups, scale, cert.colors, bound, trace, {"subgroup": H.name})
    return out


@dataclass
class CosetDecomposition:
    """Left coset representatives of ``H`` covering a window of the ambient group.

    ``representatives`` are of minimal norm (ties by normal form); ``rep_of``
    maps each window element to the representative of its coset.
    """

    subgroup: Subgroup
    window: Window
    representatives: list
    rep_of: dict
    side: str = "left"

    @classmethod
    def build(cls, H: Subgroup, window: Window) -> "CosetDecomposition":
        reps: list = []
        rep_of: dict = {}
        by_key: dict = {}
        for x in window.elements:  # sorted by (norm, normal form)
            if H.coset_key is not None:
                key = H.coset_key(x)
                z = by_key.get(key)
                if z is None:
                    z = by_key[key] = x
                    reps.append(x)
            else:
                z = next((r for r in reps if H.same_coset(r, x)), None)
                if z is None:
                    z = x
                    reps.append(x)
            rep_of[x] = z
        return cls(H, window, reps, rep_of)

    @classmethod
    def from_representatives(cls, H: Subgroup, window: Window, reps: list) -> "CosetDecomposition":
        """Use the given representatives; every window element must fall in exactly one of their cosets."""
        m = window.model
        rep_of: dict = {}
        for x in window.elements:
            owners = [z for z in reps if H.member(m.mul(m.inv(z), x))]
            if len(owners) != 1:
                raise PreconditionError(f"{m.format(x)} lies in {len(owners)} of the given cosets")
            rep_of[x] = owners[0]
        return cls(H, window, list(reps), rep_of)

    def check(self) -> Report:
        m = self.window.model
        H = self.subgroup
        distinct = all(not H.same_coset(a, b) for i, a in enumerate(self.representatives)
                       for b in self.representatives[i + 1:])
        bad = []
        for x in self.window.elements:
            owners = [z for z in self.representatives if H.member(m.mul(m.inv(z), x))]
            if len(owners) != 1:
                bad.append(m.format(x))
        return combine("cosets", [Report("distinct_cosets", distinct), Report("unique_factorization", not bad,
                                                                              witnesses=bad[:10])])


def translate_certificate(cert_H: Certificate, cosets: CosetDecomposition, window_r: Any = None,
                          scale: GapSet | None = None) -> Certificate:
    """Cells ``gU`` for representatives ``g`` and cells ``U`` of ``cert_H``, verified at ``K ⊆ H``.

    ``scale`` (in the ambient group) defaults to the image of ``cert_H``'s
    scale; it must lie in ``H`` and retract into that scale.
    """
    H = cosets.subgroup
    G = H.ambient
    win = cosets.window if window_r is None else G.ball(window_r)
    if window_r is not None and as_fraction(window_r) > cosets.window.radius:
        raise PreconditionError("coset decomposition does not cover the requested window")
    if scale is None:
        scale = GapSet(G, H.include_set(cert_H.scale.elements))
    outside = [G.format(k) for k in sorted(scale.elements) if not H.member(k)]
    if outside:
        raise PreconditionError(f"scale is not contained in {H.name}: {outside[:5]}",
                                report=Report("K_in_H", False, witnesses=outside[:10]))
    missing = [G.format(k) for k in sorted(scale.elements) if H.retract(k) not in cert_H.scale.elements]
    if missing:
        raise PreconditionError("scale is larger than the subgroup certificate's scale",
                                report=Report("K_in_scale_H", False, witnesses=missing[:10]))
    zmax = max((win.norm_of(z) for z in cosets.representatives), default=Fraction(0))
    need = win.radius + zmax
    if cert_H.window.radius < need:
        raise PreconditionError(f"subgroup certificate window {cert_H.window.radius} < {need} needed")
    owner: dict = {}
    for i, c in enumerate(cert_H.cover.cells):
        for h in c.members:
            owner.setdefault(h, []).append(i)
    groups: dict = {}
    zpos = {z: j for j, z in enumerate(cosets.representatives)}
    for x in win.elements:
        z = cosets.rep_of[x]
        h = H.retract(G.mul(G.inv(z), x))
        for i in owner.get(h, ()):
            key = (zpos[z], i)
            g = groups.get(key)
            if g is None:
                c = cert_H.cover.cells[i]
                center = G.mul(z, H.inclusion(c.center)) if c.center is not None else None
                g = groups[key] = (c.color, set(), center)
            g[1].add(x)
    trace = [f"translation over {len(cosets.representatives)} left cosets of {H.name}: cells gU",
             "cells in different cosets are K-disjoint because K lies in H; (gU)^-1 gU = U^-1 U keeps the bound"]
    trace += list(cert_H.trace)
    return _finish(G, win, groups, scale, cert_H.colors, cert_H.uniform_bound_radius, trace,
                   {"subgroup": H.name, "cosets": len(cosets.representatives)})


# ---------------------------------------------------------------------------
# extensions
# ---------------------------------------------------------------------------


@dataclass
class ExtensionData:
    """``1 -> N -> G -> Q -> 1`` on a window of ``G``: kernel, quotient map, and a section."""

    total: GroupModel
    kernel: Subgroup
    quotient_hom: GroupHom
    window: Window
    section: dict = field(default_factory=dict)
    quotient_norms: dict = field(default_factory=dict)

    @classmethod
    def build(cls, G: GroupModel, N: Subgroup, pi: GroupHom, window_r: Any) -> "ExtensionData":
        win = G.ball(window_r)
        section: dict = {}
        qn: dict = {}
        for x, n, q in zip(win.elements, win.norms, pi.on_window(win)):
            if q not in qn:  # window order: first preimage has minimal norm
                qn[q] = n
                section[q] = x
        return cls(G, N, pi, win, section, qn)

    @property
    def quotient(self) -> GroupModel:
        return self.quotient_hom.target

    def check(self) -> Report:
        pi = self.quotient_hom
        sec_bad = [self.quotient.format(q) for q, x in self.section.items() if pi(x) != q]
        e = self.quotient.identity()
        ker_bad = []
        for x, q in zip(self.window.elements, pi.on_window(self.window)):
            if self.kernel.member(x) != (q == e):
                ker_bad.append(self.total.format(x))
        return combine("extension_data", [Report("section", not sec_bad, witnesses=sec_bad[:10]),
                                           Report("kernel", not ker_bad, witnesses=ker_bad[:10])])


def extension_requirements(ext: ExtensionData, cert_Q: Certificate, K: GapSet) -> dict:
    """Scales the kernel certificate must meet.

    ``rho_prime``: least radius with ``C^-1 C ⊆ pi(B(rho'))`` for every
    quotient cell ``C`` (so ``U^-1 U ⊆ K'N`` with ``K' = B(rho')``);
    ``kernel_scale``: ``K' K K'^-1 ∩ N`` in kernel normal forms;
    ``kernel_window``: radius the kernel certificate's window must reach.
    """
    G, Q = ext.total, ext.quotient
    rho = Fraction(0)
    missing = []
    for c in cert_Q.cover.cells:
        ms = sorted(c.members)
        diffs = {Q.mul(Q.inv(a), b) for a in ms for b in ms}
        for d in diffs:
            v = ext.quotient_norms.get(d)
            if v is None:
                missing.append(Q.format(d))
            else:
                rho = max(rho, v)
    if missing:
        raise PreconditionError("quotient cells too wide for the window: no preimage found for "
                                f"{sorted(set(missing))[:5]}")
    if rho > ext.window.radius:
        raise PreconditionError(f"rho' = {rho} exceeds the window radius")
    n_core = int(ext.window.core_mask(rho).sum())
    Kp = list(ext.window.elements[:n_core])
    N = ext.kernel
    prods = set()
    for a in Kp:
        for k in K.elements:
            ak = G.mul(a, k)
            for b in Kp:
                prods.add(G.mul(ak, G.inv(b)))
    kscale = frozenset(N.retract(x) for x in prods if N.member(x))
    need = 2 * ext.window.radius + rho
    return {"rho_prime": rho, "K_prime": Kp, "kernel_scale": kscale, "kernel_window": need}


def extension_combine(ext: ExtensionData, cert_Q: Certificate, cert_N: Certificate, K: GapSet) -> Certificate:
    """Combine quotient and kernel certificates into one for ``G`` at scale ``K``.

    ``U`` ranges over pulled-back quotient cells (truncated to the window),
    ``g_U`` is the least normal form in ``U``, and the cells are
    ``W_ij = (g_U V K') ∩ U`` with color ``i * colors_N + j``.
    """
    G, Q, N, pi = ext.total, ext.quotient, ext.kernel, ext.quotient_hom
    win = ext.window
    qvals = pi.on_window(win)
    q_owner: dict = {}
    for i, c in enumerate(cert_Q.cover.cells):
        for q in c.members:
            q_owner.setdefault(q, []).append(i)
    uncovered = sorted({q for q in qvals if q not in q_owner})
    piK = sorted({pi(k) for k in K.elements})
    req = extension_requirements(ext, cert_Q, K)
    checks = [
        Report("quotient_covers_window", not uncovered, witnesses=[Q.format(q) for q in uncovered[:10]]),
        k_disjoint_check(cert_Q.cover, piK),
        k_disjoint_check(cert_N.cover, req["kernel_scale"]),
        Report("kernel_window", cert_N.window.radius >= req["kernel_window"],
               details={"have": cert_N.window.radius, "need": req["kernel_window"]}),
    ]
    checks[1].name = "NK_disjoint(quotient side)"
    checks[2].name = "kernel_K'KK'^-1_disjoint"
    pre = combine("extension_preconditions", checks, rho_prime=req["rho_prime"])
    if not pre:
        raise PreconditionError("extension preconditions fail", report=pre)

    Kp_by_q: dict = {}
    for a in req["K_prime"]:
        Kp_by_q.setdefault(pi(a), []).append(a)
    U_members: dict = {}
    for x, q in zip(win.elements, qvals):
        for i in q_owner[q]:
            U_members.setdefault(i, []).append((x, q))
    n_owner: dict = {}
    for j, c in enumerate(cert_N.cover.cells):
        for h in c.members:
            n_owner.setdefault(h, []).append(j)
    nN = cert_N.colors
    groups: dict = {}
    for i, xs in sorted(U_members.items()):
        gU = min(x for x, _ in xs)
        gUi = G.inv(gU)
        qU = pi(gU)
        qUi = Q.inv(qU)
        color_i = cert_Q.cover.cells[i].color
        for x, q in xs:
            y = G.mul(gUi, x)
            for a in Kp_by_q.get(Q.mul(qUi, q), ()):
                v = G.mul(y, G.inv(a))
                for j in n_owner.get(N.retract(v), ()):
                    key = (i, j)
                    g = groups.get(key)
                    if g is None:
                        g = groups[key] = (color_i * nN + cert_N.cover.cells[j].color, set(), None)
                    g[1].add(x)
    colors = cert_Q.colors * nN
    bound = 2 * req["rho_prime"] + cert_N.uniform_bound_radius
    trace = [f"extension: quotient cells pulled back to U, kernel cells V, W = (g_U V K') ∩ U with "
             f"K' = B({req['rho_prime']}), colors {cert_Q.colors} x {nN} = {colors}",
             f"kernel certificate is (K'KK'^-1 ∩ N)-disjoint; bound 2 rho' + bound_N = {bound}"]
    return _finish(G, win, groups, K, colors, bound, trace,
                   {"rho_prime": req["rho_prime"], "kernel_scale_size": len(req["kernel_scale"])})


# ---------------------------------------------------------------------------
# dimension zero
# ---------------------------------------------------------------------------


@dataclass
class ZeroDimVerdict:
    verdict: str
    certificate: Certificate | None
    chain: list
    report: Report
    log: list = field(default_factory=list)

    @property
    def has_certificate(self) -> bool:
        return self.verdict == "CERTIFICATE"


def _symmetrize(model: GroupModel, K) -> list:
    Ks = set(K) | {model.inv(k) for k in K} | {model.identity()}
    return sorted(Ks)


def zero_dim_analysis(model: GroupModel, K, bound_r: Any, window_r: Any, ball_cap: int | None = None
                      ) -> ZeroDimVerdict:
    """Search for a one-color ``K``-disjoint cover with cells of diameter ``<= bound_r``.

    ``K`` is symmetrized and the identity adjoined.  A one-color ``K``-disjoint
    cell ``B`` satisfies ``B = BK``, so the cells are unions of components of
    the graph ``x ~ xk``; the finest such cover is checked.  Finite groups get
    the single cell ``G``.
    """
    bound_r = as_fraction(bound_r)
    Ks = _symmetrize(model, K)
    scale = GapSet(model, frozenset(Ks))
    log: list = []
    try:
        if model.order is not None:
            weights = model.generators.weights
            diam = (max(weights) if weights else 0) * model.order
            win = model.ball(diam, cap=ball_cap)
            log.append(f"finite group of order {model.order}: whole group enumerated ({len(win)} elements)")
            if len(win) != model.order:
                raise ConfigError("generating set does not generate the finite group")
            cell = frozenset(win.elements)
            cover = Cover(model, [Cell(0, cell, model.identity())], win)
            cert = Certificate(cover, scale, 1, uniform_bound(cover), None,
                               ["dimension zero: the whole group is a single bounded cell"], {})
            rep = verify_certificate(cert)
            return ZeroDimVerdict("CERTIFICATE", cert, [], rep, log)
        win = model.ball(window_r, cap=ball_cap)
    except ResourceLimitError as exc:
        raise BudgetError(f"{exc}; log: {log}") from exc
    log.append(f"window B({win.radius}) with {len(win)} elements")
    n = len(win)
    labels = np.arange(n, dtype=np.int64)
    shifts = [win.shift(k) for k in Ks]
    while True:
        new = labels.copy()
        for sh in shifts:
            ok = sh >= 0
            np.minimum.at(new, np.nonzero(ok)[0], labels[sh[ok]])
            np.minimum.at(new, sh[ok], labels[np.nonzero(ok)[0]])
        new = new[new]
        if np.array_equal(new, labels):
            break
        labels = new
    comps: dict = {}
    for i, lab in enumerate(labels):
        comps.setdefault(int(lab), []).append(i)
    log.append(f"{len(comps)} components of x ~ xk")
    ball_size = int(model.ball(bound_r).core_mask(bound_r).sum()) if bound_r <= win.radius else None
    too_big = None
    for lab, idx in sorted(comps.items()):
        if ball_size is not None and len(idx) > ball_size:
            too_big = lab
            break
    if too_big is None:
        kmax = max(win.norm_of(k) for k in Ks)
        core_r = win.radius - kmax
        cells = [Cell(0, frozenset(win.elements[i] for i in idx)) for _, idx in sorted(comps.items())]
        cover = Cover(model, cells, win)
        diam = uniform_bound(cover)
        touches = any(win.norms[i] > core_r for idx in comps.values() for i in idx)
        if diam <= bound_r and not touches:
            cert = Certificate(cover, scale, 1, bound_r, None,
                               ["one color: cells are the components of x ~ xk"], {})
            rep = verify_certificate(cert)
            return ZeroDimVerdict("CERTIFICATE", cert, [], rep, log)
    chain = _propagation_chain(win, Ks, bound_r)
    rep = Report("zero_dim", False,
                 witnesses=[model.format(x) for x in chain],
                 details={"bound_r": bound_r, "window_r": win.radius, "scale": [model.format(k) for k in Ks],
                          "reason": "a one-color K-disjoint cell containing 1 equals BK, so it contains the chain"})
    return ZeroDimVerdict("NO-CERTIFICATE", None, chain, rep, log)


def _propagation_chain(win: Window, Ks: list, bound_r: Fraction) -> list:
    """Shortest chain ``1 = x_0, x_1 = x_0 k_1, ...`` ending at norm ``> bound_r``."""
    m = win.model
    e = m.identity()
    prev = {e: None}
    queue = deque([e])
    end = None
    while queue:
        x = queue.popleft()
        if win.norm_of(x) > bound_r:
            end = x
            break
        for k in sorted(Ks, reverse=True):
            y = m.mul(x, k)
            if y in win.index and y not in prev:
                prev[y] = x
                queue.append(y)
    if end is None:
        return []
    chain = []
    while end is not None:
        chain.append(end)
        end = prev[end]
    return chain[::-1]


def check_chain(model: GroupModel, chain: list, K, bound_r: Any) -> bool:
    """Independent check of a propagation witness: starts at 1, steps in ``K``, ends past the bound."""
    Ks = set(_symmetrize(model, K))
    if not chain or chain[0] != model.identity():
        return False
    for a, b in zip(chain, chain[1:]):
        if model.mul(model.inv(a), b) not in Ks:
            return False
    return model.norm(chain[-1]) > as_fraction(bound_r)


__all__ = [
    "CosetDecomposition",
    "ExtensionData",
    "ZeroDimVerdict",
    "ball_set",
    "brick_cover_Zn",
    "brick_groups",
    "cell_neighborhood",
    "check_chain",
    "extension_combine",
    "extension_requirements",
    "interval_cover_Z",
    "interval_cover_on",
    "restrict_certificate",
    "separation_oracle",
    "translate_certificate",
    "tree_cover_free",
    "zero_dim_analysis",
]


