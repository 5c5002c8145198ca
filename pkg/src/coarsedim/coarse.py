"""Generating families and the invariant-entourage calculus on finite data.

Invariant entourages are handled through the shear map ``(x, y) -> y^-1 x``:
a finite sample ``E`` lies in ``G(A x A) = {(ga, gb)}`` exactly when its
shear image lies in ``A^-1 A``.  ``entourage_membership_bruteforce`` decides
the same question by searching for ``g`` directly and serves as the oracle.

Global conditions (connectedness, ``HB = G``, properness) are checked on a
window and every report records the window radius.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import DomainMismatchError, EmptyFamilyError, ModelMismatchError, NotGeneratedError, NotNormalError
from .errors import SearchBudgetError
from .groups import Elem, GroupModel
from .homs import GroupHom, ImageGroup, Subgroup
from .reports import Report
from .windows import Window


@dataclass(frozen=True)
class GapSet:
    """A finite subset of one group model."""

    model: GroupModel
    elements: frozenset

    @classmethod
    def of(cls, model: GroupModel, xs: Iterable) -> "GapSet":
        xs = frozenset(xs)
        model.check(*xs)
        return cls(model, xs)

    @classmethod
    def parse(cls, model: GroupModel, strings: Iterable[str]) -> "GapSet":
        return cls(model, frozenset(model.parse(s) for s in strings))

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __le__(self, other: "GapSet") -> bool:
        return self.elements <= other.elements

    def sorted(self) -> list:
        return sorted(self.elements)

    def to_json(self) -> list[str]:
        return [self.model.format(x) for x in self.sorted()]

    def max_norm(self) -> Fraction:
        return max((self.model.norm(x) for x in self.elements), default=Fraction(0))

    def __str__(self) -> str:
        return "{" + ", ".join(self.to_json()) + "}"


@dataclass(frozen=True)
class EntourageSample:
    """A finite set of pairs of one group model."""

    model: GroupModel
    pairs: frozenset

    @classmethod
    def of(cls, model: GroupModel, pairs: Iterable[tuple]) -> "EntourageSample":
        pairs = frozenset((x, y) for x, y in pairs)
        for x, y in pairs:
            model.check(x, y)
        return cls(model, pairs)

    @classmethod
    def parse(cls, model: GroupModel, pairs: Iterable[tuple[str, str]]) -> "EntourageSample":
        return cls(model, frozenset((model.parse(a), model.parse(b)) for a, b in pairs))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def inverse(self) -> "EntourageSample":
        return EntourageSample(self.model, frozenset((y, x) for x, y in self.pairs))

    def to_json(self) -> list[list[str]]:
        f = self.model.format
        return [[f(x), f(y)] for x, y in sorted(self.pairs)]


def _same(a: GroupModel, b: GroupModel) -> None:
    if not a.same_group(b):
        raise ModelMismatchError(f"{a.name} vs {b.name}")


# ---------------------------------------------------------------------------
# set algebra
# ---------------------------------------------------------------------------


def shear(model: GroupModel, pair: tuple) -> Elem:
    """``(x, y) -> y^-1 x``."""
    x, y = pair
    return model.mul(model.inv(y), x)


def shear_image(E: EntourageSample) -> GapSet:
    m = E.model
    return GapSet(m, frozenset(m.mul(m.inv(y), x) for x, y in E.pairs))


def family_union(A: GapSet, B: GapSet) -> GapSet:
    _same(A.model, B.model)
    return GapSet(A.model, A.elements | B.elements)


def family_product(A: GapSet, B: GapSet) -> GapSet:
    _same(A.model, B.model)
    mul = A.model.mul
    return GapSet(A.model, frozenset(mul(a, b) for a in A.elements for b in B.elements))


def family_inverse(A: GapSet) -> GapSet:
    return GapSet(A.model, frozenset(A.model.inv(a) for a in A.elements))


def gap_gap(A: GapSet) -> GapSet:
    """``A^-1 A``."""
    return family_product(family_inverse(A), A)


# ---------------------------------------------------------------------------
# entourages
# ---------------------------------------------------------------------------


def entourage_membership(E: EntourageSample, A: GapSet) -> bool:
    """``E ⊆ G(A x A)``, decided by ``shear(E) ⊆ A^-1 A``."""
    _same(E.model, A.model)
    return shear_image(E).elements <= gap_gap(A).elements


def entourage_membership_bruteforce(E: EntourageSample, A: GapSet, window: Window) -> bool:
    """Search the window for ``g`` with ``(x, y) = (g a, g b)``, ``a, b`` in ``A``, for every pair.

    Exact when the window contains every ``x a^-1``.
    """
    m = E.model
    _same(m, A.model)
    inv, mul = m.inv, m.mul
    members = A.elements
    for x, y in E.pairs:
        found = False
        for g in window.elements:
            gi = inv(g)
            if mul(gi, x) in members and mul(gi, y) in members:
                found = True
                break
        if not found:
            return False
    return True


def compose_entourages(E1: EntourageSample, E2: EntourageSample) -> EntourageSample:
    """``{(x, z) : (x, y) in E1, (y, z) in E2}``."""
    _same(E1.model, E2.model)
    by_first: dict = {}
    for y, z in E2.pairs:
        by_first.setdefault(y, []).append(z)
    out = frozenset((x, z) for x, y in E1.pairs for z in by_first.get(y, ()))
    return EntourageSample(E1.model, out)


def invariant_entourage(A: GapSet, window: Window) -> EntourageSample:
    """``G(A x A)`` restricted to pairs with both coordinates in the window."""
    m = A.model
    pairs = set()
    for g in window.elements:
        row = [m.mul(g, a) for a in A.elements]
        row = [x for x in row if x in window.index]
        for x in row:
            for y in row:
                pairs.add((x, y))
    return EntourageSample(m, frozenset(pairs))


def containment_lemma_check(A: GapSet, B: GapSet, window: Window) -> Report:
    """``G(A x A) ∘ G(B x B) ⊆ G(A x (A B^-1 B))`` for all pairs realizable inside the window.

    Membership of each composed pair is decided from the definition: with
    ``x = h a`` (``h = x a^-1``) check ``h^-1 z`` lies in ``A B^-1 B``.
    """
    _same(A.model, B.model)
    m = A.model
    details = {"window_r": window.radius}
    if not A.elements or not B.elements:
        return Report("containment_lemma", True, details=details)
    C = family_product(A, gap_gap(B)).elements
    EA = invariant_entourage(A, window)
    EB = invariant_entourage(B, window)
    comp = compose_entourages(EA, EB)
    bad = []
    for x, z in sorted(comp.pairs):
        ok = False
        for a in A.elements:
            h = m.mul(x, m.inv(a))
            if m.mul(m.inv(h), z) in C:
                ok = True
                break
        if not ok:
            bad.append((m.format(x), m.format(z)))
            break
    details["pairs_checked"] = len(comp)
    return Report("containment_lemma", not bad, witnesses=bad, details=details)


# ---------------------------------------------------------------------------
# family views
# ---------------------------------------------------------------------------

NORM_BOUNDED = "norm_bounded"
CARDINALITY_BOUNDED = "cardinality_bounded"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class FamilyView:
    """A finitely described generating family and its completion.

    ``norm_bounded``: members are the balls ``B(r)`` of a norm.  By default the
    norm is the word norm of ``model``; ``via`` (a hom into ``metric``) pulls
    back the norm of ``metric`` (restriction along an inclusion), and an
    ``ImageGroup`` metric realizes pushforwards.

    ``cardinality_bounded``: all finite sets.

    ``explicit``: the listed members; completion is downward closure.  Views
    built from window truncations carry ``window_radius``.
    """

    kind: str
    model: GroupModel
    members: tuple = ()
    metric: GroupModel | None = None
    via: GroupHom | None = field(default=None, compare=False)
    window_radius: Fraction | None = None
    flags: tuple = ()

    def __post_init__(self):
        if self.kind not in (NORM_BOUNDED, CARDINALITY_BOUNDED, EXPLICIT):
            raise ValueError(f"unsupported family descriptor {self.kind!r}")

    @classmethod
    def norm_bounded(cls, model: GroupModel) -> "FamilyView":
        return cls(NORM_BOUNDED, model)

    @classmethod
    def cardinality_bounded(cls, model: GroupModel) -> "FamilyView":
        return cls(CARDINALITY_BOUNDED, model)

    @classmethod
    def explicit(cls, model: GroupModel, members: Iterable, window_radius=None) -> "FamilyView":
        ms = []
        for A in members:
            ms.append(A if isinstance(A, GapSet) else GapSet.of(model, A))
        return cls(EXPLICIT, model, tuple(ms), window_radius=window_radius)

    def norm(self, x: Elem) -> Fraction:
        """The norm defining a ``norm_bounded`` view."""
        metric = self.metric or self.model
        y = self.via(x) if self.via is not None else x
        return metric.norm(y)

    def maximal_members(self) -> list[GapSet]:
        ms = sorted(set(self.members), key=lambda A: (-len(A), A.sorted()))
        out: list[GapSet] = []
        for A in ms:
            if not any(A.elements <= B.elements for B in out):
                out.append(A)
        return out

    def to_json(self) -> dict:
        d: dict = {"descriptor": self.kind, "group": self.model.to_json()}
        if self.kind == EXPLICIT:
            d["members"] = [A.to_json() for A in self.members]
        if self.window_radius is not None:
            d["window_r"] = str(self.window_radius)
        return d


def completion_membership(A: GapSet, F: FamilyView) -> Report:
    """``A`` lies in the completion: some member of ``F`` contains it.

    The report's ``witness`` detail is the containing ball radius, the set
    itself, or the index of the containing explicit member.
    """
    _same(A.model, F.model)
    if F.kind == CARDINALITY_BOUNDED:
        return Report("completion", True, details={"witness": "finite set", "size": len(A)})
    if F.kind == NORM_BOUNDED:
        try:
            r = max((F.norm(a) for a in A.elements), default=Fraction(0))
        except NotGeneratedError as exc:
            return Report("completion", False, witnesses=[str(exc)])
        except SearchBudgetError as exc:
            return Report("completion", False, witnesses=[str(exc)], details={"undecided": True})
        return Report("completion", True, details={"witness_radius": r})
    for i, B in enumerate(F.members):
        if A.elements <= B.elements:
            return Report("completion", True, details={"witness_member": i})
    return Report("completion", False)


def is_bounded(B: GapSet, F: FamilyView) -> bool:
    """``B^-1 B`` lies in the completion of ``F``."""
    if not B.elements:
        return True
    return bool(completion_membership(gap_gap(B), F))


def is_connected(F: FamilyView, window: Window) -> Report:
    """Every window element lies in some member ("connected on window r")."""
    details = {"window_r": window.radius, "scope": f"connected on window {window.radius}"}
    if F.kind == CARDINALITY_BOUNDED:
        return Report("connected", True, details=details)
    missing = []
    if F.kind == NORM_BOUNDED:
        for x in window.elements:
            try:
                F.norm(x)
            except (NotGeneratedError, SearchBudgetError):
                missing.append(window.model.format(x))
    else:
        covered = set()
        for A in F.members:
            covered |= A.elements
        missing = [window.model.format(x) for x in window.elements if x not in covered]
    return Report("connected", not missing, witnesses=missing[:10], details=details)


def entourage_in_family(E: EntourageSample, F: FamilyView) -> bool:
    """``E`` lies in the coarse structure generated by ``F``.

    For explicit views this scans the members (``shear(E) ⊆ A^-1 A``); for
    norm views it asks whether the shear image lies in the completion, which
    is the same condition since ``B(r)^-1 B(r) ⊇ B(r)``.
    """
    _same(E.model, F.model)
    S = shear_image(E)
    if F.kind == EXPLICIT:
        return any(entourage_membership(E, A) for A in F.members)
    return bool(completion_membership(S, F))


def restrict_family(F: FamilyView, H: Subgroup, window: Window | None = None) -> FamilyView:
    """Members ``A ∩ H`` (in ``H`` normal forms).

    For norm views the result is the norm view of the induced norm.  The
    "some member meets ``H``" hypothesis is checked on the listed members or,
    for descriptor views, on the window (and flagged as such).
    """
    _same(F.model, H.ambient)
    if F.kind == EXPLICIT:
        ms = [GapSet(H.model, H.meet(A.elements)) for A in F.members]
        ms = [A for A in ms if A.elements]
        if not ms:
            raise EmptyFamilyError(f"no member of the family meets {H.name}")
        return FamilyView(EXPLICIT, H.model, tuple(ms), window_radius=F.window_radius)
    flags = ("meets-H checked on window only",)
    if window is not None and not any(H.member(x) for x in window.elements):
        raise EmptyFamilyError(f"no window element lies in {H.name}")
    if F.kind == CARDINALITY_BOUNDED:
        return FamilyView(CARDINALITY_BOUNDED, H.model, flags=flags)
    via = H.inclusion if F.via is None else _compose(H.inclusion, F.via)
    return FamilyView(NORM_BOUNDED, H.model, metric=F.metric or F.model, via=via, flags=flags)


def _compose(first: GroupHom, second: GroupHom) -> GroupHom:
    imgs = [second(y) for y in first.images]
    return GroupHom.from_images(first.source, second.target, imgs, name=f"{second.name}∘{first.name}",
                                fast=lambda x: second(first(x)))


def pushforward_family(F: FamilyView, phi: GroupHom) -> FamilyView:
    """Members ``phi(A)``."""
    _same(F.model, phi.source)
    if F.kind == EXPLICIT:
        ms = tuple(GapSet(phi.target, phi.image_set(A.elements)) for A in F.members)
        return FamilyView(EXPLICIT, phi.target, ms, window_radius=F.window_radius)
    if F.kind == CARDINALITY_BOUNDED:
        return FamilyView(CARDINALITY_BOUNDED, phi.target)
    if F.via is not None or F.metric is not None:
        raise ValueError("pushforward of a pulled-back norm view is not supported")
    return FamilyView(NORM_BOUNDED, phi.target, metric=ImageGroup(phi))


def check_normal(N: Subgroup, window: Window, samples: int = 200, seed: int = 0) -> Report:
    """Sampled test of ``g n g^-1 ∈ N`` for ``n`` in ``N``, ``g`` in the window."""
    m = window.model
    rng = random.Random(seed)
    ns = [x for x in window.elements if N.member(x)]
    gs = list(window.elements)
    if not ns:
        return Report("normal", True, details={"samples": 0})
    pairs = [(g, n) for g in gs[:20] for n in ns[:20]]
    pairs += [(rng.choice(gs), rng.choice(ns)) for _ in range(samples)]
    for g, n in pairs:
        if not N.member(m.conj(g, n)):
            return Report("normal", False, witnesses=[(m.format(g), m.format(n))])
    return Report("normal", True, details={"samples": len(pairs), "seed": seed})


def normal_product(N: Subgroup, A: Iterable, window: Window, side: str = "left") -> frozenset:
    """``NA ∩ W`` (``side='left'``) or ``AN ∩ W`` (``side='right'``)."""
    m = window.model
    A = list(A)
    inv_a = [m.inv(a) for a in A]
    out = set()
    for x in window.elements:
        for a, ai in zip(A, inv_a):
            y = m.mul(x, ai) if side == "left" else m.mul(ai, x)
            if N.member(y):
                out.add(x)
                break
    return frozenset(out)


def enlarge_by_normal(F: FamilyView, N: Subgroup, window: Window, radii: Iterable | None = None,
                      seed: int = 0) -> FamilyView:
    """Family ``N F`` materialized as window truncations ``NA ∩ W``.

    Raises ``NotNormalError`` (with witness ``(g, n)``) when the sampled
    normality test fails.  For descriptor views the members ``N B(r)`` are
    materialized for the given ``radii`` (default: a few up to ``r/2``).
    """
    _same(F.model, N.ambient)
    rep = check_normal(N, window, seed=seed)
    if not rep:
        g, n = rep.witnesses[0]
        raise NotNormalError(f"{N.name} is not normal: g n g^-1 leaves it for g={g}, n={n}", witness=(g, n))
    if F.kind == EXPLICIT:
        seeds = [A.elements for A in F.members]
    else:
        if radii is None:
            top = int(window.radius // 2)
            radii = sorted({0, 1, max(0, top // 2), top})
        seeds = [frozenset(window.elements[: int(window.core_mask(r).sum())]) for r in radii]
    ms = tuple(GapSet(F.model, normal_product(N, A, window)) for A in seeds)
    return FamilyView(EXPLICIT, F.model, ms, window_radius=window.radius)


# ---------------------------------------------------------------------------
# morphisms and coarse equivalences
# ---------------------------------------------------------------------------


def _sample_members(F: FamilyView, window: Window) -> list[frozenset]:
    if F.kind == EXPLICIT:
        return [A.elements for A in F.members]
    top = window.radius / 2
    radii = [r for r in sorted({Fraction(0), Fraction(1), top / 2, top}) if r <= top]
    out = []
    for r in radii:
        n = int(window.core_mask(r).sum())
        out.append(frozenset(window.elements[:n]))
    return out


def morphism_check(phi: GroupHom, F: FamilyView, F2: FamilyView, mode: str, window: Window,
                   target_window: Window | None = None) -> Report:
    """Coarse uniformity / properness / embedding of ``phi`` on windows.

    uniform: images of sampled members of ``F`` lie in the completion of ``F2``.
    proper: for sampled members ``A'`` of ``F2``, the preimage within the
    source window lies in the completion of ``F``; a preimage reaching the
    window boundary is not certified bounded.
    """
    if mode not in ("uniform", "proper", "embedding"):
        raise ValueError(f"unknown mode {mode!r}")
    children = []
    if mode in ("uniform", "embedding"):
        bad = []
        for A in _sample_members(F, window):
            img = GapSet(phi.target, phi.image_set(A))
            if not completion_membership(img, F2):
                bad.append(GapSet(phi.source, A).to_json())
        children.append(Report("uniform", not bad, witnesses=bad[:3], details={"window_r": window.radius}))
    if mode in ("proper", "embedding"):
        tw = target_window or phi.target.ball(window.radius)
        vals = phi.on_window(window)
        bad = []
        for B in _sample_members(F2, tw):
            pre = [x for x, y in zip(window.elements, vals) if y in B]
            inside = all(window.norm(x) < window.radius for x in pre)
            ok = inside and bool(completion_membership(GapSet(phi.source, frozenset(pre)), F))
            if not ok:
                bad.append(GapSet(phi.target, B).to_json())
        children.append(Report("proper", not bad, witnesses=bad[:3], details={"window_r": window.radius}))
    passed = all(c.passed for c in children)
    return Report(f"morphism:{mode}", passed, details={"window_r": window.radius}, children=children)


def closeness_check(p: dict, q: dict, F_target: FamilyView) -> Report:
    """The pairs ``{(p(s), q(s))}`` form an entourage of the structure generated by ``F_target``."""
    if set(p) != set(q):
        raise DomainMismatchError("p and q are defined on different domains")
    m = F_target.model
    E = EntourageSample(m, frozenset((p[s], q[s]) for s in p))
    ok = entourage_in_family(E, F_target)
    S = shear_image(E)
    return Report("closeness", ok, details={"shear_image_size": len(S), "domain_size": len(p)})


def cocompact_inclusion_check(H: Subgroup, B: GapSet, window: Window) -> Report:
    """``HB = G`` on the window, plus the retraction ``s(h b) = h`` having shear in ``B^-1``."""
    m = window.model
    Bs = sorted(B.elements)
    binv = {b: m.inv(b) for b in Bs}
    missing = []
    retraction_ok = True
    Binv = frozenset(binv.values())
    for x in window.elements:
        h = None
        for b in Bs:
            y = m.mul(x, binv[b])
            if H.member(y):
                h = y
                break
        if h is None:
            missing.append(m.format(x))
            continue
        if m.mul(m.inv(x), h) not in Binv:
            retraction_ok = False
    children = [
        Report("HB=G", not missing, witnesses=missing[:10], details={"window_r": window.radius}),
        Report("retraction_close", retraction_ok and not missing),
    ]
    return Report("cocompact_inclusion", all(children), details={"window_r": window.radius,
                                                                  "scope": f"verified on window {window.radius}"},
                  children=children)


# ---------------------------------------------------------------------------
# explicit families closed on a window
# ---------------------------------------------------------------------------


def close_family(seeds: Iterable[Iterable], window: Window) -> FamilyView:
    """Smallest window-closed explicit family containing ``seeds``.

    Closed under union, inverse and products whose result stays inside the
    window.  Unions force a single maximal member ``U``, the fixed point of
    ``U <- U ∪ U^-1 ∪ {ab ∈ W : a, b ∈ U}``.
    """
    m = window.model
    U = set()
    for s in seeds:
        U |= set(s)
    if not U:
        U = {m.identity()}
    while True:
        new = set(U)
        new |= {m.inv(a) for a in U}
        for a in U:
            for b in U:
                ab = m.mul(a, b)
                if ab in window.index:
                    new.add(ab)
        if new == U:
            break
        U = new
    return FamilyView(EXPLICIT, m, (GapSet(m, frozenset(U)),), window_radius=window.radius)


def completion_view(F: FamilyView) -> FamilyView:
    """The completion of an explicit view, described by its maximal members."""
    if F.kind != EXPLICIT:
        return F
    return FamilyView(EXPLICIT, F.model, tuple(F.maximal_members()), window_radius=F.window_radius)


def family_axioms_check(F: FamilyView, window: Window, samples: int = 50, seed: int = 0) -> Report:
    """Closure of an explicit family under union, product and inverse, on sampled members.

    Products leaving the window are skipped (window-closed semantics).
    """
    rng = random.Random(seed)
    m = F.model
    pool = []
    for A in F.members:
        els = sorted(A.elements)
        pool.append(A)
        for _ in range(3):
            k = rng.randint(0, len(els))
            pool.append(GapSet(m, frozenset(rng.sample(els, k))))
    bad: dict[str, list] = {"nonempty": [], "union": [], "product": [], "inverse": []}
    if not any(A.elements for A in F.members):
        bad["nonempty"].append("no nonempty member")
    for _ in range(samples):
        A, B = rng.choice(pool), rng.choice(pool)
        if not completion_membership(family_union(A, B), F):
            bad["union"].append((A.to_json(), B.to_json()))
        P = family_product(A, B)
        if all(x in window.index for x in P.elements) and not completion_membership(P, F):
            bad["product"].append((A.to_json(), B.to_json()))
        if not completion_membership(family_inverse(A), F):
            bad["inverse"].append(A.to_json())
    children = [Report(k, not v, witnesses=v[:3]) for k, v in bad.items()]
    return Report("family_axioms", all(children), details={"samples": samples, "seed": seed}, children=children)


__all__ = [
    "EntourageSample",
    "FamilyView",
    "GapSet",
    "check_normal",
    "close_family",
    "closeness_check",
    "cocompact_inclusion_check",
    "completion_membership",
    "completion_view",
    "compose_entourages",
    "containment_lemma_check",
    "enlarge_by_normal",
    "entourage_in_family",
    "entourage_membership",
    "entourage_membership_bruteforce",
    "family_axioms_check",
    "family_inverse",
    "family_product",
    "family_union",
    "gap_gap",
    "invariant_entourage",
    "is_bounded",
    "is_connected",
    "morphism_check",
    "normal_product",
    "pushforward_family",
    "restrict_family",
    "shear",
    "shear_image",
]
