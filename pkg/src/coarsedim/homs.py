"""Homomorphisms given on generators, image (quotient) groups, and subgroups.

A ``GroupHom`` stores the image of every source generator and evaluates by
word substitution.  Standard maps additionally carry a closed-form ``fast``
evaluator; ``check_homomorphism`` cross-checks the two.

A ``Subgroup`` bundles an abstract model ``H`` with its inclusion into the
ambient group, a membership test, and the inverse of the inclusion.  Its
windows carry the *induced* norm ``|h| = |inclusion(h)|_G``, which is the norm
of the restricted family of balls.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .errors import ConfigError, ModelMismatchError
from .groups import (
    Cyclic,
    DirectProduct,
    Dyadic,
    Elem,
    FreeAbelian,
    FreeGroup,
    GroupModel,
    Integers,
    model_from_json,
)
from .reports import Report
from .windows import Window


@dataclass(frozen=True, eq=False)
class GroupHom:
    """Homomorphism ``source -> target`` determined by generator images."""

    source: GroupModel
    target: GroupModel
    images: tuple
    name: str = "hom"
    fast: Callable | None = None
    _memo: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_images(cls, source: GroupModel, target: GroupModel, images: dict | list,
                    name: str = "hom", fast: Callable | None = None) -> "GroupHom":
        gens = source.generators.elements
        if isinstance(images, dict):
            missing = [source.format(g) for g in gens if g not in images]
            if missing:
                raise ConfigError(f"no image given for generators {missing}")
            imgs = tuple(images[g] for g in gens)
        else:
            imgs = tuple(images)
        if len(imgs) != len(gens):
            raise ConfigError(f"expected {len(gens)} generator images, got {len(imgs)}")
        target.check(*imgs)
        return cls(source, target, imgs, name, fast)

    def __call__(self, x: Elem) -> Elem:
        if self.fast is not None:
            return self.fast(x)
        return self.by_substitution(x)

    def by_substitution(self, x: Elem) -> Elem:
        """Evaluate by writing ``x`` as a generator word (independent of ``fast``)."""
        got = self._memo.get(x)
        if got is not None:
            return got
        win = self.source._search_cache.get("window")
        if win is not None and x in win.index:
            return self._window_values(win)[win.index[x]]
        tmul = self.target.mul
        y = self.target.identity()
        for j in self.source.factor(x):
            y = tmul(y, self.images[j])
        if len(self._memo) < 100000:
            self._memo[x] = y
        return y

    def _window_values(self, win: Window) -> list:
        key = ("window", id(win))
        vals = self._memo.get(key)
        if vals is None:
            tmul = self.target.mul
            vals = [None] * len(win)
            e = self.target.identity()
            # elements are sorted by norm, so a parent precedes its children
            for i in range(len(win)):
                p = int(win.parent[i])
                if p < 0:
                    if win.elements[i] != self.source.identity():
                        vals[i] = self.by_substitution_search(win.elements[i])
                    else:
                        vals[i] = e
                else:
                    vals[i] = tmul(vals[p], self.images[int(win.parent_gen[i])])
            self._memo[key] = vals
        return vals

    def by_substitution_search(self, x: Elem) -> Elem:
        tmul = self.target.mul
        y = self.target.identity()
        for j in self.source.factor(x):
            y = tmul(y, self.images[j])
        return y

    def on_window(self, win: Window) -> list:
        """Images of every window element, in window order."""
        if self.fast is not None:
            return [self.fast(x) for x in win.elements]
        if win.model is self.source:
            return list(self._window_values(win))
        return [self.by_substitution(x) for x in win.elements]

    def image_set(self, xs) -> frozenset:
        return frozenset(self(x) for x in xs)

    def image_model(self) -> "ImageGroup":
        return ImageGroup(self)

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "images": [self.target.format(y) for y in self.images],
            "name": self.name,
        }


def hom_from_json(desc: dict) -> GroupHom:
    try:
        src = model_from_json(desc["source"])
        tgt = model_from_json(desc["target"])
        imgs = [tgt.parse(s) for s in desc["images"]]
    except KeyError as exc:
        raise ConfigError(f"hom description missing field {exc}") from exc
    return GroupHom.from_images(src, tgt, imgs, name=desc.get("name", "hom"))


def check_homomorphism(phi: GroupHom, win: Window, samples: int = 200, seed: int = 0) -> Report:
    """``phi(xy) = phi(x) phi(y)`` on sampled window pairs (and ``fast`` agrees with substitution)."""
    rng = random.Random(seed)
    els = list(win.elements)
    bad = []
    for _ in range(samples):
        x, y = rng.choice(els), rng.choice(els)
        lhs = phi(phi.source.mul(x, y))
        rhs = phi.target.mul(phi(x), phi(y))
        if lhs != rhs:
            bad.append((phi.source.format(x), phi.source.format(y)))
    if phi.fast is not None:
        for x in els[: min(len(els), 2000)]:
            if phi.fast(x) != phi.by_substitution_search(x):
                bad.append((phi.source.format(x), "fast"))
                break
    return Report("homomorphism", not bad, witnesses=bad[:10], details={"samples": samples, "seed": seed})


# ---------------------------------------------------------------------------
# image groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImageGroup(GroupModel):
    """The image ``phi(G)`` inside the target, normed by ``|y| = min{|x| : phi(x) = y}``.

    Its generators are the nontrivial images of source generators, each with
    the least weight among its preimages; the word norm over these equals the
    quotient norm.
    """

    hom: GroupHom = None
    gens: tuple | None = None
    kind = "quotient"

    def identity(self):
        return self.hom.target.identity()

    def mul(self, x, y):
        return self.hom.target.mul(x, y)

    def inv(self, x):
        return self.hom.target.inv(x)

    def is_element(self, x):
        return self.hom.target.is_element(x)

    def format(self, x):
        return self.hom.target.format(x)

    def parse(self, s):
        return self.hom.target.parse(s)

    def standard_generators(self):
        best: dict = {}
        e = self.identity()
        for y, (_, w) in zip(self.hom.images, self.hom.source.generators.entries):
            if y == e:
                continue
            if y not in best or w < best[y]:
                best[y] = w
        return sorted(best.items(), key=lambda kv: (kv[1], kv[0]))

    def params(self):
        return {"kind": "quotient", "hom": self.hom.to_json()}

    def lattice_moduli(self):
        return self.hom.target.lattice_moduli()

    def lattice_vec(self, x):
        return self.hom.target.lattice_vec(x)

    def __hash__(self):
        return id(self.hom)

    def __eq__(self, other):
        return isinstance(other, ImageGroup) and other.hom is self.hom and other.gens == self.gens


# ---------------------------------------------------------------------------
# standard homomorphisms
# ---------------------------------------------------------------------------


def identity_hom(model: GroupModel) -> GroupHom:
    return GroupHom.from_images(model, model, model.generators.elements, name="identity", fast=lambda x: x)


def constant_hom(source: GroupModel, target: GroupModel) -> GroupHom:
    e = target.identity()
    return GroupHom.from_images(source, target, [e] * len(source.generators), name="constant",
                                fast=lambda x: e)


def projection(source: GroupModel, i: int) -> GroupHom:
    """Coordinate ``i`` of ``Z^n`` (onto ``Z``) or factor ``i`` of a direct product."""
    if isinstance(source, FreeAbelian):
        target: GroupModel = Integers()
        fast = lambda x: x[i]  # noqa: E731
    elif isinstance(source, DirectProduct):
        target = source.factors[i]
        fast = lambda x: x[i]  # noqa: E731
    else:
        raise ModelMismatchError(f"no coordinate projection on {source.name}")
    imgs = [fast(g) for g in source.generators.elements]
    return GroupHom.from_images(source, target, imgs, name=f"projection[{i}]", fast=fast)


def abelianization(source: FreeGroup) -> GroupHom:
    """``F_k -> Z^k``, counting signed letter occurrences."""
    k = source.rank
    letters = "abcdefghijklmnopqrstuvwxyz"[:k]

    def fast(x):
        v = [0] * k
        for c in x:
            if c.islower():
                v[letters.index(c)] += 1
            else:
                v[letters.index(c.lower())] -= 1
        return tuple(v)

    target = FreeAbelian(k)
    imgs = [fast(g) for g in source.generators.elements]
    return GroupHom.from_images(source, target, imgs, name="abelianization", fast=fast)


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Subgroup:
    """A subgroup ``H <= G`` with inclusion, membership test, and retraction.

    ``coset_key(g)`` (optional) labels the left coset ``gH``; two elements get
    equal keys exactly when they lie in the same left coset.
    """

    ambient: GroupModel
    model: GroupModel
    inclusion: GroupHom
    member: Callable[[Elem], bool]
    retract: Callable[[Elem], Elem]
    name: str = "H"
    coset_key: Callable[[Elem], Any] | None = None
    _windows: dict = field(default_factory=dict, repr=False)

    def induced_norm(self, h: Elem) -> Fraction:
        return self.ambient.norm(self.inclusion(h))

    def window(self, r: Any) -> Window:
        """Elements ``h`` with ``|inclusion(h)|_G <= r``, carrying the induced norm."""
        r = Fraction(r)
        got = self._windows.get(r)
        if got is None:
            gwin = self.ambient.ball(r)
            norms = {}
            for x, n in zip(gwin.elements, gwin.norms):
                if self.member(x):
                    norms[self.retract(x)] = n
            got = Window.from_norms(self.model, r, norms)
            got.norm_fn = self.induced_norm
            got.induced_by = self.inclusion
            self._windows[r] = got
        return got

    def include_set(self, hs) -> frozenset:
        return frozenset(self.inclusion(h) for h in hs)

    def meet(self, xs) -> frozenset:
        """``xs ∩ H`` expressed in ``H`` normal forms."""
        return frozenset(self.retract(x) for x in xs if self.member(x))

    def same_coset(self, g: Elem, g2: Elem) -> bool:
        return self.member(self.ambient.mul(self.ambient.inv(g), g2))


def _sub(ambient, model, images, fast, member, retract, name, coset_key=None) -> Subgroup:
    inc = GroupHom.from_images(model, ambient, images, name=f"inclusion[{name}]", fast=fast)
    return Subgroup(ambient, model, inc, member, retract, name, coset_key)


def coordinate_subgroup(ambient: FreeAbelian, i: int = 0) -> Subgroup:
    """``Z`` embedded as coordinate axis ``i`` of ``Z^n``."""
    n = ambient.rank
    H = Integers()

    def inc(t):
        v = [0] * n
        v[i] = t
        return tuple(v)

    def member(x):
        return all(a == 0 for j, a in enumerate(x) if j != i)

    def key(x):
        return tuple(0 if j == i else a for j, a in enumerate(x))

    return _sub(ambient, H, [inc(g) for g in H.generators.elements], inc, member, lambda x: x[i],
                f"axis{i}", key)


def multiples(ambient: Integers, m: int) -> Subgroup:
    """``mZ`` inside ``Z`` (abstractly ``Z``, ``t -> m t``)."""
    if m < 1:
        raise ConfigError("multiples need m >= 1")
    H = Integers()
    return _sub(ambient, H, [m * g for g in H.generators.elements], lambda t: m * t,
                lambda x: x % m == 0, lambda x: x // m, f"{m}Z", lambda x: x % m)


def cyclic_letter_subgroup(ambient: FreeGroup, letter: str = "a") -> Subgroup:
    """``<letter>`` inside a free group, abstractly ``Z``."""
    lo, up = letter.lower(), letter.upper()
    H = Integers()

    def inc(t):
        return lo * t if t >= 0 else up * (-t)

    def member(x):
        return all(c == lo for c in x) or all(c == up for c in x)

    def retract(x):
        return len(x) if (x and x[0] == lo) else -len(x)

    def key(x):
        return x.rstrip(lo + up)

    return _sub(ambient, H, [inc(g) for g in H.generators.elements], inc, member, retract, f"<{lo}>", key)


def dyadic_subgroup(ambient: Dyadic, j: int) -> Subgroup:
    """``<2^-j>`` inside the truncated dyadic group, abstractly ``Z``."""
    if not 0 <= j <= ambient.kmax:
        raise ConfigError(f"need 0 <= j <= kmax, got {j}")
    H = Integers()
    unit = Fraction(1, 1 << j)
    step = 1 << (ambient.kmax - j)

    def member(x):
        return (x * (1 << j)).denominator == 1

    def key(x):
        return int(x * (1 << ambient.kmax)) % step

    return _sub(ambient, H, [g * unit for g in H.generators.elements], lambda t: t * unit, member,
                lambda x: int(x * (1 << j)), f"<2^-{j}>", key)


def trivial_subgroup(ambient: GroupModel) -> Subgroup:
    H = Cyclic(1)
    e = ambient.identity()
    return _sub(ambient, H, [], lambda t: e, lambda x: x == e, lambda x: 0, "1", lambda x: x)


def whole_group(ambient: GroupModel) -> Subgroup:
    return _sub(ambient, ambient, ambient.generators.elements, lambda x: x, lambda x: True, lambda x: x,
                "G", lambda x: 0)


def kernel_elements(phi: GroupHom, win: Window) -> list:
    e = phi.target.identity()
    return [x for x, y in zip(win.elements, phi.on_window(win)) if y == e]


def random_window_elements(win: Window, count: int, rng: random.Random) -> list:
    idx = rng.sample(range(len(win)), min(count, len(win)))
    return [win.elements[i] for i in sorted(idx)]


__all__ = [
    "GroupHom",
    "ImageGroup",
    "Subgroup",
    "abelianization",
    "check_homomorphism",
    "constant_hom",
    "coordinate_subgroup",
    "cyclic_letter_subgroup",
    "dyadic_subgroup",
    "hom_from_json",
    "identity_hom",
    "kernel_elements",
    "multiples",
    "projection",
    "trivial_subgroup",
    "whole_group",
]
