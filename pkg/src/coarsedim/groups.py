"""Discrete group models with canonical normal forms.

Every model works on *normal forms*: hashable Python values for which
equality of group elements is equality of values.

=================  ==========================  =====================
model              normal form                 string form
=================  ==========================  =====================
``Integers``       ``int``                     ``"-3"``
``FreeAbelian(n)`` ``tuple[int, ...]``         ``"(1,0)"``
``Cyclic(m)``      ``int`` in ``[0, m)``       ``"4"``
``FreeGroup(k)``   reduced ``str``             ``"aB"`` (``B = b^-1``),
                   (uppercase = inverse)       identity ``"1"``
``Dyadic(K)``      ``Fraction``                ``"3/4"``
``DirectProduct``  ``tuple`` of components     ``"[(1,0);aB]"``
=================  ==========================  =====================

``Cyclic(1)`` doubles as the trivial group.  Hot loops call the unchecked
``mul``/``inv``; the public ``multiply`` validates its arguments.
"""

from __future__ import annotations

import json
import math
import re
import string
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Hashable, Iterable, Sequence

from .errors import ConfigError, ModelMismatchError

Elem = Hashable

DEFAULT_BALL_CAP = 10**6
DEFAULT_SEARCH_CAP = 10**6

#: caps used when a call does not pass its own; see ``set_default_caps``
CAPS = {"ball": DEFAULT_BALL_CAP, "search": DEFAULT_SEARCH_CAP}


def set_default_caps(ball: int | None = None, search: int | None = None) -> None:
    if ball is not None:
        if ball < 1:
            raise ConfigError("ball cap must be positive")
        CAPS["ball"] = ball
    if search is not None:
        if search < 1:
            raise ConfigError("search cap must be positive")
        CAPS["search"] = search

_SEARCH_CACHES: dict = {}


def clear_search_caches() -> None:
    """Drop all cached windows and norms (frees memory after large enumerations)."""
    _SEARCH_CACHES.clear()


def as_fraction(value: Any) -> Fraction:
    if isinstance(value, float):
        raise TypeError("weights and radii must be exact (int, Fraction or str), not float")
    return Fraction(value)


@dataclass(frozen=True)
class WeightedGeneratingSet:
    """Symmetric generating set with positive rational weights.

    ``entries`` is ordered; generator ``j`` of a model means ``entries[j]``.
    """

    entries: tuple[tuple[Elem, Fraction], ...]

    @classmethod
    def build(cls, model: "GroupModel", pairs: Iterable[tuple[Elem, Any]], symmetrize: bool = False):
        seen: dict = {}
        for g, w in pairs:
            w = as_fraction(w)
            if not model.is_element(g):
                raise ModelMismatchError(f"generator {g!r} is not an element of {model.name}")
            if g == model.identity():
                raise ConfigError("the identity is never a generator")
            if w <= 0:
                raise ConfigError(f"generator weight must be positive, got {w}")
            if g in seen and seen[g] != w:
                raise ConfigError(f"generator {model.format(g)} listed with two weights")
            seen[g] = w
            if symmetrize:
                gi = model.inv(g)
                if gi in seen and seen[gi] != w:
                    raise ConfigError(f"weight(s) != weight(s^-1) for {model.format(g)}")
                seen[gi] = w
        for g, w in seen.items():
            gi = model.inv(g)
            if gi not in seen:
                raise ConfigError(f"generating set is not symmetric: missing inverse of {model.format(g)}")
            if seen[gi] != w:
                raise ConfigError(f"weight(s) != weight(s^-1) for {model.format(g)}")
        return cls(tuple(seen.items()))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def elements(self) -> list:
        return [g for g, _ in self.entries]

    @property
    def weights(self) -> list[Fraction]:
        return [w for _, w in self.entries]

    def weight_of(self, g) -> Fraction:
        for s, w in self.entries:
            if s == g:
                return w
        raise KeyError(g)

    def scaled(self) -> tuple[int, list[int]]:
        """Common denominator ``D`` and integer weights ``w * D``."""
        d = 1
        for w in self.weights:
            d = d * w.denominator // math.gcd(d, w.denominator)
        return d, [int(w * d) for w in self.weights]


class GroupModel:
    """Interface shared by all group models.

    Subclasses are frozen dataclasses.  They implement ``identity``, ``mul``,
    ``inv``, ``is_element``, ``format``, ``parse``, ``standard_generators``
    and ``params``.  A subclass may store custom generators in a ``gens``
    field (``None`` means the standard set).
    """

    kind = "abstract"
    #: free-group style models whose geodesic paths between ball elements stay in the ball
    tree_convex = False

    # -- group structure -------------------------------------------------
    def identity(self) -> Elem:
        raise NotImplementedError

    def mul(self, x: Elem, y: Elem) -> Elem:
        raise NotImplementedError

    def inv(self, x: Elem) -> Elem:
        raise NotImplementedError

    def is_element(self, x: Elem) -> bool:
        raise NotImplementedError

    def format(self, x: Elem) -> str:
        raise NotImplementedError

    def parse(self, s: str) -> Elem:
        raise NotImplementedError

    def standard_generators(self) -> list[tuple[Elem, Fraction]]:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    @property
    def order(self) -> int | None:
        """Group order, ``None`` for infinite groups."""
        return None

    # lattice vectorization (abelian models); None means "not supported"
    def lattice_moduli(self) -> tuple[int | None, ...] | None:
        return None

    def lattice_vec(self, x: Elem) -> tuple[int, ...]:
        raise NotImplementedError

    # -- derived -----------------------------------------------------------
    @property
    def name(self) -> str:
        p = self.params()
        inner = ",".join(f"{k}={v}" for k, v in p.items() if k != "kind")
        return f"{p['kind']}({inner})"

    @cached_property
    def generators(self) -> WeightedGeneratingSet:
        custom = getattr(self, "gens", None)
        pairs = custom if custom is not None else self.standard_generators()
        return WeightedGeneratingSet.build(self, pairs)

    @property
    def _search_cache(self) -> dict:
        # shared by equal models, so separately constructed copies reuse windows
        return _SEARCH_CACHES.setdefault(self, {})

    @property
    def uses_standard_generators(self) -> bool:
        return getattr(self, "gens", None) is None

    def group_key(self) -> tuple:
        """Identifies the abstract group, ignoring the choice of generators."""
        p = dict(self.params())
        return tuple(sorted((k, json.dumps(v, sort_keys=True)) for k, v in p.items()))

    def same_group(self, other: "GroupModel") -> bool:
        return self is other or self.group_key() == other.group_key()

    def check(self, *xs: Elem) -> None:
        for x in xs:
            if not self.is_element(x):
                raise ModelMismatchError(f"{x!r} is not a normal form of {self.name}")

    def multiply(self, g: Elem, h: Elem) -> Elem:
        self.check(g, h)
        return self.mul(g, h)

    def invert(self, g: Elem) -> Elem:
        self.check(g)
        return self.inv(g)

    def conj(self, g: Elem, x: Elem) -> Elem:
        """``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    def word_product(self, word: Sequence[int]) -> Elem:
        gens = self.generators.elements
        x = self.identity()
        for j in word:
            x = self.mul(x, gens[j])
        return x

    def element(self, s: str | Elem) -> "GroupElement":
        x = self.parse(s) if isinstance(s, str) else s
        self.check(x)
        return GroupElement(self, x)

    def with_generators(self, pairs: Iterable[tuple[Elem, Any]]) -> "GroupModel":
        gs = WeightedGeneratingSet.build(self, pairs)
        return _replace_gens(self, gs.entries)

    def norm(self, x: Elem, budget: int | None = None) -> Fraction:
        from .windows import weighted_norm

        return weighted_norm(self, x, budget=budget)

    def ball(self, r: Any, cap: int | None = None):
        from .windows import ball

        return ball(self, r, cap=cap)

    def factor(self, x: Elem, budget: int | None = None) -> list[int]:
        """A geodesic word (generator indices) representing ``x``."""
        from .windows import geodesic_word

        return geodesic_word(self, x, budget=budget)

    def to_json(self) -> dict:
        d = dict(self.params())
        custom = getattr(self, "gens", None)
        if custom is not None:
            d["generators"] = [{"gen": self.format(g), "weight": str(w)} for g, w in custom]
        return d


def _replace_gens(model: GroupModel, entries) -> GroupModel:
    from dataclasses import replace

    return replace(model, gens=tuple(entries))


@dataclass(frozen=True)
class GroupElement:
    """An element bound to its model; supports ``*``, ``inverse()`` and ``str``."""

    model: GroupModel
    nf: Elem

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.model, self.model.inv(self.nf))

    def norm(self) -> Fraction:
        return self.model.norm(self.nf)

    def __str__(self) -> str:
        return self.model.format(self.nf)


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    """Normalized product of two elements of the same model."""
    if not g.model.same_group(h.model):
        raise ModelMismatchError(f"cannot multiply elements of {g.model.name} and {h.model.name}")
    return GroupElement(g.model, g.model.multiply(g.nf, h.nf))


# ---------------------------------------------------------------------------
# concrete models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Integers(GroupModel):
    gens: tuple | None = None
    kind = "integers"

    def identity(self):
        return 0

    def mul(self, x, y):
        return x + y

    def inv(self, x):
        return -x

    def is_element(self, x):
        return isinstance(x, int) and not isinstance(x, bool)

    def format(self, x):
        return str(x)

    def parse(self, s):
        try:
            return int(str(s).strip())
        except ValueError as exc:
            raise ConfigError(f"bad integer {s!r}") from exc

    def standard_generators(self):
        return [(1, Fraction(1)), (-1, Fraction(1))]

    def params(self):
        return {"kind": "integers"}

    def lattice_moduli(self):
        return (None,)

    def lattice_vec(self, x):
        return (x,)


@dataclass(frozen=True)
class FreeAbelian(GroupModel):
    rank: int = 2
    gens: tuple | None = None
    kind = "free_abelian"

    def __post_init__(self):
        if self.rank < 1:
            raise ConfigError("free abelian rank must be >= 1")

    def identity(self):
        return (0,) * self.rank

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv(self, x):
        return tuple(-a for a in x)

    def is_element(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == self.rank
            and all(isinstance(a, int) and not isinstance(a, bool) for a in x)
        )

    def format(self, x):
        return "(" + ",".join(str(a) for a in x) + ")"

    def parse(self, s):
        body = str(s).strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        try:
            x = tuple(int(p) for p in body.split(",") if p.strip() != "")
        except ValueError as exc:
            raise ConfigError(f"bad vector {s!r}") from exc
        if len(x) != self.rank:
            raise ModelMismatchError(f"{s!r} does not have rank {self.rank}")
        return x

    def standard_generators(self):
        out = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            out.append((tuple(e), Fraction(1)))
            e[i] = -1
            out.append((tuple(e), Fraction(1)))
        return out

    def params(self):
        return {"kind": "free_abelian", "rank": self.rank}

    def lattice_moduli(self):
        return (None,) * self.rank

    def lattice_vec(self, x):
        return x


@dataclass(frozen=True)
class Cyclic(GroupModel):
    """Finite cyclic group Z/m; ``Cyclic(1)`` is the trivial group."""

    modulus: int = 2
    gens: tuple | None = None
    kind = "cyclic"

    def __post_init__(self):
        if self.modulus < 1:
            raise ConfigError("cyclic modulus must be >= 1")

    def identity(self):
        return 0

    def mul(self, x, y):
        return (x + y) % self.modulus

    def inv(self, x):
        return (-x) % self.modulus

    def is_element(self, x):
        return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < self.modulus

    def format(self, x):
        return str(x)

    def parse(self, s):
        try:
            return int(str(s).strip()) % self.modulus
        except ValueError as exc:
            raise ConfigError(f"bad residue {s!r}") from exc

    def standard_generators(self):
        if self.modulus == 1:
            return []
        if self.modulus == 2:
            return [(1, Fraction(1))]
        return [(1, Fraction(1)), (self.modulus - 1, Fraction(1))]

    def params(self):
        return {"kind": "cyclic", "modulus": self.modulus}

    @property
    def order(self):
        return self.modulus

    def lattice_moduli(self):
        return (self.modulus,)

    def lattice_vec(self, x):
        return (x,)


def TrivialGroup() -> Cyclic:
    return Cyclic(1)


_LETTERS = string.ascii_lowercase


@dataclass(frozen=True)
class FreeGroup(GroupModel):
    """Free group on the first ``rank`` letters; uppercase letters are inverses."""

    rank: int = 2
    gens: tuple | None = None
    kind = "free"

    def __post_init__(self):
        if not 1 <= self.rank <= 26:
            raise ConfigError("free group rank must be between 1 and 26")

    @property
    def tree_convex(self):
        return self.uses_standard_generators

    @cached_property
    def alphabet(self) -> frozenset:
        lo = _LETTERS[: self.rank]
        return frozenset(lo + lo.upper())

    def identity(self):
        return ""

    def mul(self, x, y):
        n = min(len(x), len(y))
        i = 0
        lx = len(x)
        while i < n and x[lx - 1 - i] == y[i].swapcase():
            i += 1
        return x[: lx - i] + y[i:]

    def inv(self, x):
        return x[::-1].swapcase()

    def reduce(self, word: str) -> str:
        out: list[str] = []
        for c in word:
            if out and out[-1] == c.swapcase():
                out.pop()
            else:
                out.append(c)
        return "".join(out)

    def is_element(self, x):
        if not isinstance(x, str):
            return False
        if any(c not in self.alphabet for c in x):
            return False
        return all(x[i] != x[i + 1].swapcase() for i in range(len(x) - 1))

    def format(self, x):
        return x if x else "1"

    def parse(self, s):
        s = str(s).strip()
        if s in ("", "1", "e"):
            return ""
        if any(c not in self.alphabet for c in s):
            raise ModelMismatchError(f"{s!r} uses letters outside F{self.rank}")
        return self.reduce(s)

    def standard_generators(self):
        out = []
        for c in _LETTERS[: self.rank]:
            out.append((c, Fraction(1)))
            out.append((c.upper(), Fraction(1)))
        return out

    def params(self):
        return {"kind": "free", "rank": self.rank}


@dataclass(frozen=True)
class Dyadic(GroupModel):
    """Truncated dyadic rationals: generators ``±2^-k`` (``k <= kmax``) of weight ``k+1``.

    The generated group is ``2^-kmax Z``; elements are Fractions whose
    denominator divides ``2^kmax``.
    """

    kmax: int = 6
    gens: tuple | None = None
    kind = "dyadic"

    def __post_init__(self):
        if self.kmax < 0:
            raise ConfigError("dyadic kmax must be >= 0")

    def identity(self):
        return Fraction(0)

    def mul(self, x, y):
        return x + y

    def inv(self, x):
        return -x

    def is_element(self, x):
        return isinstance(x, Fraction) and (1 << self.kmax) % x.denominator == 0

    def format(self, x):
        return str(x)

    def parse(self, s):
        try:
            x = Fraction(str(s).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad dyadic rational {s!r}") from exc
        if not self.is_element(x):
            raise ModelMismatchError(f"{s!r} is not in 2^-{self.kmax} Z")
        return x

    def standard_generators(self):
        out = []
        for k in range(self.kmax + 1):
            g = Fraction(1, 1 << k)
            out.append((g, Fraction(k + 1)))
            out.append((-g, Fraction(k + 1)))
        return out

    def params(self):
        return {"kind": "dyadic", "kmax": self.kmax}

    def lattice_moduli(self):
        return (None,)

    def lattice_vec(self, x):
        return (int(x * (1 << self.kmax)),)


@dataclass(frozen=True)
class DirectProduct(GroupModel):
    factors: tuple = ()
    gens: tuple | None = None
    kind = "product"

    def __post_init__(self):
        if len(self.factors) < 1:
            raise ConfigError("a direct product needs at least one factor")

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def inv(self, x):
        return tuple(f.inv(a) for f, a in zip(self.factors, x))

    def is_element(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == len(self.factors)
            and all(f.is_element(a) for f, a in zip(self.factors, x))
        )

    def format(self, x):
        return "[" + ";".join(f.format(a) for f, a in zip(self.factors, x)) + "]"

    def parse(self, s):
        body = str(s).strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ConfigError(f"product element must look like [x;y], got {s!r}")
        parts = _split_top(body[1:-1], ";")
        if len(parts) != len(self.factors):
            raise ModelMismatchError(f"{s!r} has {len(parts)} components, expected {len(self.factors)}")
        return tuple(f.parse(p) for f, p in zip(self.factors, parts))

    def standard_generators(self):
        out = []
        ident = self.identity()
        for i, f in enumerate(self.factors):
            for g, w in f.generators.entries:
                x = list(ident)
                x[i] = g
                out.append((tuple(x), w))
        return out

    def params(self):
        return {"kind": "product", "factors": [f.to_json() for f in self.factors]}

    @property
    def order(self):
        total = 1
        for f in self.factors:
            if f.order is None:
                return None
            total *= f.order
        return total

    def lattice_moduli(self):
        out: list = []
        for f in self.factors:
            m = f.lattice_moduli()
            if m is None:
                return None
            out.extend(m)
        return tuple(out)

    def lattice_vec(self, x):
        out: list = []
        for f, a in zip(self.factors, x):
            out.extend(f.lattice_vec(a))
        return tuple(out)


def _split_top(body: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for c in body:
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        if c == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    parts.append("".join(cur))
    return parts


# ---------------------------------------------------------------------------
# JSON descriptions and presets
# ---------------------------------------------------------------------------

_PRESET_RE = [
    (re.compile(r"^Z$"), lambda m: Integers()),
    (re.compile(r"^Z(\d+)$"), lambda m: FreeAbelian(int(m.group(1)))),
    (re.compile(r"^F(\d+)$"), lambda m: FreeGroup(int(m.group(1)))),
    (re.compile(r"^Z_mod_(\d+)$"), lambda m: Cyclic(int(m.group(1)))),
    (re.compile(r"^Dyadic\((\d+)\)$"), lambda m: Dyadic(int(m.group(1)))),
    (re.compile(r"^Dyadic$"), lambda m: Dyadic(6)),
]


def preset(name: str) -> GroupModel:
    """Presets: ``Z``, ``Z2``, ``Z3``, ``F2``, ``F3``, ``Z_mod_m``, ``Dyadic(Kmax)``."""
    for rx, make in _PRESET_RE:
        m = rx.match(name.strip())
        if m:
            return make(m)
    raise ConfigError(f"unknown group preset {name!r}")


def model_from_json(desc: dict | str) -> GroupModel:
    """Build a model from ``{"kind": ..., ...}`` (or a JSON string / preset name)."""
    if isinstance(desc, str):
        s = desc.strip()
        if s.startswith("{"):
            try:
                desc = json.loads(s)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"bad group JSON: {exc}") from exc
        else:
            return preset(s)
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("group description must be an object with a 'kind' field")
    kind = desc["kind"]
    try:
        if kind == "integers":
            model: GroupModel = Integers()
        elif kind == "free_abelian":
            model = FreeAbelian(int(desc["rank"]))
        elif kind == "free":
            model = FreeGroup(int(desc["rank"]))
        elif kind == "cyclic":
            model = Cyclic(int(desc["modulus"]))
        elif kind == "trivial":
            model = Cyclic(1)
        elif kind == "dyadic":
            model = Dyadic(int(desc.get("kmax", 6)))
        elif kind == "product":
            model = DirectProduct(tuple(model_from_json(f) for f in desc["factors"]))
        elif kind == "quotient":
            from .homs import hom_from_json

            model = hom_from_json(desc["hom"]).image_model()
        else:
            raise ConfigError(f"unknown group kind {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"group description missing field {exc}") from exc
    if "generators" in desc:
        pairs = [(model.parse(e["gen"]), as_fraction(str(e["weight"]))) for e in desc["generators"]]
        model = model.with_generators(pairs)
    return model
