"""Colored covers, certificates, and their verification on a window.

Cells are finite sets of normal forms.  For vectorized checks each color
class is split into *layers* of pairwise disjoint cells; a layer is an int
array over window positions holding the cell index (``-1`` for none).  The
arrays carry one extra ``-1`` slot at the end, so a shifted position of
``-1`` (outside the window) reads as "no cell".

Conditions checked:

* coverage: every window element lies in a cell;
* ``K``-disjointness: distinct same-colored cells ``A, B`` have
  ``(B^-1 A) ∩ K = ∅``;
* uniform bound: every ``A^-1 A`` lies in the ball of the declared radius;
* multiplicity, Lebesgue (``gK`` inside one cell) and B-form counts
  (cells meeting ``gK``), quantified over the core window
  ``B(r - max|k|)`` so that every translate ``gK`` stays inside known data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .coarse import GapSet
from .errors import ConfigError, PreconditionError
from .groups import GroupModel, as_fraction, model_from_json
from .reports import Report, combine
from .windows import Window

MAX_WITNESSES = 20


@dataclass(frozen=True)
class Cell:
    color: int
    members: frozenset
    #: optional point used for a quick diameter bound: diam <= 2 max |center^-1 a|
    center: Any = None


class _Layer:
    __slots__ = ("color", "labels", "cells")

    def __init__(self, color: int, size: int):
        self.color = color
        self.labels = np.full(size + 1, -1, dtype=np.int64)
        self.cells: list[int] = []


class Cover:
    """Colored cells over a window.

    ``window`` defaults to the smallest ball containing every member, which
    makes all checks exact for small explicit covers.
    """

    def __init__(self, model: GroupModel, cells: Iterable[Cell], window: Window | None = None):
        self.model = model
        self.cells = list(cells)
        for i, c in enumerate(self.cells):
            if not c.members:
                raise ConfigError(f"cell {i} is empty")
            if c.color < 0:
                raise ConfigError(f"cell {i} has negative color {c.color}")
        if window is None:
            r = max((model.norm(x) for c in self.cells for x in c.members), default=Fraction(0))
            window = model.ball(r)
        self.window = window
        self._layers: list[_Layer] | None = None
        self._positions: list[np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.cells)

    def __repr__(self) -> str:
        return f"Cover({self.model.name}, cells={len(self.cells)}, colors={self.n_colors}, window={self.window!r})"

    @property
    def n_colors(self) -> int:
        return max((c.color for c in self.cells), default=-1) + 1

    def color_classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.cells):
            out.setdefault(c.color, []).append(i)
        return out

    def positions(self) -> list[np.ndarray]:
        """Window positions of each cell's members (members outside the window dropped)."""
        if self._positions is None:
            idx = self.window.index
            out = []
            for c in self.cells:
                p = [idx[x] for x in c.members if x in idx]
                out.append(np.array(sorted(p), dtype=np.int64))
            self._positions = out
        return self._positions

    @property
    def outside_members(self) -> int:
        return sum(len(c.members) for c in self.cells) - sum(len(p) for p in self.positions())

    def layers(self) -> list[_Layer]:
        if self._layers is None:
            n = len(self.window)
            layers: list[_Layer] = []
            by_color: dict[int, list[_Layer]] = {}
            for i, pos in enumerate(self.positions()):
                color = self.cells[i].color
                for layer in by_color.setdefault(color, []):
                    if not (layer.labels[pos] >= 0).any():
                        break
                else:
                    layer = _Layer(color, n)
                    by_color[color].append(layer)
                    layers.append(layer)
                layer.labels[pos] = i
                layer.cells.append(i)
            self._layers = layers
        return self._layers

    def recolored(self, mapping) -> "Cover":
        """New cover with colors ``mapping(c)`` (callable or dict)."""
        f = mapping if callable(mapping) else mapping.__getitem__
        cells = [Cell(f(c.color), c.members, c.center) for c in self.cells]
        return Cover(self.model, cells, self.window)

    def core_positions(self, K: Iterable) -> tuple[np.ndarray, Fraction]:
        kmax = max((self.window.norm_of(k) for k in K), default=Fraction(0))
        core_r = self.window.radius - kmax
        if core_r < 0:
            return np.zeros(0, dtype=np.int64), core_r
        return np.nonzero(self.window.core_mask(core_r))[0], core_r

    def to_json(self) -> dict:
        f = self.model.format
        cells = []
        for c in self.cells:
            d: dict = {"color": c.color, "members": [f(x) for x in sorted(c.members)]}
            if c.center is not None:
                d["center"] = f(c.center)
            cells.append(d)
        d = {"group": self.model.to_json(), "window_r": str(self.window.radius), "cells": cells}
        inc = self.window.induced_by
        if inc is not None:
            d["norm"] = {"induced_by": inc.to_json(),
                         "window_norms": {f(x): str(n) for x, n in zip(self.window.elements, self.window.norms)}}
        return d


def _elements(K) -> list:
    if isinstance(K, GapSet):
        return sorted(K.elements)
    return sorted(K)


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def coverage_check(cover: Cover) -> Report:
    covered = np.zeros(len(cover.window) + 1, dtype=bool)
    for layer in cover.layers():
        covered |= layer.labels >= 0
    miss = np.nonzero(~covered[:-1])[0]
    fmt = cover.model.format
    wit = sorted(cover.window.elements[i] for i in miss[:MAX_WITNESSES])
    return Report("coverage", len(miss) == 0, witnesses=[fmt(x) for x in wit],
                  details={"uncovered": int(len(miss)), "window_r": cover.window.radius})


def k_disjoint_check(cover: Cover, K) -> Report:
    """Same-colored distinct cells ``A, B`` satisfy ``(B^-1 A) ∩ K = ∅``.

    A failure lists ``k`` in ``B^-1 A ∩ K`` with the pair (sorted by ``k``).
    Members outside the cover's window are not examined.
    """
    Ks = _elements(K)
    win = cover.window
    fmt = cover.model.format
    by_color: dict[int, list[_Layer]] = {}
    for layer in cover.layers():
        by_color.setdefault(layer.color, []).append(layer)
    failures = []
    for k in Ks:
        sh = np.append(win.shift(k), -1)
        for color, layers in sorted(by_color.items()):
            for L1 in layers:
                src = np.nonzero(L1.labels[:-1] >= 0)[0]
                b_lab = L1.labels[src]
                tgt = sh[src]
                for L2 in layers:
                    a_lab = L2.labels[tgt]
                    bad = np.nonzero((a_lab >= 0) & (a_lab != b_lab))[0]
                    if len(bad):
                        j = bad[0]
                        failures.append((k, int(a_lab[j]), int(b_lab[j]), win.elements[src[j]], color))
                        break
    failures.sort(key=lambda t: (t[0], t[1], t[2]))
    wit = [{"k": fmt(k), "cells": [a, b], "b": fmt(bx), "color": c} for k, a, b, bx, c in failures[:MAX_WITNESSES]]
    return Report("k_disjoint", not failures, witnesses=wit,
                  details={"scale_size": len(Ks), "window_r": win.radius, "outside_members": cover.outside_members})


def _cell_diameter_lattice(model: GroupModel, members: list, win: Window) -> Fraction | None:
    vecs = np.array([model.lattice_vec(x) for x in members], dtype=np.int64)
    vecs = vecs.reshape(len(members), -1)
    span = (vecs.max(axis=0) - vecs.min(axis=0)) if len(members) else np.zeros(vecs.shape[1], dtype=np.int64)
    width = 2 * span + 1
    mult = np.ones(vecs.shape[1], dtype=np.int64)
    for i in range(vecs.shape[1] - 2, -1, -1):
        mult[i] = mult[i + 1] * width[i + 1]
    codes: set = set()
    chunk = max(1, 4_000_000 // max(1, len(members)))
    for i in range(0, len(members), chunk):
        d = vecs[None, :, :] - vecs[i:i + chunk, None, :]
        c = ((d.reshape(-1, vecs.shape[1]) + span) * mult).sum(axis=1)
        codes.update(np.unique(c).tolist())
    arr = np.array(sorted(codes), dtype=np.int64)
    diffs = np.zeros((len(arr), vecs.shape[1]), dtype=np.int64)
    rest = arr.copy()
    for i in range(vecs.shape[1]):
        diffs[:, i] = rest // mult[i]
        rest = rest % mult[i]
    diffs -= span
    pos = win.lattice_lookup(diffs)
    if (pos < 0).any():
        return None
    return max(win.norms[int(p)] for p in np.unique(pos))


def cell_diameter(model: GroupModel, members: Iterable, win: Window, _cache: dict | None = None) -> Fraction:
    """Exact ``max |a^-1 b|`` over ``a, b`` in the cell."""
    members = sorted(members)
    if not members:
        return Fraction(0)
    a0i = model.inv(members[0])
    shape = frozenset(model.mul(a0i, a) for a in members)
    if _cache is not None and shape in _cache:
        return _cache[shape]
    val = None
    if model.lattice_moduli() is not None:
        val = _cell_diameter_lattice(model, members, win)
    if val is None:
        inv, mul = model.inv, model.mul
        diffs = {mul(inv(a), b) for a in members for b in members}
        val = max(win.norm_of(d) for d in diffs)
    if _cache is not None:
        _cache[shape] = val
    return val


def uniform_bound(cover: Cover, model: GroupModel | None = None) -> Fraction:
    """Least ``r`` with every ``A^-1 A`` inside ``B(r)`` (exact)."""
    model = model or cover.model
    cache: dict = {}
    return max((cell_diameter(model, c.members, cover.window, cache) for c in cover.cells), default=Fraction(0))


def bound_check(cover: Cover, declared: Any) -> Report:
    """Every cell has diameter ``<= declared``.

    A cell with a center is accepted when ``2 max |center^-1 a| <= declared``
    (triangle inequality); otherwise its exact diameter is computed.
    """
    declared = as_fraction(declared)
    m, win = cover.model, cover.window
    inv, mul = m.inv, m.mul
    cache: dict = {}
    bad = []
    by_center = exact = 0
    worst = Fraction(0)
    for i, c in enumerate(cover.cells):
        if c.center is not None:
            ci = inv(c.center)
            rad = max(win.norm_of(mul(ci, a)) for a in c.members)
            if 2 * rad <= declared:
                by_center += 1
                worst = max(worst, 2 * rad)
                continue
        d = cell_diameter(m, c.members, win, cache)
        exact += 1
        worst = max(worst, d)
        if d > declared:
            bad.append({"cell": i, "diameter": str(d)})
    return Report("uniform_bound", not bad, witnesses=bad[:MAX_WITNESSES],
                  details={"declared": declared, "certified_max": worst, "cells_by_center": by_center,
                           "cells_exact": exact})


def multiplicity(cover: Cover, positions: np.ndarray | None = None) -> int:
    """Largest number of cells containing one window element (optionally over ``positions``)."""
    counts = np.zeros(len(cover.window) + 1, dtype=np.int64)
    for layer in cover.layers():
        counts += layer.labels >= 0
    counts = counts[:-1]
    if positions is not None:
        counts = counts[positions]
    return int(counts.max()) if len(counts) else 0


def lebesgue_check(cover: Cover, K) -> Report:
    """For every core ``g``: some cell contains the whole translate ``gK``."""
    Ks = _elements(K)
    core, core_r = cover.core_positions(Ks)
    win = cover.window
    if not Ks:
        return Report("lebesgue", True, details={"core_r": core_r, "tested": int(len(core))})
    ok = np.zeros(len(core), dtype=bool)
    shifts = [np.append(win.shift(k), -1)[core] for k in Ks]
    for layer in cover.layers():
        first = layer.labels[shifts[0]]
        good = first >= 0
        for sh in shifts[1:]:
            good &= layer.labels[sh] == first
        ok |= good
    fail = core[~ok]
    fmt = cover.model.format
    wit = sorted(win.elements[i] for i in fail)
    return Report("lebesgue", len(fail) == 0, witnesses=[fmt(x) for x in wit[:MAX_WITNESSES]],
                  details={"core_r": core_r, "tested": int(len(core)), "failures": int(len(fail)),
                           "failing": [fmt(x) for x in wit] if len(wit) <= 200 else None})


def b_form_check(cover: Cover, K, bound: int | None = None) -> Report:
    """For every core ``g``: at most ``bound`` (default: number of colors) cells meet ``gK``."""
    Ks = _elements(K)
    bound = cover.n_colors if bound is None else bound
    core, core_r = cover.core_positions(Ks)
    win = cover.window
    counts = np.zeros(len(core), dtype=np.int64)
    if Ks and len(core):
        shifts = np.stack([np.append(win.shift(k), -1)[core] for k in Ks])
        for layer in cover.layers():
            M = np.sort(layer.labels[shifts], axis=0)
            distinct = (M[0] >= 0).astype(np.int64)
            if len(M) > 1:
                distinct += ((M[1:] != M[:-1]) & (M[1:] >= 0)).sum(axis=0)
            counts += distinct
    worst = int(counts.max()) if len(counts) else 0
    fail = core[counts > bound]
    fmt = cover.model.format
    wit = sorted(win.elements[i] for i in fail[:MAX_WITNESSES])
    return Report("b_form", worst <= bound, witnesses=[fmt(x) for x in wit],
                  details={"max_count": worst, "bound": bound, "core_r": core_r, "tested": int(len(core))})


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    """A colored cover with its scale ``K``, color count and declared uniform bound."""

    cover: Cover
    scale: GapSet
    colors: int
    uniform_bound_radius: Fraction
    report: Report | None = None
    trace: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def model(self) -> GroupModel:
        return self.cover.model

    @property
    def window(self) -> Window:
        return self.cover.window

    @property
    def passed(self) -> bool:
        return bool(self.report) if self.report is not None else False

    def to_json(self) -> dict:
        d = self.cover.to_json()
        d["scale"] = self.scale.to_json()
        d["colors"] = self.colors
        d["uniform_bound"] = str(self.uniform_bound_radius)
        if self.trace:
            d["trace"] = list(self.trace)
        if self.meta:
            d["meta"] = {k: _plain(v) for k, v in sorted(self.meta.items())}
        if self.report is not None:
            d["report"] = self.report.to_dict()
        return d


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


def verify_certificate(cert: Certificate) -> Report:
    """Coverage, per-color ``K``-disjointness and the declared uniform bound, on the window."""
    cover = cert.cover
    bad_colors = [i for i, c in enumerate(cover.cells) if not 0 <= c.color < cert.colors]
    cells = Report("cells", not bad_colors, witnesses=bad_colors[:MAX_WITNESSES],
                   details={"cells": len(cover.cells), "colors": cert.colors})
    children = [cells, coverage_check(cover), k_disjoint_check(cover, cert.scale),
                bound_check(cover, cert.uniform_bound_radius)]
    rep = combine("certificate", children, window_r=cover.window.radius, colors=cert.colors,
                  scale_size=len(cert.scale), group=cover.model.name)
    cert.report = rep
    return rep


def recolor(cert: Certificate, mapping, colors: int | None = None) -> Certificate:
    """Certificate with cell colors relabeled (``mapping`` callable or dict); unverified."""
    cover = cert.cover.recolored(mapping)
    n = cover.n_colors if colors is None else colors
    return Certificate(cover, cert.scale, n, cert.uniform_bound_radius, None, list(cert.trace) + ["recolored"],
                       dict(cert.meta))


# ---------------------------------------------------------------------------
# A -> B -> C conversions
# ---------------------------------------------------------------------------


def convert_A_to_B(cover: Cover, K) -> Report:
    """From ``K^-1 K``-disjoint color classes conclude: each ``gK`` meets at most ``n+1`` cells.

    Raises ``PreconditionError`` when the A-form fails at ``K^-1 K`` (the
    error's report still carries the measured B-form count).
    """
    m = cover.model
    Ks = _elements(K)
    Kt = sorted({m.mul(m.inv(a), b) for a in Ks for b in Ks})
    a_form = combine("a_form", [coverage_check(cover), k_disjoint_check(cover, Kt)], scale="K^-1 K")
    b_form = b_form_check(cover, Ks)
    rep = combine("A_to_B", [a_form, b_form])
    if not a_form:
        raise PreconditionError("cover is not K^-1 K-disjoint per color", report=rep)
    return rep


@dataclass
class CForm:
    cover: Cover
    multiplicity: Report
    lebesgue: Report
    report: Report


def convert_B_to_C(cover: Cover, K) -> CForm:
    """Thicken every cell ``V`` to ``VK`` (truncated to the window).

    Requires the B-form at ``K^-1``; the result is verified for multiplicity
    ``<= n+1`` and the Lebesgue property at ``K`` on the core window.
    """
    m = cover.model
    Ks = _elements(K)
    Kinv = sorted(m.inv(k) for k in Ks)
    pre = b_form_check(cover, Kinv)
    if not pre:
        raise PreconditionError("cover fails the B-form at K^-1", report=pre)
    win = cover.window
    labs, poss = [], []
    for layer in cover.layers():
        src = np.nonzero(layer.labels[:-1] >= 0)[0]
        for k in Ks:
            tgt = win.shift(k)[src]
            keep = tgt >= 0
            labs.append(layer.labels[src[keep]])
            poss.append(tgt[keep])
    lab = np.concatenate(labs) if labs else np.zeros(0, dtype=np.int64)
    pos = np.concatenate(poss) if poss else np.zeros(0, dtype=np.int64)
    order = np.lexsort((pos, lab))
    lab, pos = lab[order], pos[order]
    cells = []
    bounds = np.searchsorted(lab, np.arange(len(cover.cells) + 1))
    for i, c in enumerate(cover.cells):
        ps = np.unique(pos[bounds[i]:bounds[i + 1]])
        members = frozenset(win.elements[int(p)] for p in ps)
        if members:
            cells.append(Cell(c.color, members, c.center))
    thick = Cover(m, cells, win)
    core, core_r = thick.core_positions(Ks)
    mult = multiplicity(thick, core)
    n1 = cover.n_colors
    mrep = Report("multiplicity", mult <= n1, details={"multiplicity": mult, "bound": n1, "core_r": core_r})
    lrep = lebesgue_check(thick, Ks)
    rep = combine("B_to_C", [pre, mrep, lrep])
    return CForm(thick, mrep, lrep, rep)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _induced_window(model: GroupModel, window_r: Fraction, desc: dict) -> Window:
    """Window of a subgroup carrying the norm induced through its inclusion hom.

    Every stated norm is recomputed as ``|inclusion(h)|`` in the ambient
    group, and the window must contain the identity and be closed under
    generator steps that stay within the radius.
    """
    from .homs import hom_from_json

    inc = hom_from_json(desc["induced_by"])
    if not inc.source.same_group(model):
        raise ConfigError("induced norm: inclusion source differs from the certificate's group")
    amb = inc.target

    def induced(h):
        return amb.norm(inc(h))

    norms = {}
    for s, v in desc["window_norms"].items():
        h = model.parse(s)
        n = induced(h)
        if n != as_fraction(str(v)) or n > window_r:
            raise ConfigError(f"induced norm of {s} is {n}, not {v} (radius {window_r})")
        norms[h] = n
    if model.identity() not in norms:
        raise ConfigError("induced window lacks the identity")
    for h in list(norms):
        for g in model.generators.elements:
            y = model.mul(h, g)
            if y not in norms and induced(y) <= window_r:
                raise ConfigError(f"induced window is missing {model.format(y)}")
    win = Window.from_norms(model, window_r, norms)
    win.norm_fn = induced
    win.induced_by = inc
    return win


def certificate_from_json(d: dict, model: GroupModel | None = None, ball_cap: int | None = None) -> Certificate:
    """Inverse of ``Certificate.to_json`` (validating).  Raises ``ConfigError`` on malformed input."""
    if not isinstance(d, dict):
        raise ConfigError("certificate JSON must be an object")
    try:
        if model is None:
            model = model_from_json(d["group"])
        window_r = as_fraction(str(d["window_r"]))
        raw_cells = d["cells"]
        if not isinstance(raw_cells, list):
            raise ConfigError("'cells' must be a list")
        cells = []
        for i, c in enumerate(raw_cells):
            members = frozenset(model.parse(s) for s in c["members"])
            if not members:
                raise ConfigError(f"cell {i} is empty")
            color = c["color"]
            if not isinstance(color, int) or isinstance(color, bool):
                raise ConfigError(f"cell {i} has non-integer color {color!r}")
            center = model.parse(c["center"]) if c.get("center") is not None else None
            cells.append(Cell(color, members, center))
        win = _induced_window(model, window_r, d["norm"]) if "norm" in d else model.ball(window_r, cap=ball_cap)
        if "scale" in d:
            scale = GapSet(model, frozenset(model.parse(s) for s in d["scale"]))
        elif "scale_radius" in d:
            scale = GapSet(model, frozenset(model.ball(as_fraction(str(d["scale_radius"]))).elements))
        else:
            raise ConfigError("certificate needs 'scale' or 'scale_radius'")
        colors = int(d.get("colors", max((c.color for c in cells), default=-1) + 1))
        bound = as_fraction(str(d["uniform_bound"])) if "uniform_bound" in d else None
    except KeyError as exc:
        raise ConfigError(f"certificate JSON missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed certificate: {exc}") from exc
    cover = Cover(model, cells, win)
    if bound is None:
        bound = uniform_bound(cover)
    return Certificate(cover, scale, colors, bound, trace=list(d.get("trace", [])))


def load_certificate(path: str, **kw) -> Certificate:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return certificate_from_json(d, **kw)


def save_certificate(cert: Certificate, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(cert.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")


__all__ = [
    "CForm",
    "Cell",
    "Certificate",
    "Cover",
    "b_form_check",
    "bound_check",
    "cell_diameter",
    "certificate_from_json",
    "convert_A_to_B",
    "convert_B_to_C",
    "coverage_check",
    "k_disjoint_check",
    "lebesgue_check",
    "load_certificate",
    "multiplicity",
    "recolor",
    "save_certificate",
    "uniform_bound",
    "verify_certificate",
]
