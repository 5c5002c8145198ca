"""Weighted word norms, ball enumeration, and the ``Window`` data structure.

Norms are computed by uniform-cost search over normal forms.  Weights are
scaled to integers by their common denominator, so the search runs in exact
integer arithmetic (breadth-first when all weights agree).

A ``Window`` stores a ball together with its right Cayley graph
(``neighbors[i, j]`` is the index of ``elements[i] * s_j``), which lets
checks evaluate ``x * k`` for every window element ``x`` at once.
"""

from __future__ import annotations

import heapq
from collections import deque
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .errors import NotGeneratedError, ResourceLimitError, SearchBudgetError
from .groups import CAPS, Elem, GroupModel, as_fraction


class _Explored:
    __slots__ = ("nodes", "ids", "dist", "parent", "pgen", "settled", "rows", "scale")

    def __init__(self, scale):
        self.nodes: list = []
        self.ids: dict = {}
        self.dist: list[int] = []
        self.parent: list[int] = []
        self.pgen: list[int] = []
        self.settled: list[int] = []
        self.rows: list[list[int]] = []
        self.scale = scale


def _explore(model: GroupModel, *, limit: int | None = None, target: Elem = None,
             cap: int, record: bool = False, cap_error=ResourceLimitError) -> _Explored:
    """Uniform-cost search from the identity.

    ``limit`` (scaled integer) bounds the settled distance; with ``target``
    the search stops once the target is settled.  ``cap`` bounds the number
    of settled nodes.
    """
    gens = model.generators
    scale, w = gens.scaled()
    gen_elems = gens.elements
    mul = model.mul
    ex = _Explored(scale)
    e = model.identity()
    ex.nodes.append(e)
    ex.ids[e] = 0
    ex.dist.append(0)
    ex.parent.append(-1)
    ex.pgen.append(-1)
    ids, nodes, dist, parent, pgen = ex.ids, ex.nodes, ex.dist, ex.parent, ex.pgen
    have_target = target is not None
    ng = len(gen_elems)

    if len(set(w)) <= 1:
        w0 = w[0] if w else 1
        queue = deque([0])
        while queue:
            i = queue.popleft()
            x = nodes[i]
            d = dist[i]
            if limit is not None and d > limit:
                break
            ex.settled.append(i)
            if len(ex.settled) > cap:
                raise cap_error(f"search exceeded cap of {cap} elements")
            if have_target and x == target:
                return ex
            nd = d + w0
            grow = limit is None or nd <= limit
            row = [-1] * ng if record else None
            for j in range(ng):
                y = mul(x, gen_elems[j])
                yi = ids.get(y)
                if yi is None and grow:
                    yi = len(nodes)
                    ids[y] = yi
                    nodes.append(y)
                    dist.append(nd)
                    parent.append(i)
                    pgen.append(j)
                    queue.append(yi)
                if record and yi is not None:
                    row[j] = yi
            if record:
                ex.rows.append(row)
    else:
        heap = [(0, 0)]
        done: set = set()
        while heap:
            d, i = heapq.heappop(heap)
            if i in done or d != dist[i]:
                continue
            if limit is not None and d > limit:
                break
            done.add(i)
            x = nodes[i]
            ex.settled.append(i)
            if len(ex.settled) > cap:
                raise cap_error(f"search exceeded cap of {cap} elements")
            if have_target and x == target:
                return ex
            row = [-1] * ng if record else None
            for j in range(ng):
                y = mul(x, gen_elems[j])
                nd = d + w[j]
                yi = ids.get(y)
                if yi is None:
                    yi = len(nodes)
                    ids[y] = yi
                    nodes.append(y)
                    dist.append(nd)
                    parent.append(i)
                    pgen.append(j)
                    heapq.heappush(heap, (nd, yi))
                elif yi not in done and nd < dist[yi]:
                    dist[yi] = nd
                    parent[yi] = i
                    pgen[yi] = j
                    heapq.heappush(heap, (nd, yi))
                if record:
                    row[j] = yi
            if record:
                ex.rows.append(row)
    if have_target:
        raise NotGeneratedError(f"{model.format(target)} is not generated by the generating set of {model.name}")
    return ex


def _cached_window(model: GroupModel):
    return model._search_cache.get("window")


def weighted_norm(model: GroupModel, x: Elem, budget: int | None = None) -> Fraction:
    """Minimal total weight of a factorization of ``x`` into generators.

    Raises ``NotGeneratedError`` when the search exhausts a finite reachable
    set without meeting ``x``, and ``SearchBudgetError`` when the node budget
    runs out first.
    """
    model.check(x)
    win = _cached_window(model)
    if win is not None and x in win.index:
        return win.norm(x)
    memo = model._search_cache.setdefault("norms", {})
    if x in memo:
        return memo[x]
    cap = CAPS["search"] if budget is None else budget
    ex = _explore(model, target=x, cap=cap, cap_error=SearchBudgetError)
    val = Fraction(ex.dist[ex.ids[x]], ex.scale)
    memo[x] = val
    return val


def geodesic_word(model: GroupModel, x: Elem, budget: int | None = None) -> list[int]:
    """Generator indices of a minimal-weight word for ``x``."""
    model.check(x)
    cap = CAPS["search"] if budget is None else budget
    ex = _explore(model, target=x, cap=cap, cap_error=SearchBudgetError)
    word = []
    i = ex.ids[x]
    while ex.parent[i] >= 0:
        word.append(ex.pgen[i])
        i = ex.parent[i]
    word.reverse()
    return word


def ball(model: GroupModel, r: Any, cap: int | None = None) -> "Window":
    """All elements of weighted norm ``<= r`` with their norms.

    Sorted by (norm, normal form).  Raises ``ResourceLimitError`` beyond
    ``cap`` elements (default ``CAPS['ball']``, 10**6).
    """
    r = as_fraction(r)
    if r < 0:
        raise ValueError("ball radius must be nonnegative")
    cap = CAPS["ball"] if cap is None else cap
    cache = model._search_cache
    win = cache.get("window")
    if win is not None and win.radius >= r:
        if win.radius > r:
            subs = cache.setdefault("subs", {})
            if r not in subs:
                subs[r] = win.sub_window(r)
            win = subs[r]
        # a cached window still honours the caller's cap
        if len(win) > cap:
            raise ResourceLimitError(f"search exceeded cap of {cap} elements")
        return win
    scale, _ = model.generators.scaled()
    limit = int(r * scale)  # floor: norms are multiples of 1/scale
    ex = _explore(model, limit=limit, cap=cap, record=True)
    win = Window._from_explored(model, r, ex)
    cache["window"] = win
    cache["subs"] = {}
    return win


class Window:
    """A finite ball ``B(r)`` with norms and its right Cayley graph.

    ``elements`` is sorted by (norm, normal form).  ``neighbors[i, j]`` is the
    position of ``elements[i] * s_j`` (``-1`` when outside the window) and
    ``parent``/``parent_gen`` give a geodesic spanning tree rooted at the
    identity (``-1`` when the element is not reachable inside the window).
    """

    def __init__(self, model: GroupModel, radius: Fraction, elements: list, norms: list[Fraction],
                 neighbors: np.ndarray, parent: np.ndarray, parent_gen: np.ndarray):
        self.model = model
        self.radius = Fraction(radius)
        self.elements = tuple(elements)
        self.norms = tuple(norms)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.neighbors = neighbors
        self.parent = parent
        self.parent_gen = parent_gen
        self._shift_cache: dict = {}
        self._lattice = None
        self._norm_array = None
        #: norm for elements outside the window (defaults to the model's word norm)
        self.norm_fn = None
        #: inclusion hom when the norms are induced from an ambient group
        self.induced_by = None

    # -- construction ----------------------------------------------------
    @classmethod
    def _from_explored(cls, model, r, ex: _Explored) -> "Window":
        members = ex.settled
        scale = ex.scale
        keyed = sorted(members, key=lambda i: (ex.dist[i], ex.nodes[i]))
        pos = {old: new for new, old in enumerate(keyed)}
        elements = [ex.nodes[i] for i in keyed]
        norms = [Fraction(ex.dist[i], scale) for i in keyed]
        ng = len(model.generators)
        nbr = np.full((len(keyed), ng), -1, dtype=np.int64)
        row_of = {old: k for k, old in enumerate(ex.settled)}
        for new, old in enumerate(keyed):
            row = ex.rows[row_of[old]]
            nbr[new] = [pos.get(y, -1) for y in row]
        parent = np.array([pos.get(ex.parent[i], -1) for i in keyed], dtype=np.int64)
        pgen = np.array([ex.pgen[i] if ex.parent[i] >= 0 else -1 for i in keyed], dtype=np.int64)
        return cls(model, r, elements, norms, nbr, parent, pgen)

    @classmethod
    def from_norms(cls, model: GroupModel, radius: Any, norms: dict) -> "Window":
        """Window over explicitly given (element -> norm) data, e.g. an induced subgroup norm."""
        items = sorted(norms.items(), key=lambda kv: (kv[1], kv[0]))
        elements = [x for x, _ in items]
        pos = {x: i for i, x in enumerate(elements)}
        gens = model.generators.elements
        nbr = np.full((len(elements), len(gens)), -1, dtype=np.int64)
        for i, x in enumerate(elements):
            for j, s in enumerate(gens):
                nbr[i, j] = pos.get(model.mul(x, s), -1)
        parent = np.full(len(elements), -1, dtype=np.int64)
        pgen = np.full(len(elements), -1, dtype=np.int64)
        root = pos.get(model.identity())
        if root is not None:
            seen = np.zeros(len(elements), dtype=bool)
            seen[root] = True
            queue = deque([root])
            while queue:
                i = queue.popleft()
                for j in range(len(gens)):
                    y = nbr[i, j]
                    if y >= 0 and not seen[y]:
                        seen[y] = True
                        parent[y] = i
                        pgen[y] = j
                        queue.append(y)
        return cls(model, as_fraction(radius), elements, [as_fraction(v) for _, v in items], nbr, parent, pgen)

    def sub_window(self, r: Any) -> "Window":
        r = as_fraction(r)
        keep = [i for i, n in enumerate(self.norms) if n <= r]
        sub = Window.from_norms(self.model, r, {self.elements[i]: self.norms[i] for i in keep})
        sub.norm_fn = self.norm_fn
        sub.induced_by = self.induced_by
        return sub

    # -- queries ---------------------------------------------------------
    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __repr__(self) -> str:
        return f"Window({self.model.name}, r={self.radius}, size={len(self)})"

    def position(self, x) -> int:
        return self.index.get(x, -1)

    def norm(self, x) -> Fraction:
        return self.norms[self.index[x]]

    def norm_of(self, x) -> Fraction:
        """Norm of ``x``, falling back to a search outside the window."""
        i = self.index.get(x)
        if i is not None:
            return self.norms[i]
        if self.norm_fn is not None:
            return self.norm_fn(x)
        return weighted_norm(self.model, x)

    @property
    def max_norm(self) -> Fraction:
        return self.norms[-1] if self.norms else Fraction(0)

    @property
    def norm_array(self) -> np.ndarray:
        """Norms as floats for vectorized masking; exact comparisons use ``core_mask``."""
        if self._norm_array is None:
            self._norm_array = np.array([float(n) for n in self.norms])
        return self._norm_array

    def core_mask(self, radius: Any) -> np.ndarray:
        radius = as_fraction(radius)
        # norms are sorted, so the core is a prefix
        n = 0
        lo, hi = 0, len(self.norms)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.norms[mid] <= radius:
                lo = mid + 1
            else:
                hi = mid
        n = lo
        mask = np.zeros(len(self), dtype=bool)
        mask[:n] = True
        return mask

    def positions(self, xs: Iterable) -> np.ndarray:
        return np.array([self.index.get(x, -1) for x in xs], dtype=np.int64)

    # -- right translation -------------------------------------------------
    def shift(self, k: Elem) -> np.ndarray:
        """Positions of ``x * k`` for every window element ``x`` (-1 outside)."""
        got = self._shift_cache.get(k)
        if got is not None:
            return got
        if self.model.lattice_moduli() is not None:
            out = self._lattice_shift(k)
        elif self.model.tree_convex:
            out = self._chain_shift(k)
        else:
            mul, index = self.model.mul, self.index
            out = np.fromiter((index.get(mul(x, k), -1) for x in self.elements), dtype=np.int64,
                              count=len(self))
        if len(self._shift_cache) < 4096:
            self._shift_cache[k] = out
        return out

    def _chain_shift(self, k) -> np.ndarray:
        # for tree-like Cayley graphs the geodesic from x to xk stays within max(|x|, |xk|)
        gens = self.model.generators.elements
        letter = {g: j for j, g in enumerate(gens)}
        idx = np.arange(len(self), dtype=np.int64)
        for c in k:
            j = letter[c]
            ok = idx >= 0
            nxt = np.full_like(idx, -1)
            nxt[ok] = self.neighbors[idx[ok], j]
            idx = nxt
        return idx

    def _lattice_setup(self):
        if self._lattice is None:
            moduli = self.model.lattice_moduli()
            vecs = np.array([self.model.lattice_vec(x) for x in self.elements], dtype=np.int64)
            vecs = vecs.reshape(len(self), len(moduli))
            lo = vecs.min(axis=0) if len(self) else np.zeros(len(moduli), dtype=np.int64)
            hi = vecs.max(axis=0) if len(self) else np.zeros(len(moduli), dtype=np.int64)
            span = hi - lo + 1
            mult = np.ones(len(moduli), dtype=np.int64)
            for i in range(len(moduli) - 2, -1, -1):
                mult[i] = mult[i + 1] * span[i + 1]
            codes = ((vecs - lo) * mult).sum(axis=1)
            order = np.argsort(codes, kind="stable")
            mod = np.array([m if m is not None else 0 for m in moduli], dtype=np.int64)
            self._lattice = (vecs, lo, hi, mult, codes[order], order, mod)
        return self._lattice

    def lattice_lookup(self, vecs: np.ndarray) -> np.ndarray:
        """Positions of the lattice vectors ``vecs`` (rows), -1 when not in the window."""
        _, lo, hi, mult, sorted_codes, order, mod = self._lattice_setup()
        vecs = vecs.copy()
        cyc = mod > 0
        if cyc.any():
            vecs[:, cyc] = np.mod(vecs[:, cyc], mod[cyc])
        inside = np.all((vecs >= lo) & (vecs <= hi), axis=1)
        codes = ((vecs - lo) * mult).sum(axis=1)
        pos = np.searchsorted(sorted_codes, codes)
        pos_c = np.minimum(pos, max(len(sorted_codes) - 1, 0))
        found = inside & (pos < len(sorted_codes))
        if len(sorted_codes):
            found &= sorted_codes[pos_c] == codes
        out = np.full(len(vecs), -1, dtype=np.int64)
        out[found] = order[pos_c[found]]
        return out

    def _lattice_shift(self, k) -> np.ndarray:
        vecs = self._lattice_setup()[0]
        kv = np.array(self.model.lattice_vec(k), dtype=np.int64)
        return self.lattice_lookup(vecs + kv)
