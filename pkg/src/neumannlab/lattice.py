"""The subgroups L_i, G_i, D_i, K_i of G(P), finite subgroups of N and the Foelner sets F_i.

A finitely generated H <= N lies in some L_b, and L_b projects isomorphically
onto the product of the first ``b`` window groups.  So H is stored as a
stabilizer chain of that projection, acting on the disjoint union of the
windows ``1..b`` with points tagged ``(window, x)``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import stabchain
from .errors import EnumerationRefused, NotInDerivedSubgroup
from .neumann import (
    GroupElement,
    OddSequence,
    _compose_w,
    _embed_w,
    _id,
    _inverse_w,
    _same_w,
    conjugate,
    evaluate_word,
    identity,
    multiply,
    sigma_power,
    tau,
)

__all__ = [
    "DEFAULT_CAP",
    "window_domain",
    "project",
    "element_from_projection",
    "L_generators",
    "L",
    "L_order_formula",
    "in_L",
    "in_G_i",
    "in_D_i",
    "close_subgroup",
    "parse_subgroup",
    "FiniteSubgroup",
    "intersect_with_L",
    "in_K",
    "FolnerSet",
    "folner_set",
]

DEFAULT_CAP = 10**6


# ---------------------------------------------------------------------------
# the disjoint union of windows 1..b

@lru_cache(maxsize=None)
def _layout(seq: OddSequence, b: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(offsets, radii) of windows 1..b inside the flat domain."""
    offs, radii, off = [], [], 0
    for j in range(1, b + 1):
        r = seq.r(j)
        offs.append(off)
        radii.append(r)
        off += 2 * r + 1
    return tuple(offs), tuple(radii)


@lru_cache(maxsize=None)
def window_domain(seq: OddSequence, b: int) -> tuple[tuple[int, int], ...]:
    """Tagged points ``(j, x)`` of windows 1..b, in flat-index order."""
    return tuple((j, x) for j in range(1, b + 1) for x in range(-seq.r(j), seq.r(j) + 1))


def _flatten(seq: OddSequence, windows: Sequence[tuple]) -> tuple:
    offs, radii = _layout(seq, len(windows))
    out = []
    for w, off, r in zip(windows, offs, radii):
        out.extend(off + y + r for y in w)
    return tuple(out)


def _unflatten(seq: OddSequence, perm: Sequence[int], b: int) -> list[tuple]:
    offs, radii = _layout(seq, b)
    return [tuple(perm[off + x] - off - r for x in range(2 * r + 1)) for off, r in zip(offs, radii)]


def project(g: GroupElement, b: int) -> tuple:
    """Image of ``g`` in the product of window groups 1..b, as a flat permutation."""
    return _flatten(g.seq, [g.coord(j) for j in range(1, b + 1)])


def element_from_projection(seq: OddSequence, perm: Sequence[int], b: int) -> GroupElement:
    """The unique element of L_b with the given projection onto windows 1..b."""
    return GroupElement.from_coordinates(seq, 0, _unflatten(seq, perm, b))


# ---------------------------------------------------------------------------
# membership predicates

def L_generators(seq: OddSequence, i: int) -> list[GroupElement]:
    """The conjugates of tau by sigma^j for |j| <= r_i - 1."""
    r = seq.r(i)
    t = tau(seq)
    return [conjugate(t, sigma_power(seq, j)) for j in range(-(r - 1), r)]


def L_order_formula(seq: OddSequence, i: int) -> int:
    """prod_{j <= i} n_j!/2."""
    from math import factorial
    out = 1
    for j in range(1, i + 1):
        out *= factorial(seq.n(j)) // 2
    return out


def in_L(g: GroupElement, i: int) -> bool:
    return g.sigma_exp == 0 and g.m <= i


def in_G_i(g: GroupElement, i: int) -> bool:
    """Trivial in every window 1..i."""
    return all(g.coord(j) == _id(g.seq.r(j)) for j in range(1, i + 1))


def in_D_i(g: GroupElement, i: int) -> bool:
    return g.sigma_exp % (2 * g.seq.r(i) - 1) == 0


# ---------------------------------------------------------------------------

class FiniteSubgroup:
    """A finitely generated subgroup H of N, stored through its faithful projection to windows 1..b."""

    def __init__(self, seq: OddSequence, generators: Sequence[GroupElement], bound: int,
                 chain: stabchain.StabChain):
        self.seq = seq
        self.generators = tuple(generators)
        self.bound = bound
        self.chain = chain
        self._meet_cache: dict[int, FiniteSubgroup] = {}
        self._array_cache: dict[int, np.ndarray] = {}

    def order(self) -> int:
        return self.chain.order()

    def __len__(self):
        return self.order()

    def __contains__(self, g: GroupElement) -> bool:
        return self.contains(g)

    def contains(self, g: GroupElement) -> bool:
        if g.sigma_exp != 0 or g.m > self.bound:
            return False
        return self.chain.contains(project(g, self.bound))

    def contains_coords(self, windows: Sequence[tuple]) -> bool:
        """Is there an h in H whose coordinates on windows ``1..J`` match ``windows``?

        Requires ``J >= bound``: windows ``bound..J`` must then agree as
        permutations of Z, and the first ``bound`` are sifted.
        """
        J, b = len(windows), self.bound
        if J < b:
            raise ValueError(f"need at least {b} windows, got {J}")
        seq = self.seq
        for j in range(b + 1, J + 1):
            if not _same_w(windows[b - 1], seq.r(b), windows[j - 1], seq.r(j)):
                return False
        return self.chain.contains(_flatten(seq, windows[:b]))

    def contains_coords_many(self, arr: np.ndarray, J: int) -> np.ndarray:
        """Vectorized :meth:`contains_coords` for rows flattened over windows 1..J."""
        b = self.bound
        if J < b:
            raise ValueError(f"need at least {b} windows, got {J}")
        offs, radii = _layout(self.seq, J)
        ok = np.ones(len(arr), dtype=bool)
        rb, ob = radii[b - 1], offs[b - 1]
        base = arr[:, ob:ob + 2 * rb + 1] - ob - rb
        for j in range(b + 1, J + 1):
            r, off = radii[j - 1], offs[j - 1]
            loc = arr[:, off:off + 2 * r + 1] - off - r
            cut = r - rb
            ok &= (loc[:, cut:cut + 2 * rb + 1] == base).all(axis=1)
            ident = np.arange(-r, r + 1)
            ok &= (loc[:, :cut] == ident[:cut]).all(axis=1)
            ok &= (loc[:, 2 * r + 1 - cut:] == ident[2 * r + 1 - cut:]).all(axis=1)
        ob_end = offs[b - 1] + 2 * rb + 1
        ok &= self.chain.contains_many(arr[:, :ob_end])
        return ok

    def elements(self) -> Iterator[GroupElement]:
        for p in self.chain.elements():
            yield element_from_projection(self.seq, p, self.bound)

    def random_element(self, rng: np.random.Generator) -> GroupElement:
        return element_from_projection(self.seq, self.chain.random_element(rng), self.bound)

    def projections_array(self, J: int, *, rng: np.random.Generator | None = None,
                          size: int | None = None) -> np.ndarray:
        """Elements flattened over windows 1..J (J >= bound): all of them, or ``size`` uniform draws."""
        b = self.bound
        if J < b:
            raise ValueError(f"need at least {b} windows, got {J}")
        if rng is None and J in self._array_cache:
            return self._array_cache[J]
        arr = self.chain.elements_array() if rng is None else self.chain.random_elements(rng, size)
        if J == b:
            if rng is None:
                self._array_cache[J] = arr
            return arr
        offs, radii = _layout(self.seq, J)
        rb, ob = radii[b - 1], offs[b - 1]
        base = arr[:, ob:ob + 2 * rb + 1] - ob - rb
        parts = [arr]
        for j in range(b + 1, J + 1):
            r, off = radii[j - 1], offs[j - 1]
            cut = r - rb
            ident = np.broadcast_to(np.arange(-r, r + 1), (len(arr), 2 * r + 1)).copy()
            ident[:, cut:cut + 2 * rb + 1] = base
            parts.append(ident + off + r)
        out = np.concatenate(parts, axis=1)
        if rng is None:
            self._array_cache[J] = out
        return out

    def __repr__(self):
        return f"FiniteSubgroup(order={self.order()}, bound={self.bound}, gens={len(self.generators)})"


def close_subgroup(seq: OddSequence, generators: Iterable[GroupElement]) -> FiniteSubgroup:
    """The (finite) subgroup generated by elements of N."""
    gens = list(generators)
    for g in gens:
        if g.sigma_exp != 0:
            raise NotInDerivedSubgroup(f"generator {g!r} has sigma exponent {g.sigma_exp}")
    # L_b is a subgroup, so products never leave it: the bound is final here
    b = max((g.m for g in gens), default=1)
    chain = stabchain.build(degree=len(window_domain(seq, b)), generators=[project(g, b) for g in gens])
    return FiniteSubgroup(seq, gens, b, chain)


def parse_subgroup(seq: OddSequence, text: str) -> FiniteSubgroup:
    """``"t, s^-1 t s"``: comma-separated generator words."""
    words = [w for w in (part.strip() for part in text.split(",")) if w]
    return close_subgroup(seq, [evaluate_word(seq, w) for w in words])


@lru_cache(maxsize=None)
def L(seq: OddSequence, i: int) -> FiniteSubgroup:
    return close_subgroup(seq, L_generators(seq, i))


def intersect_with_L(H: FiniteSubgroup, i: int, cap: int = DEFAULT_CAP) -> FiniteSubgroup:
    """H meet L_i.

    H acts on tuples ``(x_j)_{i<j<=b}`` of window permutations by
    ``x_j -> h_i^-1 x_j h_j`` (with ``h_i`` embedded in window ``j``); the
    stabilizer of the identity tuple is exactly H meet L_i.  The orbit is
    enumerated (its size is the index, at most ``cap``) and Schreier
    generators give the stabilizer.
    """
    if i >= H.bound:
        return H
    if i in H._meet_cache:
        return H._meet_cache[i]
    seq, b = H.seq, H.bound
    if H.order() == L_order_formula(seq, b):
        # H <= L_b with equal order, so H = L_b and the meet is L_i
        H._meet_cache[i] = L(seq, i)
        return H._meet_cache[i]
    radii = [seq.r(j) for j in range(1, b + 1)]
    ri = radii[i - 1]
    n = H.chain.degree

    gens = []
    for g in H.chain.generators:
        ws = _unflatten(seq, g, b)
        hi_inv = _inverse_w(ws[i - 1], ri)
        gens.append((g, [(_embed_w(hi_inv, ri, radii[j - 1]), ws[j - 1]) for j in range(i + 1, b + 1)]))

    def act(point, data):
        return tuple(_compose_w(_compose_w(left, x, radii[j + i]), right, radii[j + i])
                     for j, (x, (left, right)) in enumerate(zip(point, data)))

    start = tuple(_id(radii[j - 1]) for j in range(i + 1, b + 1))
    reps = {start: tuple(range(n))}
    queue = [start]
    schreier = []
    for pt in queue:
        u = reps[pt]
        for g, data in gens:
            q = act(pt, data)
            ug = stabchain.mul(u, g)
            if q not in reps:
                if len(reps) >= cap:
                    raise EnumerationRefused(f"coset orbit for H meet L_{i} exceeds cap {cap}")
                reps[q] = ug
                queue.append(q)
            else:
                s = stabchain.mul(ug, stabchain.inv(reps[q]))
                if not stabchain.is_identity(s):
                    schreier.append(s)

    kept: list[tuple] = []
    chain = stabchain.build(degree=n)
    for s in dict.fromkeys(schreier):
        if not chain.contains(s):
            kept.append(s)
            chain = stabchain.build(degree=n, generators=kept)
    meet = close_subgroup(seq, [element_from_projection(seq, s, b) for s in kept])
    H._meet_cache[i] = meet
    return meet


def in_K(g: GroupElement, H: FiniteSubgroup, i: int) -> bool:
    """Membership in K_i = (H meet L_i)(G_i meet D_i).

    For h in H meet L_i the abelianization vanishes, so h^-1 g lies in
    G_i meet D_i exactly when g is in D_i and g, h agree on windows 1..i.
    """
    if not in_D_i(g, i):
        return False
    S = intersect_with_L(H, i)
    return S.contains_coords([g.coord(j) for j in range(1, i + 1)])


# ---------------------------------------------------------------------------

class FolnerSet:
    """F_i = { sigma^j l : |j| <= r_i - 1, l in L_i }, kept implicit."""

    def __init__(self, seq: OddSequence, i: int, cap: int = DEFAULT_CAP):
        self.seq = seq
        self.i = i
        self.cap = cap
        self.L = L(seq, i)
        r = seq.r(i)
        self.shifts = tuple(range(-(r - 1), r))

    def __len__(self):
        return len(self.shifts) * self.L.order()

    @property
    def size(self) -> int:
        return len(self)

    def __iter__(self) -> Iterator[GroupElement]:
        if len(self) > self.cap:
            raise EnumerationRefused(f"|F_{self.i}| = {len(self)} exceeds cap {self.cap}")
        ls = list(self.L.elements())
        for j in self.shifts:
            s = sigma_power(self.seq, j)
            for l in ls:
                yield multiply(s, l)

    def sample(self, rng: np.random.Generator) -> GroupElement:
        j = self.shifts[int(rng.integers(len(self.shifts)))]
        return multiply(sigma_power(self.seq, j), self.L.random_element(rng))


def folner_set(seq: OddSequence, i: int, cap: int = DEFAULT_CAP) -> FolnerSet:
    return FolnerSet(seq, i, cap)
