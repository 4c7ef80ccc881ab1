"""Deterministic Schreier-Sims for small permutation groups.

Permutations of a domain of size ``n`` are image tuples over ``0..n-1`` and
compose left to right: ``mul(a, b)[x] == b[a[x]]``.  Domain points may carry
arbitrary hashable tags (for instance ``(window, point)`` pairs); the chain
itself only ever sees indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DegreeMismatch

__all__ = ["FiniteAction", "StabChain", "build", "order", "contains", "random_element"]

Perm = tuple


def mul(a: Perm, b: Perm) -> Perm:
    return tuple([b[x] for x in a])


def inv(a: Perm) -> Perm:
    out = [0] * len(a)
    for x, y in enumerate(a):
        out[y] = x
    return tuple(out)


def is_identity(a: Perm) -> bool:
    return all(x == y for x, y in enumerate(a))


@dataclass(frozen=True)
class FiniteAction:
    """Generators acting on a tagged finite domain."""

    points: tuple
    generators: tuple[Perm, ...]

    def __post_init__(self):
        n = len(self.points)
        if len(set(self.points)) != n:
            raise ValueError("domain points must be distinct")
        for g in self.generators:
            if len(g) != n or sorted(g) != list(range(n)):
                raise ValueError("generator is not a permutation of the domain")

    @classmethod
    def from_mappings(cls, points: Sequence[Hashable], maps: Sequence[Mapping]) -> FiniteAction:
        """Generators given as point -> point mappings (missing points are fixed)."""
        pts = tuple(points)
        index = {p: i for i, p in enumerate(pts)}
        gens = tuple(tuple(index[m.get(p, p)] for p in pts) for m in maps)
        return cls(pts, gens)

    @property
    def degree(self) -> int:
        return len(self.points)

    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}


@dataclass
class _Level:
    base: int
    gens: list
    trans: dict = field(default_factory=dict)   # orbit point -> u with base^u = point
    trans_inv: dict = field(default_factory=dict)

    def rebuild_orbit(self, n: int) -> None:
        ident = tuple(range(n))
        trans = {self.base: ident}
        queue = [self.base]
        for p in queue:
            u = trans[p]
            for s in self.gens:
                q = s[p]
                if q not in trans:
                    trans[q] = mul(u, s)
                    queue.append(q)
        self.trans = trans
        self.trans_inv = {p: inv(u) for p, u in trans.items()}


class StabChain:
    """A base and strong generating set with explicit transversals.

    Immutable once built; concurrent reads are safe.
    """

    def __init__(self, degree: int, levels: list[_Level], generators: tuple):
        self.degree = degree
        self._levels = levels
        self.generators = generators
        self._tables = None

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(lv.base for lv in self._levels)

    @property
    def strong_generators(self) -> list[list[Perm]]:
        return [list(lv.gens) for lv in self._levels]

    def orbit_sizes(self) -> list[int]:
        return [len(lv.trans) for lv in self._levels]

    def order(self) -> int:
        out = 1
        for lv in self._levels:
            out *= len(lv.trans)
        return out

    def sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        """Strip ``g`` through levels ``start..``; returns the residue and the level reached."""
        for i in range(start, len(self._levels)):
            lv = self._levels[i]
            b = g[lv.base]
            if b not in lv.trans_inv:
                return g, i
            g = mul(g, lv.trans_inv[b])
        return g, len(self._levels)

    def contains(self, g: Perm) -> bool:
        if len(g) != self.degree:
            raise DegreeMismatch(f"permutation of degree {len(g)} against a chain of degree {self.degree}")
        h, i = self.sift(tuple(g))
        return i == len(self._levels) and is_identity(h)

    def random_element(self, rng: np.random.Generator) -> Perm:
        """Uniform element: one uniform coset representative per level."""
        g = tuple(range(self.degree))
        for lv in self._levels:
            reps = list(lv.trans.values())
            g = mul(reps[int(rng.integers(len(reps)))], g)
        return g

    def elements(self) -> Iterator[Perm]:
        """Every element exactly once (u_k ... u_1 u_0 factorizations)."""
        def rec(i: int, acc: Perm):
            if i < 0:
                yield acc
                return
            for u in self._levels[i].trans.values():
                yield from rec(i - 1, mul(acc, u))
        yield from rec(len(self._levels) - 1, tuple(range(self.degree)))

    # -- vectorized helpers -------------------------------------------------

    def _array_tables(self):
        if self._tables is None:
            n = self.degree
            tabs = []
            for lv in self._levels:
                reps = np.tile(np.arange(n), (n, 1))
                invs = np.tile(np.arange(n), (n, 1))
                ok = np.zeros(n, dtype=bool)
                for p, u in lv.trans.items():
                    reps[p] = u
                    invs[p] = lv.trans_inv[p]
                    ok[p] = True
                tabs.append((lv.base, reps, invs, ok, np.array(list(lv.trans.values()), dtype=np.int64).reshape(-1, n)))
            self._tables = tabs
        return self._tables

    def contains_many(self, arr: np.ndarray) -> np.ndarray:
        """Row-wise membership for an ``(N, degree)`` array of permutations."""
        g = np.asarray(arr, dtype=np.int64)
        if g.ndim != 2 or g.shape[1] != self.degree:
            raise DegreeMismatch(f"expected shape (N, {self.degree}), got {g.shape}")
        alive = np.ones(len(g), dtype=bool)
        rows = np.arange(len(g))[:, None]
        for base, _, invs, ok, _ in self._array_tables():
            b = g[:, base]
            alive &= ok[b]
            g = invs[b][rows, g]
        return alive & (g == np.arange(self.degree)).all(axis=1)

    def random_elements(self, rng: np.random.Generator, size: int) -> np.ndarray:
        g = np.tile(np.arange(self.degree), (size, 1))
        rows = np.arange(size)[:, None]
        for _, _, _, _, reps in self._array_tables():
            u = reps[rng.integers(len(reps), size=size)]
            g = g[rows, u]   # u then g
        return g

    def elements_array(self) -> np.ndarray:
        """All elements as an ``(order, degree)`` array."""
        acc = np.arange(self.degree)[None, :]
        for _, _, _, _, reps in reversed(self._array_tables()):
            # acc then u for every pair; reps[k][acc[a]]
            k = np.arange(len(reps))[:, None, None]
            acc = reps[k, acc[None, :, :]].reshape(-1, self.degree)
        return acc


def build(action: FiniteAction | None = None, *, degree: int | None = None,
          generators: Sequence[Perm] = (), base: Sequence[int] = ()) -> StabChain:
    """Schreier-Sims with full (deterministic) Schreier generator checks.

    ``base`` optionally fixes a prefix of the base.
    """
    if action is not None:
        degree = action.degree
        generators = action.generators
    if degree is None:
        raise ValueError("degree is required")
    n = degree
    gens = [tuple(g) for g in generators if not is_identity(g)]
    for g in gens:
        if len(g) != n:
            raise DegreeMismatch("generator degree mismatch")
    levels: list[_Level] = []
    for b in base:
        levels.append(_Level(int(b), []))

    def ensure_moved(g: Perm) -> None:
        # make sure some base point is moved by g
        for lv in levels:
            if g[lv.base] != lv.base:
                return
        moved = next(x for x in range(n) if g[x] != x)
        levels.append(_Level(moved, []))

    for g in gens:
        ensure_moved(g)
    for i, lv in enumerate(levels):
        fixed = [levels[j].base for j in range(i)]
        lv.gens = [g for g in gens if all(g[p] == p for p in fixed)]
        lv.rebuild_orbit(n)

    chain = StabChain(n, levels, tuple(gens))
    i = len(levels) - 1
    while i >= 0:
        lv = levels[i]
        restart = False
        for p, u in list(lv.trans.items()):
            for s in list(lv.gens):
                q = s[p]
                h = mul(mul(u, s), lv.trans_inv[q])
                if is_identity(h):
                    continue
                y, j = chain.sift(h, i + 1)
                if j < len(levels) or not is_identity(y):
                    if j == len(levels):
                        moved = next(x for x in range(n) if y[x] != x)
                        levels.append(_Level(moved, []))
                    for l in range(i + 1, j + 1):
                        levels[l].gens.append(y)
                        levels[l].rebuild_orbit(n)
                    i = j
                    restart = True
                    break
            if restart:
                break
        if not restart:
            i -= 1
    # drop trailing trivial levels that can arise from a user-given base
    while levels and len(levels[-1].trans) == 1 and not levels[-1].gens:
        levels.pop()
    return chain


def order(chain: StabChain) -> int:
    return chain.order()


def contains(chain: StabChain, g: Perm) -> bool:
    return chain.contains(g)


def random_element(chain: StabChain, rng: np.random.Generator) -> Perm:
    return chain.random_element(rng)
