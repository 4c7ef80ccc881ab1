"""Random block subgroups of Sym_fin(Z) driven by Bernoulli colorings.

A coloring ``omega`` assigns each integer a color in ``0..c``.  For a
subgroup S of (Z/2)^c, ``f^S(omega)`` consists of the finitely supported
permutations that fix every color-0 point, keep every other color class
invariant, and whose per-color parity vector lies in S.

Only a window [-M, M] of the coloring is ever sampled.  Points are drawn
in the outward order 0, 1, -1, 2, -2, ... and, for a batch, point by point
across the batch; a shared seed therefore yields restrictions of one
underlying coloring for every M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from .errors import NotBlockPreserving, ParseError, WindowTooSmall
from .permutation import FinSuppPerm, conjugate, sign

__all__ = [
    "ProbVector",
    "Coloring",
    "SignSubgroup",
    "sample_coloring",
    "sample_colorings",
    "sample_colors_at",
    "contains",
    "contains_many",
    "sgn_vector",
    "invariance_test",
    "InvarianceRow",
    "degenerate_test",
    "DegenerateReport",
    "shift_structure_probability",
    "block_sizes",
]


@dataclass(frozen=True)
class ProbVector:
    """``(alpha_0; alpha_1, ..., alpha_c)``: color probabilities, tail non-increasing."""

    alpha0: float
    tail: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha0", float(self.alpha0))
        object.__setattr__(self, "tail", tuple(float(a) for a in self.tail))
        vals = (self.alpha0,) + self.tail
        if any(not 0.0 <= a <= 1.0 for a in vals):
            raise ValueError(f"probabilities must lie in [0, 1]: {vals}")
        if abs(sum(vals) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(vals)!r}, not 1")
        if any(b > a for a, b in zip(self.tail, self.tail[1:])):
            raise ValueError(f"tail must be non-increasing: {self.tail}")

    @property
    def colors(self) -> int:
        return len(self.tail)

    @property
    def support_size(self) -> int:
        """Number of nonzero tail entries."""
        return sum(1 for a in self.tail if a > 0)

    def cumulative(self) -> np.ndarray:
        return np.cumsum((self.alpha0,) + self.tail)

    @classmethod
    def parse(cls, text: str) -> ProbVector:
        """``"0.3;0.5,0.2"``, ``"1;"`` or ``"0;1"``."""
        s = text.strip()
        if ";" not in s:
            raise ParseError(f"alpha literal needs ';' between alpha_0 and the tail: {text!r}")
        head, rest = s.split(";", 1)
        try:
            tail = tuple(float(t) for t in rest.split(",") if t.strip())
            return cls(float(head), tail)
        except ValueError as exc:
            raise ParseError(f"bad alpha literal {text!r}: {exc}") from exc

    def to_literal(self) -> str:
        return f"{self.alpha0!r};" + ",".join(repr(a) for a in self.tail)


@dataclass(frozen=True)
class Coloring:
    """The restriction of a coloring to [-M, M]; ``colors[x + M]`` is the color of x."""

    radius: int
    colors: tuple[int, ...]

    def __post_init__(self):
        if len(self.colors) != 2 * self.radius + 1:
            raise ValueError("need 2M + 1 colors")

    def __call__(self, x: int) -> int:
        if abs(x) > self.radius:
            raise WindowTooSmall(f"point {x} lies outside the sampled window [-{self.radius}, {self.radius}]")
        return self.colors[x + self.radius]

    def block(self, color: int) -> list[int]:
        M = self.radius
        return [x - M for x, c in enumerate(self.colors) if c == color]


class SignSubgroup:
    """A subgroup of (Z/2)^c given by a basis of bitmasks (bit ``i-1`` stands for color i)."""

    def __init__(self, c: int, basis: Iterable[int] = (), alt_mode: bool = False):
        self.c = int(c)
        self.alt_mode = alt_mode
        basis = [int(v) for v in basis]
        full = (1 << self.c) - 1
        for v in basis:
            if v <= 0 or v & ~full:
                raise ValueError(f"basis vector {v:b} is zero or longer than {self.c} bits")
            if alt_mode and bin(v).count("1") % 2:
                raise ValueError(f"basis vector {v:0{self.c}b} has odd weight in alternating mode")
        span = {0}
        for v in basis:
            if v in span:
                raise ValueError("basis vectors are linearly dependent")
            span |= {v ^ w for w in span}
        self.basis = tuple(basis)
        self.elements = frozenset(span)
        self._array = np.array(sorted(span), dtype=np.int64)

    @classmethod
    def trivial(cls, c: int) -> SignSubgroup:
        return cls(c)

    @classmethod
    def full(cls, c: int) -> SignSubgroup:
        return cls(c, [1 << j for j in range(c)])

    @classmethod
    def ker_epsilon(cls, c: int) -> SignSubgroup:
        """Vectors of even weight: the members are then exactly the even permutations."""
        return cls(c, [1 | (1 << j) for j in range(1, c)], alt_mode=True)

    @classmethod
    def parse(cls, text: str, c: int) -> SignSubgroup:
        """``"11,01"`` (character j is color j+1), ``""``/``"0"`` for {0}, ``"ker"`` or ``"full"``."""
        s = text.strip()
        if s in ("", "0", "trivial"):
            return cls.trivial(c)
        if s == "ker":
            return cls.ker_epsilon(c)
        if s == "full":
            return cls.full(c)
        basis = []
        for tok in s.split(","):
            tok = tok.strip()
            if len(tok) != c or set(tok) - {"0", "1"}:
                raise ParseError(f"basis vector {tok!r} must be a {c}-character bit string")
            basis.append(sum(1 << j for j, ch in enumerate(tok) if ch == "1"))
        try:
            return cls(c, basis)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    def __contains__(self, mask) -> bool:
        if isinstance(mask, (tuple, list)):
            mask = sum(b << j for j, b in enumerate(mask))
        return int(mask) in self.elements

    def contains_many(self, masks: np.ndarray) -> np.ndarray:
        return np.isin(masks, self._array)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"SignSubgroup(c={self.c}, basis={[format(v, f'0{self.c}b')[::-1] for v in self.basis]})"


# ---------------------------------------------------------------------------
# sampling

def _outward(M: int) -> np.ndarray:
    """Window offsets ``x + M`` in the order 0, 1, -1, 2, -2, ..."""
    xs = [0]
    for d in range(1, M + 1):
        xs += [d, -d]
    return np.array(xs, dtype=np.int64) + M


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_colorings(alpha: ProbVector, M: int, size: int, seed) -> np.ndarray:
    """``(size, 2M+1)`` color array; row s is one i.i.d. coloring of [-M, M]."""
    rng = _rng(seed)
    u = rng.random((2 * M + 1, size))         # one row per point, outward order
    cols = np.searchsorted(alpha.cumulative()[:-1], u, side="right").astype(np.int64)
    out = np.empty((size, 2 * M + 1), dtype=np.int64)
    out[:, _outward(M)] = cols.T
    return out


def sample_colors_at(alpha: ProbVector, points: Sequence[int], size: int, seed) -> np.ndarray:
    """``(size, len(points))`` i.i.d. colors at the given points only.

    Membership of g depends on the colors of supp(g) alone, so this has the
    same law as restricting a full window sample to ``points``.
    """
    rng = _rng(seed)
    u = rng.random((len(points), size))
    return np.searchsorted(alpha.cumulative()[:-1], u, side="right").astype(np.int64).T


def sample_coloring(alpha: ProbVector, M: int, seed) -> Coloring:
    return Coloring(M, tuple(int(c) for c in sample_colorings(alpha, M, 1, seed)[0]))


def block_sizes(omega: Coloring) -> list[int]:
    counts = [0] * (max(omega.colors, default=0) + 1)
    for c in omega.colors:
        counts[c] += 1
    return counts


# ---------------------------------------------------------------------------
# membership

def _check_window(g: FinSuppPerm, M: int) -> None:
    if g.radius() > M:
        raise WindowTooSmall(f"support of {g} escapes the window [-{M}, {M}]; enlarge --window")


def sgn_vector(omega: Coloring, g: FinSuppPerm) -> tuple[int, ...]:
    """Per-color parity of g, as a tuple of length c (the largest color in the window)."""
    _check_window(g, omega.radius)
    c = max(omega.colors, default=0)
    vec = [0] * c
    for cyc in g.cycles():
        cols = {omega(x) for x in cyc}
        if len(cols) != 1 or 0 in cols:
            raise NotBlockPreserving(f"{g} does not preserve the blocks of the coloring")
        if len(cyc) % 2 == 0:
            col = cols.pop()
            vec[col - 1] ^= 1
    return tuple(vec)


def contains(omega: Coloring, S: SignSubgroup, g: FinSuppPerm) -> bool:
    """Membership of g in f^S(omega)."""
    _check_window(g, omega.radius)
    mask = 0
    for cyc in g.cycles():
        col = omega(cyc[0])
        if col == 0 or any(omega(x) != col for x in cyc):
            return False
        if len(cyc) % 2 == 0:
            mask ^= 1 << (col - 1)
    return mask in S.elements


def contains_many(colors: np.ndarray, M: int, S: SignSubgroup, g: FinSuppPerm) -> np.ndarray:
    """Membership of one permutation across a batch of colorings (rows of ``colors``)."""
    _check_window(g, M)
    n = len(colors)
    ok = np.ones(n, dtype=bool)
    mask = np.zeros(n, dtype=np.int64)
    for cyc in g.cycles():
        cols = colors[:, np.array(cyc) + M]
        first = cols[:, 0]
        ok &= (cols == first[:, None]).all(axis=1) & (first != 0)
        if len(cyc) % 2 == 0:
            mask ^= np.left_shift(1, np.maximum(first - 1, 0))
    return ok & S.contains_many(mask)


# ---------------------------------------------------------------------------
# statistics

def _two_proportion(k1: int, k2: int, n: int) -> tuple[float, float]:
    """(z, two-sided p-value) for equal-size samples."""
    p = (k1 + k2) / (2 * n)
    if p in (0.0, 1.0):
        return 0.0, 1.0
    z = (k1 - k2) / n / math.sqrt(p * (1 - p) * 2 / n)
    return z, 2 * (1 - NormalDist().cdf(abs(z)))


def _count_members(alpha, S, g, M, samples, rng) -> int:
    _check_window(g, M)
    pts = sorted(g.support)
    if not pts:
        return samples
    cols = sample_colors_at(alpha, pts, samples, rng)
    R = max(abs(p) for p in pts)
    window = np.zeros((samples, 2 * R + 1), dtype=np.int64)
    window[:, np.array(pts) + R] = cols
    return int(contains_many(window, R, S, g).sum())


@dataclass(frozen=True)
class InvarianceRow:
    probe: str
    conjugator: str
    conjugate: str
    p_probe: float
    p_conjugate: float
    z: float
    p_value: float
    samples: int


def invariance_test(alpha: ProbVector, S: SignSubgroup, probes: Sequence[FinSuppPerm],
                    conjugators: Sequence[FinSuppPerm], M: int, samples: int, seed: int) -> list[InvarianceRow]:
    """Compare P(g in f^S(omega)) with P(g^x in f^S(omega)) on independent colorings.

    Each (probe, conjugator) pair uses two fresh substreams of ``seed``.
    Only the colors on the moved points are drawn (see :func:`sample_colors_at`).
    """
    rows = []
    for a, g in enumerate(probes):
        for b, x in enumerate(conjugators):
            gx = conjugate(g, x)
            ss = np.random.SeedSequence(seed, spawn_key=(a, b))
            s1, s2 = ss.spawn(2)
            k1 = _count_members(alpha, S, g, M, samples, np.random.default_rng(s1))
            k2 = _count_members(alpha, S, gx, M, samples, np.random.default_rng(s2))
            z, pv = _two_proportion(k1, k2, samples)
            rows.append(InvarianceRow(str(g), str(x), str(gx), k1 / samples, k2 / samples, z, pv, samples))
    return rows


@dataclass(frozen=True)
class DegenerateReport:
    regime: str          # "trivial", "alternating" or "none"
    probes: int
    members: int
    mismatches: int


def _random_probe(rng: np.random.Generator, R: int) -> FinSuppPerm:
    k = int(rng.integers(0, 2 * R + 2))
    pts = rng.choice(np.arange(-R, R + 1), size=min(k, 2 * R + 1), replace=False)
    img = rng.permutation(pts)
    return FinSuppPerm({int(p): int(q) for p, q in zip(pts, img)})


def degenerate_test(alpha: ProbVector, S: SignSubgroup, M: int, samples: int, seed: int,
                    probe_radius: int | None = None) -> DegenerateReport:
    """Check the two atoms: alpha = (1;) gives {e}; alpha = (0;1) gives the permutations whose sign lies in S.

    One coloring and one random probe supported in ``[-probe_radius, probe_radius]``
    per sample.  Outside the two regimes only the membership count is reported.
    """
    R = min(M, 6) if probe_radius is None else probe_radius
    rng = np.random.default_rng(seed)
    if alpha.alpha0 == 1.0:
        regime = "trivial"
    elif alpha.alpha0 == 0.0 and alpha.support_size == 1 and alpha.tail[0] == 1.0:
        regime = "alternating"
    else:
        regime = "none"
    colors = sample_colorings(alpha, M, samples, rng)
    members = mismatches = 0
    for s in range(samples):
        g = _random_probe(rng, R)
        omega = Coloring(M, tuple(int(c) for c in colors[s]))
        got = contains(omega, S, g)
        members += got
        if regime == "trivial":
            mismatches += got != g.is_identity()
        elif regime == "alternating":
            mismatches += got != (sign(g) in S.elements)
    return DegenerateReport(regime, samples, members, mismatches)


def _partial_bijection(a: np.ndarray, b: np.ndarray, c: int) -> np.ndarray:
    """Rows where ``a[x] -> b[x]`` is a well-defined injective color map fixing 0 exactly."""
    ok = np.ones(len(a), dtype=bool)
    for u in range(c + 1):
        for src, dst in ((a, b), (b, a)):
            m = src == u
            hi = np.where(m, dst, -1).max(axis=1, initial=-1)
            lo = np.where(m, dst, c + 1).min(axis=1, initial=c + 1)
            ok &= ~m.any(axis=1) | (hi == lo)
    ok &= ((a == 0) == (b == 0)).all(axis=1)
    return ok


def shift_structure_probability(alpha: ProbVector, k: int, M: int, samples: int, seed) -> float:
    """Fraction of colorings whose shift by k carries blocks to blocks on [-M, M-k].

    No constraint remains when the overlap is empty (``M = 0`` or ``k > 2M``).
    """
    if alpha.support_size < 2:
        raise ValueError("needs at least two colors of positive probability")
    cols = sample_colorings(alpha, M, samples, seed)
    width = 2 * M + 1 - abs(k)
    if width <= 0 or k == 0:
        return 1.0
    a, b = (cols[:, :width], cols[:, abs(k):]) if k > 0 else (cols[:, abs(k):], cols[:, :width])
    return float(_partial_bijection(a, b, alpha.colors).mean())
