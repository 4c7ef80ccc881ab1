"""Finitely supported permutations of the integers and window permutations.

Composition is left-to-right throughout the package: ``compose(a, b)`` applies
``a`` first and then ``b``, so ``x ** compose(a, b) == (x ** a) ** b`` in
exponent notation.  With this convention ``conjugate(x, y) = y^-1 x y`` sends
the cycle ``(p, q, ...)`` to ``(y(p), y(q), ...)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DegreeMismatch, InvalidCycle, ParseError

__all__ = [
    "FinSuppPerm",
    "WindowPerm",
    "IDENTITY",
    "compose",
    "inverse",
    "conjugate",
    "sign",
    "cycle",
    "parse_cycles",
    "hamming",
    "hamming_distance",
    "shift",
]


class FinSuppPerm:
    """A permutation of Z moving only finitely many points.

    Only non-fixed points are stored.  Instances are immutable and hashable.
    """

    __slots__ = ("_moves", "_hash")

    def __init__(self, moves: Mapping[int, int] | None = None):
        m = {int(k): int(v) for k, v in (moves or {}).items() if k != v}
        if set(m) != set(m.values()):
            raise ValueError(f"not a permutation: {moves!r}")
        self._moves = m
        self._hash = None

    @classmethod
    def _trusted(cls, moves: dict) -> FinSuppPerm:
        p = cls.__new__(cls)
        p._moves = moves
        p._hash = None
        return p

    def __call__(self, x: int) -> int:
        return self._moves.get(x, x)

    @property
    def moves(self) -> dict[int, int]:
        return dict(self._moves)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self._moves)

    def radius(self) -> int:
        """Smallest r with the support inside {-r, ..., r}."""
        return max((abs(x) for x in self._moves), default=0)

    def is_identity(self) -> bool:
        return not self._moves

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles, each starting at its smallest point, sorted."""
        seen = set()
        out = []
        for start in sorted(self._moves):
            if start in seen:
                continue
            c = [start]
            seen.add(start)
            x = self._moves[start]
            while x != start:
                c.append(x)
                seen.add(x)
                x = self._moves[x]
            out.append(tuple(c))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted(len(c) for c in self.cycles()))

    def __mul__(self, other: FinSuppPerm) -> FinSuppPerm:
        return compose(self, other)

    def __invert__(self) -> FinSuppPerm:
        return inverse(self)

    def __pow__(self, k: int) -> FinSuppPerm:
        base = self if k >= 0 else inverse(self)
        out = IDENTITY
        for _ in range(abs(k)):
            out = compose(out, base)
        return out

    def __eq__(self, other):
        if not isinstance(other, FinSuppPerm):
            return NotImplemented
        return self._moves == other._moves

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._moves.items()))
        return self._hash

    def __str__(self):
        cs = self.cycles()
        if not cs:
            return "()"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cs)

    def __repr__(self):
        return f"FinSuppPerm({self})"

    @classmethod
    def parse(cls, text: str) -> FinSuppPerm:
        return parse_cycles(text)


IDENTITY = FinSuppPerm()


def compose(a: FinSuppPerm, b: FinSuppPerm) -> FinSuppPerm:
    """Apply ``a`` then ``b``."""
    am, bm = a._moves, b._moves
    out = {}
    for x in am.keys() | bm.keys():
        y = am.get(x, x)
        y = bm.get(y, y)
        if y != x:
            out[x] = y
    return FinSuppPerm._trusted(out)


def inverse(a: FinSuppPerm) -> FinSuppPerm:
    return FinSuppPerm._trusted({v: k for k, v in a._moves.items()})


def conjugate(x: FinSuppPerm, y: FinSuppPerm) -> FinSuppPerm:
    """Return ``y^-1 x y``: the point ``y(p)`` goes to ``y(x(p))``."""
    return FinSuppPerm._trusted({y(p): y(q) for p, q in x._moves.items()})


def shift(a: FinSuppPerm, s: int) -> FinSuppPerm:
    """Conjugate by the translation ``n -> n + s`` of Z (no wrapping)."""
    return FinSuppPerm._trusted({p + s: q + s for p, q in a._moves.items()})


def sign(a: FinSuppPerm) -> int:
    """Parity: 0 for even, 1 for odd."""
    return sum(len(c) - 1 for c in a.cycles()) % 2


def cycle(points: Sequence[int]) -> FinSuppPerm:
    pts = [int(p) for p in points]
    if len(set(pts)) != len(pts):
        raise InvalidCycle(f"cycle has repeated points: {pts}")
    if len(pts) < 2:
        return IDENTITY
    return FinSuppPerm._trusted({p: pts[(i + 1) % len(pts)] for i, p in enumerate(pts)})


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> FinSuppPerm:
    """Parse cycle notation such as ``(-1,0,1)(3,4)``; ``()`` is the identity.

    Cycles are multiplied in the order written (left to right).
    """
    s = text.strip()
    if not s:
        raise ParseError("empty permutation literal")
    pos = 0
    out = IDENTITY
    for m in _CYCLE_RE.finditer(s):
        if s[pos:m.start()].strip():
            raise ParseError(f"cannot parse permutation {text!r}")
        pos = m.end()
        body = m.group(1).strip()
        if not body:
            continue
        try:
            pts = [int(t) for t in re.split(r"[,\s]+", body) if t]
        except ValueError as exc:
            raise ParseError(f"cannot parse permutation {text!r}") from exc
        out = compose(out, cycle(pts))
    if s[pos:].strip() or pos == 0:
        raise ParseError(f"cannot parse permutation {text!r}")
    return out


class WindowPerm:
    """A permutation of the window {-r, ..., r}, stored as its image table."""

    __slots__ = ("radius", "images")

    def __init__(self, radius: int, images: Iterable[int] | None = None):
        r = int(radius)
        if r < 0:
            raise ValueError("radius must be non-negative")
        imgs = tuple(range(-r, r + 1)) if images is None else tuple(int(v) for v in images)
        if sorted(imgs) != list(range(-r, r + 1)):
            raise ValueError(f"images are not a permutation of [-{r}, {r}]")
        self.radius = r
        self.images = imgs

    @property
    def degree(self) -> int:
        return 2 * self.radius + 1

    def __call__(self, x: int) -> int:
        if abs(x) > self.radius:
            return x
        return self.images[x + self.radius]

    @classmethod
    def identity(cls, radius: int) -> WindowPerm:
        return cls(radius)

    @classmethod
    def from_finsupp(cls, p: FinSuppPerm, radius: int) -> WindowPerm:
        if p.radius() > radius:
            raise ValueError(f"support of {p} escapes the window of radius {radius}")
        return cls(radius, (p(x) for x in range(-radius, radius + 1)))

    def to_finsupp(self) -> FinSuppPerm:
        r = self.radius
        return FinSuppPerm._trusted({x - r: y for x, y in enumerate(self.images) if y != x - r})

    def embed(self, radius: int) -> WindowPerm:
        """The same permutation viewed in a window of at least the same radius."""
        return WindowPerm.from_finsupp(self.to_finsupp(), radius)

    def fixed_points(self) -> int:
        r = self.radius
        return sum(1 for x, y in enumerate(self.images) if y == x - r)

    def __mul__(self, other: WindowPerm) -> WindowPerm:
        _check_same_radius(self, other)
        r = self.radius
        return WindowPerm(r, (other.images[y + r] for y in self.images))

    def __invert__(self) -> WindowPerm:
        r = self.radius
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y + r] = x - r
        return WindowPerm(r, inv)

    def __eq__(self, other):
        if not isinstance(other, WindowPerm):
            return NotImplemented
        return self.radius == other.radius and self.images == other.images

    def __hash__(self):
        return hash((self.radius, self.images))

    def __str__(self):
        return f"{self.to_finsupp()} on [{self.radius}]"

    def __repr__(self):
        return f"WindowPerm({self.radius}, {self.to_finsupp()})"


def _check_same_radius(a: WindowPerm, b: WindowPerm) -> None:
    if a.radius != b.radius:
        raise DegreeMismatch(f"window radii differ: {a.radius} vs {b.radius}")


def hamming(a: Sequence[int], b: Sequence[int]) -> Fraction:
    """Normalized Hamming distance between two image tables of equal length."""
    if len(a) != len(b):
        raise DegreeMismatch(f"degrees differ: {len(a)} vs {len(b)}")
    n = len(a)
    agree = sum(1 for x, y in zip(a, b) if x == y)
    return Fraction(n - agree, n)


def hamming_distance(a: WindowPerm, b: WindowPerm) -> Fraction:
    """``1 - |Fix(a^-1 b)| / n`` as an exact rational.

    ``a^-1 b`` fixes ``a(y)`` exactly when ``a(y) == b(y)``, so this counts
    agreements of the two image tables.
    """
    _check_same_radius(a, b)
    return hamming(a.images, b.images)
