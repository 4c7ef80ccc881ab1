"""Normal-form arithmetic in the B.H. Neumann group G(P) = N(P) x| <sigma>.

An element is stored as ``n * sigma^k`` with ``n`` in N.  The N-part is kept
as a finite list of window permutations ``p_1, ..., p_m`` (``p_j`` acts on
the window of radius ``r_j``), with the understanding that every coordinate
``j > m`` equals ``p_m`` embedded in the larger window.  The list is trimmed
to the shortest such prefix, so ``m`` is the stabilization index of ``n``.

Coordinates are stored internally as raw image tuples (the image of
``-r, ..., r`` in order); :class:`~neumannlab.permutation.WindowPerm` is the
public face.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import NotInDerivedSubgroup, ParseError, SequenceExhausted
from .permutation import IDENTITY, FinSuppPerm, WindowPerm, compose, shift

__all__ = [
    "OddSequence",
    "GroupElement",
    "VElement",
    "generators",
    "identity",
    "tau",
    "sigma",
    "sigma_power",
    "multiply",
    "inverse",
    "conjugate",
    "power",
    "coordinate",
    "n_coordinate",
    "stabilization_index",
    "tail",
    "abelianization",
    "in_N",
    "in_U",
    "parse_word",
    "format_word",
    "evaluate_word",
    "window_word_coordinate",
]


@dataclass(frozen=True)
class OddSequence:
    """The parameter P = (n_1, n_2, ...) as a prefix plus an arithmetic rule.

    Terms past the prefix are ``prefix[-1] + step * (i - len(prefix))``.
    With ``step=None`` the sequence is finite and asking for a later window
    raises :class:`SequenceExhausted`.
    """

    prefix: tuple[int, ...]
    step: int | None = None
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(n) for n in self.prefix))
        p = self.prefix
        if not p:
            raise ValueError("sequence needs at least one term")
        if any(n % 2 == 0 for n in p):
            raise ValueError(f"all terms must be odd: {p}")
        if p[0] < 5:
            raise ValueError("first term must be at least 5")
        for a, b in zip(p, p[1:]):
            if b < a or (self.strict and b == a):
                raise ValueError(f"sequence must be {'strictly ' if self.strict else ''}increasing: {p}")
        if self.step is not None:
            if self.step % 2 or self.step < 0 or (self.strict and self.step == 0):
                raise ValueError(f"invalid extension step {self.step}")

    @classmethod
    def arithmetic(cls, start: int = 5, step: int = 2, strict: bool = True) -> OddSequence:
        return cls((start,), step, strict)

    @classmethod
    def parse(cls, text: str, strict: bool = True) -> OddSequence:
        """Parse ``5,7,9``, ``5,7,9,...`` or ``arith:start=5,step=2``.

        A trailing ``...`` continues with the last difference (2 if only one
        term is given).
        """
        s = text.strip().replace(" ", "")
        try:
            if s.startswith("arith:"):
                kv = dict(item.split("=", 1) for item in s[len("arith:"):].split(","))
                unknown = set(kv) - {"start", "step"}
                if unknown:
                    raise ParseError(f"unknown keys in sequence literal: {sorted(unknown)}")
                return cls.arithmetic(int(kv.get("start", 5)), int(kv.get("step", 2)), strict)
            parts = s.split(",")
            step = None
            if parts and parts[-1] in ("...", "…"):
                parts = parts[:-1]
                nums = [int(t) for t in parts]
                step = nums[-1] - nums[-2] if len(nums) >= 2 else 2
            else:
                nums = [int(t) for t in parts]
            return cls(tuple(nums), step, strict)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(f"bad sequence literal {text!r}: {exc}") from exc

    def to_literal(self) -> str:
        body = ",".join(map(str, self.prefix))
        if self.step is None:
            return body
        if len(self.prefix) == 1 and self.step != 2:
            return f"arith:start={self.prefix[0]},step={self.step}"
        if len(self.prefix) >= 2 and self.prefix[-1] - self.prefix[-2] != self.step:
            raise ValueError("sequence has no literal form")
        return body + ",..."

    def n(self, i: int) -> int:
        """The i-th term, 1-based."""
        if i < 1:
            raise IndexError("windows are numbered from 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        if self.step is None:
            raise SequenceExhausted(
                f"window {i} requested but the sequence {self.to_literal()} has only {len(self.prefix)} terms"
            )
        return self.prefix[-1] + self.step * (i - len(self.prefix))

    def r(self, i: int) -> int:
        return (self.n(i) - 1) // 2

    def first_index_with_radius(self, radius: int) -> int:
        """Smallest window index i with r_i >= radius."""
        i = 1
        while self.r(i) < radius:
            i += 1
            if self.step == 0 and i > len(self.prefix):
                raise SequenceExhausted(f"no window of radius {radius} in a constant tail")
        return i

    def __str__(self):
        return self.to_literal()


# ---------------------------------------------------------------------------
# raw window tuples

@lru_cache(maxsize=None)
def _id(r: int) -> tuple[int, ...]:
    return tuple(range(-r, r + 1))


def _is_id(t: tuple[int, ...], r: int) -> bool:
    return t == _id(r)


def _compose_w(a: tuple, b: tuple, r: int) -> tuple:
    return tuple([b[y + r] for y in a])


def _inverse_w(a: tuple, r: int) -> tuple:
    inv = [0] * len(a)
    for x, y in enumerate(a):
        inv[y + r] = x - r
    return tuple(inv)


def _conj_shift_w(a: tuple, s: int, r: int) -> tuple:
    """Conjugate by sigma_r^s inside the window: q -> a(q - s) + s, cyclically."""
    n = 2 * r + 1
    s %= n
    if s == 0:
        return a
    out = [0] * n
    for x, y in enumerate(a):
        out[(x + s) % n] = (y + r + s) % n - r
    return tuple(out)


def _embed_w(a: tuple, ra: int, rb: int) -> tuple:
    if rb < ra:
        raise ValueError("cannot embed into a smaller window")
    if ra == rb:
        return a
    return tuple(range(-rb, -ra)) + a + tuple(range(ra + 1, rb + 1))


def _same_w(a: tuple, ra: int, b: tuple, rb: int) -> bool:
    """Equality as finitely supported permutations of Z; requires ra <= rb."""
    if ra == rb:
        return a == b
    cut = rb - ra
    return b[cut:len(b) - cut] == a and b[:cut] == _id(rb)[:cut] and b[len(b) - cut:] == _id(rb)[len(b) - cut:]


def _w_to_finsupp(a: tuple, r: int) -> FinSuppPerm:
    return FinSuppPerm._trusted({x - r: y for x, y in enumerate(a) if y != x - r})


def _w_radius(a: tuple, r: int) -> int:
    return max((abs(x - r) for x, y in enumerate(a) if y != x - r), default=0)


@lru_cache(maxsize=None)
def _tau_shift_w(e: int, s: int, r: int) -> tuple:
    """tau^e conjugated by sigma_r^s, with wrap-around."""
    base = {-1: 0, 0: 1, 1: -1}
    if e % 3 == 2:
        base = {v: k for k, v in base.items()}
    elif e % 3 == 0:
        return _id(r)
    t = list(_id(r))
    for x, y in base.items():
        t[x + r] = y
    return _conj_shift_w(tuple(t), s, r)


def _sigma_w(k: int, r: int) -> tuple:
    n = 2 * r + 1
    return tuple((x + k) % n - r for x in range(n))


# ---------------------------------------------------------------------------

class GroupElement:
    """Canonical normal form ``n * sigma^k`` of an element of G(P).

    Equality and hashing use ``(sigma_exp, prefix)`` only: elements are only
    ever compared over the same sequence.
    """

    __slots__ = ("seq", "sigma_exp", "_coords", "_hash")

    def __init__(self, seq: OddSequence, sigma_exp: int, coords: Sequence[tuple]):
        self.seq = seq
        self.sigma_exp = int(sigma_exp)
        self._coords = tuple(coords)
        self._hash = None

    @classmethod
    def from_coordinates(cls, seq: OddSequence, sigma_exp: int, windows: Sequence[tuple]) -> GroupElement:
        """Build an element from explicit N-coordinates for windows ``1..J`` (J >= 1).

        Coordinates past ``J`` are taken to equal window ``J``'s permutation,
        so the result lies in ``L_J`` times a power of sigma.
        """
        return cls(seq, sigma_exp, _canonical(seq, list(windows)))

    @property
    def m(self) -> int:
        return len(self._coords)

    @property
    def prefix(self) -> tuple[WindowPerm, ...]:
        return tuple(WindowPerm(self.seq.r(j + 1), c) for j, c in enumerate(self._coords))

    def n_coord(self, j: int) -> tuple:
        """Raw image tuple of the N-part in window ``j``."""
        m = len(self._coords)
        if j <= m:
            return self._coords[j - 1]
        return _embed_w(self._coords[-1], self.seq.r(m), self.seq.r(j))

    def coord(self, j: int) -> tuple:
        """Raw image tuple of the whole element (n_j then sigma_j^k) in window ``j``."""
        a = self.n_coord(j)
        if self.sigma_exp == 0:
            return a
        r = self.seq.r(j)
        n = 2 * r + 1
        k = self.sigma_exp
        return tuple([(y + r + k) % n - r for y in a])

    def tail_perm(self) -> FinSuppPerm:
        return _w_to_finsupp(self._coords[-1], self.seq.r(len(self._coords)))

    def tail_radius(self) -> int:
        return _w_radius(self._coords[-1], self.seq.r(len(self._coords)))

    def is_identity(self) -> bool:
        return self.sigma_exp == 0 and len(self._coords) == 1 and _is_id(self._coords[0], self.seq.r(1))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.sigma_exp == other.sigma_exp and self._coords == other._coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.sigma_exp, self._coords))
        return self._hash

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def __pow__(self, k: int) -> GroupElement:
        return power(self, k)

    def __invert__(self) -> GroupElement:
        return inverse(self)

    def __repr__(self):
        parts = ", ".join(str(p.to_finsupp()) for p in self.prefix)
        return f"GroupElement(sigma^{self.sigma_exp}, m={self.m}, [{parts}])"


@dataclass(frozen=True)
class VElement:
    """``alt_part * sigmabar^shift_exp`` in V = Alt_fin(Z) x| <sigmabar>."""

    alt_part: FinSuppPerm
    shift_exp: int

    def __mul__(self, other: VElement) -> VElement:
        return VElement(compose(self.alt_part, shift(other.alt_part, -self.shift_exp)),
                        self.shift_exp + other.shift_exp)

    def inverse(self) -> VElement:
        return VElement(shift(~self.alt_part, self.shift_exp), -self.shift_exp)

    def __call__(self, x: int) -> int:
        return self.alt_part(x) + self.shift_exp


def _canonical(seq: OddSequence, coords: list) -> tuple:
    m = len(coords)
    while m > 1 and _same_w(coords[m - 2], seq.r(m - 1), coords[m - 1], seq.r(m)):
        m -= 1
    return tuple(coords[:m])


def identity(seq: OddSequence) -> GroupElement:
    return GroupElement(seq, 0, (_id(seq.r(1)),))


def sigma_power(seq: OddSequence, k: int) -> GroupElement:
    return GroupElement(seq, k, (_id(seq.r(1)),))


def tau(seq: OddSequence) -> GroupElement:
    return GroupElement(seq, 0, (_tau_shift_w(1, 0, seq.r(1)),))


def sigma(seq: OddSequence) -> GroupElement:
    return sigma_power(seq, 1)


def generators(seq: OddSequence) -> tuple[GroupElement, GroupElement]:
    """The pair (tau, sigma)."""
    return tau(seq), sigma(seq)


def _shift_width(seq: OddSequence, *, m: int, tail_radius: int, s: int) -> int:
    """Last window needed explicitly when an N-part is conjugated by sigma^s."""
    return max(m, seq.first_index_with_radius(tail_radius + abs(s)))


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    """Normal form of ``g h``.

    ``(n sigma^k)(n' sigma^l) = n (n' conjugated by sigma^-k) sigma^(k+l)``.
    Past window ``J`` no conjugated coordinate wraps, so every later window
    agrees with window ``J`` and trimming the first ``J`` is exact.
    """
    seq = g.seq
    k = g.sigma_exp
    J = max(g.m, _shift_width(seq, m=h.m, tail_radius=h.tail_radius(), s=k))
    out = []
    for j in range(1, J + 1):
        r = seq.r(j)
        b = _conj_shift_w(h.n_coord(j), -k, r)
        out.append(_compose_w(g.n_coord(j), b, r))
    return GroupElement(seq, k + h.sigma_exp, _canonical(seq, out))


def inverse(g: GroupElement) -> GroupElement:
    seq = g.seq
    k = g.sigma_exp
    J = _shift_width(seq, m=g.m, tail_radius=g.tail_radius(), s=k)
    out = []
    for j in range(1, J + 1):
        r = seq.r(j)
        out.append(_conj_shift_w(_inverse_w(g.n_coord(j), r), k, r))
    return GroupElement(seq, -k, _canonical(seq, out))


def conjugate(g: GroupElement, h: GroupElement) -> GroupElement:
    """``h^-1 g h``."""
    if h.sigma_exp != 0 and h.m == 1 and _is_id(h._coords[0], h.seq.r(1)):
        return _conj_by_sigma(g, h.sigma_exp)
    return multiply(multiply(inverse(h), g), h)


def _conj_by_sigma(g: GroupElement, s: int) -> GroupElement:
    # sigma^-s n sigma^k sigma^s = (n conjugated by sigma^s) sigma^k
    seq = g.seq
    J = _shift_width(seq, m=g.m, tail_radius=g.tail_radius(), s=s)
    out = [_conj_shift_w(g.n_coord(j), s, seq.r(j)) for j in range(1, J + 1)]
    return GroupElement(seq, g.sigma_exp, _canonical(seq, out))


def power(g: GroupElement, k: int) -> GroupElement:
    base = g if k >= 0 else inverse(g)
    out = identity(g.seq)
    for _ in range(abs(k)):
        out = multiply(out, base)
    return out


def _mul_tau_power(g: GroupElement, e: int) -> GroupElement:
    """``g tau^e``: only three points move per window."""
    if e % 3 == 0:
        return g
    seq = g.seq
    k = g.sigma_exp
    J = max(g.m, seq.first_index_with_radius(abs(k) + 1))
    out = []
    for j in range(1, J + 1):
        r = seq.r(j)
        a = g.n_coord(j)
        b = _tau_shift_w(e, -k, r)
        out.append(_compose_w(a, b, r))
    return GroupElement(seq, k, _canonical(seq, out))


def n_coordinate(g: GroupElement, j: int) -> WindowPerm:
    """Window ``j`` coordinate of the N-part of ``g``."""
    return WindowPerm(g.seq.r(j), g.n_coord(j))


def coordinate(g: GroupElement, j: int) -> WindowPerm:
    """Window ``j`` coordinate of ``g`` as an element of A(P) (N-part then sigma_j^k)."""
    return WindowPerm(g.seq.r(j), g.coord(j))


def in_N(g: GroupElement) -> bool:
    return g.sigma_exp == 0


def stabilization_index(g: GroupElement) -> int:
    """Least i with g in L_i; defined on N only."""
    if g.sigma_exp != 0:
        raise NotInDerivedSubgroup(f"sigma exponent {g.sigma_exp} != 0")
    return g.m


def tail(g: GroupElement) -> VElement:
    return VElement(g.tail_perm(), g.sigma_exp)


def abelianization(g: GroupElement) -> int:
    return g.sigma_exp


def in_U(g: GroupElement) -> bool:
    """Membership in U(P) = ker of the tail map."""
    return g.sigma_exp == 0 and g.tail_perm().is_identity()


# ---------------------------------------------------------------------------
# words

_TOKEN_RE = re.compile(r"^([ts])(?:\^\(?([+-]?\d+)\)?)?$")


def parse_word(text: str) -> tuple[tuple[str, int], ...]:
    """Parse ``s^-3 t s^3`` into ``(("s", -3), ("t", 1), ("s", 3))``.

    Tokens are whitespace separated; ``⁻¹`` is accepted for ``^-1``.
    """
    s = text.replace("⁻¹", "^-1").replace("*", " ")
    out = []
    for tok in s.split():
        m = _TOKEN_RE.match(tok)
        if not m:
            raise ParseError(f"bad token {tok!r} in word {text!r}")
        e = int(m.group(2)) if m.group(2) is not None else 1
        if e:
            out.append((m.group(1), e))
    return tuple(out)


def format_word(word: Sequence[tuple[str, int]]) -> str:
    return " ".join(g if e == 1 else f"{g}^{e}" for g, e in word)


def evaluate_word(seq: OddSequence, word: str | Sequence[tuple[str, int]]) -> GroupElement:
    letters = parse_word(word) if isinstance(word, str) else word
    g = identity(seq)
    for name, e in letters:
        if name == "s":
            g = GroupElement(seq, g.sigma_exp + e, g._coords)
        else:
            g = _mul_tau_power(g, e)
    return g


def window_word_coordinate(seq: OddSequence, word: str | Sequence[tuple[str, int]], j: int) -> WindowPerm:
    """Evaluate a word directly in window ``j`` of A(P), with no normal form.

    This is the independent route used to check :func:`evaluate_word`.
    """
    letters = parse_word(word) if isinstance(word, str) else word
    r = seq.r(j)
    cur = _id(r)
    for name, e in letters:
        step = _sigma_w(e, r) if name == "s" else _tau_shift_w(e, 0, r)
        cur = _compose_w(cur, step, r)
    return WindowPerm(r, cur)


def iter_reduced_words(max_len: int) -> Iterator[tuple[tuple[str, int], ...]]:
    """All freely reduced words over t, s and inverses, by length then lexicographically.

    ``t`` has order 3, so ``t t`` is skipped in favour of its shorter form ``t^-1``.
    """
    letters = (("t", 1), ("t", -1), ("s", 1), ("s", -1))
    frontier = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1][0] == x[0] and (w[-1][1] == -x[1] or x[0] == "t"):
                    continue
                nxt.append(w + (x,))
        for w in nxt:
            yield w
        frontier = nxt
