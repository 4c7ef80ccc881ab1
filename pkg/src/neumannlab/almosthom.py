"""Maps from G(P) into finite symmetric groups, their defect and their distance.

A map is stored through the finite quotient Q = A_1 x ... x A_i acting on
the disjoint union of windows 1..i (degree ``n = sum (2 r_j + 1)``).  Each
probe word is evaluated window by window, so only windows ``1..i`` of P
are ever needed.  Probe words with the same image in Q are identified, and
the map assigns one permutation to each element of Q reached by the probes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeMismatch, MissingProbe
from .lattice import _flatten, _layout
from .neumann import OddSequence, format_word, iter_reduced_words, parse_word, window_word_coordinate
from .permutation import hamming
from .stabchain import inv, mul

__all__ = [
    "FiniteRep",
    "quotient_rep",
    "defect",
    "distance",
    "perturb",
    "probe_words",
    "word_pairs",
    "GENERATOR_WORDS",
]

Word = tuple

GENERATOR_WORDS: tuple[Word, ...] = ((("t", 1),), (("s", 1),))


def _as_word(w) -> Word:
    return parse_word(w) if isinstance(w, str) else tuple(w)


def _quotient_image(seq: OddSequence, word: Word, depth: int) -> tuple:
    return _flatten(seq, [window_word_coordinate(seq, word, j).images for j in range(1, depth + 1)])


@dataclass
class FiniteRep:
    """A map on probe words into Sym(n).

    ``keys`` sends each probe word to its element of Q; ``images`` assigns a
    permutation to each such element; ``reps`` fixes the representative
    word of each element (generators first, then shortest, then first seen).
    """

    seq: OddSequence
    depth: int
    keys: dict = field(default_factory=dict)
    reps: dict = field(default_factory=dict)
    images: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        offs, radii = _layout(self.seq, self.depth)
        return offs[-1] + 2 * radii[-1] + 1

    @property
    def words(self) -> list[Word]:
        return list(self.keys)

    def key(self, w) -> tuple:
        w = _as_word(w)
        try:
            return self.keys[w]
        except KeyError:
            raise MissingProbe(f"word {format_word(w)!r} is not a probe") from None

    def __call__(self, w) -> tuple:
        return self.images[self.key(w)]

    def image_of_product(self, u, v) -> tuple:
        """f applied to the element uv; it must be an element reached by the probes."""
        k = mul(self.key(u), self.key(v))
        if k not in self.images:
            raise MissingProbe(f"the product {format_word(_as_word(u))!r} * {format_word(_as_word(v))!r} "
                               "is not among the probes")
        return self.images[k]


def quotient_rep(seq: OddSequence, depth: int, probes: Iterable) -> FiniteRep:
    """The genuine homomorphism G(P) -> Q <= Sym(n), recorded on ``probes``.

    The generators are always included.
    """
    rep = FiniteRep(seq, depth)
    words = list(GENERATOR_WORDS) + sorted({_as_word(w) for w in probes}, key=lambda w: (len(w), w))
    for w in words:
        if w in rep.keys:
            continue
        k = _quotient_image(seq, w, depth)
        rep.keys[w] = k
        rep.reps.setdefault(k, w)
        rep.images[k] = k
    return rep


def defect(f: FiniteRep, pairs: Sequence[tuple]) -> Fraction:
    """``max d_n(f(u) f(v), f(uv))`` over the pairs; 0 for no pairs."""
    worst = Fraction(0)
    for u, v in pairs:
        worst = max(worst, hamming(mul(f(u), f(v)), f.image_of_product(u, v)))
    return worst


def distance(f: FiniteRep, g: FiniteRep, words: Sequence) -> Fraction:
    """``max d_n(f(w), g(w))`` over the words."""
    if f.degree != g.degree:
        raise DegreeMismatch(f"degrees differ: {f.degree} vs {g.degree}")
    return max((hamming(f(w), g(w)) for w in words), default=Fraction(0))


def perturb(f: FiniteRep, epsilon: float, seed) -> FiniteRep:
    """Post-compose each generator image with a uniform permutation of a random ``ceil(eps n)``-subset.

    All other images are rebuilt from the perturbed generators along the
    representative words (``t^-1`` and negative powers use inverses).
    """
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = f.degree
    size = math.ceil(epsilon * n - 1e-12)
    gens = {}
    for w in GENERATOR_WORDS:
        pts = rng.choice(n, size=size, replace=False)
        noise = list(range(n))
        for p, q in zip(pts, rng.permutation(pts)):
            noise[p] = int(q)
        gens[w[0][0]] = mul(f(w), tuple(noise))
    inverses = {name: inv(p) for name, p in gens.items()}

    out = FiniteRep(f.seq, f.depth, dict(f.keys), dict(f.reps))
    ident = tuple(range(n))
    for k, w in f.reps.items():
        img = ident
        for name, e in w:
            step = gens[name] if e > 0 else inverses[name]
            for _ in range(abs(e)):
                img = mul(img, step)
        out.images[k] = img
    return out


def probe_words(max_len: int) -> list[Word]:
    """Freely reduced words up to ``max_len`` letters."""
    return list(iter_reduced_words(max_len))


def word_pairs(words: Sequence[Word], max_total: int) -> list[tuple[Word, Word]]:
    """Pairs of nonempty words whose lengths add up to at most ``max_total``."""
    ws = [w for w in words if w]
    return [(u, v) for u in ws for v in ws if len(u) + len(v) <= max_total]
