"""Foelner boundary ratios and the Weiss-approximation statistics p_i, q_i.

Every statistic here ranges over F_i = {sigma^j l}.  Writing
``f = sigma^j l`` gives ``g^f = (g^(sigma^j))^l``, so the j-loop is done
exactly and only the L_i factor is enumerated or sampled.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .errors import EnumerationRefused, NotInDerivedSubgroup
from .lattice import (
    DEFAULT_CAP,
    FiniteSubgroup,
    L,
    folner_set,
    in_D_i,
    in_G_i,
    in_K,
    in_L,
    intersect_with_L,
    project,
)
from .neumann import (
    GroupElement,
    OddSequence,
    _id,
    _tau_shift_w,
    conjugate,
    evaluate_word,
    inverse,
    multiply,
    sigma_power,
)

__all__ = [
    "folner_boundary_ratio",
    "adapted_ratio",
    "adapted_lower_bound",
    "adapted_tail_bound",
    "q_statistic",
    "p_statistic",
    "p_statistic_bruteforce",
    "Estimate",
    "WeissRow",
    "ConvergenceReport",
    "weiss_report",
    "probe_stream",
]


def _shifts(seq: OddSequence, i: int, extra: int = 0) -> range:
    r = seq.r(i) - 1 + extra
    return range(-r, r + 1)


def _is_sigma(g: GroupElement) -> bool:
    return g.sigma_exp == 1 and g.m == 1 and g.n_coord(1) == _id(g.seq.r(1))


def _is_tau(g: GroupElement) -> bool:
    return g.sigma_exp == 0 and g.m == 1 and g.n_coord(1) == _tau_shift_w(1, 0, g.seq.r(1))


# ---------------------------------------------------------------------------
# Foelner ratios

def folner_boundary_ratio(seq: OddSequence, i: int, g: GroupElement, *, mode: str = "auto",
                          cap: int = DEFAULT_CAP) -> Fraction:
    """``|g F_i symdiff F_i| / |F_i|``.

    ``closed`` handles sigma and tau only.  ``structured`` is exact for any g:
    ``g sigma^j l = sigma^(j+k) (n^(sigma^(j+k))) l`` lies in F_i iff
    ``|j+k| <= r_i - 1`` and the conjugate lies in L_i, independently of l.
    ``enumerate`` builds F_i outright.  ``auto`` means closed when possible,
    else structured.
    """
    r = seq.r(i)
    if mode == "auto":
        mode = "closed" if _is_sigma(g) or _is_tau(g) else "structured"
    if mode == "closed":
        if _is_sigma(g):
            return Fraction(2, 2 * r - 1)
        if _is_tau(g):
            return Fraction(0)
        raise ValueError("closed form only exists for sigma and tau")
    if mode == "structured":
        k = g.sigma_exp
        n = GroupElement(seq, 0, g._coords)
        hits = sum(1 for j in _shifts(seq, i)
                   if abs(j + k) <= r - 1 and in_L(conjugate(n, sigma_power(seq, j + k)), i))
        return 2 * (1 - Fraction(hits, 2 * r - 1))
    if mode == "enumerate":
        F = folner_set(seq, i, cap)
        members = set(F)
        outside = sum(1 for f in members if multiply(g, f) not in members)
        return Fraction(2 * outside, len(members))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# ratios over shifted conjugates

def _require_N(g: GroupElement) -> None:
    if g.sigma_exp != 0:
        raise NotInDerivedSubgroup(f"probe has sigma exponent {g.sigma_exp}")


def _landing_fraction(g: GroupElement, i: int, shifts: range) -> Fraction:
    seq = g.seq
    hits = sum(1 for j in shifts if in_L(conjugate(g, sigma_power(seq, j)), i))
    return Fraction(hits, len(shifts))


def adapted_ratio(seq: OddSequence, g: GroupElement, i: int) -> Fraction:
    """Fraction of ``j`` in ``[r_i]`` with ``g^(sigma^j)`` in L_i."""
    _require_N(g)
    return _landing_fraction(g, i, _shifts(seq, i, extra=1))


def adapted_lower_bound(seq: OddSequence, g: GroupElement, i: int) -> Fraction:
    """``(2(r_i - i(g)) + 1) / (2 r_i + 1)``, the bound stated in terms of the stabilization index."""
    _require_N(g)
    r = seq.r(i)
    return Fraction(2 * (r - g.m) + 1, 2 * r + 1)


def adapted_tail_bound(seq: OddSequence, g: GroupElement, i: int) -> Fraction:
    """``(2(r_i - R) + 1) / (2 r_i + 1)`` with R the radius of the tail support, valid for ``i >= i(g)``.

    For ``|j| <= r_i - R`` the shifted tail stays inside window i, and no
    earlier window sees a wrap that later windows miss.  Clamped at 0.
    """
    _require_N(g)
    if i < g.m:
        raise ValueError(f"bound needs i >= i(g) = {g.m}")
    r = seq.r(i)
    return max(Fraction(0), Fraction(2 * (r - g.tail_radius()) + 1, 2 * r + 1))


def q_statistic(seq: OddSequence, H: FiniteSubgroup | None, g: GroupElement, i: int) -> Fraction:
    """``|{f in F_i : g^f in L_i}| / |F_i|``; the l factor cancels, leaving the j-loop.

    ``H`` does not enter the value and is accepted for a uniform signature.
    """
    _require_N(g)
    return _landing_fraction(g, i, _shifts(seq, i))


# ---------------------------------------------------------------------------
# p_i

@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo mean with a 95% (by default) confidence interval."""

    mean: float
    low: float
    high: float
    samples: int
    method: str   # "normal" or "wilson"

    @property
    def halfwidth(self) -> float:
        return (self.high - self.low) / 2

    def covers(self, value) -> bool:
        return self.low <= float(value) <= self.high


def _wilson(count: int, n: int, z: float) -> tuple[float, float]:
    p = count / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def _conj_rows(l: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Row-wise ``l^-1 x l`` (left to right) for flat permutations."""
    rows = np.arange(len(l))[:, None]
    linv = np.empty_like(l)
    linv[rows, l] = np.arange(l.shape[1])
    return l[rows, x[linv]]


def _hits(H: FiniteSubgroup, S: FiniteSubgroup, x: GroupElement, i: int, k_ok: bool,
          larr_for) -> np.ndarray:
    """Indicator of ``x^l in K_i symdiff H`` over the L_i rows given by ``larr_for(c)``."""
    c = max(i, H.bound, x.m)
    larr = larr_for(c)
    y = _conj_rows(larr, np.asarray(project(x, c)))
    if x.sigma_exp == 0:
        in_h = H.contains_coords_many(y, c)
    else:
        in_h = np.zeros(len(y), dtype=bool)
    if k_ok:
        deg_i = sum(2 * x.seq.r(j) + 1 for j in range(1, i + 1))
        in_k = S.contains_coords_many(y[:, :deg_i], i)
    else:
        in_k = np.zeros(len(y), dtype=bool)
    return in_h != in_k


def probe_stream(seed: int, probe: str, i: int) -> np.random.Generator:
    """The RNG substream for one (probe, i) cell."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(zlib.crc32(probe.encode()), i)))


def p_statistic(seq: OddSequence, H: FiniteSubgroup, g: GroupElement, i: int, *, mode: str = "exact",
                samples: int = 10**5, seed: int | np.random.Generator | None = None,
                cap: int = DEFAULT_CAP, confidence: float = 0.95) -> Fraction | Estimate:
    """``|{f in F_i : g^f in K_i symdiff H}| / |F_i|``.

    ``exact`` enumerates L_i (refused when ``|F_i| > cap``) and returns a
    Fraction.  ``mc`` keeps the j-loop exact, draws ``ceil(samples / (2r_i - 1))``
    uniform elements of L_i per shift and returns an :class:`Estimate`.
    When g is outside N with ``ab(g) != 0 mod (2r_i - 1)`` no conjugate can
    lie in H or K_i and both modes return exactly 0.
    """
    r = seq.r(i)
    width = 2 * r - 1
    k_ok = g.sigma_exp % width == 0
    if g.sigma_exp != 0 and not k_ok:
        return Fraction(0)
    Li = L(seq, i)
    S = intersect_with_L(H, i, cap)
    conj = [conjugate(g, sigma_power(seq, j)) for j in _shifts(seq, i)]

    if mode == "exact":
        size = width * Li.order()
        if size > cap:
            raise EnumerationRefused(f"|F_{i}| = {size} exceeds cap {cap}")
        total = sum(int(_hits(H, S, x, i, k_ok, Li.projections_array).sum()) for x in conj)
        return Fraction(total, size)
    if mode == "mc":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        per = max(1, -(-samples // width))
        fracs, count = [], 0
        for x in conj:
            draws = {}

            def larr_for(c, _d=draws):
                if c not in _d:
                    _d[c] = Li.projections_array(c, rng=rng, size=per)
                return _d[c]

            h = int(_hits(H, S, x, i, k_ok, larr_for).sum())
            count += h
            fracs.append(h / per)
        n = per * width
        z = NormalDist().inv_cdf(0.5 + confidence / 2)
        mean = count / n
        if count < 5 or n - count < 5:
            lo, hi = _wilson(count, n, z)
            return Estimate(mean, lo, hi, n, "wilson")
        var = sum(p * (1 - p) / per for p in fracs) / width**2
        half = z * math.sqrt(var)
        return Estimate(mean, max(0.0, mean - half), min(1.0, mean + half), n, "normal")
    raise ValueError(f"unknown mode {mode!r}")


def p_statistic_bruteforce(seq: OddSequence, H: FiniteSubgroup, g: GroupElement, i: int,
                           cap: int = DEFAULT_CAP) -> Fraction:
    """Reference value of p_i by walking F_i in normal form.

    H is listed element by element and K_i membership is decided from its
    definition: some h in H meet L_i with ``h^-1 y`` in G_i meet D_i.
    """
    F = list(folner_set(seq, i, cap))
    H_elems = set(H.elements())
    S_elems = [h for h in H_elems if in_L(h, i)]
    S_inv = [inverse(h) for h in S_elems]
    bad = 0
    for f in F:
        y = conjugate(g, f)
        in_h = y in H_elems
        in_k = in_D_i(y, i) and any(in_G_i(multiply(hi, y), i) for hi in S_inv)
        bad += in_h != in_k
    return Fraction(bad, len(F))


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class WeissRow:
    i: int
    n_i: int
    mode: str
    value: Fraction | Estimate
    samples: int
    q: Fraction | None = None

    @property
    def point(self) -> float:
        return float(self.value.mean if isinstance(self.value, Estimate) else self.value)


@dataclass
class ConvergenceReport:
    """p_i(g) for one probe across a range of i.

    ``non_increasing`` is a trend check on the point values; the expected
    limit for a Weiss approximation is 0 and is reported alongside, never
    inferred.
    """

    probe: str
    rows: list[WeissRow] = field(default_factory=list)
    expected_limit: int = 0

    @property
    def non_increasing(self) -> bool:
        pts = [row.point for row in self.rows]
        return all(b <= a + 1e-12 for a, b in zip(pts, pts[1:]))

    @property
    def dominated_by_q(self) -> bool:
        """p_i <= 1 - q_i wherever q_i is defined (conjugates landing in L_i never hit the symmetric difference)."""
        return all(row.point <= 1 - row.q + 1e-12 for row in self.rows if row.q is not None
                   and not isinstance(row.value, Estimate))


def weiss_report(seq: OddSequence, H: FiniteSubgroup, probes: Sequence[str], i_range: Sequence[int],
                 budget: int = 10**5, seed: int = 0, *, mode: str = "auto",
                 cap: int = DEFAULT_CAP) -> list[ConvergenceReport]:
    """One report per probe word.

    ``auto`` uses exact enumeration when ``|F_i| <= cap`` and Monte Carlo
    with ``budget`` samples otherwise.  Each (probe, i) cell draws from its
    own substream, so cells can be computed in any order.
    """
    out = []
    for word in probes:
        g = evaluate_word(seq, word)
        rep = ConvergenceReport(word)
        for i in i_range:
            width = 2 * seq.r(i) - 1
            size = width * L(seq, i).order()
            use = mode
            if use == "auto":
                use = "exact" if size <= cap else "mc"
            trivial = g.sigma_exp != 0 and g.sigma_exp % width != 0
            if trivial:
                use = "exact"
            if use == "exact":
                val = p_statistic(seq, H, g, i, mode="exact", cap=cap)
                n_samples = size
            else:
                val = p_statistic(seq, H, g, i, mode="mc", samples=budget, seed=probe_stream(seed, word, i),
                                  cap=cap)
                n_samples = val.samples
            q = q_statistic(seq, H, g, i) if g.sigma_exp == 0 else None
            rep.rows.append(WeissRow(i, seq.n(i), use, val, n_samples, q))
        out.append(rep)
    return out
