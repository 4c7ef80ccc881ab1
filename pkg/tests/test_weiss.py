from fractions import Fraction

import numpy as np
import pytest

from neumannlab.errors import EnumerationRefused, NotInDerivedSubgroup
from neumannlab.lattice import L, close_subgroup, in_K, intersect_with_L
from neumannlab.neumann import (
    GroupElement,
    OddSequence,
    conjugate,
    evaluate_word,
    generators,
    identity,
    sigma_power,
)
from neumannlab.permutation import WindowPerm, parse_cycles
from neumannlab.weiss import (
    Estimate,
    adapted_lower_bound,
    adapted_ratio,
    adapted_tail_bound,
    folner_boundary_ratio,
    p_statistic,
    p_statistic_bruteforce,
    q_statistic,
    weiss_report,
)

from conftest import random_word


@pytest.fixture
def H(P):
    return close_subgroup(P, [generators(P)[0]])


def test_folner_examples(P):
    t, s = generators(P)
    assert folner_boundary_ratio(P, 1, s) == Fraction(2, 3)
    assert all(folner_boundary_ratio(P, i, t) == 0 for i in (1, 2, 3))
    assert folner_boundary_ratio(P, 1, s, mode="enumerate") == Fraction(2, 3)
    assert folner_boundary_ratio(P, 1, t, mode="enumerate") == 0
    with pytest.raises(ValueError):
        folner_boundary_ratio(P, 1, evaluate_word(P, "t s"), mode="closed")
    with pytest.raises(EnumerationRefused):
        folner_boundary_ratio(P, 2, s, mode="enumerate", cap=1000)


def test_folner_structured_matches_enumeration(P, rng):
    for _ in range(12):
        g = evaluate_word(P, random_word(rng, 10))
        assert folner_boundary_ratio(P, 1, g, mode="structured") == folner_boundary_ratio(P, 1, g, mode="enumerate")


def test_folner_closed_forms(P):
    t, s = generators(P)
    for i in range(1, 5):
        assert folner_boundary_ratio(P, i, s, mode="structured") == Fraction(2, 2 * P.r(i) - 1)
        assert folner_boundary_ratio(P, i, t, mode="structured") == 0


def test_adapted_examples(P):
    t, s = generators(P)
    assert adapted_ratio(P, t, 1) == Fraction(3, 5)
    assert adapted_lower_bound(P, t, 1) == Fraction(3, 5)
    vals = [adapted_ratio(P, t, i) for i in range(1, 8)]
    assert vals == sorted(vals) and vals[-1] == Fraction(15, 17)
    with pytest.raises(NotInDerivedSubgroup):
        adapted_ratio(P, s, 1)


def test_adapted_tail_bound_holds(P, rng):
    checked = 0
    for _ in range(200):
        g = evaluate_word(P, random_word(rng, 14))
        if g.sigma_exp:
            continue
        for i in range(g.m, g.m + 3):
            assert adapted_ratio(P, g, i) >= adapted_tail_bound(P, g, i)
            checked += 1
    assert checked > 100


def test_index_bound_fails_for_wide_tail(P):
    # trivial in window 1, a 3-cycle reaching the edge of window 2: i(g) = 2 but the tail radius is 3
    g = GroupElement.from_coordinates(P, 0, [WindowPerm.identity(2).images,
                                               WindowPerm.from_finsupp(parse_cycles("(-3,-2,3)"), 3).images])
    assert g.m == 2
    assert adapted_ratio(P, g, 2) == Fraction(1, 7)
    assert adapted_lower_bound(P, g, 2) == Fraction(3, 7)
    assert adapted_tail_bound(P, g, 2) == Fraction(1, 7)


def test_q_examples(P, H):
    t, _ = generators(P)
    assert q_statistic(P, H, t, 1) == 1
    # at j = -1 the conjugate is t^s = (0,1,2), which lies in L_1
    assert q_statistic(P, H, conjugate(t, sigma_power(P, 2)), 1) == Fraction(1, 3)
    assert q_statistic(P, H, identity(P), 1) == 1
    assert q_statistic(P, H, conjugate(t, sigma_power(P, 3)), 1) == 0


def test_p_examples(P, H):
    t, s = generators(P)
    for i in (1, 2, 3, 4):
        assert p_statistic(P, H, s, i) == 0
    assert p_statistic(P, H, identity(P), 1) == 0
    assert p_statistic(P, H, t, 1) == p_statistic_bruteforce(P, H, t, 1)
    assert p_statistic(P, H, conjugate(t, sigma_power(P, 2)), 1) == Fraction(1, 15)
    with pytest.raises(EnumerationRefused):
        p_statistic(P, H, t, 3)


SUBGROUPS = {
    "t": ["t"],
    "L1": ["s t s^-1", "t", "s^-1 t s"],
    "L1^s": ["t", "s^-1 t s", "s^-2 t s^2"],
    "wide": ["t", "s^-3 t s^3"],
}
PROBES = ["t", "s^-1 t s", "s^-2 t s^2", "s^-3 t s^3", "s t s^-1 t", "t s^3", "s^3 t", "s^-4 t s^4"]


@pytest.mark.parametrize("name", list(SUBGROUPS))
def test_p_exact_matches_bruteforce(P, name):
    H = close_subgroup(P, [evaluate_word(P, w) for w in SUBGROUPS[name]])
    for w in PROBES:
        g = evaluate_word(P, w)
        assert p_statistic(P, H, g, 1) == p_statistic_bruteforce(P, H, g, 1), w


def test_p_mc_covers_exact(P):
    H = close_subgroup(P, [evaluate_word(P, w) for w in SUBGROUPS["L1^s"]])
    for k, w in enumerate(PROBES):
        g = evaluate_word(P, w)
        exact = p_statistic(P, H, g, 1)
        est = p_statistic(P, H, g, 1, mode="mc", samples=30_000, seed=k)
        assert isinstance(est, Estimate) and est.samples >= 30_000
        assert est.covers(exact), (w, exact, est)


def test_mc_reproducible(P, H):
    g = conjugate(generators(P)[0], sigma_power(P, 2))
    a = p_statistic(P, H, g, 2, mode="mc", samples=5000, seed=11)
    b = p_statistic(P, H, g, 2, mode="mc", samples=5000, seed=11)
    assert a == b


@pytest.mark.parametrize("gens", [["t"], SUBGROUPS["L1^s"]])
@pytest.mark.parametrize("i", [1, 2])
def test_L_meets_H_and_K_alike(P, gens, i):
    H = close_subgroup(P, [evaluate_word(P, w) for w in gens])
    rng = np.random.default_rng(i)
    for _ in range(100):
        l = L(P, i).random_element(rng)
        assert H.contains(l) == in_K(l, H, i)
    for h in intersect_with_L(H, i).elements():
        assert in_K(h, H, i)


def test_report(P, H):
    reps = weiss_report(P, H, ["t", "s^-1 t s", "s"], [1, 2], seed=3)
    by = {r.probe: r for r in reps}
    assert all(row.value == 0 for row in by["s"].rows)
    assert by["s^-1 t s"].non_increasing
    assert all(r.dominated_by_q for r in reps)
    assert weiss_report(P, H, [], [1, 2], seed=3) == []
    mc = weiss_report(P, H, ["s^-1 t s"], [3], budget=2000, seed=3)[0].rows[0]
    assert mc.mode == "mc" and isinstance(mc.value, Estimate)


def test_p_non_increasing(P):
    Hs = [close_subgroup(P, [evaluate_word(P, w) for w in gens]) for gens in SUBGROUPS.values()]
    for H in Hs:
        for w in ["s^-1 t s", "s^-2 t s^2", "s^-3 t s^3"]:
            g = evaluate_word(P, w)
            assert p_statistic(P, H, g, 2) <= p_statistic(P, H, g, 1)


def test_p_dominated_by_one_minus_q(P, rng):
    H = close_subgroup(P, [evaluate_word(P, w) for w in SUBGROUPS["wide"]])
    for _ in range(10):
        g = evaluate_word(P, random_word(rng, 8))
        if g.sigma_exp == 0:
            assert p_statistic(P, H, g, 1) <= 1 - q_statistic(P, H, g, 1)
