from math import factorial

import numpy as np
import pytest

from neumannlab.errors import EnumerationRefused, NotInDerivedSubgroup, SequenceExhausted
from neumannlab.lattice import (
    L,
    L_generators,
    close_subgroup,
    element_from_projection,
    folner_set,
    in_D_i,
    in_G_i,
    in_K,
    in_L,
    intersect_with_L,
    parse_subgroup,
    project,
)
from neumannlab.neumann import (
    OddSequence,
    abelianization,
    conjugate,
    evaluate_word,
    generators,
    identity,
    inverse,
    multiply,
    sigma_power,
    tail,
)
from neumannlab.permutation import cycle

from conftest import random_word


def brute_closure(gens, seq):
    seen = {identity(seq)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = multiply(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def test_L_generators(P):
    g1 = L_generators(P, 1)
    assert [tail(g).alt_part for g in g1] == [cycle([-2, -1, 0]), cycle([-1, 0, 1]), cycle([0, 1, 2])]
    assert len(L_generators(P, 2)) == 5
    assert all(abelianization(g) == 0 for g in L_generators(P, 3))
    with pytest.raises(SequenceExhausted):
        L_generators(OddSequence((5, 7)), 3)


def test_membership_predicates(P):
    t, s = generators(P)
    assert in_L(t, 1)
    assert not in_L(conjugate(t, sigma_power(P, 2)), 1)
    assert not any(in_L(s, i) for i in range(1, 5))
    assert not in_D_i(s, 1) and in_D_i(sigma_power(P, 3), 1)
    assert in_G_i(identity(P), 3)
    assert not in_G_i(t, 1)


def test_orders():
    P = OddSequence((5, 7, 9))
    for i in (1, 2, 3):
        expected = 1
        for j in range(1, i + 1):
            expected *= factorial(P.n(j)) // 2
        assert L(P, i).order() == expected
        assert L(P, i).bound == i


def test_close_subgroup_examples(P):
    t, s = generators(P)
    H = close_subgroup(P, [t])
    assert H.order() == 3 and H.bound == 1
    gens = [t, conjugate(t, s)]
    H2 = close_subgroup(P, gens)
    assert H2.order() == len(brute_closure(gens, P)) == 12
    assert close_subgroup(P, []).order() == 1
    with pytest.raises(NotInDerivedSubgroup):
        close_subgroup(P, [s])


def test_close_subgroup_across_windows(P):
    t, _ = generators(P)
    gens = [t, conjugate(t, sigma_power(P, 2))]
    H = close_subgroup(P, gens)
    elems = brute_closure(gens, P)
    assert H.order() == len(elems)
    assert set(H.elements()) == elems
    assert all(H.contains(h) for h in elems)
    rng = np.random.default_rng(3)
    outside = [l for l in (L(P, 2).random_element(rng) for _ in range(50)) if l not in elems]
    assert outside and not any(H.contains(l) for l in outside)
    assert parse_subgroup(P, "t, s^-2 t s^2").order() == H.order()


def test_in_K_examples(P):
    t, s = generators(P)
    H = close_subgroup(P, [t])
    for i in (1, 2, 3):
        assert in_K(identity(P), H, i)
        assert not in_K(s, H, i)
    assert in_K(t, H, 1)


def test_intersect_examples(P):
    t, _ = generators(P)
    H = close_subgroup(P, [t])
    assert intersect_with_L(H, 1) is H
    H2 = close_subgroup(P, [conjugate(t, sigma_power(P, P.r(1)))])
    assert H2.bound == 2
    meet = intersect_with_L(H2, 1)
    assert meet.order() == 1
    assert [h for h in H2.elements() if in_L(h, 1)] == [identity(P)]
    assert intersect_with_L(H2, 2) is H2


@pytest.mark.parametrize("shifts", [(0, 2), (0, 1, 2), (-2, 2), (1, 3), (0, 3)])
def test_intersect_against_filtering(P, shifts):
    t, _ = generators(P)
    H = close_subgroup(P, [conjugate(t, sigma_power(P, j)) for j in shifts])
    elems = list(H.elements())
    for i in range(1, H.bound + 1):
        meet = intersect_with_L(H, i)
        filtered = {h for h in elems if in_L(h, i)}
        assert meet.order() == len(filtered)
        assert set(meet.elements()) == filtered


def test_intersect_cap(P):
    t, _ = generators(P)
    with pytest.raises(EnumerationRefused):
        intersect_with_L(close_subgroup(P, [t, conjugate(t, sigma_power(P, 2))]), 1, cap=2)


def test_L_is_complement_to_G(P, rng):
    for i in (1, 2):
        Li = L(P, i)
        for _ in range(30):
            g = evaluate_word(P, random_word(rng, 12))
            # the element of L_i matching g on windows 1..i
            l = element_from_projection(P, project(g, i), i)
            assert Li.contains(l)
            assert in_G_i(multiply(inverse(l), g), i)
        for _ in range(30):
            l = Li.random_element(rng)
            if in_G_i(l, i):
                assert l == identity(P)


def test_folner_set(P):
    F1 = folner_set(P, 1)
    assert len(F1) == 180
    elems = list(F1)
    assert len(set(elems)) == 180
    assert len(folner_set(P, 2)) == 5 * 151200
    with pytest.raises(EnumerationRefused):
        iter(folner_set(P, 2, cap=1000)).__next__()
    rng = np.random.default_rng(0)
    assert all(F1.sample(rng) in set(elems) for _ in range(20))


def test_folner_transversal(P, rng):
    # each coset of G_1 meet D_1 meets F_1 exactly once
    F1 = list(folner_set(P, 1))
    F1_inv = [inverse(f) for f in F1]
    for _ in range(40):
        g = evaluate_word(P, random_word(rng, 14))
        hits = 0
        for fi in F1_inv:
            y = multiply(fi, g)
            hits += in_G_i(y, 1) and in_D_i(y, 1)
        assert hits == 1


def test_U_elements_have_eventually_trivial_coordinates(P):
    t, _ = generators(P)
    x, y = conjugate(t, sigma_power(P, 2)), conjugate(t, sigma_power(P, -2))
    u = multiply(multiply(x, y), multiply(inverse(x), inverse(y)))
    assert u.sigma_exp == 0 and tail(u).alt_part.is_identity() and not u.is_identity()
    ident = identity(P)
    assert all(u.coord(j) == ident.coord(j) for j in range(u.m, u.m + 4))
