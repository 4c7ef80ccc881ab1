import pytest

from neumannlab.errors import NotInDerivedSubgroup, ParseError, SequenceExhausted
from neumannlab.lattice import in_L
from neumannlab.neumann import (
    GroupElement,
    OddSequence,
    VElement,
    abelianization,
    conjugate,
    coordinate,
    evaluate_word,
    format_word,
    generators,
    identity,
    in_N,
    in_U,
    inverse,
    iter_reduced_words,
    multiply,
    parse_word,
    sigma_power,
    stabilization_index,
    tail,
    window_word_coordinate,
)
from neumannlab.permutation import IDENTITY, WindowPerm, cycle, parse_cycles

from conftest import random_word


def wp(r, text):
    return WindowPerm.from_finsupp(parse_cycles(text), r)


class TestOddSequence:
    def test_parse_forms(self):
        assert OddSequence.parse("5,7,9").prefix == (5, 7, 9)
        s = OddSequence.parse("5,7,9,...")
        assert s.n(10) == 23 and s.r(4) == 5
        a = OddSequence.parse("arith:start=5,step=4")
        assert [a.n(i) for i in (1, 2, 3)] == [5, 9, 13]
        assert OddSequence.parse(s.to_literal()) == s

    def test_invalid(self):
        for bad in ("4,7", "3,5", "5,5", "7,5", "5,x"):
            with pytest.raises(ParseError):
                OddSequence.parse(bad)
        assert OddSequence.parse("5,5", strict=False).prefix == (5, 5)

    def test_exhausted(self):
        s = OddSequence((5, 7))
        with pytest.raises(SequenceExhausted):
            s.n(3)
        with pytest.raises(SequenceExhausted):
            multiply(sigma_power(s, 3), generators(s)[0])


def test_generators(P):
    t, s = generators(P)
    assert t.sigma_exp == 0 and t.m == 1 and t.prefix == (wp(2, "(-1,0,1)"),)
    assert s.sigma_exp == 1 and s.prefix == (WindowPerm.identity(2),)
    assert coordinate(t, 3) == wp(4, "(-1,0,1)")


def test_multiply_examples(P):
    t, s = generators(P)
    assert multiply(t, multiply(t, t)).is_identity()
    assert conjugate(t, s).prefix == (wp(2, "(0,1,2)"),)
    g = conjugate(t, sigma_power(P, 2))
    assert g.m == 2
    assert coordinate(g, 1) == wp(2, "(1,2,-2)")
    for j in (2, 3, 4, 5):
        assert coordinate(g, j) == wp(P.r(j), "(1,2,3)")


def test_inverse_examples(P):
    t, s = generators(P)
    assert inverse(identity(P)).is_identity()
    assert inverse(s).sigma_exp == -1
    assert inverse(t).prefix == (wp(2, "(-1,1,0)"),)


def test_coordinate_examples():
    P = OddSequence((5, 7))
    t, s = generators(P)
    assert coordinate(t, 1) == wp(2, "(-1,0,1)")
    assert coordinate(s, 2) == WindowPerm.from_finsupp(cycle(range(-3, 4)), 3)


def test_stabilization_index_examples(P):
    t, s = generators(P)
    assert stabilization_index(t) == 1
    assert stabilization_index(conjugate(t, sigma_power(P, 2))) == 2
    assert stabilization_index(identity(P)) == 1
    with pytest.raises(NotInDerivedSubgroup):
        stabilization_index(s)


def test_tail_examples(P):
    t, s = generators(P)
    assert tail(s) == VElement(IDENTITY, 1)
    assert tail(t) == VElement(cycle([-1, 0, 1]), 0)
    assert tail(conjugate(t, sigma_power(P, 2))) == VElement(cycle([1, 2, 3]), 0)


def test_abelianization_examples(P):
    t, s = generators(P)
    assert abelianization(t) == 0
    assert abelianization(s) == 1
    assert abelianization(multiply(s, s)) == 2


def test_in_U(P):
    t, _ = generators(P)
    assert in_U(identity(P))
    assert not in_U(t)
    # bounded search over commutators [t^(s^a), t^(s^b)] with |a|, |b| <= 3
    found = None
    for a in range(-3, 4):
        for b in range(-3, 4):
            x, y = f"s^{-a} t s^{a}", f"s^{-b} t s^{b}"
            w = f"{x} {y} {x} {x} {y} {y}"   # x y x^-1 y^-1, using t^-1 = t t
            g = evaluate_word(P, w)
            if in_U(g) and not g.is_identity():
                found = (w, g)
                break
        if found:
            break
    assert found is not None
    w, g = found
    assert g.sigma_exp == 0 and coordinate(g, 1) != WindowPerm.identity(2)
    assert all(coordinate(g, j) == WindowPerm.identity(P.r(j)) for j in range(g.m + 1, g.m + 4))


def test_words(P):
    t, s = generators(P)
    assert evaluate_word(P, "").is_identity()
    assert evaluate_word(P, "s⁻¹ t s") == conjugate(t, s)
    assert evaluate_word(P, "t t t").is_identity()
    assert evaluate_word(P, "s^-3 t s^3") == conjugate(t, sigma_power(P, 3))
    assert parse_word("s^-3 t s^(2)") == (("s", -3), ("t", 1), ("s", 2))
    assert format_word(parse_word("s^-1 t s")) == "s^-1 t s"
    for bad in ("x", "t^", "s^a", "ts"):
        with pytest.raises(ParseError):
            parse_word(bad)


def test_canonical_minimality(P, rng):
    for _ in range(500):
        g = evaluate_word(P, random_word(rng, 12))
        if g.m > 1:
            a, b = g.prefix[-2], g.prefix[-1]
            assert a.to_finsupp() != b.to_finsupp()
        rebuilt = GroupElement.from_coordinates(P, g.sigma_exp, [g.n_coord(j) for j in range(1, g.m + 4)])
        assert rebuilt == g


def test_normal_form_against_window_oracle(P, rng):
    for _ in range(2_000):
        w = random_word(rng)
        g = evaluate_word(P, w)
        for j in range(1, g.m + 4):
            assert coordinate(g, j) == window_word_coordinate(P, w, j)


def test_group_laws(P, rng):
    for _ in range(300):
        a, b, c = (evaluate_word(P, random_word(rng, 10)) for _ in range(3))
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
        assert multiply(a, inverse(a)).is_identity()
        assert multiply(a, identity(P)) == a == multiply(identity(P), a)


def test_tail_homomorphism(P, rng):
    for _ in range(300):
        g, h = (evaluate_word(P, random_word(rng, 12)) for _ in range(2))
        assert tail(multiply(g, h)) == tail(g) * tail(h)


def test_stabilization_matches_in_L(P, rng):
    for _ in range(300):
        g = evaluate_word(P, random_word(rng, 12))
        if not in_N(g):
            assert not any(in_L(g, i) for i in range(1, 6))
            continue
        i0 = stabilization_index(g)
        for i in range(1, i0 + 3):
            assert in_L(g, i) == (i >= i0)
        # beyond i(g) every coordinate is the tail, and its support sits inside window i(g)
        T = g.tail_perm()
        assert T.radius() <= P.r(i0)
        for j in range(i0, i0 + 3):
            assert coordinate(g, j).to_finsupp() == T


def test_shifted_tails(P):
    t, _ = generators(P)
    for j in range(-5, 6):
        assert tail(conjugate(t, sigma_power(P, j))).alt_part == cycle([j - 1, j, j + 1])
