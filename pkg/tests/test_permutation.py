from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neumannlab.errors import DegreeMismatch, InvalidCycle, ParseError
from neumannlab.permutation import (
    IDENTITY,
    FinSuppPerm,
    WindowPerm,
    compose,
    conjugate,
    cycle,
    hamming_distance,
    inverse,
    parse_cycles,
    shift,
    sign,
)

from conftest import random_finsupp

e = IDENTITY
tau = cycle([-1, 0, 1])


@st.composite
def finsupp(draw, lo=-50, hi=50):
    pts = draw(st.lists(st.integers(lo, hi), unique=True, max_size=10))
    img = draw(st.permutations(pts))
    return FinSuppPerm(dict(zip(pts, img)))


@st.composite
def window_perm(draw, r):
    return WindowPerm(r, draw(st.permutations(list(range(-r, r + 1)))))


def test_compose_examples():
    g = cycle([3, 9, 4])
    assert compose(e, g) == g
    assert compose(tau, tau) == cycle([-1, 1, 0])


def test_compose_is_left_to_right():
    a, b = cycle([0, 1]), cycle([1, 2])
    ab = compose(a, b)
    for x in (0, 1, 2):
        assert ab(x) == b(a(x))
    # apply (0,1), then (1,2): 0 -> 1 -> 2, 2 -> 2 -> 1, 1 -> 0 -> 0
    assert ab == FinSuppPerm({0: 2, 2: 1, 1: 0})


def test_inverse_examples():
    assert inverse(e) == e
    assert inverse(tau) == cycle([-1, 1, 0])
    assert inverse(cycle([0, 1])) == cycle([0, 1])


def test_conjugate_examples():
    assert conjugate(tau, e) == tau
    step = cycle([-1, 0, 1, 2, 3])  # agrees with x -> x + 1 on the support of tau
    assert conjugate(tau, step) == cycle([0, 1, 2])
    assert shift(tau, 1) == cycle([0, 1, 2])
    t = conjugate(cycle([0, 1]), cycle([0, 1, 2]))
    assert t.support == {1, 2} and t.cycle_type() == (2,)


def test_sign_examples():
    assert sign(e) == 0
    assert sign(tau) == 0
    assert sign(cycle([0, 1])) == 1


def test_cycle_constructor():
    assert cycle([]) == e
    assert [tau(x) for x in (-1, 0, 1)] == [0, 1, -1]
    s1 = cycle([-2, -1, 0, 1, 2])
    assert WindowPerm.from_finsupp(s1, 2).images == (-1, 0, 1, 2, -2)
    with pytest.raises(InvalidCycle):
        cycle([1, 2, 1])


def test_hamming_examples():
    a = WindowPerm.from_finsupp(tau, 2)
    ident = WindowPerm.identity(2)
    assert hamming_distance(a, a) == 0
    assert hamming_distance(ident, a) == Fraction(3, 5)
    assert hamming_distance(ident, WindowPerm.from_finsupp(cycle([-2, -1, 0, 1, 2]), 2)) == 1
    with pytest.raises(DegreeMismatch):
        hamming_distance(ident, WindowPerm.identity(3))


def test_text_format():
    assert str(e) == "()"
    g = parse_cycles("(-1,0,1)(3,4)")
    assert str(g) == "(-1,0,1)(3,4)"
    assert parse_cycles("()") == e
    assert parse_cycles(" ( 1 , 2 ) ( 2 3 ) ") == compose(cycle([1, 2]), cycle([2, 3]))
    for bad in ("", "(1,2", "1,2", "(a,b)", "(1,2)x"):
        with pytest.raises(ParseError):
            parse_cycles(bad)


def test_group_laws_random_triples(rng):
    for _ in range(10_000):
        a, b, c = (random_finsupp(rng) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))
        assert compose(a, e) == a == compose(e, a)
        assert compose(a, inverse(a)) == e
        assert compose(a, b).support <= a.support | b.support


@settings(max_examples=300, deadline=None)
@given(finsupp(), finsupp())
def test_sign_homomorphism(a, b):
    assert sign(compose(a, b)) == (sign(a) + sign(b)) % 2


@settings(max_examples=300, deadline=None)
@given(finsupp(), finsupp())
def test_conjugate_preserves_cycle_type(x, y):
    c = conjugate(x, y)
    assert c.cycle_type() == x.cycle_type()
    assert c.support == {y(p) for p in x.support}
    assert c == compose(compose(inverse(y), x), y)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10).flatmap(lambda r: st.tuples(window_perm(r), window_perm(r), window_perm(r))))
def test_hamming_bi_invariant_metric(abc):
    a, b, c = abc
    d = hamming_distance
    assert d(a, b) == d(b, a)
    assert d(a, c) <= d(a, b) + d(b, c)
    assert d(c * a, c * b) == d(a, b) == d(a * c, b * c)
    assert (d(a, b) == 0) == (a == b)


def test_window_embedding_round_trip(rng):
    for _ in range(200):
        g = random_finsupp(rng, -6, 6, 8)
        w = WindowPerm.from_finsupp(g, 6)
        assert w.to_finsupp() == g
        assert w.embed(9).to_finsupp() == g
        h = random_finsupp(rng, -6, 6, 8)
        assert (w * WindowPerm.from_finsupp(h, 6)).to_finsupp() == compose(g, h)
    with pytest.raises(ValueError):
        WindowPerm.from_finsupp(cycle([0, 7]), 6)
    with pytest.raises(ValueError):
        WindowPerm(1, (0, 0, 1))
