import pytest
from hypothesis import given, strategies as st

from hitproblem.poly_f2 import ArityMismatch, NotHomogeneous, PolynomialF2, parse_polynomial

P = PolynomialF2

mono3 = st.tuples(*[st.integers(0, 6)] * 3)
poly3 = st.lists(mono3, max_size=6).map(lambda ts: P(ts, 3))


def test_add_examples():
    f = parse_polynomial("1,0,0 + 0,1,0")
    g = parse_polynomial("0,1,0 + 0,0,1")
    assert f + f == 0
    assert f + P.zero(3) == f
    assert f + g == parse_polynomial("1,0,0 + 0,0,1")


def test_mul_examples():
    x1 = P.monomial((1, 0))
    x2 = P.monomial((0, 1))
    assert x1 * x1 == P.monomial((2, 0))
    assert (x1 + x2) ** 2 == P([(2, 0), (0, 2)])
    xs = [P.monomial(e) for e in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 2, 0), (0, 0, 0, 60))]
    prod = xs[0] * xs[1] * xs[2] * xs[3]
    assert prod.terms == ((1, 1, 2, 60),)


def test_weight_component():
    f = P([(3, 1), (1, 3), (2, 2)])
    assert f.weight_component((2, 1)) == P([(3, 1), (1, 3)])
    assert f.weight_component((2, 1), "below") == P([(2, 2)])
    assert f.weight_component((2, 1), "above") == P.zero(2)
    m = P.monomial((5, 6))
    assert m.weight_component((1, 1, 2)) == m
    with pytest.raises(NotHomogeneous):
        P([(1, 0), (2, 0)]).weight_component((1,))


def test_arity_and_homogeneity():
    with pytest.raises(ArityMismatch):
        P([(1, 0), (1, 0, 0)])
    with pytest.raises(ArityMismatch):
        P.monomial((1, 0)) + P.monomial((1, 0, 0))
    with pytest.raises(NotHomogeneous):
        P([(1, 0), (2, 0)]).degree
    with pytest.raises(ValueError):
        P(())


def test_terms_sorted_descending_and_roundtrip():
    f = parse_polynomial("1,3 + 3,1 + 2,2")
    # (3,1) and (1,3) share weight (2,1) which beats (0,2); (3,1) wins on exponents
    assert f.terms == ((3, 1), (1, 3), (2, 2))
    assert f.leading == (3, 1)
    assert parse_polynomial(str(f)) == f
    assert str(P.zero(2)) == "0"
    assert parse_polynomial("0", 2) == P.zero(2)


@given(poly3, poly3, poly3)
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert (f + g) + h == f + (g + h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert (f + g) ** 2 == f ** 2 + g ** 2
