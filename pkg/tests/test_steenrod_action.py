from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles as O
from hitproblem.poly_f2 import PolynomialF2
from hitproblem.steenrod_action import (
    hit_generator_indices, sq_on_monomial, sq_on_polynomial, sq_on_power, sq_terms_array,
)

P = PolynomialF2
small_mono = st.lists(st.integers(0, 12), min_size=1, max_size=4).map(tuple)
small_poly = st.integers(1, 4).flatmap(
    lambda k: st.lists(st.tuples(*[st.integers(0, 9)] * k), max_size=5).map(lambda ts: P(ts, k)))


def test_sq_on_power_examples():
    assert sq_on_power(1, 1) == 2
    assert sq_on_power(0, 13) == 13
    assert sq_on_power(2, 3) == 5
    assert sq_on_power(1, 2) is None
    assert sq_on_power(3, 2) is None
    with pytest.raises(ValueError):
        sq_on_power(-1, 2)


@given(st.integers(0, 200), st.integers(0, 200))
def test_sq_on_power_is_binomial_parity(i, a):
    want = a + i if comb(a, i) % 2 else None
    assert sq_on_power(i, a) == want


def test_sq_on_monomial_examples():
    assert sq_on_monomial(1, (1, 1)) == P([(2, 1), (1, 2)])
    assert sq_on_monomial(2, (1, 1, 1)) == P([(2, 2, 1), (2, 1, 2), (1, 2, 2)])
    assert sq_on_polynomial(1, P.monomial((2,))) == P.zero(1)


@given(small_mono, st.integers(0, 20))
def test_sq_matches_oracle(e, i):
    assert set(sq_on_monomial(i, e).terms) == set(O.sq(i, e))
    got = {tuple(int(x) for x in r) for r in sq_terms_array(i, e)}
    assert got == set(O.sq(i, e))


@given(small_mono)
def test_top_square_and_instability(e):
    n = sum(e)
    assert sq_on_monomial(n, e) == P.monomial(tuple(2 * a for a in e))
    for i in range(n + 1, n + 4):
        assert not sq_on_monomial(i, e)
    assert sq_on_monomial(0, e) == P.monomial(e)


@given(small_poly)
def test_sq1_sq1_is_zero(f):
    assert not sq_on_polynomial(1, sq_on_polynomial(1, f))


@given(st.integers(1, 3).flatmap(
    lambda k: st.tuples(*[st.lists(st.tuples(*[st.integers(0, 7)] * k), max_size=4).map(
        lambda ts, k=k: P(ts, k))] * 2)), st.integers(0, 12))
def test_cartan_formula(fg, i):
    f, g = fg
    lhs = sq_on_polynomial(i, f * g)
    rhs = P.zero(f.k)
    for j in range(i + 1):
        rhs = rhs + sq_on_polynomial(j, f) * sq_on_polynomial(i - j, g)
    assert lhs == rhs


@given(small_poly, small_poly, st.integers(0, 12))
def test_sq_is_additive(f, g, i):
    if f.k != g.k:
        return
    assert sq_on_polynomial(i, f + g) == sq_on_polynomial(i, f) + sq_on_polynomial(i, g)


def test_hit_generator_indices():
    assert hit_generator_indices(cap=64) == (1, 2, 4, 8, 16, 32, 64)
    assert hit_generator_indices(3) == (1, 2, 4)
    assert hit_generator_indices(1) == (1,)
    with pytest.raises(ValueError):
        hit_generator_indices()


def test_sq_terms_array_grows_buffer():
    # Sq^20 on a 5-variable monomial has far more than a handful of terms
    arr = sq_terms_array(20, (7, 7, 7, 7, 7))
    assert isinstance(arr, np.ndarray)
    assert {tuple(map(int, r)) for r in arr} == set(O.sq(20, (7, 7, 7, 7, 7)))
