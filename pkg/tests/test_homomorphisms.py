import pytest
from hypothesis import given, strategies as st

import oracles as O
from hitproblem.hit_engine import quotient_by_weight, weight_coordinates
from hitproblem.homomorphisms import (
    J_omit, apply_p, apply_theta, enumerate_N_k, full_product_except, induced_map_matrix,
    kameko_down,
)
from hitproblem.monomial_core import weight_vector
from hitproblem.poly_f2 import ArityMismatch, PolynomialF2
from hitproblem.steenrod_action import sq_on_polynomial

P = PolynomialF2


def test_enumerate_N_k():
    assert enumerate_N_k(2) == [(1, ()), (1, (2,)), (2, ())]
    idx = enumerate_N_k(5)
    assert len(idx) == 31 == sum(2 ** (5 - i) for i in range(1, 6))
    for i, I in idx:
        assert all(i < a <= 5 for a in I) and list(I) == sorted(set(I))
    with pytest.raises(ValueError):
        enumerate_N_k(0)


def test_apply_p_examples():
    assert apply_p((1, (2,)), (1, 0)) == P.monomial((1,))
    assert apply_p((1, (2, 3)), (1, 0, 0)) == P([(1, 0), (0, 1)])
    # empty I sends x_i to zero
    assert apply_p((1, ()), (1, 0, 0)) == P.zero(2)
    assert apply_p((1, ()), (0, 2, 1)) == P.monomial((2, 1))
    with pytest.raises(ArityMismatch):
        apply_p((1, ()), (3,))
    with pytest.raises(ValueError):
        apply_p((2, (1,)), (1, 1))


def _p_oracle(idx, e):
    # substitute then expand with plain polynomial multiplication
    i, I = idx
    k = len(e)
    out = P.monomial((0,) * (k - 1))
    for j, a in enumerate(e, start=1):
        if j == i:
            img = P([tuple(1 if q == s - 2 else 0 for q in range(k - 1)) for s in I], k - 1)
        else:
            q = j - 1 if j < i else j - 2
            img = P.monomial(tuple(1 if r == q else 0 for r in range(k - 1)))
        out = out * img ** a
    return out


k_and_idx = st.integers(2, 4).flatmap(
    lambda k: st.tuples(st.just(k), st.sampled_from(enumerate_N_k(k))))


@given(k_and_idx, st.data())
def test_apply_p_matches_substitution_oracle(ki, data):
    k, idx = ki
    e = data.draw(st.tuples(*[st.integers(0, 6)] * k))
    assert apply_p(idx, e) == _p_oracle(idx, e)


@given(k_and_idx, st.data())
def test_p_is_ring_map_and_commutes_with_squares(ki, data):
    k, idx = ki
    mono = st.tuples(*[st.integers(0, 5)] * k)
    f = P(data.draw(st.lists(mono, max_size=3)), k)
    g = P(data.draw(st.lists(mono, max_size=3)), k)
    assert apply_p(idx, f * g) == apply_p(idx, f) * apply_p(idx, g)
    assert apply_p(idx, f + g) == apply_p(idx, f) + apply_p(idx, g)
    t = data.draw(st.integers(0, 3))
    assert apply_p(idx, sq_on_polynomial(1 << t, f)) == sq_on_polynomial(1 << t, apply_p(idx, f))


@given(k_and_idx, st.data())
def test_p_does_not_raise_weight(ki, data):
    k, idx = ki
    u = data.draw(st.tuples(*[st.integers(0, 40)] * k))
    w = weight_vector(u)
    for t in apply_p(idx, u).terms:
        assert weight_vector(t) <= w


def test_apply_theta_examples():
    f = P([(1, 2), (3, 0)])
    assert apply_theta((1, 2), f, 2) == f
    assert J_omit(2, 5) == (1, 3, 4, 5)
    assert apply_theta(J_omit(2, 5), (1, 1, 1, 1), 5) == P.monomial((1, 0, 1, 1, 1))
    with pytest.raises(ArityMismatch):
        apply_theta((2, 1), f, 3)
    with pytest.raises(ArityMismatch):
        apply_theta((1, 4), f, 3)


@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=4),
       st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=4))
def test_theta_is_ring_map(a, b):
    f, g = P(a, 2), P(b, 2)
    J = (2, 4)
    assert apply_theta(J, f * g, 4) == apply_theta(J, f, 4) * apply_theta(J, g, 4)
    assert apply_theta(J, f, 4).degrees() == f.degrees()


def test_kameko_and_products():
    assert kameko_down((7, 1, 1, 1, 1)) == (3, 0, 0, 0, 0)
    assert kameko_down((2,)) is None
    assert full_product_except(1, 5) == (0, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        full_product_except(6, 5)


@given(st.tuples(*[st.integers(0, 30).map(lambda a: 2 * a + 1)] * 4))
def test_kameko_weight_tail(m):
    y = kameko_down(m)
    assert O.weight(y) == O.weight(m)[1:]


def test_induced_map_well_defined():
    # adding a hit polynomial with terms of weight <= omega to a representative
    # must not change its image coordinates
    omega = (2, 2, 1)
    k = 4
    _, basis = quotient_by_weight(k, omega)
    n = sum(w << i for i, w in enumerate(omega))
    hits = []
    for y in O.compositions(n - 1, k):
        h = P(sorted(O.sq(1, y)), k)
        if h and all(weight_vector(t) <= omega for t in h.terms):
            hits.append(h)
    assert hits
    for idx in [(1, (2,)), (2, (3, 4)), (1, ())]:
        rows = induced_map_matrix(idx, omega, k)
        for b, row in zip(basis, rows):
            for h in hits[:5]:
                img = apply_p(idx, P.monomial(b) + h)
                got = 0
                if img.terms:
                    low = {t for t in img.terms if weight_vector(t) < weight_vector(b)}
                    img = P._from_set(set(img.terms) - low, k - 1)
                    for c in weight_coordinates(k - 1, omega, img):
                        got |= 1 << c
                assert got == row
