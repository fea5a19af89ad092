from itertools import combinations_with_replacement

import pytest
from hypothesis import given, strategies as st

import oracles as O
from hitproblem.monomial_core import (
    DegreeMismatch, Monomial, MonomialOverflow, NoMinimalSpike, WeightVector, alpha,
    enumerate_monomials, enumerate_spikes, is_spike, minimal_spike, mu, odd_part_decompose,
    order_key, order_less, singer_threshold, weight_vector,
)


def test_alpha():
    assert alpha(0) == 0
    assert alpha(7) == 3
    assert alpha(25) == bin(25).count("1") == 3
    with pytest.raises(ValueError):
        alpha(-1)


def _mu_search(m):
    return next(u for u in range(64) if bin(m + u).count("1") <= u)


def test_mu_examples():
    assert mu(24) == 4
    assert mu(0) == 0
    for d in range(1, 10):
        assert mu(1 << d) == 2


@given(st.integers(0, 5000))
def test_mu_matches_search(m):
    assert mu(m) == _mu_search(m)


def test_weight_vector_examples():
    assert weight_vector((63, 1, 0, 0, 0)).entries == (2, 1, 1, 1, 1, 1)
    assert weight_vector((0, 0, 0)).entries == ()
    assert weight_vector((3, 5, 6, 6, 10)).entries == (2, 4, 3, 1)


@given(st.lists(st.integers(0, 300), min_size=1, max_size=5))
def test_weight_vector_matches_oracle_and_degree(e):
    w = weight_vector(e)
    assert w.entries == O.weight(e)
    assert w.degree == sum(e)


def test_weight_vector_parse_and_print():
    w = WeightVector.parse("(4)^2(3)^{2}(1)")
    assert w.entries == (4, 4, 3, 3, 1)
    assert WeightVector.parse("4,4,3,3,1") == w
    assert w.run_length() == "(4)^2(3)^2(1)"
    assert str(w) == "4,4,3,3,1"
    assert WeightVector((2, 1, 0, 0)).entries == (2, 1)
    with pytest.raises(ValueError):
        WeightVector.parse("(4)x")


def test_order_examples():
    u = (1, 31)
    assert not order_less(u, u)
    assert order_less((1, 31), (3, 29))
    with pytest.raises(DegreeMismatch):
        order_less((1, 2), (1, 1))


@given(st.integers(1, 40), st.data())
def test_order_total_and_matches_bruteforce(n, data):
    mons = list(O.compositions(n, 3))
    u = data.draw(st.sampled_from(mons))
    v = data.draw(st.sampled_from(mons))
    if u == v:
        assert not order_less(u, v)
    else:
        assert order_less(u, v) != order_less(v, u)
        assert order_less(u, v) == (O.key(u) < O.key(v))


def test_spikes():
    assert is_spike((7, 3, 1, 0, 0))
    assert not is_spike((6,))
    assert is_spike((63, 1))
    assert minimal_spike(64, 5).exponents == (63, 1, 0, 0, 0)
    assert minimal_spike(7, 3).exponents == (7, 0, 0)
    assert minimal_spike(0, 5).exponents == (0,) * 5
    with pytest.raises(NoMinimalSpike):
        minimal_spike(4, 1)
    assert singer_threshold(4, 1) is None


@pytest.mark.parametrize("n", range(0, 70))
def test_minimal_spike_is_spike_of_lowest_weight(n):
    # brute force: the minimal spike has the smallest weight among all spikes
    if mu(n) > 5:
        return
    z = minimal_spike(n, 5)
    spikes = list(enumerate_spikes(n, 5))
    assert tuple(sorted(z.exponents, reverse=True)) in {tuple(sorted(s, reverse=True)) for s in spikes}
    assert all(weight_vector(z.exponents) <= weight_vector(s) for s in spikes)


def test_odd_part_decompose():
    assert odd_part_decompose((3, 4)) == ((1, 0), Monomial((1, 2)))
    assert odd_part_decompose((0, 0, 0)) == ((0, 0, 0), Monomial((0, 0, 0)))
    m = (1, 1, 2, 4, 56)
    e, y = odd_part_decompose(m)
    assert e == (1, 1, 0, 0, 0)
    assert y.exponents == (0, 0, 1, 2, 28)
    assert tuple(a + 2 * b for a, b in zip(e, y.exponents)) == m


def test_monomial_type():
    m = Monomial.parse("1,1,2,60")
    assert m.degree == 64 and m.k == 4
    assert (Monomial((1, 0)) * (0, 2)).exponents == (1, 2)
    assert str(m) == "1,1,2,60"
    assert Monomial.one(3).exponents == (0, 0, 0)
    with pytest.raises(ValueError):
        Monomial(())
    with pytest.raises(ValueError):
        Monomial((-1, 2))
    with pytest.raises(MonomialOverflow):
        Monomial(((1 << 20) + 1,))


def test_enumerate_monomials_count():
    assert sum(1 for _ in enumerate_monomials(32, 5)) == 58905
    assert list(enumerate_monomials(3, 1)) == [(3,)]


def test_order_key_sorts_like_oracle():
    mons = list(O.compositions(12, 4))
    assert sorted(mons, key=order_key) == sorted(mons, key=O.key)


def test_enumerate_spikes():
    ones = [1, 3, 7, 15]
    want = {c for c in combinations_with_replacement([0] + ones, 3) if sum(c) == 15}
    got = {tuple(sorted(s)) for s in enumerate_spikes(15, 3)}
    assert got == {tuple(sorted(c)) for c in want}
