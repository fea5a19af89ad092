"""Substitution maps between polynomial algebras of different rank.

p_(i;I): P_k -> P_(k-1) sends x_j to x_j (j < i), x_i to the sum of
x_(s-1) over s in I, and x_j to x_(j-1) (j > i).  An empty I sends x_i to 0.
theta_J: P_s -> P_k renames x_t to x_(j_t).
"""
from __future__ import annotations

from itertools import combinations

from .monomial_core import WeightVector, as_exponents, weight_vector
from .poly_f2 import ArityMismatch, PolynomialF2


def enumerate_N_k(k: int):
    """All (i, I) with 1 <= i < i_1 < ... < i_r <= k, 0 <= r < k."""
    if k < 1:
        raise ValueError("k must be positive")
    out = []
    for i in range(1, k + 1):
        rest = list(range(i + 1, k + 1))
        for r in range(len(rest) + 1):
            for I in combinations(rest, r):
                out.append((i, tuple(I)))
    return out


def _check_index(idx, k):
    i, I = idx
    if not 1 <= i <= k or any(not i < a <= k for a in I) or list(I) != sorted(set(I)):
        raise ValueError(f"invalid index {idx} for k={k}")


def _power_of_sum(vars_, a, k):
    # (x_v1 + ... + x_vr)^a over F2 in k variables, by repeated squaring
    acc = {tuple([0] * k): 1}
    base = {}
    for v in vars_:
        e = [0] * k
        e[v] = 1
        base[tuple(e)] = 1
    result = {tuple([0] * k)}
    power = set(base)
    while a:
        if a & 1:
            nxt = set()
            for x in result:
                for y in power:
                    nxt ^= {tuple(p + q for p, q in zip(x, y))}
            result = nxt
        a >>= 1
        if a:
            power = {tuple(2 * p for p in x) for x in power}
    del acc
    return result


def apply_p(idx, f) -> PolynomialF2:
    if not isinstance(f, PolynomialF2):
        f = PolynomialF2.monomial(as_exponents(f))
    k = f.k
    if k < 2:
        raise ArityMismatch("p maps need k >= 2")
    _check_index(idx, k)
    i, I = idx
    targets = [s - 2 for s in I]     # x_(s-1), zero based
    acc = set()
    cache = {}
    for m in f.terms:
        a = m[i - 1]
        rest = m[:i - 1] + m[i:]
        if a == 0:
            acc ^= {rest}
            continue
        if not targets:
            continue
        if a not in cache:
            cache[a] = _power_of_sum(targets, a, k - 1)
        for t in cache[a]:
            acc ^= {tuple(x + y for x, y in zip(rest, t))}
    return PolynomialF2._from_set(acc, k - 1)


def apply_theta(J, f, k: int) -> PolynomialF2:
    if not isinstance(f, PolynomialF2):
        f = PolynomialF2.monomial(as_exponents(f))
    J = tuple(J)
    if len(J) != f.k or any(J[t] >= J[t + 1] for t in range(len(J) - 1)) or (J and (J[0] < 1 or J[-1] > k)):
        raise ArityMismatch(f"J={J} does not embed {f.k} variables into {k}")
    acc = set()
    for m in f.terms:
        e = [0] * k
        for t, a in enumerate(m):
            e[J[t] - 1] = a
        acc.add(tuple(e))
    return PolynomialF2._from_set(acc, k)


def J_omit(t: int, k: int) -> tuple:
    """(1, ..., t-1, t+1, ..., k)."""
    return tuple(j for j in range(1, k + 1) if j != t)


def kameko_down(m):
    e = as_exponents(m)
    if any(a % 2 == 0 for a in e):
        return None
    return tuple((a - 1) // 2 for a in e)


def full_product_except(i: int, k: int) -> tuple:
    if not 1 <= i <= k:
        raise ValueError("index out of range")
    return tuple(0 if j == i else 1 for j in range(1, k + 1))


_MATRIX_CACHE: dict = {}


def induced_map_matrix(idx, omega, k: int) -> list:
    """Images of the QP_k(omega) basis in QP_(k-1)(omega) coordinates, one
    int bitset per domain basis element."""
    from .hit_engine import quotient_by_weight, weight_coordinates
    w = WeightVector.coerce(omega)
    key = (tuple(idx), w.entries, k)
    if key in _MATRIX_CACHE:
        return _MATRIX_CACHE[key]
    _, basis = quotient_by_weight(k, w)
    rows = []
    for b in basis:
        img = apply_p(idx, b)
        img = PolynomialF2._from_set({u for u in img.terms if weight_vector(u).entries == w.entries},
                                     k - 1)
        x = 0
        if img.terms:
            for c in weight_coordinates(k - 1, w, img):
                x |= 1 << c
        rows.append(x)
    _MATRIX_CACHE[key] = rows
    return rows
