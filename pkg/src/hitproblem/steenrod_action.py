"""Action of the squares Sq^i on F2[x_1..x_k].

On one variable Sq^i(x^a) = C(a, i) x^(a+i); on monomials the Cartan
formula distributes i over the variables.  Only the Lucas-odd choices are
visited: i_j must be a bit-submask of a_j.
"""
from __future__ import annotations

import numpy as np

from . import _kernels as K
from .monomial_core import MAX_DEGREE, MonomialOverflow, as_exponents
from .poly_f2 import PolynomialF2


def sq_on_power(i: int, a: int):
    """Exponent of Sq^i(x^a), or None when the binomial coefficient is even."""
    if i < 0 or a < 0:
        raise ValueError("negative index")
    if i > a or (i & (a - i)):
        return None
    return a + i


def _terms(i: int, e: tuple):
    k = len(e)
    out = []

    def rec(j, rem, acc):
        if j == k - 1:
            if rem & ~e[j] == 0:
                out.append(tuple(acc) + (e[j] + rem,))
            return
        a = e[j]
        rest = sum(e[j + 1:])
        s = 0
        while True:
            if s <= rem and rem - s <= rest:
                rec(j + 1, rem - s, acc + [a + s])
            if s == a:
                break
            s = ((s | ~a) + 1) & a
            if s == 0:
                break

    if i == 0:
        return [e]
    if i > sum(e):
        return []
    rec(0, i, [])
    return out


def sq_on_monomial(i: int, m) -> PolynomialF2:
    e = as_exponents(m)
    if sum(e) + i > MAX_DEGREE:
        raise MonomialOverflow("degree cap exceeded")
    return PolynomialF2._from_set(set(_terms(i, e)), len(e))


def sq_on_polynomial(i: int, f: PolynomialF2) -> PolynomialF2:
    acc = set()
    for t in f.terms:
        for u in _terms(i, t):
            acc ^= {u}
    return PolynomialF2._from_set(acc, f.k)


def sq_terms_array(i: int, e) -> np.ndarray:
    """Terms of Sq^i(x^e) as an int64 array, via the compiled expander."""
    ev = np.asarray(e, dtype=np.int64)
    buf = np.empty((1024, len(ev)), dtype=np.int64)
    while True:
        c = K.sq_expand(i, ev, buf)
        if c >= 0:
            return buf[:c].copy()
        buf = np.empty((buf.shape[0] * 4, len(ev)), dtype=np.int64)


def hit_generator_indices(s_limit: int | None = None, cap: int | None = None):
    """Indices 2^t of the squares generating A^+ (t < s_limit when given)."""
    if cap is None and s_limit is None:
        raise ValueError("give a cap or an s_limit")
    out = []
    t = 0
    while (cap is None or (1 << t) <= cap) and (s_limit is None or t < s_limit):
        out.append(1 << t)
        t += 1
    return tuple(out)
