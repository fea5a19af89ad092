"""Polynomials over F2 as finite sets of monomials.

Terms are kept sorted in descending monomial order so the leading term is
the first one and iteration is deterministic.
"""
from __future__ import annotations

from .monomial_core import (
    MAX_DEGREE, MonomialOverflow, WeightVector, as_exponents, format_monomial,
    order_key, parse_monomial, weight_vector,
)


class ArityMismatch(ValueError):
    pass


class NotHomogeneous(ValueError):
    pass


class PolynomialF2:
    __slots__ = ("k", "terms")

    def __init__(self, terms=(), k: int | None = None):
        acc = set()
        for t in terms:
            e = as_exponents(t)
            if k is None:
                k = len(e)
            elif len(e) != k:
                raise ArityMismatch(f"monomial {e} has {len(e)} variables, expected {k}")
            acc ^= {e}
        if k is None:
            raise ValueError("the zero polynomial needs an explicit k")
        self.k = k
        self.terms = tuple(sorted(acc, key=_desc_key))

    @classmethod
    def _from_set(cls, acc, k):
        p = cls.__new__(cls)
        p.k = k
        p.terms = tuple(sorted(acc, key=_desc_key))
        return p

    @classmethod
    def zero(cls, k: int):
        return cls((), k)

    @classmethod
    def monomial(cls, m):
        e = as_exponents(m)
        return cls((e,), len(e))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, PolynomialF2) and self.k == other.k and self.terms == other.terms

    def __hash__(self):
        return hash((self.k, self.terms))

    def _same_k(self, other):
        if other.k != self.k:
            raise ArityMismatch(f"{self.k} vs {other.k} variables")

    def __add__(self, other):
        other = _coerce(other, self.k)
        self._same_k(other)
        return PolynomialF2._from_set(set(self.terms) ^ set(other.terms), self.k)

    __radd__ = __add__
    __xor__ = __add__

    def __mul__(self, other):
        other = _coerce(other, self.k)
        self._same_k(other)
        acc = set()
        for a in self.terms:
            for b in other.terms:
                c = tuple(x + y for x, y in zip(a, b))
                if sum(c) > MAX_DEGREE:
                    raise MonomialOverflow("product degree too large")
                acc ^= {c}
        return PolynomialF2._from_set(acc, self.k)

    def __pow__(self, e: int):
        out = PolynomialF2.monomial((0,) * self.k)
        for _ in range(e):
            out = out * self
        return out

    @property
    def leading(self):
        return self.terms[0] if self.terms else None

    def degrees(self):
        return {sum(t) for t in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self):
        d = self.degrees()
        if len(d) > 1:
            raise NotHomogeneous("polynomial is not homogeneous")
        return d.pop() if d else None

    def weight_component(self, omega, mode: str = "exact") -> "PolynomialF2":
        w = WeightVector.coerce(omega)
        if not self.is_homogeneous() or (self.terms and self.degree != w.degree):
            raise NotHomogeneous("weight component needs a homogeneous polynomial of degree deg(omega)")
        keep = {"exact": lambda v: v == w.entries, "below": lambda v: v < w.entries,
                "above": lambda v: v > w.entries}[mode]
        return PolynomialF2._from_set({t for t in self.terms if keep(weight_vector(t).entries)}, self.k)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"PolynomialF2({format_polynomial(self)!r}, k={self.k})"

    @staticmethod
    def parse(text: str, k: int | None = None) -> "PolynomialF2":
        return parse_polynomial(text, k)


def _desc_key(e):
    w, s = order_key(e)
    # descending order of (omega, sigma); weights of one degree compare fine
    # as tuples, mixed degrees are grouped by degree first
    return (-sum(e), tuple(-x for x in w) + (1,), tuple(-x for x in s))


def _coerce(x, k):
    if isinstance(x, PolynomialF2):
        return x
    if isinstance(x, int) and x == 0:
        return PolynomialF2.zero(k)
    return PolynomialF2.monomial(x)


def format_polynomial(p: PolynomialF2) -> str:
    if not p.terms:
        return "0"
    return " + ".join(format_monomial(t) for t in p.terms)


def parse_polynomial(text: str, k: int | None = None) -> PolynomialF2:
    s = text.strip()
    if s == "0":
        if k is None:
            raise ValueError("the zero polynomial needs an explicit k")
        return PolynomialF2.zero(k)
    return PolynomialF2([parse_monomial(part) for part in s.split("+")], k)
