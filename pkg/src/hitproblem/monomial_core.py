"""Monomials of F2[x_1..x_k], dyadic weights, the monomial order and spikes.

A monomial is stored as a tuple of exponents.  The order on monomials of a
fixed degree compares weight vectors left-lexicographically (zero padded on
the right) and breaks ties with the exponent tuple itself.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations_with_replacement

MAX_K = 8
MAX_DEGREE = 1 << 20


class DegreeMismatch(ValueError):
    pass


class NoMinimalSpike(ValueError):
    pass


class MonomialOverflow(OverflowError):
    pass


def alpha(a: int) -> int:
    """Number of ones in the binary expansion of a."""
    if a < 0:
        raise ValueError("alpha needs a non-negative integer")
    return bin(a).count("1")


def mu(m: int) -> int:
    """Smallest u >= 0 with alpha(m + u) <= u."""
    if m < 0:
        raise ValueError("mu needs a non-negative integer")
    u = 0
    while alpha(m + u) > u:
        u += 1
    return u


def _check_exponents(exps) -> tuple:
    t = tuple(int(a) for a in exps)
    if not 1 <= len(t) <= MAX_K:
        raise ValueError(f"number of variables must be in 1..{MAX_K}, got {len(t)}")
    if any(a < 0 for a in t):
        raise ValueError("exponents must be non-negative")
    if sum(t) > MAX_DEGREE:
        raise MonomialOverflow(f"degree {sum(t)} exceeds cap {MAX_DEGREE}")
    return t


@dataclass(frozen=True, order=False)
class WeightVector:
    entries: tuple

    def __post_init__(self):
        e = tuple(int(x) for x in self.entries)
        if any(x < 0 for x in e):
            raise ValueError("weight entries must be non-negative")
        while e and e[-1] == 0:
            e = e[:-1]
        object.__setattr__(self, "entries", e)

    @property
    def degree(self) -> int:
        return sum(w << i for i, w in enumerate(self.entries))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    # zero padding on the right makes the plain tuple order the right one
    # for vectors without trailing zeros
    def __lt__(self, other):
        return self.entries < WeightVector.coerce(other).entries

    def __le__(self, other):
        return self.entries <= WeightVector.coerce(other).entries

    def __gt__(self, other):
        return self.entries > WeightVector.coerce(other).entries

    def __ge__(self, other):
        return self.entries >= WeightVector.coerce(other).entries

    def tail(self) -> "WeightVector":
        return WeightVector(self.entries[1:])

    @staticmethod
    def coerce(w) -> "WeightVector":
        if isinstance(w, WeightVector):
            return w
        if isinstance(w, str):
            return WeightVector.parse(w)
        return WeightVector(tuple(w))

    @staticmethod
    def parse(text: str) -> "WeightVector":
        s = text.strip().replace("|", "").replace(" ", "")
        if s in ("", "()"):
            return WeightVector(())
        if s.startswith("("):
            out = []
            for m in re.finditer(r"\((\d+)\)(?:\^\{?(\d+)\}?)?", s):
                out.extend([int(m.group(1))] * int(m.group(2) or 1))
            if re.sub(r"\((\d+)\)(?:\^\{?(\d+)\}?)?", "", s):
                raise ValueError(f"cannot parse weight vector {text!r}")
            return WeightVector(tuple(out))
        return WeightVector(tuple(int(x) for x in s.split(",")))

    def __str__(self):
        return ",".join(str(x) for x in self.entries)

    def run_length(self) -> str:
        out = []
        i = 0
        e = self.entries
        while i < len(e):
            j = i
            while j < len(e) and e[j] == e[i]:
                j += 1
            out.append(f"({e[i]})" + (f"^{j - i}" if j - i > 1 else ""))
            i = j
        return "".join(out)


@dataclass(frozen=True)
class Monomial:
    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponents", _check_exponents(self.exponents))

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def sigma(self) -> tuple:
        return self.exponents

    @property
    def omega(self) -> WeightVector:
        return weight_vector(self.exponents)

    def __mul__(self, other):
        other = as_monomial(other)
        if other.k != self.k:
            raise ValueError("arity mismatch")
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __lt__(self, other):
        return order_less(self, other)

    def __gt__(self, other):
        return order_less(other, self)

    def __str__(self):
        return format_monomial(self.exponents)

    @staticmethod
    def parse(text: str) -> "Monomial":
        return Monomial(parse_monomial(text))

    @staticmethod
    def one(k: int) -> "Monomial":
        return Monomial((0,) * k)


def as_exponents(m) -> tuple:
    if isinstance(m, Monomial):
        return m.exponents
    if isinstance(m, str):
        return parse_monomial(m)
    return tuple(int(a) for a in m)


def as_monomial(m) -> Monomial:
    return m if isinstance(m, Monomial) else Monomial(as_exponents(m))


def parse_monomial(text: str) -> tuple:
    parts = [p for p in text.strip().split(",")]
    try:
        return _check_exponents(int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"cannot parse monomial {text!r}: {exc}") from None


def format_monomial(exps) -> str:
    return ",".join(str(a) for a in exps)


def weight_vector(m) -> WeightVector:
    e = as_exponents(m)
    top = max(e).bit_length() if e else 0
    return WeightVector(tuple(sum((a >> i) & 1 for a in e) for i in range(top)))


def order_key(m) -> tuple:
    """Sort key realising the monomial order on one degree slice."""
    e = as_exponents(m)
    return (weight_vector(e).entries, e)


def order_less(u, v) -> bool:
    a, b = as_exponents(u), as_exponents(v)
    if sum(a) != sum(b):
        raise DegreeMismatch(f"degrees differ: {sum(a)} vs {sum(b)}")
    return order_key(a) < order_key(b)


def is_spike(m) -> bool:
    return all(((a + 1) & a) == 0 for a in as_exponents(m))


def _spike_d_sequences(n: int, k: int):
    # non-increasing d_1 >= ... >= d_r > 0, r <= k, with sum of 2^d_j - 1 = n
    out = []

    def rec(rem, cap, seq):
        if rem == 0:
            out.append(tuple(seq))
            return
        if len(seq) == k:
            return
        for d in range(cap, 0, -1):
            if (1 << d) - 1 <= rem:
                rec(rem - (1 << d) + 1, d, seq + [d])

    rec(n, max(n.bit_length(), 1), [])
    return out


def _is_minimal_shape(ds) -> bool:
    # strictly decreasing except that the last two may coincide
    return all(ds[j] > ds[j + 1] for j in range(len(ds) - 2))


def minimal_spike(n: int, k: int) -> Monomial:
    """The unique spike of degree n with exponents 2^d_j - 1 where
    d_1 > d_2 > ... > d_{r-1} >= d_r > 0."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    if mu(n) > k:
        raise NoMinimalSpike(f"mu({n}) = {mu(n)} > k = {k}")
    found = [ds for ds in _spike_d_sequences(n, k) if _is_minimal_shape(ds)]
    if len(found) != 1:
        raise AssertionError(f"expected one minimal spike in degree {n}, found {found}")
    ds = found[0]
    return Monomial(tuple((1 << d) - 1 for d in ds) + (0,) * (k - len(ds)))


def singer_threshold(n: int, k: int):
    """Weight vector of the minimal spike, or None when there is none."""
    try:
        return minimal_spike(n, k).omega
    except NoMinimalSpike:
        return None


def odd_part_decompose(m):
    """Split m = x^e * y^2 with e in {0,1}^k."""
    a = as_exponents(m)
    return tuple(x & 1 for x in a), Monomial(tuple(x >> 1 for x in a))


def enumerate_monomials(n: int, k: int):
    """All exponent tuples of degree n, first exponent descending."""
    if n < 0:
        return
    if k == 1:
        yield (n,)
        return
    for a in range(n, -1, -1):
        for rest in enumerate_monomials(n - a, k - 1):
            yield (a,) + rest


def enumerate_spikes(n: int, k: int):
    ones = [(1 << d) - 1 for d in range(0, n.bit_length() + 1) if (1 << d) - 1 <= n]
    for combo in combinations_with_replacement(ones, k):
        if sum(combo) == n:
            yield combo
