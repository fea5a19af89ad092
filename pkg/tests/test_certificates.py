"""Inadmissibility certificates for four monomials of weight (4,4,3,3,1)
that appear in the published degree-64 list of admissible monomials.

Each certificate is a list of (i, y) with i a power of two; the sum of the
Sq^i(y) must contain u and otherwise only monomials smaller than u.  The
check uses the independent oracle action, not the package."""
import json
import os

import oracles as O
from hitproblem.cli_reports import appendix

HERE = os.path.dirname(__file__)


def _load():
    with open(os.path.join(HERE, "data", "inadmissible_certificates.json")) as fh:
        return json.load(fh)


def test_certificates_prove_inadmissibility():
    data = _load()
    omega = tuple(data["omega"])
    assert len(data["certificates"]) == 4
    for cert in data["certificates"]:
        u = tuple(cert["monomial"])
        assert sum(u) == data["degree"] and O.weight(u) == omega
        acc = set()
        for i, y in cert["relations"]:
            assert i >= 1 and i & (i - 1) == 0
            assert i + sum(y) == data["degree"]
            acc ^= set(O.sq(i, tuple(y)))
        assert u in acc
        assert all(O.key(t) < O.key(u) for t in acc - {u}), u


def test_certified_monomials_are_in_the_published_list():
    listed = {tuple(m) for m in appendix()["lists"]["plus_4_4_3_3_1_k5"]["monomials"]}
    for cert in _load()["certificates"]:
        assert tuple(cert["monomial"]) in listed
