"""Command line front end and the verification harness.

Expected values live in ``data/expected.json``; monomial lists used by the
appendix and lemma suites live in ``data/appendix.json``.  Exponents that
depend on the parameter d are stored as templates such as ``2^(d-1)-3``.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations, permutations

from . import hit_engine as H
from .homomorphisms import apply_theta
from .monomial_core import WeightVector, format_monomial, parse_monomial, weight_vector
from .poly_f2 import PolynomialF2, parse_polynomial

SUITES = ("degrees", "weights", "appendix", "lemmas", "extended")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3


# ----------------------------------------------------------------------------
# data files

def _load(name):
    with resources.files("hitproblem").joinpath("data", name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


_DATA: dict = {}


def manifest() -> dict:
    if "expected" not in _DATA:
        _DATA["expected"] = _load("expected.json")
    return _DATA["expected"]


def appendix() -> dict:
    if "appendix" not in _DATA:
        _DATA["appendix"] = _load("appendix.json")
    return _DATA["appendix"]


_TEMPLATE = re.compile(r"2\^(?:\((d(?:-\d+)?)\)|d)([+-]\d+)?")


def instantiate(e, d: int) -> int:
    """Evaluate an exponent template like '2^(d-2)-5' at d."""
    if isinstance(e, int):
        return e
    m = _TEMPLATE.fullmatch(e.replace(" ", ""))
    if not m:
        raise ValueError(f"bad exponent template {e!r}")
    base = m.group(1) or "d"
    p = d if base == "d" else d - int(base[2:])
    if p < 0:
        raise ValueError(f"template {e!r} is not defined at d={d}")
    return (1 << p) + int(m.group(2) or 0)


def instantiate_monomial(exps, d: int) -> tuple:
    out = tuple(instantiate(e, d) for e in exps)
    if any(a < 0 for a in out):
        raise ValueError(f"negative exponent in {exps} at d={d}")
    return out


def omega_at(text: str, d: int) -> WeightVector:
    """Expand '(4)^2(3)^{d-4}(1)' style weight vectors at d."""
    if "(" not in text:
        return WeightVector.parse(text)
    out = []
    for m in re.finditer(r"\((\d+)\)(?:\^\{?(d(?:-\d+)?|\d+)\}?)?", text):
        r = m.group(2)
        if r is None:
            c = 1
        elif r.startswith("d"):
            c = d - int(r[2:]) if len(r) > 1 else d
        else:
            c = int(r)
        out += [int(m.group(1))] * c
    return WeightVector(tuple(out))


def family(key: str, d: int):
    f = appendix()["families"][key]
    return f, [instantiate_monomial(m, d) for m in f["monomials"]]


def lemma_monomials(group: str) -> list:
    """Every monomial of a lemma group, patterns expanded over permutations."""
    g = next(r for r in appendix()["lemmas"] if r["id"] == group)
    out = []
    for p in g["patterns"]:
        letters = p["letters"]
        for perm in permutations(range(1, 6), len(letters)):
            val = dict(zip(letters, perm))
            if not _constraint_ok(p["constraint"], val):
                continue
            e = [0] * 5
            for ch, a in zip(letters, p["exponents"]):
                e[val[ch] - 1] = a
            out.append(tuple(e))
    if "theta" in g:
        a = g["theta"]["power"]
        for w in g["theta"]["inputs"]:
            for r in range(1, 6):
                e = list(w[:r - 1]) + [a] + list(w[r - 1:4])
                out.append(tuple(e))
    out += [tuple(m) for m in g["literal"]]
    return list(dict.fromkeys(out))


def _constraint_ok(text: str, val: dict) -> bool:
    m = re.fullmatch(r"([a-z,]+)<=(\d+)<([a-z,]+)", text)
    if m:
        bound = int(m.group(2))
        return (all(val[c] <= bound for c in m.group(1).split(","))
                and all(val[c] > bound for c in m.group(3).split(",")))
    chain = [val[c] for c in text.split("<")]
    return all(a < b for a, b in zip(chain, chain[1:]))


# ----------------------------------------------------------------------------
# results

@dataclass
class VerificationResult:
    id: str
    suite: str
    status: str          # PASS, FAIL, FINDING, SKIP
    value: object
    expected: object
    detail: str = ""
    seconds: float = 0.0
    params: dict = field(default_factory=dict)
    refused: bool = False

    def row(self) -> list:
        return [self.id, self.suite, self.status, _fmt(self.value), _fmt(self.expected), self.detail]


def _fmt(v) -> str:
    if isinstance(v, dict):
        return ",".join(f"{k}={v[k]}" for k in v)
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(map(str, v)) + "]"
    return "" if v is None else str(v)


def _judge(value, expect) -> str:
    """Exact values give PASS/FAIL; an interval gives FINDING when the value
    lies inside it and FAIL otherwise."""
    if isinstance(expect, list) and len(expect) == 2 and all(isinstance(x, int) for x in expect):
        return "FINDING" if expect[0] <= value <= expect[1] else "FAIL"
    return "PASS" if value == expect else "FAIL"


def record_degree(rec: dict):
    if "degree" in rec:
        return rec["degree"]
    if "omega" in rec:
        return omega_at(rec["omega"], rec.get("d", 0)).degree
    if "family" in rec:
        f = appendix()["families"][rec["family"]]
        return sum(instantiate_monomial(f["monomials"][0], rec["d"]))
    if "families" in rec:
        return omega_at(rec["omega"], rec["d"]).degree
    if "list" in rec:
        L = appendix()["lists"][rec["list"]]
        return WeightVector.parse(L["omega"]).degree
    if "polys" in rec:
        return WeightVector.parse(appendix()["polynomials"][rec["polys"]]["omega"]).degree
    if "group" in rec:
        return max(sum(m) for m in lemma_monomials(rec["group"]))
    if rec["kind"] == "top_lift":
        return 1 << rec["d"]
    return 0


# ----------------------------------------------------------------------------
# record runners

def _basis_of(k, omega):
    return H.quotient_by_weight(k, omega)[1]


def _part(basis, part):
    if part == "plus":
        return {m for m in basis if 0 not in m}
    if part == "zero":
        return {m for m in basis if 0 in m}
    return set(basis)


def _set_compare(got: set, want: set, expect_count: int):
    ok = got == want and len(got) == expect_count
    det = f"generated {len(got)}, listed {len(want)}"
    if got != want:
        det += f", missing {len(want - got)}, extra {len(got - want)}"
        miss = sorted(want - got)[:3]
        if miss:
            det += " e.g. missing " + ";".join(format_monomial(m) for m in miss)
    return ("PASS" if ok else "FAIL"), len(got), det


def _run_total_dim(rec):
    rep = H.admissible_basis(rec["k"], rec["degree"])
    return _judge(rep.total, rec["expect"]), rep.total, ""


def _run_weight_dim(rec):
    d, _ = H.quotient_by_weight(rec["k"], WeightVector.parse(rec["omega"]))
    return _judge(d, rec["expect"]), d, ""


def _run_weight_split(rec):
    basis = _basis_of(rec["k"], WeightVector.parse(rec["omega"]))
    got = {"all": len(basis), "B0": len(_part(basis, "zero")), "Bplus": len(_part(basis, "plus"))}
    return ("PASS" if got == rec["expect"] else "FAIL"), got, ""


def _run_sf_dim(rec):
    d, _ = H.sf_tilde(rec["k"], WeightVector.parse(rec["omega"]))
    return _judge(d, rec["expect"]), d, ""


def _run_family_set(rec):
    f, mons = family(rec["family"], rec["d"])
    w = omega_at(f["omega"], rec["d"])
    got = _part(_basis_of(f["k"], w), rec["part"])
    return _set_compare(got, set(mons), rec["expect"])


def _run_list_set(rec):
    L = appendix()["lists"][rec["list"]]
    got = _part(_basis_of(L["k"], WeightVector.parse(L["omega"])), rec["part"])
    return _set_compare(got, {tuple(m) for m in L["monomials"]}, rec["expect"])


def _theta_images(mons, s, k):
    out = set()
    for J in combinations(range(1, k + 1), s):
        for m in mons:
            out |= set(apply_theta(J, PolynomialF2.monomial(m), k).terms)
    return out


def _run_theta_union(rec):
    k, d = rec["k"], rec["d"]
    want = set()
    for key in rec["families"]:
        f, mons = family(key, d)
        want |= _theta_images(mons, f["k"], k)
    got = _part(_basis_of(k, omega_at(rec["omega"], d)), "zero")
    return _set_compare(got, want, rec["expect"])


def _run_split_plus(rec):
    k, d = rec["k"], rec["d"]
    _, lift = family(rec["lift"], d)
    a = instantiate(rec["power"], d)
    A = set()
    for m in lift:
        for r in range(1, k + 1):
            A.add(tuple(m[:r - 1]) + (a,) + tuple(m[r - 1:]))
    _, B = family(rec["rest"], d)
    B = set(B)
    got = _part(_basis_of(k, omega_at(rec["omega"], d)), "plus")
    status, n, det = _set_compare(got, A | B, sum(rec["expect"]))
    if [len(A), len(B)] != rec["expect"] or A & B:
        status = "FAIL"
    return status, [len(A), len(B)], det


def _run_top_lift(rec):
    k, d = rec["k"], rec["d"]
    low = omega_at("(4)^2(3)^{d-4}", d)
    top = omega_at("(4)^2(3)^{d-4}(1)", d)
    want = set()
    for x in _basis_of(k, low):
        J = [j for j in range(k) if x[j] > 1 << (d - 3)]
        if len(J) != 3:
            return "FAIL", None, f"{format_monomial(x)} has {len(J)} large exponents"
        for j in J:
            e = list(x)
            e[j] += 1 << (d - 2)
            want.add(tuple(e))
    got = set(_basis_of(k, top))
    return _set_compare(got, want, rec["expect"])


def _run_numbered_prefix(rec):
    L = appendix()["lists"][rec["list"]]
    w = WeightVector.parse(L["omega"])
    got = _part(_basis_of(L["k"], w), "plus")
    items = [tuple(L["numbered"][str(t)]) for t in sorted(map(int, L["numbered"]))]
    pre = items[:rec["prefix"]]
    rest = items[rec["prefix"]:]
    missing = [m for m in pre if m not in got]
    tail = sum(1 for m in rest if m in got)
    det = (f"first {len(pre)} listed: {len(pre) - len(missing)} admissible; "
           f"trailing {len(rest)}: {tail} admissible; unlisted admissible {len(got - set(items))}")
    if missing:
        return "FAIL", len(got), det
    return _judge(len(got), rec["expect"]), len(got), det


def _run_kernel_span(rec):
    from .gf2_linalg import EchelonBasis
    P = appendix()["polynomials"][rec["polys"]]
    k = P["k"]
    w = WeightVector.parse(P["omega"])
    dim_sf, ker = H.sf_tilde(k, w)
    d, _ = H.quotient_by_weight(k, w)
    span = EchelonBasis(d)
    outside = []
    for name, terms in P["items"].items():
        f = PolynomialF2([tuple(t) for t in terms], k)
        coords = H.weight_coordinates(k, w, f)
        x = 0
        for c in coords:
            x |= 1 << c
        if not ker.member(x):
            outside.append(name)
        span.reduce_insert(x)
    det = f"kernel dim {dim_sf}, span of listed {span.rank}"
    if outside:
        return "FAIL", span.rank, det + f"; not in kernel: {','.join(outside[:5])}"
    if isinstance(rec["expect"], int):
        ok = span.rank == rec["expect"] == dim_sf
        return ("PASS" if ok else "FAIL"), span.rank, det
    return _judge(span.rank, rec["expect"]), span.rank, det


def _run_strict_group(rec):
    mons = lemma_monomials(rec["group"])
    bad = [m for m in mons if not H.check_strictly_inadmissible(m)]
    det = f"{len(mons) - len(bad)}/{len(mons)} strictly inadmissible"
    if bad:
        det += "; not: " + ";".join(format_monomial(m) for m in bad[:5])
    return ("PASS" if not bad else "FAIL"), not bad, det


RUNNERS = {
    "total_dim": _run_total_dim, "weight_dim": _run_weight_dim, "weight_split": _run_weight_split,
    "sf_dim": _run_sf_dim, "family_set": _run_family_set, "list_set": _run_list_set,
    "theta_union": _run_theta_union, "split_plus": _run_split_plus, "top_lift": _run_top_lift,
    "numbered_prefix": _run_numbered_prefix, "kernel_span": _run_kernel_span,
    "strict_group": _run_strict_group,
}


def run_record(rec: dict, opts: dict | None = None) -> VerificationResult:
    opts = opts or {}
    if opts.get("engine"):
        H.configure(**opts["engine"])
    if rec.get("checkpoint") and not H.CONFIG.checkpoint_dir:
        H.configure(checkpoint_dir=os.path.join(os.getcwd(), "hit_checkpoints"))
    t0 = time.time()
    params = {k: v for k, v in rec.items() if k not in ("id", "suite", "expect", "anchor")}
    maxd = opts.get("max_degree")
    if maxd is not None and record_degree(rec) > maxd:
        return VerificationResult(rec["id"], rec["suite"], "SKIP", None, rec["expect"],
                                  f"degree {record_degree(rec)} above --max-degree {maxd}",
                                  0.0, params)
    try:
        status, value, det = RUNNERS[rec["kind"]](rec)
    except H.ResourceRefusal as exc:
        return VerificationResult(rec["id"], rec["suite"], "SKIP", None, rec["expect"],
                                  f"resource refusal: {exc}", time.time() - t0, params, True)
    except MemoryError:
        return VerificationResult(rec["id"], rec["suite"], "SKIP", None, rec["expect"],
                                  "resource refusal: out of memory", time.time() - t0, params, True)
    return VerificationResult(rec["id"], rec["suite"], status, value, rec["expect"], det,
                              time.time() - t0, params)


def coverage_guard(records) -> None:
    """Every record must belong to exactly one known suite, with unique ids
    and a runner for its kind."""
    ids = [r["id"] for r in records]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise ValueError(f"duplicate manifest ids: {sorted(dup)}")
    orphans = [r["id"] for r in records if r.get("suite") not in SUITES or r.get("kind") not in RUNNERS]
    if orphans:
        raise ValueError(f"manifest records not covered by any suite: {orphans}")
    missing = [r["id"] for r in records if not r.get("anchor")]
    if missing:
        raise ValueError(f"manifest records without an anchor: {missing}")


def run_suite(suite: str, max_degree=None, jobs: int = 1, engine=None, log=None) -> list:
    records = manifest()["records"]
    coverage_guard(records)
    mine = [r for r in records if r["suite"] == suite]
    opts = {"max_degree": max_degree, "engine": engine or {}}
    if jobs > 1 and len(mine) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run_record, mine, [opts] * len(mine)))
    else:
        results = []
        for r in mine:
            res = run_record(r, opts)
            if log:
                log(f"{res.status} {res.id} ({res.seconds:.1f}s)")
            results.append(res)
    return results


def format_report(results, fmt="tsv") -> str:
    if fmt == "tsv":
        lines = ["id\tsuite\tstatus\tvalue\texpected\tdetail"]
        lines += ["\t".join(r.row()) for r in results]
    else:
        lines = []
        for r in results:
            s = f"{r.status:8s} {r.id}: value {_fmt(r.value)}, expected {_fmt(r.expected)}"
            lines.append(s + (f" ({r.detail})" if r.detail else ""))
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# commands

def _prune(text):
    return {"auto": "auto", "on": True, "off": False}[text]


def cmd_dim(args, out):
    rep = H.admissible_basis(args.k, args.degree, prune=_prune(args.prune))
    if args.by_weight:
        out.write(rep.to_tsv() if args.format == "tsv" else
                  "".join(f"{w.run_length()}: {d}\n" for _, w, d, _, _ in rep.omega_rows())
                  + f"total: {rep.total}\n")
    elif args.format == "tsv":
        out.write(f"k\tdegree\tdim\n{args.k}\t{args.degree}\t{rep.total}\n")
    else:
        out.write(f"dim (QP_{args.k})_{args.degree} = {rep.total}\n")
    return EXIT_OK


def cmd_basis(args, out):
    if args.omega:
        w = WeightVector.parse(args.omega)
        if args.degree is not None and w.degree != args.degree:
            rows = []
        else:
            rows = _basis_of(args.k, w)
    else:
        rows = H.admissible_basis(args.k, args.degree, prune=_prune(args.prune)).basis
    text = "".join(format_monomial(m) + "\n" for m in rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_check(args, out):
    text = args.operand
    if args.kind == "hit":
        f = parse_polynomial(text, args.k)
        ans = H.check_hit(f, prune=_prune(args.prune))
    else:
        m = parse_monomial(text)
        ans = H.check_admissible(m) if args.kind == "admissible" else H.check_strictly_inadmissible(m)
    out.write(("YES" if ans else "NO") + "\n")
    return EXIT_OK


def cmd_sf(args, out):
    w = WeightVector.parse(args.omega)
    d, _ = H.quotient_by_weight(args.k, w)
    s, _ = H.sf_tilde(args.k, w)
    if args.format == "tsv":
        out.write(f"omega\tdim_QP\tdim_SF\tdim_QP_tilde\n{w}\t{d}\t{s}\t{d - s}\n")
    else:
        out.write(f"QP_{args.k}({w.run_length()}): {d}, SF~: {s}, QP~: {d - s}\n")
    return EXIT_OK


def cmd_verify(args, out):
    suites = SUITES if args.suite == "all" else (args.suite,)
    log = (lambda m: print(m, file=sys.stderr)) if args.verbose else None
    engine = {"max_block_gib": args.max_block_gib}
    if args.checkpoint_dir:
        engine["checkpoint_dir"] = args.checkpoint_dir
    results = []
    for s in suites:
        results += run_suite(s, args.max_degree, args.jobs, engine, log)
    text = format_report(results, args.format)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    out.write(text)
    if any(r.status == "FAIL" for r in results):
        return EXIT_FAIL
    if any(r.refused for r in results):
        return EXIT_REFUSED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=5, help="number of variables (default 5)")
    common.add_argument("--prune", choices=("auto", "on", "off"), default="auto",
                        help="drop monomials below the minimal spike weight")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--max-block-gib", type=float, default=H.DEFAULT_MAX_BLOCK_GIB)
    common.add_argument("--checkpoint-dir", default=None,
                        help="directory for elimination checkpoints (env HIT_CHECKPOINT_DIR)")
    common.add_argument("--format", choices=("tsv", "text"), default="tsv")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hit", description="Hit problem computations over F2.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dim", parents=[common], help="dimension of QP_k in a degree")
    d.add_argument("--degree", type=int, required=True)
    d.add_argument("--by-weight", action="store_true")

    b = sub.add_parser("basis", parents=[common], help="admissible monomials")
    b.add_argument("--degree", type=int)
    b.add_argument("--omega", default=None, help="weight vector filter, e.g. 4,2,2,2")
    b.add_argument("--output", default=None)

    c = sub.add_parser("check", parents=[common], help="hit / admissible / strict test")
    c.add_argument("kind", choices=("hit", "admissible", "strict"))
    c.add_argument("operand", help="monomial '2,1,1,0,0' or polynomial 'a,b + c,d'")

    s = sub.add_parser("sf", parents=[common], help="joint kernel of the p-maps on QP_k(omega)")
    s.add_argument("--omega", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--max-degree", type=int, default=None)
    v.add_argument("--report", default=None, help="write the report to this file too")
    return p


COMMANDS = {"dim": cmd_dim, "basis": cmd_basis, "check": cmd_check, "sf": cmd_sf,
            "verify": cmd_verify}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "basis" and args.degree is None and not args.omega:
        parser.print_usage(sys.stderr)
        print("hit basis: give --degree or --omega", file=sys.stderr)
        return EXIT_USAGE
    if args.command != "verify":
        cfg = {"max_block_gib": args.max_block_gib, "verbose": args.verbose}
        if args.checkpoint_dir:
            cfg["checkpoint_dir"] = args.checkpoint_dir
        H.configure(**cfg)
    try:
        return COMMANDS[args.command](args, out)
    except H.ResourceRefusal as exc:
        print(f"hit: resource refusal: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ValueError, ArithmeticError) as exc:
        print(f"hit: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
