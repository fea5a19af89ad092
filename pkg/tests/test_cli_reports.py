import io

import pytest

import hitproblem.hit_engine as H
from hitproblem import cli_reports as C
from hitproblem.monomial_core import weight_vector


def run(*argv):
    out = io.StringIO()
    code = C.main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture(autouse=True)
def _restore_config():
    saved = dict(vars(H.CONFIG))
    yield
    H.configure(**saved)


def test_templates():
    assert C.instantiate("2^d-1", 6) == 63
    assert C.instantiate("2^(d-1)-3", 6) == 29
    assert C.instantiate("2^(d-2)", 8) == 64
    assert C.instantiate(5, 6) == 5
    with pytest.raises(ValueError):
        C.instantiate("3^d", 6)
    with pytest.raises(ValueError):
        C.instantiate("2^(d-9)", 6)
    with pytest.raises(ValueError):
        C.instantiate_monomial([1, "2^d-80"], 6)
    assert C.instantiate_monomial([1, 1, 2, 4, "2^d-8"], 6) == (1, 1, 2, 4, 56)
    assert C.omega_at("(4)^2(3)^{d-4}(1)", 8).entries == (4, 4, 3, 3, 3, 3, 1)
    assert C.omega_at("(2)(1)^{d-1}", 6).entries == (2, 1, 1, 1, 1, 1)
    assert C.omega_at("4,2,2,2", 1).entries == (4, 2, 2, 2)


def test_family_monomials_have_the_family_weight():
    fams = C.appendix()["families"]
    for key, f in fams.items():
        for d in (f.get("d_min", 5), f.get("d_min", 5) + 1):
            _, mons = C.family(key, d)
            w = C.omega_at(f["omega"], d)
            assert all(weight_vector(m) == w for m in mons), key
            assert all(len(m) == f["k"] for m in mons)


def test_lemma_groups_expand():
    counts = {g["id"]: len(C.lemma_monomials(g["id"])) for g in C.appendix()["lemmas"]}
    assert len(counts) == 9 and all(v > 0 for v in counts.values())
    for g in counts:
        mons = C.lemma_monomials(g)
        assert len(set(mons)) == len(mons)


def test_manifest_coverage_guard():
    recs = C.manifest()["records"]
    C.coverage_guard(recs)
    for r in recs:
        assert r["suite"] in C.SUITES and r["kind"] in C.RUNNERS and r["anchor"]
    with pytest.raises(ValueError, match="duplicate"):
        C.coverage_guard(recs + recs[:1])
    with pytest.raises(ValueError, match="not covered"):
        C.coverage_guard([dict(recs[0], id="x", suite="nowhere")])
    with pytest.raises(ValueError, match="anchor"):
        C.coverage_guard([dict(recs[0], id="y", anchor="")])


def test_judge_never_upgrades_intervals():
    assert C._judge(5, 5) == "PASS"
    assert C._judge(5, 6) == "FAIL"
    assert C._judge(5, [1, 9]) == "FINDING"
    assert C._judge(10, [1, 9]) == "FAIL"
    assert C._judge({"a": 1}, {"a": 1}) == "PASS"


def test_dim_command():
    assert run("dim", "--degree", "4") == (0, "k\tdegree\tdim\n5\t4\t45\n")
    assert run("dim", "--degree", "8", "--format", "text")[1] == "dim (QP_5)_8 = 174\n"
    assert run("dim", "--degree", "0")[1].endswith("\t0\t1\n")
    code, text = run("dim", "--degree", "10", "--by-weight")
    lines = text.splitlines()
    assert code == 0 and lines[0] == "degree\tomega\tdim\tdim_B0\tdim_Bplus"
    assert lines[-1].split("\t")[:3] == ["10", "total", "280"]
    assert sum(int(line.split("\t")[2]) for line in lines[1:-1]) == 280
    assert run("dim", "--degree", "10", "--by-weight", "--format", "text")[1].endswith("total: 280\n")


def test_basis_command(tmp_path):
    code, text = run("basis", "--omega", "4,2,2,2")
    assert code == 0 and len(text.splitlines()) == 485
    code, text = run("basis", "--degree", "4")
    assert len(text.splitlines()) == 45
    path = tmp_path / "b.txt"
    assert run("basis", "--omega", "9", "--output", str(path)) == (0, "")
    assert path.read_text() == ""
    run("basis", "--degree", "6", "--k", "3", "--output", str(path))
    assert path.read_text().splitlines() == [",".join(map(str, m)) for m in H.admissible_basis(3, 6).basis]


@pytest.mark.slow
def test_basis_plus_part_at_degree_64():
    code, text = run("basis", "--omega", "(2)(1)^5")
    plus = [line for line in text.splitlines() if "0" not in line.split(",")]
    want = [",".join(map(str, m)) for m in C.family("plus_2_1_k5", 6)[1]]
    assert code == 0 and sorted(plus) == sorted(want)


def test_check_command():
    assert run("check", "hit", "0") == (0, "YES\n")
    assert run("check", "strict", "2,1,1,0,0") == (0, "YES\n")
    assert run("check", "hit", "1,0,0,0,0") == (0, "NO\n")
    assert run("check", "hit", "2,1,0 + 1,2,0", "--k", "3") == (0, "YES\n")
    assert run("check", "admissible", "1,0,0,0,0") == (0, "YES\n")


def test_sf_command():
    code, text = run("sf", "--omega", "4,2,2")
    assert code == 0
    head, row = text.splitlines()
    assert head == "omega\tdim_QP\tdim_SF\tdim_QP_tilde"
    _, d, s, t = row.split("\t")
    assert int(d) == int(s) + int(t)


def test_usage_and_error_exit_codes(capsys):
    assert run("frobnicate")[0] == 2
    assert run("basis")[0] == 2
    assert run("dim")[0] == 2
    assert run("check", "admissible", "1,x")[0] == 1
    assert run("dim", "--degree", "-3")[0] == 1


def test_resource_refusal_exit_code(capsys):
    H.clear_cache()
    assert run("dim", "--degree", "40", "--max-block-gib", "1e-9")[0] == 3
    assert "resource refusal" in capsys.readouterr().err
    H.clear_cache()


def test_verify_reports_identical_across_job_counts(tmp_path):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    code1, text1 = run("verify", "degrees", "--max-degree", "16", "--report", str(a))
    code2, text2 = run("verify", "degrees", "--max-degree", "16", "--jobs", "2", "--report", str(b))
    assert code1 == code2 == 0
    assert a.read_bytes() == b.read_bytes()
    rows = [line.split("\t") for line in text1.splitlines()[1:]]
    assert [r[2] for r in rows] == ["PASS"] * 4 + ["SKIP"] * 2
    assert [r[3] for r in rows[:4]] == ["10", "45", "174", "443"]


def test_run_record_skip_and_refusal():
    rec = {"id": "t", "suite": "degrees", "kind": "total_dim", "expect": 1, "k": 5, "degree": 40,
           "anchor": "x"}
    r = C.run_record(rec, {"max_degree": 32})
    assert r.status == "SKIP" and not r.refused
    H.clear_cache()
    r = C.run_record(rec, {"engine": {"max_block_gib": 1e-9}})
    assert r.status == "SKIP" and r.refused
    H.clear_cache()
