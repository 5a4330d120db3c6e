import subprocess
import sys

import pytest

from sheaflab.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, run
from sheaflab.formats import data_file, parse_digraph, parse_morphism

DATA = data_file("b2.dg").parent


def report(argv):
    text, code = run([str(a) for a in argv])
    values = {}
    for line in text.splitlines():
        key, sep, val = line.partition("=")
        if sep and " " not in key:
            values.setdefault(key, val)
    return values, text, code


def test_invariants_b2():
    r, text, code = report(["invariants", DATA / "b2.dg"])
    assert code == EXIT_OK
    assert text.startswith("h0=1\nh1=2\nchi=-1\nrho=1\n")


def test_invariants_girths():
    # loop a, then around the 2-cycle x y, then a back, then the 2-cycle backwards
    r, _, _ = report(["invariants", DATA / "b2_cover2.dg", "--girth-bound", "8"])
    assert r["girth"] == "1" and r["abelian_girth"] == "6"
    r, _, _ = report(["invariants", DATA / "b2.dg", "--girth-bound", "3"])
    assert r["abelian_girth"] == ">3"


def test_twisted_unhappy_bundle():
    r, _, code = report(["twisted", DATA / "unhappy.sheaf", "--samples", "3", "--seed", "7"])
    assert code == EXIT_OK
    assert r["h1_twist"] == "1" and r["seed"] == "7" and r["samples"] == "3"
    r, _, _ = report(["twisted", DATA / "unhappy.sheaf", "--pullback", DATA / "b2_cover2.coords"])
    assert r["h1_twist"] == "0" and r["pullback_degree"] == "2"


@pytest.mark.parametrize("p", [2, 3])
def test_maxexcess_brute_unhappy(p):
    for extra in ([], ["--pullback", DATA / "b2_cover2.coords"]):
        r, text, code = report(["maxexcess", DATA / "unhappy.sheaf", "--method", "brute", "--prime", p, *extra])
        assert code == EXIT_OK and r["max_excess"] == "0" and r["method"] == "brute"
        assert "begin witness" in text


def test_maxexcess_pullback_emits_a_cover(tmp_path):
    out = tmp_path / "cover.txt"
    r, text, code = report(["maxexcess", DATA / "structure_b2.sheaf", "--method", "pullback", "--cover-out", out])
    assert code == EXIT_OK and r["max_excess"] == "1" and r["abelian_girth_bound"] == "7"
    assert out.exists()
    _, text, _ = report(["maxexcess", DATA / "structure_b2.sheaf", "--method", "pullback"])
    graph = text.split("begin graph\n")[1].split("end graph")[0]
    morph = text.split("begin morphism\n")[1].split("end morphism")[0]
    g = parse_digraph(graph)
    m = parse_morphism(morph, g, parse_digraph(data_file("b2.dg").read_text()))
    assert len(m.vmap) == int(r["cover_degree"])


def test_maxexcess_budget_exit_code():
    r, text, code = report(["maxexcess", DATA / "unhappy.sheaf", "--method", "brute", "--prime", 3, "--budget", 10])
    assert code == EXIT_BUDGET and r["error"].startswith("budget:")


def test_shnc_on_covering():
    r, _, code = report(["shnc", DATA / "b2_cover2.dg", DATA / "l_core.dg"])
    assert code == EXIT_OK and r["shnc_margin"] == "0"


def test_stallings_words(tmp_path):
    r, text, code = report(["stallings", "--words", "abA"])
    assert code == EXIT_OK and (r["h1"], r["rho"]) == ("1", "0")
    assert "edge f1 v1 v1 colour=2" in text
    out = tmp_path / "core.dg"
    report(["stallings", "--words", "a,bab", "--out", out])
    assert out.read_text() == data_file("l_core.dg").read_text()
    _, _, code = report(["stallings", "--words", ","])
    assert code == EXIT_INPUT


def test_rho_kernel_and_families():
    base = ["rho-kernel", "--group", "cyclic:3", "--g1", "1", "--g2", "2", "--subgraph", DATA / "cayley_z3_L.dg"]
    r, _, code = report(base + ["--check-families"])
    assert code == EXIT_OK
    assert r["profile_ok"] == "1" and r["families_ok"] == "1" and r["max_deficit"] == "0"
    r, _, code = report(base + ["--k", "0", "--trials", "2"])
    assert r["values"] == "6,6" and r["divisible"] == "1"
    r, _, code = report(base + ["--trials", "3", "--q", "5"])
    assert code == EXIT_INPUT


def test_generic_exp():
    r, _, code = report(
        ["generic-exp", "--group", "cyclic:3", "--g1", "1", "--g2", "2", "--subgraph", DATA / "cayley_z3_L.dg", "--trials", "3"]
    )
    assert code == EXIT_OK and r["modal"] == "0"


def test_cover_and_normal_extension(tmp_path):
    out = tmp_path / "c.dg"
    r, _, code = report(["cover", DATA / "b2.dg", DATA / "b2_cover2.coords", "--out", out])
    assert code == EXIT_OK and r["degree"] == "2"
    assert out.read_text() == data_file("b2_cover2.dg").read_text()
    r, _, code = report(["normal-ext", out])
    assert code == EXIT_OK and r["group_order"] == "2"


def test_fibre_default_base():
    r, text, code = report(["fibre", DATA / "b2.dg", DATA / "l_core.dg"])
    assert code == EXIT_OK and r["first_kind"] == "covering" and r["rho"] == "1"


def test_homology():
    r, _, code = report(["homology", DATA / "unhappy.sheaf"])
    assert code == EXIT_OK and (r["h0"], r["h1"], r["chi"]) == ("1", "1", "0")


@pytest.mark.parametrize(
    "argv",
    [
        ["invariants", "/nonexistent.dg"],
        ["homology", "unhappy.sheaf", "--prime", "4"],
        ["maxexcess", "unhappy.sheaf", "--method", "magic"],
        ["twisted", "unhappy.sheaf", "--unknown-flag"],
        ["shnc", "b2.dg", "unhappy.sheaf"],
        ["rho-kernel", "--group", "cyclic:3", "--g1", "9", "--g2", "2", "--subgraph", "cayley_z3_L.dg"],
    ],
)
def test_failures_exit_nonzero_with_error_line(argv):
    argv = [str(DATA / a) if (DATA / a).exists() else a for a in argv]
    proc = subprocess.run([sys.executable, "-m", "sheaflab.cli", *argv], capture_output=True, text=True)
    assert proc.returncode == EXIT_INPUT
    assert any(line.startswith("error=") for line in proc.stdout.splitlines())


def test_reports_are_byte_identical():
    cmds = [
        ["twisted", DATA / "unhappy.sheaf", "--samples", "4", "--seed", "3"],
        ["maxexcess", DATA / "structure_b2.sheaf", "--method", "pullback", "--seed", "1"],
        ["generic-exp", "--group", "cyclic:3", "--g1", "1", "--g2", "2", "--subgraph", DATA / "cayley_z3_L.dg", "--trials", "2", "--seed", "5"],
        ["stallings", "--words", "ab,bA"],
    ]
    for argv in cmds:
        assert run([str(a) for a in argv]) == run([str(a) for a in argv])


def test_violation_path_emits_witness(monkeypatch):
    # no valid input violates the inequality, so a fake report drives the violation branch
    from sheaflab import cli
    from sheaflab.rho import ShncReport

    monkeypatch.setattr(cli, "shnc_verify", lambda K, L: ShncReport(1, 1, 2, 2, -1, -1))
    r, text, code = report(["shnc", DATA / "b2.dg", DATA / "b2.dg"])
    assert code == EXIT_VIOLATION == 1
    assert r["shnc_margin"] == "-1" and "begin graph" in text
