import pytest

from desing.cli import main
from desing.errors import ParseError
from desing.fields import QQ, PrimeField
from desing.iofmt import (emit_certificate, parse_certificate,
                          parse_ideal_output, parse_problem, split_sections)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def node_series(precision=24):
    body = " ".join(f"{'-' if k % 2 == 0 else '+'} x^{k}"
                    for k in range(2, precision))
    return f"x {body} + O(x^{precision})"


def node_problem(precision=24):
    return (
        "[field]\n"
        "Q\n"
        "[variables]\n"
        "base x\n"
        "algebra Y1 Y2\n"
        "[ideal]\n"
        "Y1*Y2 - x^2\n"
        "[morphism]\n"
        f"Y1 = x + x^2 + O(x^{precision})\n"
        f"Y2 = {node_series(precision)}\n")


# ---------------------------------------------------------------------------
# problem parsing

def test_parse_problem_basics():
    pf = parse_problem(node_problem())
    assert pf.field == QQ
    assert pf.base_var == "x" and pf.algebra_vars == ("Y1", "Y2")
    assert len(pf.ideal) == 1
    assert set(pf.morphism) == {"Y1", "Y2"}
    assert pf.morphism["Y1"].coefficient((2,)) == 1


def test_parse_problem_unknown_section():
    with pytest.raises(ParseError):
        parse_problem("[nonsense]\nfoo\n")


def test_parse_problem_missing_marker():
    text = node_problem().replace(" + O(x^24)\n", "\n", 1)
    with pytest.raises(ParseError):
        parse_problem(text)


def test_split_sections_comments_and_duplicates():
    secs = split_sections("[a]\nfoo # trailing\n# whole line\nbar\n")
    assert secs["a"] == [(2, "foo"), (4, "bar")]
    with pytest.raises(ParseError):
        split_sections("[a]\n[a]\n")
    with pytest.raises(ParseError):
        split_sections("orphan line\n")


# ---------------------------------------------------------------------------
# subcommands, artifacts, exit codes

def test_cli_groebner_round_trip(tmp_path):
    inp = write(tmp_path, "in.problem",
                "[field]\nQ\n[variables]\nring x y\n"
                "[ideal]\nx^2 + y^2\nx*y\n")
    out = str(tmp_path / "out.txt")
    assert main(["groebner", "--input", inp, "--output", out]) == 0
    gb = parse_ideal_output(open(out).read(), header="groebner")
    assert {str(g) for g in gb.elements} == {"x^2 + y^2", "x*y", "y^3"}


def test_cli_quotient(tmp_path):
    inp = write(tmp_path, "in.problem",
                "[field]\nQ\n[variables]\nring x y\n"
                "[ideal]\nx^2\nx*y\n[ideal2]\nx\n")
    out = str(tmp_path / "out.txt")
    assert main(["quotient", "--input", inp, "--output", out]) == 0
    I = parse_ideal_output(open(out).read())
    assert {str(g) for g in I.generators} >= {"x", "y"}


def test_cli_smooth_locus(tmp_path):
    inp = write(tmp_path, "in.problem", node_problem())
    out = str(tmp_path / "out.txt")
    assert main(["smooth-locus", "--input", inp, "--output", out]) == 0
    I = parse_ideal_output(open(out).read())
    assert I.generators


def test_cli_smooth_locus_budget_exhausted(tmp_path):
    inp = write(tmp_path, "in.problem",
                node_problem() + "[options]\nsubset-budget 0\n")
    assert main(["smooth-locus", "--input", inp]) == 4


def test_cli_gnd_verify_chain(tmp_path):
    inp = write(tmp_path, "in.problem", node_problem())
    cert_path = str(tmp_path / "cert.txt")
    assert main(["gnd", "--input", inp, "--output", cert_path]) == 0
    assert main(["verify", "--input", cert_path]) == 0


def test_cli_verify_rejects_tampering(tmp_path):
    inp = write(tmp_path, "in.problem", node_problem())
    cert_path = str(tmp_path / "cert.txt")
    assert main(["gnd", "--input", inp, "--output", cert_path]) == 0
    text = open(cert_path).read()
    bad = text.replace("2*x^5", "3*x^5")
    assert bad != text
    bad_path = write(tmp_path, "bad.txt", bad)
    assert main(["verify", "--input", bad_path]) == 5


def test_cli_gnd_deterministic(tmp_path):
    inp = write(tmp_path, "in.problem", node_problem())
    a = str(tmp_path / "a.txt")
    b = str(tmp_path / "b.txt")
    assert main(["gnd", "--input", inp, "--output", a]) == 0
    assert main(["gnd", "--input", inp, "--output", b]) == 0
    assert open(a).read() == open(b).read()


def test_cli_parse_error_exit(tmp_path):
    inp = write(tmp_path, "in.problem",
                "[field]\nQ\n[variables]\nring x y\n[ideal]\nx + w\n")
    assert main(["groebner", "--input", inp]) == 2


def test_cli_missing_file():
    assert main(["groebner", "--input", "/nonexistent/path.problem"]) == 2


def test_cli_domain_error_exit(tmp_path):
    inp = write(tmp_path, "in.problem",
                "[field]\nGF 5\n[variables]\nbase x\nalgebra Y1\n"
                "[ideal]\nY1 - x^2\n[morphism]\nY1 = x^2 + O(x^12)\n")
    assert main(["gnd", "--input", inp]) == 3


def test_cli_lift(tmp_path):
    inp = write(tmp_path, "in.problem",
                "[field]\nQ\n[variables]\nbase x\nalgebra Y\n"
                "[ideal]\nY^2 - 1 - x\n[start]\nY = 1 + O(x)\n"
                "[options]\ntarget 32\nc 0\n")
    out = str(tmp_path / "out.txt")
    assert main(["lift", "--input", inp, "--output", out]) == 0
    text = open(out).read()
    assert "Y = 1 + 1/2*x - 1/8*x^2" in text
    assert "iterations" in text


def test_cli_weierstrass(tmp_path):
    inp = write(tmp_path, "in.problem",
                "[field]\nQ\n[variables]\nring y x\n"
                "[series]\nx^2 + y*x + y*x^2 + y^2*x + O(x^10)\n")
    out = str(tmp_path / "out.txt")
    assert main(["weierstrass", "--input", inp, "--output", out]) == 0
    text = open(out).read()
    assert "p 2" in text


def test_cli_linear_factor(tmp_path):
    sol = " ".join(f"{'-' if k % 2 else '+'} x^{k}" for k in range(1, 12))
    inp = write(tmp_path, "in.problem",
                "[field]\nQ\n[variables]\nbase x\n"
                "[matrix]\nx ; x^2\n[rhs]\nx\n"
                f"[solution]\n1 {sol} + O(x^12)\n1 {sol} + O(x^12)\n")
    out = str(tmp_path / "out.txt")
    assert main(["linear-factor", "--input", inp, "--output", out]) == 0
    text = open(out).read()
    assert "particular" in text and "kernel" in text


def test_cli_module_iso(tmp_path):
    inp = write(tmp_path, "in.problem",
                "[field]\nQ\n[variables]\nbase x\n"
                "[umatrix]\nx + O(x^8)\n[vmatrix]\nx + O(x^8)\n"
                "[candidate]\nX1_1 = 1 + O(x^8)\nY1_1 = 1 + O(x^8)\n"
                "Z1_1 = 1 + O(x^8)\nW = 1 + O(x^8)\n")
    out = str(tmp_path / "out.txt")
    assert main(["module-iso", "--input", inp, "--output", out]) == 0
    assert "candidate accepted" in open(out).read()


def test_cli_unknown_subcommand():
    assert main(["frobnicate", "--input", "x"]) == 2


# ---------------------------------------------------------------------------
# certificate serialization

def test_certificate_round_trip(tmp_path):
    inp = write(tmp_path, "in.problem", node_problem())
    cert_path = str(tmp_path / "cert.txt")
    assert main(["gnd", "--input", inp, "--output", cert_path]) == 0
    text = open(cert_path).read()
    cert = parse_certificate(text)
    assert emit_certificate(cert) == text
    assert cert.c == 1 and not cert.short_circuit
    assert cert.all_passed()


def test_prime_field_problem_round_trip():
    pf = parse_problem("[field]\nGF 101\n[variables]\nring x y\n"
                       "[ideal]\nx^2 + 100*y\n")
    assert pf.field == PrimeField(101)
    assert pf.ideal[0].terms[(0, 1)] == 100
