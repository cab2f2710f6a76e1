import io
import subprocess
import sys

import pytest

from slsat.cli import main

CHAIN = "universe 4\nstore x=0\nheap 0->1 1->2 2->3\n"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_exit_codes(capsys):
    code, out, _ = run(capsys, "check", "forall y. alloc(y)")
    assert code == 10 and out.startswith("SAT\nmode finite\n")
    assert "witness\nuniverse 1\n" in out
    code, out, _ = run(capsys, "check", "emp & |h| >= 1")
    assert code == 20 and out.startswith("UNSAT")
    code, out, _ = run(capsys, "check", "--infinite", "forall y. alloc(y)")
    assert code == 20
    code, out, _ = run(capsys, "check", "--oracle-bound", "2", "false")
    assert code == 30 and "no model" in out
    code, _, _ = run(capsys, "check", "--max-work", "3", "exists x. x |-> x & !alloc(x)")
    assert code == 30


def test_check_input_errors(capsys):
    code, _, err = run(capsys, "check", "exists x. (")
    assert code == 1 and err.startswith("error: parse error")
    code, _, err = run(capsys, "check", "forall y. exists x. x = y")
    assert code == 1
    code, _, _ = run(capsys, "check", "--fo", "f(x) = x")
    assert code == 1
    code, _, _ = run(capsys, "check", "--finite", "--infinite", "true")
    assert code == 1
    code, _, _ = run(capsys, "frobnicate")
    assert code == 1


def test_check_fo_oracle(capsys):
    code, out, _ = run(capsys, "check", "--fo", "--oracle-bound", "2", "exists x. !f(x) = x")
    assert code == 10 and "witness" in out


def test_files_and_stdin(capsys, tmp_path, monkeypatch):
    src = tmp_path / "phi.sl"
    src.write_text("# a comment\nforall y. alloc(y)\n")
    wit = tmp_path / "w.txt"
    code, _, _ = run(capsys, "check", "--witness-out", str(wit), str(src))
    assert code == 10 and wit.read_text() == "universe 1\nstore\nheap 0->0\n"
    monkeypatch.setattr(sys, "stdin", io.StringIO("emp & |h| >= 1"))
    code, _, _ = run(capsys, "check", "-")
    assert code == 20


def test_translate(capsys, tmp_path):
    code, out, _ = run(capsys, "translate", "--to-fo", "alloc(x) & x ~> y")
    assert code == 0 and out == "d(x) & (d(x) & y = f(x))\n"
    code, out, _ = run(capsys, "translate", "--to-fo", "--format", "smtlib2", "alloc(x)")
    assert "(declare-fun d (L) Bool)" in out and out.rstrip().endswith("(check-sat)")
    code, out, _ = run(capsys, "translate", "--to-fo", "--format", "tptp", "alloc(x)")
    assert out.startswith("fof(")
    code, out, _ = run(capsys, "translate", "--from-fo-finite", "forall x. f(f(x)) = x")
    assert code == 0 and "alloc" in out
    code, _, _ = run(capsys, "translate", "--to-fo", "emp")
    assert code == 1
    code, _, _ = run(capsys, "translate", "--from-fo-infinite", "--format", "tptp", "x = x")
    assert code == 1
    target = tmp_path / "o.p"
    run(capsys, "translate", "--to-fo", "--format", "tptp", "--out", str(target), "alloc(x)")
    assert target.read_text().startswith("fof(")


def test_modelcheck(capsys):
    code, out, _ = run(capsys, "modelcheck", "--formula", "x ~> y * true",
                       "--structure", "universe 2\nstore x=0 y=1\nheap 0->1\n")
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, "modelcheck", "--fo", "--formula", "d(f(x))",
                       "--structure", "universe 2\nstore x=0\nf 0->1 1->1\npred d 1\n")
    assert (code, out) == (0, "true\n")
    code, _, err = run(capsys, "modelcheck", "--formula", "alloc(z)", "--structure", CHAIN)
    assert code == 1 and "cannot evaluate" in err
    code, _, _ = run(capsys, "modelcheck", "--formula", "true", "--structure", "heap 0->1")
    assert code == 1


def test_contract_and_restrict(capsys):
    code, out, _ = run(capsys, "contract", "--structure", CHAIN, "--vars", "x", "--bound", "1")
    assert code == 0
    assert out == ("universe {0,1,3}\nstore x=0\nheap 0->1 1->3\n"
                   "# kept 3 reachable locations, size bound 2: exceeds\n")
    code, out, _ = run(capsys, "restrict", "--structure", "universe 4\nstore x=0\nheap 0->1\n",
                       "--vars", "x")
    assert code == 0 and out == "universe 2\nstore x=0\nheap 0->1\n"
    code, _, _ = run(capsys, "contract", "--structure", CHAIN, "--vars", "x", "--bound", "0")
    assert code == 1
    code, _, _ = run(capsys, "restrict", "--structure", CHAIN, "--locs", "a")
    assert code == 1


def test_fuzz_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "fuzz", "--seed", "3", "--count", "4", "--out-dir", str(tmp_path / "a"))
    assert code == 0 and "disagreements 0" in out
    run(capsys, "fuzz", "--seed", "3", "--count", "4", "--out-dir", str(tmp_path / "b"))
    names = ["report.tsv", "summary.txt", "verdicts.png", "work.png", "model_sizes.png"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "verdicts.png").read_bytes()[:4] == b"\x89PNG"
    header = (tmp_path / "a" / "report.tsv").read_text().splitlines()[0]
    assert header.split("\t")[0] == "index"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "slsat", "check", "exists x. alloc(x)"],
                          capture_output=True, text=True)
    assert proc.returncode == 10 and proc.stdout.startswith("SAT")


@pytest.mark.parametrize("argv", [
    ["check", "exists x. forall y. y ~> x -> alloc(x)"],
    ["check", "--infinite", "!emp"],
    ["translate", "--to-fo", "--format", "smtlib2", "|h| >= |U| - 1"],
    ["contract", "--structure", CHAIN, "--vars", "x", "--bound", "2"],
])
def test_repeated_runs_match(argv):
    outs = [subprocess.run([sys.executable, "-m", "slsat", *argv], capture_output=True).stdout
            for _ in range(2)]
    assert outs[0] == outs[1]
