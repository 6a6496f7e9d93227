import json

import pytest

from conftest import EXAMPLE_DIMACS
from topoforge.cli import EXIT_OK, EXIT_PARSE, EXIT_UNSAT, main, parse_assignment
from topoforge.linkdiag import LinkDiagram
from topoforge.kirby import braid_closure
from topoforge.slope import Slope


@pytest.fixture
def cnf(tmp_path):
    p = tmp_path / "phi.cnf"
    p.write_text(EXAMPLE_DIMACS)
    return p


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_reduce_writes_diagram(cnf, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["reduce", str(cnf), "-o", str(out), "--json"]) == EXIT_OK
    row = json.loads(capsys.readouterr().out)
    assert row["components"] == 12
    d = LinkDiagram.from_json((out / "phi.diagram.json").read_text())
    assert d.n_components == 12
    stats = json.loads((out / "phi.reduction.json").read_text())
    assert "seconds" not in stats["stats"]
    assert (out / "stats.jsonl").read_text().count("\n") == 1


def test_verify_exit_codes(cnf, tmp_path, capsys):
    good = write(tmp_path, "good.txt", "1=1\n2=0\n3=0\n4=0\n")
    bad = write(tmp_path, "bad.txt", "1=0\n2=0\n3=0\n4=0\n")
    out = tmp_path / "out"
    assert main(["verify", str(cnf), good, "-o", str(out)]) == EXIT_OK
    cert = json.loads((out / "phi.certificate.json").read_text())
    assert cert["moves"]
    assert main(["verify", str(cnf), bad]) == EXIT_UNSAT
    capsys.readouterr()


def test_verify_all_assignments(cnf, capsys):
    assert main(["verify", str(cnf), "--all-assignments", "--json"]) == EXIT_OK
    row = json.loads(capsys.readouterr().out)
    assert row["assignments"] == 16
    assert row["accepted"] == row["satisfying"] == 12
    assert row["agrees"]


def test_malformed_inputs(tmp_path, capsys):
    bad = write(tmp_path, "bad.cnf", "p cnf 3 1\n1 2 0\n")
    assert main(["reduce", bad]) == EXIT_PARSE
    assert main(["triangulate", write(tmp_path, "junk.json", "{nope")]) == EXIT_PARSE
    assert "error" in capsys.readouterr().err
    with pytest.raises(Exception):
        parse_assignment("1=2\n")
    with pytest.raises(Exception):
        parse_assignment("1=1\n1=0\n")


def test_triangulate_and_homology(tmp_path, capsys):
    d = braid_closure(2, coefficients=(Slope(3, 2), Slope(3, 1)))
    path = write(tmp_path, "hopf.json", d.dumps())
    out = tmp_path / "out"
    assert main(["triangulate", path, "-o", str(out), "--json"]) == EXIT_OK
    row = json.loads(capsys.readouterr().out)
    assert row["manifold"] and row["euler"] == 0 and row["h1"] == "Z/7"
    tri = json.loads((out / "hopf.triangulation.json").read_text())
    lines = (out / "hopf.gluing.txt").read_text().splitlines()
    assert len(lines) == row["tetrahedra"]
    assert tri
    assert main(["homology", path, "--json"]) == EXIT_OK
    h = json.loads(capsys.readouterr().out)
    assert h["h1"] == "Z/7" and h["agree"]


def test_stats_aggregates(cnf, tmp_path, capsys):
    out = tmp_path / "out"
    main(["reduce", str(cnf), "-o", str(out)])
    main(["reduce", str(cnf), "-o", str(out)])
    capsys.readouterr()
    assert main(["stats", str(out / "stats.jsonl")]) == EXIT_OK
    row = json.loads(capsys.readouterr().out.splitlines()[0])
    assert row["command"] == "reduce" and row["runs"] == 2


def test_selftest(capsys):
    assert main(["selftest"]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out
