import json

import pytest

from packing_sat.cli import EXIT_ERROR, EXIT_OK, EXIT_SAT, EXIT_UNSAT, main
from packing_sat.cnf import parse_dimacs, parse_icnf
from packing_sat.grid import Coloring, verify_coloring


def kv(out: str) -> dict:
    line = [l for l in out.splitlines() if "=" in l][0]
    return dict(tok.split("=", 1) for tok in line.split())


def test_encode_writes_dimacs_and_manifest(tmp_path, capsys):
    out = tmp_path / "d.cnf"
    assert main(["encode", "-r", "5", "-k", "10", "-c", "5", "--variant", "plus", "-o", str(out)]) == EXIT_OK
    stats = kv(capsys.readouterr().out)
    assert (stats["vars"], stats["clauses"]) == ("673", "4063")
    f = parse_dimacs(out.read_bytes())
    assert f.num_clauses == 4063
    m = json.loads((tmp_path / "d.cnf.json").read_text())
    assert m["instance"]["variant"] == "plus" and m["subcommand"] == "encode"


def test_encode_options(capsys):
    assert main(["encode", "-r", "6", "-k", "11", "-c", "6", "--alod", "--sym"]) == EXIT_OK
    assert kv(capsys.readouterr().out)["clauses"] == "21371"
    assert main(["encode", "-r", "3", "-k", "6", "-c", "3", "--sym-layers", "6,5"]) == EXIT_OK


def test_encode_errors(capsys):
    assert main(["encode", "-r", "3", "-k", "5", "-c", "6"]) == EXIT_ERROR
    assert "error" in capsys.readouterr().err
    assert main(["encode", "-r", "6", "-k", "11", "-c", "1", "--chessboard"]) == EXIT_ERROR
    with pytest.raises(SystemExit):
        main(["encode", "-r", "3"])


def test_split(tmp_path, capsys):
    out = tmp_path / "s.icnf"
    assert main(["split", "-P", "2", "-T", "2", "-R", "3", "-o", str(out)]) == EXIT_OK
    _, cubes = parse_icnf(out.read_bytes())
    assert len(cubes) == 16
    capsys.readouterr()
    assert main(["split", "-P", "6", "-T", "7", "-R", "9", "--count-only"]) == EXIT_OK
    assert kv(capsys.readouterr().out)["cubes"] == "5217031"
    assert main(["split", "-P", "0"]) == EXIT_OK
    assert kv(capsys.readouterr().out)["cubes"] == "1"
    assert main(["split", "-P", "3", "-T", "2", "-R", "1"]) == EXIT_ERROR


def test_split_bound_to_instance(tmp_path, capsys):
    out = tmp_path / "s.icnf"
    assert main(["split", "-r", "5", "-k", "10", "-c", "5", "-P", "1", "-T", "2", "-R", "2", "-o", str(out)]) == 0
    f, cubes = parse_icnf(out.read_bytes())
    assert len(cubes) == 5 and f.num_clauses == 4063


def test_solve_exit_codes(tmp_path, capsys):
    col = tmp_path / "col.txt"
    assert main(["solve", "-r", "3", "-k", "7", "-c", "3", "-q", "--coloring", str(col)]) == EXIT_SAT
    assert verify_coloring(Coloring.from_text(col.read_text()), 7) is None
    proof = tmp_path / "p.drat"
    assert main(["solve", "-r", "3", "-k", "6", "-c", "3", "--proof", str(proof)]) == EXIT_UNSAT
    assert proof.read_text().rstrip().endswith("0")
    assert main(["solve", "-r", "3", "-k", "6", "-c", "3", "--budget", "3"]) == EXIT_OK
    assert "status=UNKNOWN" in capsys.readouterr().out
    assert main(["solve"]) == EXIT_ERROR


def test_solve_cnf_file_and_split(tmp_path, capsys):
    cnf = tmp_path / "d.cnf"
    main(["encode", "-r", "3", "-k", "6", "-c", "3", "-o", str(cnf)])
    assert main(["solve", "--cnf", str(cnf)]) == EXIT_UNSAT
    rep = tmp_path / "rep"
    assert main(["solve", "-r", "3", "-k", "6", "-c", "3", "--split", "1,1,1", "--report", str(rep),
                 "--journal", str(tmp_path / "j.jsonl")]) == EXIT_UNSAT
    assert json.loads((tmp_path / "rep.json").read_text())["cubes"] == 2
    assert main(["solve", "--cnf", str(cnf), "--split", "1,1,1"]) == EXIT_ERROR


def test_pipeline_and_certify(tmp_path, capsys):
    d = tmp_path / "run"
    assert main(["pipeline", "-r", "3", "-k", "6", "-c", "3", "--split", "1,1,1", "--out-dir", str(d)]) == EXIT_OK
    info = json.loads((d / "pipeline.json").read_text())
    assert info["status"] == "UNSAT" and info["check_ok"]
    cert = tmp_path / "cert.json"
    assert main(["certify", "-r", "3", "-k", "6", "-c", "3", "--prior", "6", "--from", str(d),
                 "-o", str(cert)]) == EXIT_OK
    assert json.loads(cert.read_text())["conclusion"] == 7
    assert main(["certify", "-r", "3", "-k", "6", "-c", "3", "--prior", "5", "--from", str(d)]) == EXIT_ERROR
    assert main(["certify", "-r", "3", "-k", "6", "-c", "2", "--prior", "6", "--from", str(d)]) == EXIT_ERROR
    # a tampered proof no longer matches the manifest
    (d / "proof.drat").write_text("0\n")
    assert main(["certify", "-r", "3", "-k", "6", "-c", "3", "--prior", "6", "--from", str(d)]) == EXIT_ERROR


def test_certify_runs_pipeline_itself(capsys):
    assert main(["certify", "-r", "3", "-k", "6", "-c", "3", "--prior", "6", "--sym"]) == EXIT_OK
    assert "chi_rho(Z^2)>=7" in capsys.readouterr().out


def test_pipeline_on_sat_instance(capsys):
    assert main(["pipeline", "-r", "3", "-k", "7", "-c", "3"]) == EXIT_SAT
    assert "satisfiable" in capsys.readouterr().err


def test_sweep_center(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep-center", "-r", "3", "-k", "6", "-o", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()
    assert rows[0] == "c,status,wall,conflicts"
    assert [r.split(",")[1] for r in rows[1:]] == ["UNSAT"] * 3 + ["SAT"] * 3
