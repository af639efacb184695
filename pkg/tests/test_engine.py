import json
import os
import sys
from itertools import product
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from packing_sat.checker import rup_check_forward
from packing_sat.cnf import Formula
from packing_sat.encoder import EncodingOptions, encode, encode_direct
from packing_sat.engine import (
    SAT,
    UNKNOWN,
    UNSAT,
    ExternalSolverError,
    ModelError,
    check_model,
    extract_coloring,
    falsified_clauses,
    run_external,
    solve,
    solve_cubes,
)
from packing_sat.grid import Coloring, dihedral_maps, verify_coloring

WRAPPER = Path(__file__).resolve().parents[1] / "scripts" / "pysat_solver.py"


def brute_sat(f):
    for bits in product((False, True), repeat=f.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses):
            return True
    return False


@st.composite
def small_cnf(draw):
    n = draw(st.integers(1, 9))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    m = draw(st.integers(0, 45))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=3).map(tuple), min_size=m, max_size=m))
    return Formula(n, clauses)


@given(small_cnf(), st.integers(0, 3))
@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_solver_agrees_with_truth_table(f, seed):
    res = solve(f, proof=True, seed=seed)
    assert res.status == (SAT if brute_sat(f) else UNSAT)
    if res.is_unsat:
        assert rup_check_forward(f, res.proof).ok


@given(small_cnf(), st.lists(st.integers(1, 9), max_size=3, unique=True), st.data())
@settings(max_examples=80, deadline=None)
def test_assumptions_and_cube_proofs(f, vars_, data):
    cube = [v if data.draw(st.booleans()) else -v for v in vars_ if v <= f.num_vars]
    g = Formula(f.num_vars, f.clauses + [(l,) for l in cube])
    res = solve(f, cube, proof=True, cleanup=True)
    assert res.status == (SAT if brute_sat(g) else UNSAT)
    if res.is_unsat:
        seg = res.proof
        assert seg.tag == ("implication" if cube else "solver")
        assert seg.last_addition() == tuple(-l for l in cube)
        assert rup_check_forward(f, seg, claim_unsat=False).ok


def test_empty_clause_and_empty_formula():
    assert solve(Formula(0)).status == SAT
    assert solve(Formula(2, [()])).status == UNSAT
    assert solve(Formula(1, [(1,)]), [-1]).status == UNSAT


def test_invalid_literals_rejected():
    with pytest.raises(ValueError):
        solve(Formula(1, [(1,)]), [2])
    with pytest.raises(ValueError):
        solve(Formula(1, [(3,)]))


def test_budget_gives_unknown(d3_unsat):
    f, _ = d3_unsat
    res = solve(f, budget=5)
    assert res.status == UNKNOWN and res.stats["conflicts"] <= 6


def test_small_instances(d3_unsat):
    f, vmap = d3_unsat
    res = solve(f, proof=True)
    assert res.is_unsat and res.proof.derives_empty_clause()
    assert rup_check_forward(f, res.proof).ok
    for k, c in ((7, 3), (6, 6)):
        g, vm = encode_direct(3, k, c)
        res = solve(g)
        assert res.is_sat
        col = extract_coloring(res.model, vm, 3, k)
        assert verify_coloring(col, k) is None and col[(0, 0)] == c


def test_model_self_check():
    f = Formula(2, [(1, 2), (-1,)])
    good = np.array([0, 0, 1], dtype=np.int8)
    check_model(f, good)
    bad = np.array([0, 1, 0], dtype=np.int8)
    assert falsified_clauses(f, bad) == [(-1,)]
    with pytest.raises(ModelError):
        check_model(f, bad)


def _image(col: Coloring, g) -> Coloring:
    return Coloring(col.radius, {tuple(g(*v)): t for v, t in col.assignment.items()})


@pytest.mark.parametrize("r,k", [(1, 3), (2, 6), (3, 7)])
def test_dihedral_images_of_models_are_models(r, k):
    f, vmap = encode_direct(r, k, k)
    res = solve(f)
    assert res.is_sat
    col = extract_coloring(res.model, vmap, r, k)
    for g in dihedral_maps():
        img = _image(col, g)
        assert verify_coloring(img, k) is None
        model = np.zeros(f.num_vars + 1, dtype=np.int8)
        for v, t in img.assignment.items():
            model[vmap.x(v, t)] = 1
        check_model(f, model)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_direct_and_plus_agree(r):
    for k in range(1, 8):
        for c in range(1, k + 1):
            statuses = set()
            for opts in (EncodingOptions("direct"), EncodingOptions("plus"), EncodingOptions("plus", alod=True)):
                f, vmap = encode(r, k, c, opts)
                res = solve(f)
                statuses.add(res.status)
                if res.is_sat:
                    assert verify_coloring(extract_coloring(res.model, vmap, r, k), k) is None
            assert len(statuses) == 1, (r, k, c, statuses)


def test_solve_cubes_report_and_proofs(tmp_path, d3_unsat):
    f, vmap = d3_unsat
    a = vmap.x((1, 0), 1)
    cubes = [(a,), (-a,)]
    rep = solve_cubes(f, cubes, proof=True, proof_dir=str(tmp_path / "p"))
    assert rep.all_unsat and not rep.satisfiable
    assert sorted(os.listdir(tmp_path / "p")) == ["cube_000000000.drat", "cube_000000001.drat"]
    seg = rep.implication_proof()
    assert rup_check_forward(f, seg, claim_unsat=False).ok
    assert rep.to_csv().splitlines()[0] == "index,status,runtime,conflicts,cube"
    assert rep.max_runtime >= rep.avg_runtime > 0


def test_solve_cubes_journal_resume(tmp_path, d3_unsat):
    f, vmap = d3_unsat
    cubes = [(vmap.x((0, 1), t),) for t in range(1, 7)]
    journal = tmp_path / "run.jsonl"
    first = solve_cubes(f, cubes[:3], journal=str(journal))
    assert len(journal.read_text().splitlines()) == 3
    again = solve_cubes(f, cubes, journal=str(journal))
    lines = [json.loads(l) for l in journal.read_text().splitlines()]
    assert [l["index"] for l in lines] == list(range(6))
    assert [r.status for r in again.rows[:3]] == [r.status for r in first.rows]


def test_solve_cubes_parallel_matches_serial(d3_unsat):
    f, vmap = d3_unsat
    cubes = [(vmap.x((0, 0), t),) for t in range(1, 7)]
    f7, vm7 = encode_direct(3, 7, 3)
    serial = solve_cubes(f7, [(vm7.x((1, 1), t),) for t in range(1, 8)])
    par = solve_cubes(f7, [(vm7.x((1, 1), t),) for t in range(1, 8)], workers=2)
    assert [r.status for r in serial.rows] == [r.status for r in par.rows]
    assert [r.index for r in par.rows] == list(range(7))
    assert solve_cubes(f, cubes).all_unsat


def test_run_external_with_pysat(d3_unsat):
    pytest.importorskip("pysat")
    cmd = f"{sys.executable} {WRAPPER} {{path}}"
    f, _ = d3_unsat
    assert run_external(f, cmd).status == UNSAT
    g, vm = encode_direct(3, 7, 3)
    res = run_external(g, cmd)
    assert res.is_sat
    assert verify_coloring(extract_coloring(res.model, vm, 3, 7), 7) is None


def test_run_external_errors(monkeypatch, d3_unsat):
    f, _ = d3_unsat
    monkeypatch.delenv("PACKING_SAT_SOLVER", raising=False)
    with pytest.raises(ValueError):
        run_external(f)
    with pytest.raises(ValueError):
        run_external(f, "cat")
    with pytest.raises(ExternalSolverError):
        run_external(f, f"{sys.executable} -c 'import sys; sys.exit(3)' {{path}}")
    with pytest.raises(ExternalSolverError):
        run_external(f, "/nonexistent/solver {path}")
