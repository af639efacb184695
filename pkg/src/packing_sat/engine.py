"""Solving layer: the embedded CDCL solver, cube runs and an external-solver adapter."""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import cdcl
from .cnf import Formula, VarMap, write_dimacs
from .drat import ProofSegment, concat, parse_drat, write_drat
from .grid import Coloring, Vertex, diamond_vertices

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"
_STATUS = {cdcl.SAT: SAT, cdcl.UNSAT: UNSAT, cdcl.UNKNOWN: UNKNOWN}

SOLVER_ENV = "PACKING_SAT_SOLVER"


class ModelError(RuntimeError):
    """A model returned by a solver falsifies a clause."""


class ExternalSolverError(RuntimeError):
    def __init__(self, message: str, output: str = ""):
        super().__init__(message)
        self.output = output


@dataclass
class SolveResult:
    status: str
    model: Optional[np.ndarray] = None  # model[v] in {0, 1}; index 0 unused
    stats: Dict[str, float] = field(default_factory=dict)
    proof: Optional[ProofSegment] = None

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    @property
    def is_unsat(self) -> bool:
        return self.status == UNSAT

    def value(self, lit: int) -> bool:
        if self.model is None:
            raise ValueError("no model")
        return bool(self.model[abs(lit)]) == (lit > 0)


def _csr(f: Formula):
    sizes = np.fromiter((len(c) for c in f.clauses), dtype=np.int64, count=len(f.clauses))
    starts = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=starts[1:])
    lits = np.fromiter((l for c in f.clauses for l in c), dtype=np.int32, count=int(starts[-1]))
    return lits, starts


def falsified_clauses(f: Formula, model: np.ndarray, limit: int = 5) -> List[tuple]:
    lits, starts = _csr(f)
    if len(f.clauses) == 0:
        return []
    true = (model[np.abs(lits)] == 1) == (lits > 0)
    sizes = np.diff(starts)
    nonempty = sizes > 0
    sat = np.zeros(len(sizes), dtype=bool)
    if true.size:
        sat[nonempty] = np.logical_or.reduceat(true, starts[:-1][nonempty])
    return [f.clauses[i] for i in np.flatnonzero(~sat)[:limit]]


def check_model(f: Formula, model: np.ndarray) -> None:
    bad = falsified_clauses(f, model)
    if bad:
        raise ModelError(f"model falsifies {len(bad)}+ clauses, e.g. {bad[0]}")


def _check_lits(lits: Sequence[int], num_vars: int, what: str) -> None:
    for l in lits:
        if l == 0 or abs(l) > num_vars:
            raise ValueError(f"{what} literal {l} outside 1..{num_vars}")


def solve(
    f: Formula,
    assumptions: Sequence[int] = (),
    budget: Optional[int] = None,
    proof: bool = False,
    seed: int = 0,
    cleanup: bool = False,
) -> SolveResult:
    """Solve ``f`` under ``assumptions``; ``budget`` caps the number of conflicts.

    With ``proof`` an UNSAT answer carries a DRAT segment over the formula's
    clauses that ends with the negated assumptions (or the empty clause when
    there are none); ``cleanup`` then also deletes the learned clauses at the
    end of the segment. SAT models are checked against every clause.
    """
    assumptions = [int(a) for a in assumptions]
    _check_lits(assumptions, f.num_vars, "assumption")
    for clause in f.clauses:
        _check_lits(clause, f.num_vars, "clause")
    lits, starts = _csr(f)
    t0 = time.perf_counter()
    status, model, raw, stream = cdcl.cdcl_solve(
        f.num_vars, lits, starts, np.array(assumptions, dtype=np.int32),
        -1 if budget is None else int(budget), int(seed), bool(proof), bool(cleanup),
    )
    wall = time.perf_counter() - t0
    stats = {
        "conflicts": int(raw[cdcl.ST_CONFLICTS]),
        "decisions": int(raw[cdcl.ST_DECISIONS]),
        "propagations": int(raw[cdcl.ST_PROPAGATIONS]),
        "restarts": int(raw[cdcl.ST_RESTARTS]),
        "learned": int(raw[cdcl.ST_LEARNED]),
        "deleted": int(raw[cdcl.ST_DELETED]),
        "wall": wall,
    }
    res = SolveResult(_STATUS[int(status)], stats=stats)
    if res.is_sat:
        check_model(f, model)
        for a in assumptions:
            if bool(model[abs(a)]) != (a > 0):
                raise ModelError(f"model violates assumption {a}")
        res.model = model
    if proof and res.is_unsat:
        res.proof = ProofSegment.from_stream(stream, "implication" if assumptions else "solver")
    return res


def extract_coloring(model, vmap: VarMap, r: int, k: int) -> Coloring:
    """Lowest true color per vertex (the direct encoding allows several true colors)."""
    assignment = {}
    for v in diamond_vertices(r):
        for t in range(1, k + 1):
            if model[vmap.x(v, t)]:
                assignment[v] = t
                break
        else:
            raise ValueError(f"vertex {v} has no true color in the model")
    return Coloring(r, assignment)


# ---------------------------------------------------------------------------
# cube runs


@dataclass
class CubeRow:
    index: int
    cube: List[int]
    status: str
    runtime: float
    conflicts: int = 0
    proof_path: Optional[str] = None


@dataclass
class CubeRunReport:
    rows: List[CubeRow]
    segments: Optional[List[ProofSegment]] = None

    @property
    def all_unsat(self) -> bool:
        return all(r.status == UNSAT for r in self.rows)

    @property
    def satisfiable(self) -> bool:
        return any(r.status == SAT for r in self.rows)

    @property
    def max_runtime(self) -> float:
        return max((r.runtime for r in self.rows), default=0.0)

    @property
    def avg_runtime(self) -> float:
        return sum(r.runtime for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def total_runtime(self) -> float:
        return sum(r.runtime for r in self.rows)

    def implication_proof(self) -> ProofSegment:
        if self.segments is None or any(s is None for s in self.segments):
            raise ValueError("the run did not keep a proof for every cube")
        return concat(self.segments, "implication")

    def to_csv(self) -> str:
        lines = ["index,status,runtime,conflicts,cube"]
        for r in self.rows:
            lines.append(f"{r.index},{r.status},{r.runtime:.6f},{r.conflicts},{' '.join(map(str, r.cube))}")
        return "\n".join(lines) + "\n"

    def summary(self) -> Dict:
        return {"cubes": len(self.rows), "all_unsat": self.all_unsat, "satisfiable": self.satisfiable,
                "max_runtime": self.max_runtime, "avg_runtime": self.avg_runtime}


def _solve_one(f: Formula, index: int, cube, budget, proof, seed, proof_dir, cleanup):
    res = solve(f, cube, budget=budget, proof=proof, seed=seed, cleanup=cleanup)
    seg = None
    path = None
    if res.is_unsat and proof:
        seg = res.proof
        seg.tag = "implication"
        if proof_dir is not None:
            path = str(Path(proof_dir) / f"cube_{index:09d}.drat")
            with open(path, "w") as fh:
                write_drat(seg, fh)
    row = CubeRow(index, list(cube), res.status, res.stats["wall"], res.stats["conflicts"], path)
    return row, seg


def _load_journal(path: Path) -> Dict[int, CubeRow]:
    done = {}
    if path.exists():
        for line in path.read_text().splitlines():
            if line.strip():
                row = CubeRow(**json.loads(line))
                done[row.index] = row
    return done


def solve_cubes(
    f: Formula,
    cubes,
    workers: int = 1,
    proof: bool = False,
    budget: Optional[int] = None,
    seed: int = 0,
    journal: Optional[str] = None,
    proof_dir: Optional[str] = None,
    cleanup: bool = True,
) -> CubeRunReport:
    """Solve ``f`` under every cube with a fresh solver per cube.

    Rows come back in cube order whatever the completion order. With a
    ``journal`` (line-delimited JSON) finished cubes are skipped on a re-run;
    resuming a proof-producing run requires ``proof_dir`` so the proofs of
    finished cubes can be reused.
    """
    cubes = [list(c) for c in cubes]
    for c in cubes:
        _check_lits(c, f.num_vars, "cube")
    done: Dict[int, CubeRow] = {}
    jpath = Path(journal) if journal else None
    if jpath is not None:
        done = _load_journal(jpath)
        if proof and proof_dir is None and done:
            raise ValueError("resuming a proof-producing run needs proof_dir")
    if proof_dir is not None:
        os.makedirs(proof_dir, exist_ok=True)
    rows: List[Optional[CubeRow]] = [None] * len(cubes)
    segments: List[Optional[ProofSegment]] = [None] * len(cubes)
    todo = []
    for i, cube in enumerate(cubes):
        row = done.get(i)
        if row is not None and row.cube == cube:
            rows[i] = row
            if proof and row.status == UNSAT:
                segments[i] = parse_drat(Path(row.proof_path).read_text(), "implication", pivots=False)
        else:
            todo.append(i)

    jfile = open(jpath, "a") if jpath is not None else None

    def record(i, row, seg):
        rows[i] = row
        segments[i] = seg
        if jfile is not None:
            jfile.write(json.dumps(asdict(row)) + "\n")
            jfile.flush()

    try:
        if workers <= 1 or len(todo) <= 1:
            for i in todo:
                record(i, *_solve_one(f, i, cubes[i], budget, proof, seed, proof_dir, cleanup))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futs = {pool.submit(_solve_one, f, i, cubes[i], budget, proof, seed, proof_dir, cleanup): i
                        for i in todo}
                for fut, i in futs.items():
                    record(i, *fut.result())
    finally:
        if jfile is not None:
            jfile.close()
    return CubeRunReport(rows, segments if proof else None)


# ---------------------------------------------------------------------------
# external solvers


def run_external(
    f: Formula,
    command: Optional[str] = None,
    workdir: Optional[str] = None,
    timeout: Optional[float] = None,
) -> SolveResult:
    """Run a DIMACS solver given by a command template holding ``{path}``.

    The template defaults to the ``PACKING_SAT_SOLVER`` environment variable.
    """
    command = command or os.environ.get(SOLVER_ENV)
    if not command:
        raise ValueError(f"no solver command given and ${SOLVER_ENV} is unset")
    if "{path}" not in command:
        raise ValueError("solver command template must contain a {path} placeholder")
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        path = os.path.join(tmp, "formula.cnf")
        with open(path, "wb") as fh:
            fh.write(write_dimacs(f))
        argv = [a.replace("{path}", path) for a in shlex.split(command)]
        t0 = time.perf_counter()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired as e:
            return SolveResult(UNKNOWN, stats={"wall": time.perf_counter() - t0})
        except OSError as e:
            raise ExternalSolverError(f"cannot run {argv[0]}: {e}") from e
        wall = time.perf_counter() - t0
    out = proc.stdout
    if proc.returncode not in (0, 10, 20):
        raise ExternalSolverError(f"solver exited with code {proc.returncode}", out + proc.stderr)
    status = None
    values: List[int] = []
    for line in out.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            status = {"SATISFIABLE": SAT, "UNSATISFIABLE": UNSAT, "UNKNOWN": UNKNOWN}.get(word)
            if status is None:
                raise ExternalSolverError(f"unparseable status line {line!r}", out)
        elif line.startswith("v "):
            try:
                values.extend(int(t) for t in line[2:].split())
            except ValueError:
                raise ExternalSolverError(f"unparseable value line {line!r}", out) from None
    if status is None:
        raise ExternalSolverError("no status line in solver output", out)
    expected = {SAT: 10, UNSAT: 20}.get(status)
    if proc.returncode not in (0, expected):
        raise ExternalSolverError(f"exit code {proc.returncode} contradicts status {status}", out)
    res = SolveResult(status, stats={"wall": wall})
    if status == SAT:
        model = np.zeros(f.num_vars + 1, dtype=np.int8)
        for l in values:
            if l != 0 and abs(l) <= f.num_vars:
                model[abs(l)] = 1 if l > 0 else 0
        try:
            check_model(f, model)
        except ModelError as e:
            raise ExternalSolverError(f"external model fails verification: {e}", out) from e
        res.model = model
    return res
