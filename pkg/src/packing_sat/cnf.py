"""Clauses, formulas, variable numbering and DIMACS / iCNF serialization.

Literals are plain signed integers in DIMACS convention and clauses are
tuples of literals.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .grid import Vertex, diamond_vertices

Clause = Tuple[int, ...]


class DimacsError(ValueError):
    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def check_clause(clause: Sequence[int]) -> None:
    seen = set()
    for lit in clause:
        if lit == 0:
            raise ValueError("literal 0 is not allowed inside a clause")
        if -lit in seen:
            raise ValueError(f"tautological clause {tuple(clause)}")
        if lit in seen:
            raise ValueError(f"duplicate literal {lit} in clause {tuple(clause)}")
        seen.add(lit)


@dataclass
class Formula:
    num_vars: int = 0
    clauses: List[Clause] = field(default_factory=list)
    meta: Dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def add(self, clause: Iterable[int]) -> None:
        self.clauses.append(tuple(clause))

    def extend(self, clauses: Iterable[Iterable[int]]) -> None:
        self.clauses.extend(tuple(c) for c in clauses)

    def copy(self) -> "Formula":
        return Formula(self.num_vars, list(self.clauses), dict(self.meta))

    def validate(self) -> None:
        for clause in self.clauses:
            check_clause(clause)
            for lit in clause:
                if abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} exceeds variable count {self.num_vars}")

    def clause_set(self) -> set:
        return {frozenset(c) for c in self.clauses}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Formula):
            return NotImplemented
        return self.num_vars == other.num_vars and self.clauses == other.clauses

    def stats_line(self) -> str:
        return f"vars={self.num_vars} clauses={self.num_clauses}"


class VarMap:
    """Deterministic numbering of vertex variables x_{v,t} followed by regional variables r_{S,t}.

    Vertex variable ids are ``index(v) * k + t`` with v's index in canonical
    diamond order; regional ids follow, ordered by (region index, color).
    """

    def __init__(self, r: int, k: int):
        self.r = r
        self.k = k
        self.vertices = diamond_vertices(r).vertices
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self.num_vertex_vars = len(self.vertices) * k
        self._regional: Dict[Tuple[Hashable, int], int] = {}
        self._regional_inv: Dict[int, Tuple[Hashable, int]] = {}
        self.next_id = self.num_vertex_vars + 1

    @property
    def num_vars(self) -> int:
        return self.next_id - 1

    def var_of_vertex(self, v: Tuple[int, int], t: int) -> int:
        i = self._vindex.get(Vertex(*v))
        if i is None or not 1 <= t <= self.k:
            raise KeyError(f"no vertex variable for {v} color {t}")
        return i * self.k + t

    x = var_of_vertex

    def register_region(self, region: Hashable, t: int) -> int:
        key = (region, t)
        if key in self._regional:
            raise ValueError(f"region variable {key} already registered")
        vid = self.next_id
        self._regional[key] = vid
        self._regional_inv[vid] = key
        self.next_id += 1
        return vid

    def var_of_region(self, region: Hashable, t: int) -> int:
        try:
            return self._regional[(region, t)]
        except KeyError:
            raise KeyError(f"no regional variable for region {region} color {t}") from None

    def has_region(self, region: Hashable, t: int) -> bool:
        return (region, t) in self._regional

    @property
    def num_regional_vars(self) -> int:
        return len(self._regional)

    def decode(self, var: int):
        """('x', vertex, color) or ('r', region, color) for a variable id."""
        if 1 <= var <= self.num_vertex_vars:
            i, t = divmod(var - 1, self.k)
            return ("x", self.vertices[i], t + 1)
        if var in self._regional_inv:
            region, t = self._regional_inv[var]
            return ("r", region, t)
        raise KeyError(var)

    def is_vertex_var(self, var: int) -> bool:
        return 1 <= var <= self.num_vertex_vars


# ---------------------------------------------------------------------------
# DIMACS


def _clause_line(clause: Iterable[int]) -> str:
    return " ".join(map(str, clause)) + " 0\n" if clause else "0\n"


def write_dimacs(f: Formula, comments: Sequence[str] = ()) -> bytes:
    out = io.StringIO()
    for c in comments:
        out.write(f"c {c}\n")
    out.write(f"p cnf {f.num_vars} {len(f.clauses)}\n")
    for clause in f.clauses:
        out.write(_clause_line(clause))
    return out.getvalue().encode()


def _iter_tokens(data: str):
    for lineno, line in enumerate(data.splitlines(), 1):
        yield lineno, line.strip()


def parse_dimacs(data) -> Formula:
    if isinstance(data, bytes):
        data = data.decode()
    header = None
    clauses: List[Clause] = []
    current: List[int] = []
    last_line = 0
    for lineno, line in _iter_tokens(data):
        last_line = lineno
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError("negative header count", lineno)
            continue
        if header is None:
            raise DimacsError("clause before header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"malformed literal {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise DimacsError(f"literal {lit} exceeds declared {header[0]} variables", lineno)
                current.append(lit)
    if header is None:
        raise DimacsError("missing header", last_line or None)
    if current:
        raise DimacsError("last clause not terminated by 0", last_line)
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, body has {len(clauses)}", last_line)
    return Formula(header[0], clauses)


def write_icnf(f: Formula, cubes: Iterable[Sequence[int]]) -> bytes:
    """Incremental CNF: the clauses followed by one ``a <lits> 0`` line per cube."""
    out = io.StringIO()
    out.write("p inccnf\n")
    for clause in f.clauses:
        out.write(_clause_line(clause))
    for cube in cubes:
        out.write("a " + _clause_line(cube))
    return out.getvalue().encode()


def parse_icnf(data) -> Tuple[Formula, List[Clause]]:
    if isinstance(data, bytes):
        data = data.decode()
    clauses, cubes = [], []
    seen_header = False
    max_var = 0
    for lineno, line in _iter_tokens(data):
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if line.split() != ["p", "inccnf"]:
                raise DimacsError(f"malformed header {line!r}", lineno)
            seen_header = True
            continue
        if not seen_header:
            raise DimacsError("clause before header", lineno)
        target = clauses
        if line.startswith("a"):
            target = cubes
            line = line[1:]
        try:
            lits = [int(t) for t in line.split()]
        except ValueError:
            raise DimacsError(f"malformed line {line!r}", lineno) from None
        if not lits or lits[-1] != 0 or 0 in lits[:-1]:
            raise DimacsError("each line must hold exactly one 0-terminated clause", lineno)
        lits.pop()
        max_var = max([max_var] + [abs(l) for l in lits])
        target.append(tuple(lits))
    return Formula(max_var, clauses), cubes


def write_meta(f: Formula) -> str:
    return json.dumps(f.meta, indent=2, sort_keys=True)
