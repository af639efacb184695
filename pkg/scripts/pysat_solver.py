#!/usr/bin/env python3
"""Minimal DIMACS solver front end over python-sat, following the SAT competition output format.

Usage: pysat_solver.py FILE.cnf [--solver cadical153]
Exit code 10 for SAT, 20 for UNSAT.  Handy as $PACKING_SAT_SOLVER:

    export PACKING_SAT_SOLVER="python3 scripts/pysat_solver.py {path}"
"""
import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("cnf")
    ap.add_argument("--solver", default="cadical153")
    args = ap.parse_args()
    cnf = CNF(from_file=args.cnf)
    with Solver(name=args.solver, bootstrap_with=cnf.clauses) as s:
        if s.solve():
            print("s SATISFIABLE")
            model = s.get_model() or []
            for i in range(0, len(model), 20):
                print("v " + " ".join(map(str, model[i:i + 20])))
            print("v 0")
            return 10
        print("s UNSATISFIABLE")
        return 20


if __name__ == "__main__":
    sys.exit(main())
