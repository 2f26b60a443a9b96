"""DIMACS-in, competition-format-out wrapper around a reference solver (test use only)."""
import sys

from pysat.formula import CNF
from pysat.solvers import Minisat22

cnf = CNF(from_file=sys.argv[1])
with Minisat22(bootstrap_with=cnf.clauses) as s:
    if s.solve():
        print("s SATISFIABLE")
        print("v " + " ".join(str(l) for l in s.get_model()) + " 0")
    else:
        print("s UNSATISFIABLE")
