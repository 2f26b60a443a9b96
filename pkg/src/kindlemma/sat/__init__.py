"""Propositional core: CNF, DIMACS, CDCL and bit-blasting."""
from .blast import BlastContext, blast, constrain_frame, decode
from .cdcl import Assignment, ResourceLimit, Solver, solve
from .cnf import CnfFormula, FormatError, from_dimacs, to_dimacs
from .external import parse_solver_output, solve_external

__all__ = [
    "Assignment", "BlastContext", "CnfFormula", "FormatError", "ResourceLimit",
    "Solver", "blast", "constrain_frame", "decode", "from_dimacs",
    "parse_solver_output", "solve", "solve_external", "to_dimacs",
]
