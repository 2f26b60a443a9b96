"""Optional external solver backend speaking DIMACS on disk.

The command is run as ``<command...> <file.cnf>``; its stdout must contain a
``s SATISFIABLE`` / ``s UNSATISFIABLE`` status line and, when satisfiable,
``v`` lines listing the model literals.
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from typing import Optional, Sequence

from .cdcl import Assignment
from .cnf import CnfFormula, FormatError, to_dimacs


def parse_solver_output(text: str, num_vars: int) -> Optional[Assignment]:
    status = None
    values = [0] + [-1] * num_vars
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "s":
            status = " ".join(parts[1:])
        elif parts[0] == "v":
            for tok in parts[1:]:
                lit = int(tok)
                if lit != 0 and abs(lit) <= num_vars:
                    values[abs(lit)] = 1 if lit > 0 else -1
    if status == "SATISFIABLE":
        return Assignment(values)
    if status == "UNSATISFIABLE":
        return None
    raise FormatError(f"solver reported no usable status line (got {status!r})")


def solve_external(cnf: CnfFormula, command: str | Sequence[str], assumptions: Sequence[int] = (),
                   timeout: Optional[float] = None) -> Optional[Assignment]:
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    formula = cnf.copy()
    for lit in assumptions:
        formula.add_clause([lit])
    fd, path = tempfile.mkstemp(suffix=".cnf")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(to_dimacs(formula))
        proc = subprocess.run(argv + [path], capture_output=True, text=True, timeout=timeout)
    finally:
        os.unlink(path)
    return parse_solver_output(proc.stdout, cnf.num_vars)
