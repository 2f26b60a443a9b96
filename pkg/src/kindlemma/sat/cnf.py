"""CNF container and DIMACS reading/writing.

Literals are plain DIMACS integers: ``v`` for a positive literal of variable
``v`` (v >= 1) and ``-v`` for its negation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


class FormatError(ValueError):
    pass


@dataclass
class CnfFormula:
    num_vars: int = 0
    clauses: list = field(default_factory=list)

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, lits: Iterable[int]) -> None:
        clause = list(lits)
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} out of range (num_vars={self.num_vars})")
        self.clauses.append(clause)

    def extend(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def copy(self) -> "CnfFormula":
        return CnfFormula(self.num_vars, [list(c) for c in self.clauses])

    def satisfied_by(self, model) -> bool:
        """Independent clause-by-clause check of a model (callable or mapping lit -> bool)."""
        value = model if callable(model) else model.__getitem__
        return all(any(value(lit) for lit in c) for c in self.clauses)


def to_dimacs(cnf: CnfFormula) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines.extend(" ".join(str(l) for l in c) + (" 0" if c else "0") for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line == "%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise FormatError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise FormatError(f"line {lineno}: negative counts in header")
            continue
        if header is None:
            raise FormatError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormatError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > header[0]:
                    raise FormatError(f"line {lineno}: literal {lit} exceeds declared {header[0]} vars")
                current.append(lit)
    if header is None:
        raise FormatError("missing 'p cnf' header")
    if current:
        raise FormatError("last clause is not 0-terminated")
    if len(clauses) != header[1]:
        raise FormatError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], clauses)
