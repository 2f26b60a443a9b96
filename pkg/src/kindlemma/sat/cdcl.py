"""A small deterministic CDCL solver.

Two watched literals, first-UIP learning with local minimisation, VSIDS
ordering on a lazy heap, phase saving and Luby restarts.  Solving under
assumptions follows the usual scheme of deciding each assumption on its own
decision level before any free decision.
"""
from __future__ import annotations

import heapq
from typing import Iterable, Optional, Sequence

from .cnf import CnfFormula


class ResourceLimit(Exception):
    def __init__(self, conflicts: int):
        self.conflicts = conflicts
        super().__init__(f"conflict budget exhausted after {conflicts} conflicts")


class Assignment:
    """A total model; index with a literal to get its truth value."""

    __slots__ = ("_values",)

    def __init__(self, values: Sequence[int]):
        self._values = values  # index 0 unused; entries are +1 / -1

    def __getitem__(self, lit: int) -> bool:
        v = self._values[abs(lit)]
        return (v > 0) if lit > 0 else (v < 0)

    def __len__(self) -> int:
        return len(self._values) - 1

    def lits(self) -> list[int]:
        return [i if self._values[i] > 0 else -i for i in range(1, len(self._values))]

    def __repr__(self) -> str:
        return f"Assignment({self.lits()})"


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


def _code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


class Solver:
    def __init__(self, num_vars: int = 0, conflict_budget: Optional[int] = None,
                 restart_base: int = 100):
        self.nvars = 0
        self.assigns = [0]
        self.level = [0]
        self.reason: list = [None]
        self.activity = [0.0]
        self.phase = [False]
        self.seen = [False]
        self.watches: list[list] = [[], []]
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.ok = True
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.heap: list = []
        self.conflict_budget = conflict_budget
        self.restart_base = restart_base
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.ensure_vars(num_vars)

    # ---------------------------------------------------------- setup

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.nvars += 1
            v = self.nvars
            self.assigns.append(0)
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.phase.append(False)
            self.seen.append(False)
            self.watches.append([])
            self.watches.append([])
            heapq.heappush(self.heap, (0.0, v))

    def value(self, lit: int) -> int:
        a = self.assigns[lit if lit > 0 else -lit]
        return a if lit > 0 else -a

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a permanent clause; returns False once the formula is known UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        clause: list[int] = []
        for lit in lits:
            self.ensure_vars(abs(lit))
            if -lit in clause:
                return True  # tautology
            if lit not in clause:
                clause.append(lit)
        clause = [l for l in clause if self.value(l) != -1]
        if any(self.value(l) == 1 for l in clause):
            return True
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(clause)
        self._watch(clause)
        return True

    def add_formula(self, cnf: CnfFormula) -> bool:
        self.ensure_vars(cnf.num_vars)
        for c in cnf.clauses:
            if not self.add_clause(c):
                return False
        return True

    def _watch(self, clause: list[int]) -> None:
        self.watches[_code(clause[0])].append(clause)
        self.watches[_code(clause[1])].append(clause)

    # ---------------------------------------------------------- core

    def _enqueue(self, lit: int, reason) -> None:
        v = lit if lit > 0 else -lit
        self.assigns[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        assigns = self.assigns
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = -p
            fcode = _code(false_lit)
            ws = watches[fcode]
            kept = []
            n = len(ws)
            i = 0
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = assigns[first if first > 0 else -first]
                if (fv if first > 0 else -fv) == 1:
                    kept.append(c)
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    av = assigns[lk if lk > 0 else -lk]
                    if (av if lk > 0 else -av) != -1:
                        c[1], c[k] = lk, c[1]
                        watches[_code(lk)].append(c)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(c)
                if (fv if first > 0 else -fv) == -1:
                    kept.extend(ws[i:])
                    watches[fcode] = kept
                    self.qhead = len(trail)
                    return c
                self._enqueue(first, c)
            watches[fcode] = kept
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for i in range(1, self.nvars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.assigns[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _rebuild_heap(self) -> None:
        self.heap = [(-self.activity[v], v) for v in range(1, self.nvars + 1) if self.assigns[v] == 0]
        heapq.heapify(self.heap)

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen, level, reason = self.seen, self.level, self.reason
        cur = len(self.trail_lim)
        learnt: list[int] = [0]
        path = 0
        p = 0
        idx = len(self.trail) - 1
        c = confl
        while True:
            for q in (c if p == 0 else c[1:]):
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            pv = p if p > 0 else -p
            c = reason[pv]
            seen[pv] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = -p

        # local minimisation: drop literals implied by others already in the clause
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = reason[abs(q)]
            if r is None or any(not seen[abs(x)] and level[abs(x)] > 0 for x in r[1:]):
                kept.append(q)
        for q in learnt:
            seen[abs(q)] = False

        if len(kept) == 1:
            return kept, 0
        best = max(range(1, len(kept)), key=lambda i: level[abs(kept[i])])
        kept[1], kept[best] = kept[best], kept[1]
        return kept, level[abs(kept[1])]

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for i in range(len(self.trail) - 1, start - 1, -1):
            lit = self.trail[i]
            v = lit if lit > 0 else -lit
            self.phase[v] = lit > 0
            self.assigns[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick_branch(self) -> int:
        heap = self.heap
        while heap:
            _, v = heapq.heappop(heap)
            if self.assigns[v] == 0:
                return v if self.phase[v] else -v
        return 0

    # ---------------------------------------------------------- public

    def solve(self, assumptions: Sequence[int] = ()) -> Optional[Assignment]:
        """Return a model, or None when unsatisfiable under ``assumptions``."""
        if not self.ok:
            return None
        for a in assumptions:
            self.ensure_vars(abs(a))
        if len(self.heap) > 8 * (self.nvars + 16):
            self._rebuild_heap()
        budget_start = self.conflicts
        restart_idx = 0
        next_restart = self.conflicts + _luby(restart_idx) * self.restart_base
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                if not self.trail_lim:
                    self.ok = False
                    return None
                if (self.conflict_budget is not None
                        and self.conflicts - budget_start > self.conflict_budget):
                    self._cancel_until(0)
                    raise ResourceLimit(self.conflicts - budget_start)
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self._watch(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= self.var_decay
                continue

            if self.conflicts >= next_restart:
                restart_idx += 1
                next_restart = self.conflicts + _luby(restart_idx) * self.restart_base
                self._cancel_until(0)
                continue

            nxt = 0
            while len(self.trail_lim) < len(assumptions):
                a = assumptions[len(self.trail_lim)]
                val = self.value(a)
                if val == 1:
                    self.trail_lim.append(len(self.trail))
                elif val == -1:
                    self._cancel_until(0)
                    return None
                else:
                    nxt = a
                    break
            if nxt == 0:
                nxt = self._pick_branch()
                if nxt == 0:
                    model = Assignment(list(self.assigns))
                    self._cancel_until(0)
                    return model
                self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, None)


def solve(cnf: CnfFormula, assumptions: Sequence[int] = (),
          conflict_budget: Optional[int] = None) -> Optional[Assignment]:
    """One-shot solve of ``cnf``; returns a model or None (UNSAT)."""
    s = Solver(cnf.num_vars, conflict_budget=conflict_budget)
    if not s.add_formula(cnf):
        return None
    return s.solve(assumptions)
