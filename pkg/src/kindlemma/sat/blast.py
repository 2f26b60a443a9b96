"""Tseitin bit-blasting of :mod:`kindlemma.ir` expressions.

Bit vectors are lists of literals, least significant bit first.  Literal 1
is reserved as constant true (forced by a unit clause), so ``-1`` is false.
Gates are constant-folded and structurally hashed, which keeps unrolled
counters small.
"""
from __future__ import annotations

from typing import Mapping, Optional, Sequence

from .. import ir
from .cnf import CnfFormula

T = 1
F = -1


class BlastContext:
    """Timed variable naming ``(var, time, bit) -> literal`` plus gate caches."""

    def __init__(self, cnf: Optional[CnfFormula] = None):
        self.cnf = cnf if cnf is not None else CnfFormula()
        if self.cnf.num_vars == 0:
            self.cnf.new_var()
            self.cnf.add_clause([T])
        self.var_lits: dict[tuple[str, int, int], int] = {}
        self._gates: dict = {}
        self._memo: dict = {}

    def fresh(self) -> int:
        return self.cnf.new_var()

    def var_bits(self, name: str, width: int, time: int) -> list[int]:
        if time < 0:
            raise ValueError("time must be >= 0")
        out = []
        for bit in range(width):
            key = (name, time, bit)
            lit = self.var_lits.get(key)
            if lit is None:
                lit = self.var_lits[key] = self.fresh()
            out.append(lit)
        return out

    def lookup(self, name: str, time: int, bit: int) -> Optional[int]:
        return self.var_lits.get((name, time, bit))

    # gates ---------------------------------------------------------------

    def and2(self, a: int, b: int) -> int:
        if a == F or b == F or a == -b:
            return F
        if a == T:
            return b
        if b == T or a == b:
            return a
        key = ("and", min(a, b), max(a, b))
        g = self._gates.get(key)
        if g is None:
            g = self._gates[key] = self.fresh()
            add = self.cnf.clauses.append
            add([-g, a])
            add([-g, b])
            add([g, -a, -b])
        return g

    def or2(self, a: int, b: int) -> int:
        return -self.and2(-a, -b)

    def xor2(self, a: int, b: int) -> int:
        if a == F:
            return b
        if b == F:
            return a
        if a == T:
            return -b
        if b == T:
            return -a
        if a == b:
            return F
        if a == -b:
            return T
        # normalise polarity so xor(a,b), xor(-a,b), ... share one gate
        neg = (a < 0) != (b < 0)
        a, b = abs(a), abs(b)
        key = ("xor", min(a, b), max(a, b))
        g = self._gates.get(key)
        if g is None:
            g = self._gates[key] = self.fresh()
            add = self.cnf.clauses.append
            add([-g, a, b])
            add([-g, -a, -b])
            add([g, -a, b])
            add([g, a, -b])
        return -g if neg else g

    def mux(self, c: int, t: int, e: int) -> int:
        if c == T or t == e:
            return t
        if c == F:
            return e
        if t == T and e == F:
            return c
        if t == F and e == T:
            return -c
        if t == T:
            return self.or2(c, e)
        if t == F:
            return self.and2(-c, e)
        if e == T:
            return self.or2(-c, t)
        if e == F:
            return self.and2(c, t)
        key = ("mux", c, t, e)
        g = self._gates.get(key)
        if g is None:
            g = self._gates[key] = self.fresh()
            add = self.cnf.clauses.append
            add([-c, -t, g])
            add([-c, t, -g])
            add([c, -e, g])
            add([c, e, -g])
            add([-t, -e, g])
            add([t, e, -g])
        return g

    def and_n(self, lits: Sequence[int]) -> int:
        acc = T
        for l in lits:
            acc = self.and2(acc, l)
        return acc

    def or_n(self, lits: Sequence[int]) -> int:
        acc = F
        for l in lits:
            acc = self.or2(acc, l)
        return acc

    def adder(self, a: Sequence[int], b: Sequence[int], carry: int) -> tuple[list[int], int]:
        out = []
        for x, y in zip(a, b):
            axy = self.xor2(x, y)
            out.append(self.xor2(axy, carry))
            carry = self.or2(self.and2(x, y), self.and2(carry, axy))
        return out, carry

    def equal(self, a: Sequence[int], b: Sequence[int]) -> int:
        return self.and_n([-self.xor2(x, y) for x, y in zip(a, b)])


def blast(expr: ir.BitVecExpr, time: int, ctx: BlastContext,
          out: Optional[CnfFormula] = None) -> list[int]:
    """Literals for each bit of ``expr`` at ``time``, LSB first; clauses go to ``ctx.cnf``."""
    if out is not None and out is not ctx.cnf:
        raise ValueError("blast output formula must be the context's formula")
    key = (id(expr), time)
    hit = ctx._memo.get(key)
    if hit is not None:
        return hit[1]
    bits = _blast(expr, time, ctx)
    ctx._memo[key] = (expr, bits)  # holds expr so its id stays unique
    return bits


def _blast(e: ir.BitVecExpr, t: int, ctx: BlastContext) -> list[int]:
    if isinstance(e, ir.Const):
        return [T if (e.value >> i) & 1 else F for i in range(e.width)]
    if isinstance(e, ir.Var):
        return ctx.var_bits(e.name, e.width, t)
    if isinstance(e, ir.Slice):
        return blast(e.expr, t, ctx)[e.lo:e.hi + 1]
    if isinstance(e, ir.Concat):
        bits: list[int] = []
        for p in reversed(e.parts):
            bits.extend(blast(p, t, ctx))
        return bits
    if isinstance(e, ir.Unop):
        x = blast(e.expr, t, ctx)
        if e.op == "not":
            return [-b for b in x]
        if e.op == "neg":
            return ctx.adder([-b for b in x], [F] * len(x), T)[0]
        if e.op == "redand":
            return [ctx.and_n(x)]
        if e.op == "redor":
            return [ctx.or_n(x)]
        acc = F
        for b in x:
            acc = ctx.xor2(acc, b)
        return [acc]
    if isinstance(e, ir.Binop):
        a = blast(e.lhs, t, ctx)
        b = blast(e.rhs, t, ctx)
        op = e.op
        if op == "add":
            return ctx.adder(a, b, F)[0]
        if op == "sub":
            return ctx.adder(a, [-x for x in b], T)[0]
        if op == "and":
            return [ctx.and2(x, y) for x, y in zip(a, b)]
        if op == "or":
            return [ctx.or2(x, y) for x, y in zip(a, b)]
        if op == "xor":
            return [ctx.xor2(x, y) for x, y in zip(a, b)]
        if op == "eq":
            return [ctx.equal(a, b)]
        if op == "ne":
            return [-ctx.equal(a, b)]
        # carry out of lhs - rhs is 1 exactly when lhs >= rhs
        if op in ("ult", "uge"):
            ge = ctx.adder(a, [-x for x in b], T)[1]
            return [ge if op == "uge" else -ge]
        ge = ctx.adder(b, [-x for x in a], T)[1]  # rhs >= lhs
        return [ge if op == "ule" else -ge]
    if isinstance(e, ir.Ite):
        c = blast(e.cond, t, ctx)[0]
        return [ctx.mux(c, x, y) for x, y in zip(blast(e.then, t, ctx), blast(e.other, t, ctx))]
    raise TypeError(f"not an expression: {e!r}")


def decode(bits: Sequence[int], model) -> int:
    """Integer value of a literal vector under a model (LSB first)."""
    v = 0
    for i, lit in enumerate(bits):
        if model[lit]:
            v |= 1 << i
    return v


def constrain_frame(ctx: BlastContext, values: Mapping[str, int], widths: Mapping[str, int],
                    time: int) -> list[int]:
    """Literals fixing every named variable to its value at ``time`` (for assumptions)."""
    lits = []
    for name, val in values.items():
        for i, lit in enumerate(ctx.var_bits(name, widths[name], time)):
            lits.append(lit if (val >> i) & 1 else -lit)
    return lits
