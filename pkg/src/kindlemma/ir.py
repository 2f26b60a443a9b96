"""Word-level transition systems: bit-vector expressions, elaboration, simulation.

All arithmetic is unsigned and modular.  Wires are inlined during
elaboration; synchronous reset branches become initial-value constants and
the reset input is dropped from the system.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import frontend as fe

__all__ = [
    "BitVecExpr", "Const", "Var", "Slice", "Concat", "Unop", "Binop", "Ite",
    "StateVar", "TransitionSystem", "ElabError", "elaborate", "elaborate_expr",
    "eval_expr", "compile_expr", "step", "dump", "sexpr", "free_vars",
    "TRUE", "FALSE", "mask", "zext", "fit", "to_bool", "expr_size", "to_sva",
]

UNOPS = ("not", "neg", "redand", "redor", "redxor")
BINOPS = ("add", "sub", "and", "or", "xor", "eq", "ne", "ult", "ule", "ugt", "uge")
_PREDICATES = ("eq", "ne", "ult", "ule", "ugt", "uge")


class ElabError(Exception):
    pass


def mask(width: int) -> int:
    return (1 << width) - 1


class BitVecExpr:
    """Base of the immutable expression tree; every node has a ``width``."""

    __slots__ = ()
    width: int


@dataclass(frozen=True, eq=True)
class Const(BitVecExpr):
    value: int
    width: int

    def __post_init__(self):
        if self.width < 1 or not 0 <= self.value <= mask(self.width):
            raise ValueError(f"bad constant {self.value}:{self.width}")


@dataclass(frozen=True, eq=True)
class Var(BitVecExpr):
    name: str
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("variable width must be >= 1")


@dataclass(frozen=True, eq=True)
class Slice(BitVecExpr):
    expr: BitVecExpr
    hi: int
    lo: int
    width: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi < self.expr.width:
            raise ValueError(f"bad slice [{self.hi}:{self.lo}] of width {self.expr.width}")
        object.__setattr__(self, "width", self.hi - self.lo + 1)


@dataclass(frozen=True, eq=True)
class Concat(BitVecExpr):
    parts: tuple  # most significant first
    width: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty concatenation")
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "width", sum(p.width for p in self.parts))


@dataclass(frozen=True, eq=True)
class Unop(BitVecExpr):
    op: str
    expr: BitVecExpr
    width: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.op not in UNOPS:
            raise ValueError(f"unknown unary op {self.op}")
        object.__setattr__(self, "width", self.expr.width if self.op in ("not", "neg") else 1)


@dataclass(frozen=True, eq=True)
class Binop(BitVecExpr):
    op: str
    lhs: BitVecExpr
    rhs: BitVecExpr
    width: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.op not in BINOPS:
            raise ValueError(f"unknown binary op {self.op}")
        if self.lhs.width != self.rhs.width:
            raise ValueError(f"{self.op}: operand widths differ ({self.lhs.width} vs {self.rhs.width})")
        object.__setattr__(self, "width", 1 if self.op in _PREDICATES else self.lhs.width)


@dataclass(frozen=True, eq=True)
class Ite(BitVecExpr):
    cond: BitVecExpr
    then: BitVecExpr
    other: BitVecExpr
    width: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.cond.width != 1:
            raise ValueError("ite condition must have width 1")
        if self.then.width != self.other.width:
            raise ValueError("ite branches differ in width")
        object.__setattr__(self, "width", self.then.width)


TRUE = Const(1, 1)
FALSE = Const(0, 1)


def zext(e: BitVecExpr, width: int) -> BitVecExpr:
    if e.width == width:
        return e
    if e.width > width:
        raise ValueError("zext to a narrower width")
    if isinstance(e, Const):
        return Const(e.value, width)
    return Concat((Const(0, width - e.width), e))


def fit(e: BitVecExpr, width: int) -> BitVecExpr:
    """Zero-extend or truncate ``e`` to ``width``."""
    if e.width < width:
        return zext(e, width)
    if e.width > width:
        if isinstance(e, Const):
            return Const(e.value & mask(width), width)
        return Slice(e, width - 1, 0)
    return e


def to_bool(e: BitVecExpr) -> BitVecExpr:
    return e if e.width == 1 else Unop("redor", e)


def free_vars(e: BitVecExpr) -> set[str]:
    out: set[str] = set()
    stack = [e]
    seen: set[int] = set()
    while stack:
        x = stack.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        if isinstance(x, Var):
            out.add(x.name)
        else:
            stack.extend(_children(x))
    return out


def _children(x: BitVecExpr) -> tuple:
    if isinstance(x, Slice):
        return (x.expr,)
    if isinstance(x, Concat):
        return x.parts
    if isinstance(x, Unop):
        return (x.expr,)
    if isinstance(x, Binop):
        return (x.lhs, x.rhs)
    if isinstance(x, Ite):
        return (x.cond, x.then, x.other)
    return ()


def expr_size(e: BitVecExpr) -> int:
    return 1 + sum(expr_size(c) for c in _children(e))


# ---------------------------------------------------------------- systems

@dataclass(frozen=True)
class StateVar:
    name: str
    width: int
    init: Optional[int]  # None means nondeterministic
    next: BitVecExpr


@dataclass(frozen=True)
class TransitionSystem:
    name: str
    inputs: tuple  # of (name, width)
    states: tuple  # of StateVar
    assumptions: tuple = ()  # width-1 expressions
    properties: tuple = ()  # of (name, width-1 expr)
    # every source-level name -> expression over state/input vars
    lookup: Mapping[str, BitVecExpr] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.states:
            raise ElabError("transition system needs at least one state variable")
        names = [n for n, _ in self.inputs] + [s.name for s in self.states]
        if len(set(names)) != len(names):
            raise ElabError("duplicate variable names")
        known = set(names)
        for s in self.states:
            if s.next.width != s.width:
                raise ElabError(f"next({s.name}) has width {s.next.width}, expected {s.width}")
            extra = free_vars(s.next) - known
            if extra:
                raise ElabError(f"next({s.name}) references unknown {sorted(extra)}")
        for e in list(self.assumptions) + [p for _, p in self.properties]:
            if e.width != 1:
                raise ElabError("assumptions and properties must be width 1")
            extra = free_vars(e) - known
            if extra:
                raise ElabError(f"expression references unknown {sorted(extra)}")

    @property
    def widths(self) -> dict[str, int]:
        d = {n: w for n, w in self.inputs}
        d.update((s.name, s.width) for s in self.states)
        return d

    @property
    def state_names(self) -> list[str]:
        return [s.name for s in self.states]

    @property
    def input_names(self) -> list[str]:
        return [n for n, _ in self.inputs]

    def var(self, name: str) -> Var:
        return Var(name, self.widths[name])

    def symbols(self) -> dict[str, int]:
        if self.lookup:
            return {k: v.width for k, v in self.lookup.items()}
        return self.widths

    def property(self, name: str) -> BitVecExpr:
        for n, e in self.properties:
            if n == name:
                return e
        raise KeyError(name)

    def with_properties(self, props: Iterable[tuple[str, BitVecExpr]]) -> "TransitionSystem":
        return TransitionSystem(self.name, self.inputs, self.states, self.assumptions,
                                tuple(props), self.lookup)


# ---------------------------------------------------------------- elaboration

_ARITH = {"+": "add", "-": "sub", "&": "and", "|": "or", "^": "xor"}
_CMP = {"==": "eq", "!=": "ne", "<": "ult", "<=": "ule", ">": "ugt", ">=": "uge"}


class _Elab:
    def __init__(self, lookup: Mapping[str, Callable[[], BitVecExpr]]):
        self.lookup = lookup

    def ident(self, name: str, node) -> BitVecExpr:
        getter = self.lookup.get(name)
        if getter is None:
            raise ElabError(f"{node.line}:{node.col}: undeclared identifier {name!r}")
        return getter()

    def self_width(self, e) -> Optional[int]:
        if isinstance(e, fe.Num):
            return e.width
        if isinstance(e, fe.Ident):
            return self.ident(e.name, e).width
        if isinstance(e, fe.Index):
            return 1
        if isinstance(e, fe.Range):
            return e.hi - e.lo + 1
        if isinstance(e, fe.Unary):
            return self.self_width(e.operand) if e.op in ("~", "-") else 1
        if isinstance(e, fe.Binary):
            if e.op in _ARITH:
                ws = [w for w in (self.self_width(e.lhs), self.self_width(e.rhs)) if w is not None]
                return max(ws) if ws else None
            return 1
        if isinstance(e, fe.Cond):
            ws = [w for w in (self.self_width(e.then), self.self_width(e.other)) if w is not None]
            return max(ws) if ws else None
        if isinstance(e, fe.Concat):
            return sum(self.self_width(p) or 0 for p in e.parts)
        raise ElabError(f"unsupported expression {e!r}")

    def min_width(self, e) -> int:
        if isinstance(e, fe.Num) and e.width is None:
            return max(1, e.value.bit_length())
        w = self.self_width(e)
        if w is not None:
            return w
        return max(self.min_width(c) for c in _ast_children(e))

    def expr(self, e, ctx: Optional[int] = None) -> BitVecExpr:
        if isinstance(e, fe.Num):
            if e.width is not None:
                return Const(e.value, e.width)
            return Const(e.value, max(ctx or 1, e.value.bit_length(), 1))
        if isinstance(e, fe.Ident):
            return self.ident(e.name, e)
        if isinstance(e, (fe.Index, fe.Range)):
            base = self.ident(e.name, e)
            hi, lo = (e.index, e.index) if isinstance(e, fe.Index) else (e.hi, e.lo)
            if not 0 <= lo <= hi < base.width:
                raise ElabError(f"{e.line}:{e.col}: select [{hi}:{lo}] out of range for {e.name}[{base.width - 1}:0]")
            return Slice(base, hi, lo)
        if isinstance(e, fe.Unary):
            if e.op in ("~", "-"):
                inner = self.expr(e.operand, ctx)
                return Unop("not" if e.op == "~" else "neg", inner)
            inner = self.expr(e.operand)
            if e.op == "!":
                return Unop("not", to_bool(inner))
            return Unop({"&": "redand", "|": "redor", "^": "redxor"}[e.op], inner)
        if isinstance(e, fe.Binary):
            if e.op in ("&&", "||"):
                lhs, rhs = to_bool(self.expr(e.lhs)), to_bool(self.expr(e.rhs))
                return Binop("and" if e.op == "&&" else "or", lhs, rhs)
            w = self.operand_width(e.lhs, e.rhs, ctx if e.op in _ARITH else None)
            lhs = fit(self.expr(e.lhs, w), w)
            rhs = fit(self.expr(e.rhs, w), w)
            return Binop(_ARITH.get(e.op) or _CMP[e.op], lhs, rhs)
        if isinstance(e, fe.Cond):
            cond = to_bool(self.expr(e.cond))
            w = self.operand_width(e.then, e.other, ctx)
            return Ite(cond, fit(self.expr(e.then, w), w), fit(self.expr(e.other, w), w))
        if isinstance(e, fe.Concat):
            parts = []
            for p in e.parts:
                if self.self_width(p) is None:
                    raise ElabError(f"{e.line}:{e.col}: unsized constant inside concatenation")
                parts.append(self.expr(p))
            return Concat(tuple(parts))
        raise ElabError(f"unsupported expression {e!r}")

    def operand_width(self, a, b, ctx: Optional[int]) -> int:
        ws = [w for w in (self.self_width(a), self.self_width(b)) if w is not None]
        need = max(self.min_width(a), self.min_width(b))
        if ws:
            return max(max(ws), need)
        return max(need, ctx or 1)


def _ast_children(e) -> tuple:
    if isinstance(e, fe.Unary):
        return (e.operand,)
    if isinstance(e, fe.Binary):
        return (e.lhs, e.rhs)
    if isinstance(e, fe.Cond):
        return (e.cond, e.then, e.other)
    if isinstance(e, fe.Concat):
        return e.parts
    return ()


def _assigned(stmts: Sequence) -> list[str]:
    out = []
    for s in stmts:
        if isinstance(s, fe.NbAssign):
            out.append(s.lhs)
        else:
            out.extend(_assigned(s.then))
            out.extend(_assigned(s.other or ()))
    return out


def _reset_split(block: fe.SeqBlock, inputs: Mapping[str, int]):
    """Recognise ``if (!rst_n) r <= K; ... else body`` at the top of a block.

    Returns (reset_name, inactive_value, {reg: const ast}, else_body) or None.
    """
    if len(block.body) != 1 or not isinstance(block.body[0], fe.If):
        return None
    top = block.body[0]
    cond = top.cond
    if isinstance(cond, fe.Unary) and cond.op in ("!", "~") and isinstance(cond.operand, fe.Ident):
        name, inactive = cond.operand.name, 1
    elif isinstance(cond, fe.Ident):
        name, inactive = cond.name, 0
    else:
        return None
    if inputs.get(name) != 1:
        return None
    consts = {}
    for s in top.then:
        if not isinstance(s, fe.NbAssign) or not isinstance(s.rhs, fe.Num):
            return None
        consts[s.lhs] = s.rhs
    return name, inactive, consts, top.other or ()


def elaborate(ast: fe.ModuleAst, extra_assertions: Sequence[fe.AssertionAst] = ()) -> TransitionSystem:
    widths: dict[str, int] = {}
    kinds: dict[str, str] = {}
    port_dirs: dict[str, str] = {}
    for p in ast.ports:
        if p.name in widths:
            raise ElabError(f"duplicate port {p.name!r}")
        widths[p.name] = p.width
        port_dirs[p.name] = p.direction
        kinds[p.name] = "input" if p.direction == "in" else (p.net or "wire")
    for d in ast.decls:
        if d.name in widths:
            if port_dirs.get(d.name) != "out" or widths[d.name] != d.width:
                raise ElabError(f"redeclaration of {d.name!r}")
        widths[d.name] = d.width
        kinds[d.name] = d.kind

    clocks = {b.clock for b in ast.seq_blocks}
    if len(clocks) > 1:
        raise ElabError(f"multiple clock domains: {sorted(clocks)}")
    clock = next(iter(clocks), None)
    if clock is not None and port_dirs.get(clock) != "in":
        raise ElabError(f"clock {clock!r} is not an input port")
    inputs = {p.name: p.width for p in ast.ports if p.direction == "in" and p.name != clock}

    # drivers
    driver: dict[str, str] = {}
    for a in ast.assigns:
        if a.lhs not in widths:
            raise ElabError(f"{a.line}:{a.col}: undeclared identifier {a.lhs!r}")
        if a.lhs in inputs or a.lhs == clock:
            raise ElabError(f"cannot assign to input {a.lhs!r}")
        if a.lhs in driver:
            raise ElabError(f"{a.lhs!r} is multiply driven")
        driver[a.lhs] = "assign"
    splits = []
    for bi, b in enumerate(ast.seq_blocks):
        split = _reset_split(b, inputs)
        splits.append(split)
        for name in set(_assigned(b.body)):
            if name not in widths:
                raise ElabError(f"{b.line}:{b.col}: undeclared identifier {name!r}")
            if name in inputs or name == clock:
                raise ElabError(f"cannot assign to input {name!r}")
            if kinds[name] == "wire":
                raise ElabError(f"wire {name!r} assigned in a clocked block")
            if name in driver:
                raise ElabError(f"{name!r} is multiply driven")
            driver[name] = f"block{bi}"

    resets = {s[0]: s[1] for s in splits if s is not None}
    for name in resets:
        inputs.pop(name)
    regs = [n for n in widths if driver.get(n, "").startswith("block")]
    if not regs:
        raise ElabError("design has no clocked registers")
    for name, kind in kinds.items():
        if name not in driver and kind != "input":
            raise ElabError(f"{name!r} is never driven")

    lookup: dict[str, Callable[[], BitVecExpr]] = {}
    for n, w in inputs.items():
        lookup[n] = (lambda v=Var(n, w): v)
    for n in regs:
        lookup[n] = (lambda v=Var(n, widths[n]): v)
    for n, inactive in resets.items():
        lookup[n] = (lambda c=Const(inactive, 1): c)

    elab = _Elab(lookup)
    wire_cache: dict[str, BitVecExpr] = {}
    active: list[str] = []
    assigns = {a.lhs: a for a in ast.assigns}

    def wire(name: str) -> BitVecExpr:
        if name in wire_cache:
            return wire_cache[name]
        if name in active:
            cycle = active[active.index(name):] + [name]
            raise ElabError("combinational cycle: " + " -> ".join(cycle))
        active.append(name)
        a = assigns[name]
        value = fit(elab.expr(a.rhs, widths[name]), widths[name])
        active.pop()
        wire_cache[name] = value
        return value

    for n in assigns:
        lookup[n] = (lambda n=n: wire(n))
    for n in assigns:
        wire(n)

    inits: dict[str, Optional[int]] = {n: None for n in regs}
    for d in ast.decls:
        if d.init is not None and d.name in inits:
            inits[d.name] = d.init.value & mask(d.width)

    nexts: dict[str, BitVecExpr] = {}
    for b, split in zip(ast.seq_blocks, splits):
        body = b.body
        if split is not None:
            _, _, consts, body = split
            for reg, num in consts.items():
                inits[reg] = fit(elab.expr(num, widths[reg]), widths[reg]).value
        env = {n: lookup[n]() for n in set(_assigned(b.body))}
        env = _exec(elab, body, env, widths)
        nexts.update(env)

    states = tuple(StateVar(n, widths[n], inits[n], nexts[n]) for n in regs)

    assumptions, properties = [], []
    seen_names: set[str] = set()
    for a in list(ast.assertions) + list(extra_assertions):
        body = to_bool(elab.expr(a.body, 1))
        if a.kind == "assume":
            assumptions.append(body)
        else:
            if a.name in seen_names:
                raise ElabError(f"duplicate property name {a.name!r}")
            seen_names.add(a.name)
            properties.append((a.name, body))

    resolved = {n: g() for n, g in lookup.items()}
    return TransitionSystem(ast.name, tuple(inputs.items()), states, tuple(assumptions),
                            tuple(properties), resolved)


def _exec(elab: _Elab, stmts: Sequence, env: dict, widths: Mapping[str, int]) -> dict:
    env = dict(env)
    for s in stmts:
        if isinstance(s, fe.NbAssign):
            w = widths[s.lhs]
            env[s.lhs] = fit(elab.expr(s.rhs, w), w)
        else:
            cond = to_bool(elab.expr(s.cond))
            t = _exec(elab, s.then, env, widths)
            o = _exec(elab, s.other or (), env, widths)
            for k in env:
                env[k] = t[k] if t[k] is o[k] else Ite(cond, t[k], o[k])
    return env


def elaborate_expr(ts: TransitionSystem, ast_expr) -> BitVecExpr:
    """Elaborate a standalone assertion body against an existing system."""
    elab = _Elab({n: (lambda e=e: e) for n, e in ts.lookup.items()} if ts.lookup
                 else {n: (lambda v=Var(n, w): v) for n, w in ts.widths.items()})
    return to_bool(elab.expr(ast_expr, 1))


# ---------------------------------------------------------------- semantics

def eval_expr(expr: BitVecExpr, frame: Mapping[str, int]) -> int:
    """Reference interpreter: the value of ``expr`` under ``frame``."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return frame[expr.name] & mask(expr.width)
    if isinstance(expr, Slice):
        return (eval_expr(expr.expr, frame) >> expr.lo) & mask(expr.width)
    if isinstance(expr, Concat):
        v = 0
        for p in expr.parts:
            v = (v << p.width) | eval_expr(p, frame)
        return v
    if isinstance(expr, Unop):
        x = eval_expr(expr.expr, frame)
        w = expr.expr.width
        if expr.op == "not":
            return ~x & mask(w)
        if expr.op == "neg":
            return -x & mask(w)
        if expr.op == "redand":
            return int(x == mask(w))
        if expr.op == "redor":
            return int(x != 0)
        return bin(x).count("1") & 1
    if isinstance(expr, Binop):
        a = eval_expr(expr.lhs, frame)
        b = eval_expr(expr.rhs, frame)
        return _BINOP_FUNCS[expr.op](a, b, mask(expr.lhs.width))
    if isinstance(expr, Ite):
        return eval_expr(expr.then if eval_expr(expr.cond, frame) else expr.other, frame)
    raise TypeError(f"not an expression: {expr!r}")


_BINOP_FUNCS = {
    "add": lambda a, b, m: (a + b) & m,
    "sub": lambda a, b, m: (a - b) & m,
    "and": lambda a, b, m: a & b,
    "or": lambda a, b, m: a | b,
    "xor": lambda a, b, m: a ^ b,
    "eq": lambda a, b, m: int(a == b),
    "ne": lambda a, b, m: int(a != b),
    "ult": lambda a, b, m: int(a < b),
    "ule": lambda a, b, m: int(a <= b),
    "ugt": lambda a, b, m: int(a > b),
    "uge": lambda a, b, m: int(a >= b),
}


def compile_expr(expr: BitVecExpr) -> Callable[[Mapping[str, int]], int]:
    """Closure-compiled evaluator; same semantics as :func:`eval_expr`, faster for simulation."""
    if isinstance(expr, Const):
        v = expr.value
        return lambda f: v
    if isinstance(expr, Var):
        n, m = expr.name, mask(expr.width)
        return lambda f: f[n] & m
    if isinstance(expr, Slice):
        inner, lo, m = compile_expr(expr.expr), expr.lo, mask(expr.width)
        return lambda f: (inner(f) >> lo) & m
    if isinstance(expr, Concat):
        parts = [(compile_expr(p), p.width) for p in expr.parts]

        def concat(f):
            v = 0
            for fn, w in parts:
                v = (v << w) | fn(f)
            return v
        return concat
    if isinstance(expr, Unop):
        inner, m = compile_expr(expr.expr), mask(expr.expr.width)
        return {
            "not": lambda f: ~inner(f) & m,
            "neg": lambda f: -inner(f) & m,
            "redand": lambda f: int(inner(f) == m),
            "redor": lambda f: int(inner(f) != 0),
            "redxor": lambda f: bin(inner(f)).count("1") & 1,
        }[expr.op]
    if isinstance(expr, Binop):
        a, b, m, op = compile_expr(expr.lhs), compile_expr(expr.rhs), mask(expr.lhs.width), _BINOP_FUNCS[expr.op]
        return lambda f: op(a(f), b(f), m)
    if isinstance(expr, Ite):
        c, t, o = compile_expr(expr.cond), compile_expr(expr.then), compile_expr(expr.other)
        return lambda f: t(f) if c(f) else o(f)
    raise TypeError(f"not an expression: {expr!r}")


def step(ts: TransitionSystem, frame: Mapping[str, int]) -> dict[str, int]:
    """Next-state values of every state variable; inputs are left unassigned."""
    return {s.name: eval_expr(s.next, frame) for s in ts.states}


# ---------------------------------------------------------------- debug dump

def sexpr(e: BitVecExpr) -> str:
    if isinstance(e, Const):
        return f"(const {e.width} {e.value})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Slice):
        return f"(slice {sexpr(e.expr)} {e.hi} {e.lo})"
    if isinstance(e, Concat):
        return "(concat " + " ".join(sexpr(p) for p in e.parts) + ")"
    if isinstance(e, Unop):
        return f"({e.op} {sexpr(e.expr)})"
    if isinstance(e, Binop):
        return f"({e.op} {sexpr(e.lhs)} {sexpr(e.rhs)})"
    if isinstance(e, Ite):
        return f"(ite {sexpr(e.cond)} {sexpr(e.then)} {sexpr(e.other)})"
    raise TypeError(f"not an expression: {e!r}")


def dump(ts: TransitionSystem) -> str:
    """Stable one-line-per-item text form of a transition system."""
    lines = [f"system {ts.name}"]
    for n, w in ts.inputs:
        lines.append(f"input {n}[{w}]")
    for s in ts.states:
        init = "nondet" if s.init is None else str(s.init)
        lines.append(f"state {s.name}[{s.width}] init={init} next={sexpr(s.next)}")
    for a in ts.assumptions:
        lines.append(f"assume {sexpr(a)}")
    for n, p in ts.properties:
        lines.append(f"property {n} {sexpr(p)}")
    return "\n".join(lines) + "\n"


_SVA_BINOP = {"add": "+", "sub": "-", "and": "&", "or": "|", "xor": "^", "eq": "==",
              "ne": "!=", "ult": "<", "ule": "<=", "ugt": ">", "uge": ">="}
_SVA_UNOP = {"not": "~", "neg": "-", "redand": "&", "redor": "|", "redxor": "^"}


def to_sva(e: BitVecExpr) -> str:
    """SVA-lite source text for ``e`` (re-parses to an equivalent expression)."""
    if isinstance(e, Const):
        return f"{e.width}'d{e.value}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Slice) and isinstance(e.expr, Var):
        return f"{e.expr.name}[{e.hi}]" if e.hi == e.lo else f"{e.expr.name}[{e.hi}:{e.lo}]"
    if isinstance(e, Slice):
        raise ValueError("slice of a compound expression has no SVA-lite form")
    if isinstance(e, Concat):
        return "{" + ", ".join(to_sva(p) for p in e.parts) + "}"
    if isinstance(e, Unop):
        return f"{_SVA_UNOP[e.op]}({to_sva(e.expr)})"
    if isinstance(e, Binop):
        return f"({to_sva(e.lhs)} {_SVA_BINOP[e.op]} {to_sva(e.rhs)})"
    if isinstance(e, Ite):
        return f"({to_sva(e.cond)} ? {to_sva(e.then)} : {to_sva(e.other)})"
    raise TypeError(f"not an expression: {e!r}")
