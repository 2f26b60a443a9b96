"""Lexer, parser and pretty-printer for the RTL subset and SVA-lite assertions.

The accepted design language is a small synchronous Verilog subset: one
module, ANSI-style ports, ``reg``/``logic``/``wire`` declarations, ``assign``
statements for combinational logic and ``always_ff @(posedge clk)`` blocks
with nonblocking assignments and ``if``/``else``.  Assertions are per-cycle
boolean invariants written as ``assert property (@(posedge clk) expr);`` or
``assume property (...)``; the bare ``expr`` form is accepted by
:func:`parse_assertion`.

Everything here is pure; the parser stops at the first error.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

__all__ = [
    "Token", "LexError", "ParseError", "UnknownSymbol", "FrontendError",
    "Num", "Ident", "Index", "Range", "Unary", "Binary", "Cond", "Concat",
    "NbAssign", "If", "Port", "Decl", "Assign", "SeqBlock", "AssertionAst",
    "ModuleAst", "tokenize", "parse_module", "parse_design", "parse_assertion",
    "parse_assertion_file", "format_expr", "format_module", "format_assertion",
    "expr_idents", "module_symbols",
]

KEYWORDS = frozenset({
    "module", "endmodule", "input", "output", "reg", "wire", "logic",
    "assign", "always", "always_ff", "posedge", "begin", "end", "if", "else",
    "assert", "assume", "property",
})

# longest first
OPERATORS = ("|->", "|=>", "##", "<=", ">=", "==", "!=", "&&", "||",
             "+", "-", "&", "|", "^", "~", "!", "<", ">", "?", ":", "=")
PUNCT = "()[]{};,@."


class FrontendError(Exception):
    """Base class for lexer/parser diagnostics."""


class LexError(FrontendError):
    def __init__(self, line: int, col: int, message: str):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"{line}:{col}: {message}")


class ParseError(FrontendError):
    def __init__(self, line: int, col: int, expected: str, found: str):
        self.line, self.col = line, col
        self.expected, self.found = expected, found
        super().__init__(f"{line}:{col}: expected {expected}, found {found!r}")


class UnknownSymbol(FrontendError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown symbol {name!r}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | keyword | operator | punct | eof
    text: str
    line: int
    col: int
    offset: int = 0
    value: Optional[int] = None
    width: Optional[int] = None
    radix: Optional[str] = None


# ---------------------------------------------------------------- lexing

_NUMBER_RE = re.compile(
    r"(?P<size>[0-9][0-9_]*)?\s*'(?P<base>[sS]?[bBoOdDhH])\s*(?P<digits>[0-9a-fA-F_xXzZ?]*)"
)
_DEC_RE = re.compile(r"[0-9][0-9_]*")
_IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_RADIX_BASE = {"b": 2, "o": 8, "d": 10, "h": 16}


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def advance(upto: int) -> None:
        nonlocal i, line, col
        chunk = source[i:upto]
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        i = upto

    while i < n:
        ch = source[i]
        if ch in " \t\r\n\f\v":
            advance(i + 1)
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            advance(n if j < 0 else j)
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise LexError(line, col, "unterminated block comment")
            advance(j + 2)
            continue

        if ch.isdigit() or ch == "'":
            m = _NUMBER_RE.match(source, i)
            if m and (m.group("size") is not None or ch == "'"):
                tokens.append(_number_token(m, line, col, i))
                advance(m.end())
                continue
            if ch == "'":
                raise LexError(line, col, "malformed based number")
            m = _DEC_RE.match(source, i)
            text = m.group(0)
            tokens.append(Token("number", text, line, col, i,
                                value=int(text.replace("_", "")), width=None, radix=None))
            advance(m.end())
            continue

        if ch.isalpha() or ch in "_$":
            m = _IDENT_RE.match(source, i)
            text = m.group(0)
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, line, col, i))
            advance(m.end())
            continue

        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("operator", op, line, col, i))
                advance(i + len(op))
                break
        else:
            if ch in PUNCT:
                tokens.append(Token("punct", ch, line, col, i))
                advance(i + 1)
            else:
                raise LexError(line, col, f"illegal character {ch!r}")

    tokens.append(Token("eof", "", line, col, n))
    return tokens


def _number_token(m: re.Match, line: int, col: int, offset: int) -> Token:
    size = m.group("size")
    base = m.group("base")[-1].lower()
    digits = m.group("digits").replace("_", "")
    if not digits:
        raise LexError(line, col, "unterminated number: missing digits")
    if any(c in "xXzZ?" for c in digits):
        raise LexError(line, col, "x/z digits are not supported (two-state only)")
    try:
        value = int(digits, _RADIX_BASE[base])
    except ValueError:
        raise LexError(line, col, f"invalid digits {digits!r} for base {base!r}") from None
    width = None
    if size is not None:
        width = int(size.replace("_", ""))
        if width < 1:
            raise LexError(line, col, "number width must be positive")
        if value >= 1 << width:
            raise LexError(line, col, f"value {value} does not fit in {width} bits")
    return Token("number", m.group(0), line, col, offset, value=value, width=width, radix=base)


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class Num:
    value: int
    width: Optional[int] = None
    radix: Optional[str] = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Ident:
    name: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Index:
    name: str
    index: int
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Range:
    name: str
    hi: int
    lo: int
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # ~ ! - & | ^
    operand: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "Expr"
    rhs: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Cond:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Concat:
    parts: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Expr = Union[Num, Ident, Index, Range, Unary, Binary, Cond, Concat]


@dataclass(frozen=True)
class NbAssign:
    lhs: str
    rhs: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    other: Optional[tuple] = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Stmt = Union[NbAssign, If]


@dataclass(frozen=True)
class Port:
    direction: str  # in | out
    name: str
    width: int = 1
    net: Optional[str] = None  # reg | logic | wire | None


@dataclass(frozen=True)
class Decl:
    kind: str  # reg | logic | wire
    name: str
    width: int = 1
    init: Optional[Num] = None


@dataclass(frozen=True)
class Assign:
    lhs: str
    rhs: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SeqBlock:
    clock: str
    body: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AssertionAst:
    name: str
    kind: str  # assert | assume
    body: Expr
    clock: Optional[str] = None
    labelled: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class ModuleAst:
    name: str
    ports: tuple = ()
    decls: tuple = ()
    assigns: tuple = ()
    seq_blocks: tuple = ()
    assertions: tuple = ()


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, tokens: Sequence[Token]):
        if not tokens or tokens[-1].kind != "eof":
            tokens = list(tokens) + [Token("eof", "", 1, 1)]
        self.toks = tokens
        self.pos = 0
        self.auto_names = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def peek(self, ahead: int = 1) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def error(self, expected: str) -> ParseError:
        tok = self.cur
        return ParseError(tok.line, tok.col, expected, tok.text or "<eof>")

    def at(self, text: str) -> bool:
        return self.cur.kind != "eof" and self.cur.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            tok = self.cur
            self.pos += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            raise self.error(repr(text))
        return tok

    def expect_ident(self) -> Token:
        tok = self.cur
        if tok.kind != "ident" or tok.text.startswith("$"):
            raise self.error("identifier")
        self.pos += 1
        return tok

    def expect_int(self) -> int:
        tok = self.cur
        if tok.kind != "number":
            raise self.error("integer constant")
        self.pos += 1
        return tok.value

    # module level -------------------------------------------------------

    def module(self) -> ModuleAst:
        self.expect("module")
        name = self.expect_ident().text
        ports: list[Port] = []
        if self.accept("("):
            if not self.at(")"):
                direction = None
                while True:
                    port, direction = self.port(direction)
                    ports.append(port)
                    if not self.accept(","):
                        break
            self.expect(")")
        self.expect(";")

        decls, assigns, blocks, assertions = [], [], [], []
        while not self.at("endmodule"):
            tok = self.cur
            if tok.kind == "eof":
                raise self.error("'endmodule'")
            if tok.text in ("reg", "logic", "wire"):
                d, a = self.declaration()
                decls.extend(d)
                assigns.extend(a)
            elif tok.text == "assign":
                assigns.append(self.assign())
            elif tok.text in ("always_ff", "always"):
                blocks.append(self.seq_block())
            elif tok.text in ("assert", "assume") or (
                    tok.kind == "ident" and self.peek().text == ":"
                    and self.peek(2).text in ("assert", "assume")):
                assertions.append(self.assertion_stmt())
            else:
                raise self.error("module item")
        self.expect("endmodule")
        return ModuleAst(name, tuple(ports), tuple(decls), tuple(assigns),
                         tuple(blocks), tuple(assertions))

    def port(self, direction: Optional[str]) -> tuple[Port, str]:
        if self.accept("input"):
            direction = "in"
        elif self.accept("output"):
            direction = "out"
        elif direction is None:
            raise self.error("'input' or 'output'")
        net = None
        if self.cur.text in ("reg", "logic", "wire") and self.cur.kind == "keyword":
            net = self.cur.text
            self.pos += 1
        width = self.opt_range()
        name = self.expect_ident().text
        return Port(direction, name, width, net), direction

    def opt_range(self) -> int:
        if not self.at("["):
            return 1
        self.expect("[")
        tok = self.cur
        hi = self.expect_int()
        self.expect(":")
        lo_tok = self.cur
        lo = self.expect_int()
        self.expect("]")
        if lo != 0:
            raise ParseError(lo_tok.line, lo_tok.col, "range ending at 0", lo_tok.text)
        if hi < lo:
            raise ParseError(tok.line, tok.col, "descending range [hi:0]", tok.text)
        return hi - lo + 1

    def declaration(self):
        kind = self.cur.text
        self.pos += 1
        width = self.opt_range()
        decls, assigns = [], []
        while True:
            tok = self.expect_ident()
            init = None
            if self.accept("="):
                if kind == "wire":
                    rhs = self.expr()
                    assigns.append(Assign(tok.text, rhs, tok.line, tok.col))
                else:
                    num = self.primary()
                    if not isinstance(num, Num):
                        raise ParseError(tok.line, tok.col, "constant initializer", tok.text)
                    init = num
            decls.append(Decl(kind, tok.text, width, init))
            if not self.accept(","):
                break
        self.expect(";")
        return decls, assigns

    def assign(self) -> Assign:
        self.expect("assign")
        tok = self.expect_ident()
        self.expect("=")
        rhs = self.expr()
        self.expect(";")
        return Assign(tok.text, rhs, tok.line, tok.col)

    def clocking(self) -> str:
        self.expect("@")
        self.expect("(")
        self.expect("posedge")
        clk = self.expect_ident().text
        self.expect(")")
        return clk

    def seq_block(self) -> SeqBlock:
        tok = self.cur
        self.pos += 1
        clk = self.clocking()
        body = self.stmt()
        return SeqBlock(clk, body, tok.line, tok.col)

    def stmt(self) -> tuple:
        if self.accept("begin"):
            out: list = []
            while not self.accept("end"):
                if self.cur.kind == "eof":
                    raise self.error("'end'")
                out.extend(self.stmt())
            return tuple(out)
        if self.at("if"):
            tok = self.expect("if")
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.stmt()
            other = self.stmt() if self.accept("else") else None
            return (If(cond, then, other, tok.line, tok.col),)
        if self.cur.kind == "ident":
            tok = self.expect_ident()
            if not self.at("<="):
                raise self.error("'<=' (nonblocking assignment)")
            self.pos += 1
            rhs = self.expr()
            self.expect(";")
            return (NbAssign(tok.text, rhs, tok.line, tok.col),)
        raise self.error("statement")

    def assertion_stmt(self) -> AssertionAst:
        label = None
        if self.cur.kind == "ident" and self.peek().text == ":":
            label = self.expect_ident().text
            self.expect(":")
        if self.at("assert") or self.at("assume"):
            kind = self.cur.text
            self.pos += 1
        else:
            raise self.error("'assert' or 'assume'")
        self.expect("property")
        self.expect("(")
        clk = None
        if self.at("@"):
            clk = self.clocking()
        body = self.expr()
        self.expect(")")
        self.expect(";")
        if label is None:
            self.auto_names += 1
            name = f"{kind}_{self.auto_names}"
        else:
            name = label
        return AssertionAst(name, kind, body, clk, labelled=label is not None)

    # expressions --------------------------------------------------------

    def expr(self) -> Expr:
        tok = self.cur
        cond = self.binary(0)
        if self.accept("?"):
            then = self.expr()
            self.expect(":")
            other = self.expr()
            return Cond(cond, then, other, tok.line, tok.col)
        return cond

    _LEVELS = (("||",), ("&&",), ("|",), ("^",), ("&",), ("==", "!="),
               ("<", "<=", ">", ">="), ("+", "-"))

    def binary(self, level: int) -> Expr:
        if level == len(self._LEVELS):
            return self.unary()
        lhs = self.binary(level + 1)
        ops = self._LEVELS[level]
        while self.cur.kind == "operator" and self.cur.text in ops:
            tok = self.cur
            self.pos += 1
            rhs = self.binary(level + 1)
            lhs = Binary(tok.text, lhs, rhs, tok.line, tok.col)
        return lhs

    def unary(self) -> Expr:
        tok = self.cur
        if tok.kind == "operator" and tok.text in ("~", "!", "-", "&", "|", "^"):
            self.pos += 1
            return Unary(tok.text, self.unary(), tok.line, tok.col)
        return self.primary()

    def primary(self) -> Expr:
        tok = self.cur
        if tok.kind == "number":
            self.pos += 1
            return Num(tok.value, tok.width, tok.radix, tok.line, tok.col)
        if tok.kind == "ident" and not tok.text.startswith("$"):
            self.pos += 1
            if self.accept("["):
                hi = self.expect_int()
                if self.accept(":"):
                    lo = self.expect_int()
                    self.expect("]")
                    return Range(tok.text, hi, lo, tok.line, tok.col)
                self.expect("]")
                return Index(tok.text, hi, tok.line, tok.col)
            return Ident(tok.text, tok.line, tok.col)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if self.accept("{"):
            parts = [self.expr()]
            while self.accept(","):
                parts.append(self.expr())
            self.expect("}")
            return Concat(tuple(parts), tok.line, tok.col)
        raise self.error("expression")


def parse_module(tokens: Sequence[Token]) -> ModuleAst:
    p = _Parser(tokens)
    mod = p.module()
    if p.cur.kind != "eof":
        raise p.error("end of input")
    return mod


def parse_design(source: str) -> ModuleAst:
    """Tokenize and parse a design source file."""
    return parse_module(tokenize(source))


def module_symbols(ast: ModuleAst, include_clock: bool = False) -> dict[str, int]:
    """Declared names and widths, suitable for :func:`parse_assertion`."""
    clocks = {b.clock for b in ast.seq_blocks}
    syms = {}
    for p in ast.ports:
        if include_clock or p.name not in clocks:
            syms[p.name] = p.width
    for d in ast.decls:
        syms[d.name] = d.width
    return syms


def expr_idents(e: Expr) -> list[tuple[str, int, int]]:
    """All (name, line, col) identifier references in ``e``, left to right."""
    out: list = []

    def walk(x):
        if isinstance(x, (Ident, Index, Range)):
            out.append((x.name, x.line, x.col))
        elif isinstance(x, Unary):
            walk(x.operand)
        elif isinstance(x, Binary):
            walk(x.lhs)
            walk(x.rhs)
        elif isinstance(x, Cond):
            walk(x.cond)
            walk(x.then)
            walk(x.other)
        elif isinstance(x, Concat):
            for part in x.parts:
                walk(part)

    walk(e)
    return out


def _check_symbols(a: AssertionAst, symbols: Optional[Mapping[str, int]]) -> None:
    if symbols is None:
        return
    for name, _, _ in expr_idents(a.body):
        if name not in symbols:
            raise UnknownSymbol(name)


def parse_assertion(source: str, symbols: Optional[Mapping[str, int]] = None,
                    name: Optional[str] = None) -> AssertionAst:
    """Parse one assertion, either ``assert property (...);`` or a bare expression."""
    p = _Parser(tokenize(source))
    first = p.cur
    if first.text in ("assert", "assume") and first.kind == "keyword" or (
            first.kind == "ident" and p.peek().text == ":"):
        a = p.assertion_stmt()
    else:
        body = p.expr()
        p.accept(";")
        a = AssertionAst(name or "assert_1", "assert", body)
    if p.cur.kind != "eof":
        raise p.error("end of assertion")
    if name is not None and not a.labelled:
        a = AssertionAst(name, a.kind, a.body, a.clock)
    _check_symbols(a, symbols)
    return a


def parse_assertion_file(source: str, symbols: Optional[Mapping[str, int]] = None,
                         prefix: str = "") -> list[AssertionAst]:
    """Parse a ``.sva`` file holding zero or more assertion statements."""
    p = _Parser(tokenize(source))
    out = []
    while p.cur.kind != "eof":
        a = p.assertion_stmt()
        if prefix and not a.labelled:
            a = AssertionAst(f"{prefix}{a.name}", a.kind, a.body, a.clock)
        _check_symbols(a, symbols)
        out.append(a)
    return out


# ---------------------------------------------------------------- printing

def _fmt_num(n: Num) -> str:
    if n.radix is None:
        return str(n.value)
    digits = {"b": format(n.value, "b"), "o": format(n.value, "o"),
              "d": str(n.value), "h": format(n.value, "x")}[n.radix]
    return f"{n.width if n.width is not None else ''}'{n.radix}{digits}"


def format_expr(e: Expr) -> str:
    """Render an expression; compound subterms are fully parenthesized."""
    if isinstance(e, Num):
        return _fmt_num(e)
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{e.index}]"
    if isinstance(e, Range):
        return f"{e.name}[{e.hi}:{e.lo}]"
    if isinstance(e, Unary):
        return f"{e.op}{_wrap(e.operand)}"
    if isinstance(e, Binary):
        return f"{_wrap(e.lhs)} {e.op} {_wrap(e.rhs)}"
    if isinstance(e, Cond):
        return f"{_wrap(e.cond)} ? {_wrap(e.then)} : {_wrap(e.other)}"
    if isinstance(e, Concat):
        return "{" + ", ".join(format_expr(p) for p in e.parts) + "}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: Expr) -> str:
    s = format_expr(e)
    return f"({s})" if isinstance(e, (Unary, Binary, Cond)) else s


def _fmt_range(width: int) -> str:
    return f"[{width - 1}:0] " if width > 1 else ""


def format_assertion(a: AssertionAst) -> str:
    clk = f"@(posedge {a.clock}) " if a.clock else ""
    return f"{a.name}: {a.kind} property ({clk}{format_expr(a.body)});"


def _fmt_stmts(stmts: tuple, indent: str) -> list[str]:
    lines = []
    for s in stmts:
        if isinstance(s, NbAssign):
            lines.append(f"{indent}{s.lhs} <= {format_expr(s.rhs)};")
        else:
            lines.append(f"{indent}if ({format_expr(s.cond)}) begin")
            lines.extend(_fmt_stmts(s.then, indent + "  "))
            if s.other is not None:
                lines.append(f"{indent}end else begin")
                lines.extend(_fmt_stmts(s.other, indent + "  "))
            lines.append(f"{indent}end")
    return lines


def format_module(m: ModuleAst) -> str:
    ports = []
    for p in m.ports:
        net = f"{p.net} " if p.net else ""
        ports.append(f"{'input' if p.direction == 'in' else 'output'} {net}{_fmt_range(p.width)}{p.name}")
    lines = [f"module {m.name}(" + ", ".join(ports) + ");"]
    for d in m.decls:
        init = f" = {_fmt_num(d.init)}" if d.init is not None else ""
        lines.append(f"  {d.kind} {_fmt_range(d.width)}{d.name}{init};")
    for a in m.assigns:
        lines.append(f"  assign {a.lhs} = {format_expr(a.rhs)};")
    for b in m.seq_blocks:
        lines.append(f"  always_ff @(posedge {b.clock}) begin")
        lines.extend(_fmt_stmts(b.body, "    "))
        lines.append("  end")
    for a in m.assertions:
        lines.append("  " + format_assertion(a))
    lines.append("endmodule")
    return "\n".join(lines) + "\n"
