"""Counterexample traces: extraction from SAT models, VCD output, ASCII waveforms."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from . import ir
from .sat.blast import BlastContext

CEX_FROM_INIT = "cex_from_init"
CTI = "cti"


@dataclass
class Trace:
    frames: list  # of dict name -> int, one per time step
    kind: str = CEX_FROM_INIT
    violated_property: str = ""
    dont_care: list = field(default_factory=list)  # (name, frame, bit) decoded as 0

    def __post_init__(self):
        if not self.frames:
            raise ValueError("a trace needs at least one frame")
        if self.kind not in (CEX_FROM_INIT, CTI):
            raise ValueError(f"unknown trace kind {self.kind!r}")
        self.dont_care = [tuple(x) for x in self.dont_care]

    @property
    def violated_frame(self) -> int:
        return len(self.frames) - 1

    def __len__(self) -> int:
        return len(self.frames)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "violated_property": self.violated_property,
            "violated_frame": self.violated_frame,
            "frames": [dict(f) for f in self.frames],
            "dont_care": [list(x) for x in self.dont_care],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Trace":
        return cls([dict(f) for f in d["frames"]], d.get("kind", CEX_FROM_INIT),
                   d.get("violated_property", ""), d.get("dont_care", []))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Trace":
        return cls.from_dict(json.loads(text))


def extract_trace(ctx: BlastContext, assignment, ts: ir.TransitionSystem, frames: int,
                  kind: str, violated_property: str = "") -> Trace:
    """Decode every timed variable bit; bits never encoded default to 0 and are flagged."""
    out, unknown = [], []
    widths = ts.widths
    for t in range(frames):
        frame = {}
        for name, w in widths.items():
            v = 0
            for bit in range(w):
                lit = ctx.lookup(name, t, bit)
                if lit is None:
                    unknown.append((name, t, bit))
                elif assignment[lit]:
                    v |= 1 << bit
            frame[name] = v
        out.append(frame)
    return Trace(out, kind, violated_property, unknown)


def replay_ok(ts: ir.TransitionSystem, trace: Trace, prop: Optional[ir.BitVecExpr] = None) -> bool:
    """True when every frame follows from the previous one via ``ir.step``
    and, if ``prop`` is given, it fails exactly at the last frame."""
    for i in range(len(trace.frames) - 1):
        nxt = ir.step(ts, trace.frames[i])
        if any(trace.frames[i + 1][n] != v for n, v in nxt.items()):
            return False
    if prop is not None:
        vals = [ir.eval_expr(prop, f) for f in trace.frames]
        if vals[-1] != 0 or not all(vals[:-1]):
            return False
    return True


# ---------------------------------------------------------------- VCD

def _vcd_ids(n: int) -> list[str]:
    ids = []
    for i in range(n):
        s, x = "", i
        while True:
            s += chr(33 + x % 94)
            x //= 94
            if x == 0:
                break
        ids.append(s)
    return ids


def to_vcd(trace: Trace, ts: ir.TransitionSystem, scope: Optional[str] = None) -> bytes:
    widths = ts.widths
    names = ts.input_names + ts.state_names
    ids = dict(zip(names, _vcd_ids(len(names))))
    lines = [
        "$version kindlemma $end",
        "$timescale 1ns $end",
        f"$scope module {scope or ts.name} $end",
    ]
    for n in names:
        rng = f" [{widths[n] - 1}:0]" if widths[n] > 1 else ""
        lines.append(f"$var wire {widths[n]} {ids[n]} {n}{rng} $end")
    lines += ["$upscope $end", "$enddefinitions $end"]
    prev: dict[str, int] = {}
    for t, frame in enumerate(trace.frames):
        changes = [n for n in names if prev.get(n) != frame.get(n, 0)]
        if t > 0 and not changes:
            continue
        lines.append(f"#{t}")
        if t == 0:
            lines.append("$dumpvars")
        for n in changes:
            lines.append(f"b{frame.get(n, 0):b} {ids[n]}")
            prev[n] = frame.get(n, 0)
        if t == 0:
            lines.append("$end")
    return ("\n".join(lines) + "\n").encode("ascii")


# ---------------------------------------------------------------- ASCII

@dataclass
class WaveRender:
    text: str
    highlights: list  # of (var, bit, frame)

    def highlight_records(self) -> list[dict]:
        return [{"var": v, "bit": b, "frame": f} for v, b, f in self.highlights]


def _bit_sources(e: ir.BitVecExpr, bit: int) -> Optional[tuple[str, int]]:
    """Map bit ``bit`` of ``e`` back to a (variable, bit) when it is a plain wire-through."""
    while True:
        if isinstance(e, ir.Var):
            return e.name, bit
        if isinstance(e, ir.Slice):
            e, bit = e.expr, bit + e.lo
            continue
        if isinstance(e, ir.Concat):
            for p in reversed(e.parts):
                if bit < p.width:
                    e = p
                    break
                bit -= p.width
            continue
        return None


def _comparison(prop: ir.BitVecExpr):
    e = prop
    if isinstance(e, ir.Unop) and e.op == "not" and isinstance(e.expr, ir.Binop):
        e = e.expr
    if isinstance(e, ir.Binop) and e.op in ("eq", "ne", "ult", "ule", "ugt", "uge"):
        return e
    return None


def render_ascii(trace: Trace, ts: ir.TransitionSystem, focus_property: Optional[ir.BitVecExpr] = None,
                 line_width: int = 100) -> WaveRender:
    """Hex waveform table; the violated frame is marked with ``*`` and
    don't-care-containing values with ``?``.

    For a comparison property, the lowest bit in which its two operands
    differ at the last frame is called out and returned as highlights.
    """
    widths = ts.widths
    names = ts.state_names + ts.input_names
    last = trace.violated_frame
    dc = {(n, t) for n, t, _ in trace.dont_care}

    cells = {}
    for n in names:
        digits = max(1, (widths[n] + 3) // 4)
        for t, fr in enumerate(trace.frames):
            cells[n, t] = format(fr.get(n, 0), f"0{digits}x") + ("?" if (n, t) in dc else "")
    label_w = max(len(n) for n in names) + 2
    col_w = [max([len(f"t{t}*")] + [len(cells[n, t]) for n in names]) for t in range(len(trace.frames))]

    # wrap frames into chunks that fit line_width
    chunks, cur, used = [], [], label_w
    for t in range(len(trace.frames)):
        need = col_w[t] + 1
        if cur and used + need > line_width:
            chunks.append(cur)
            cur, used = [], label_w
        cur.append(t)
        used += need
    if cur:
        chunks.append(cur)

    title = "inductive-step counterexample (CTI)" if trace.kind == CTI else "counterexample from reset"
    lines = [f"{title}: {trace.violated_property or '<property>'} fails at t{last}"[:line_width]]
    for chunk in chunks:
        head = " " * label_w + " ".join(
            (f"t{t}*" if t == last else f"t{t}").rjust(col_w[t]) for t in chunk)
        lines.append(head[:line_width])
        for n in names:
            row = n.ljust(label_w) + " ".join(cells[n, t].rjust(col_w[t]) for t in chunk)
            lines.append(row[:line_width])

    highlights = []
    cmp_ = _comparison(focus_property) if focus_property is not None else None
    if cmp_ is not None:
        frame = trace.frames[last]
        a = ir.eval_expr(cmp_.lhs, frame)
        b = ir.eval_expr(cmp_.rhs, frame)
        diff = a ^ b
        if diff:
            bit = (diff & -diff).bit_length() - 1
            notes = []
            for side, val in ((cmp_.lhs, a), (cmp_.rhs, b)):
                src = _bit_sources(side, bit)
                level = (val >> bit) & 1
                if src is not None:
                    highlights.append((src[0], src[1], last))
                    notes.append((f"{src[0]}[{src[1]}]", src, level))
                else:
                    notes.append((f"operand bit {bit}", None, level))
            desc = ", ".join(f"{label}={level}" for label, _, level in notes)
            lines.append(f"first differing bit at t{last}: {desc}"[:line_width])
            for label, src, level in notes:
                if level == 0:
                    what = f"bit {src[1]} of {src[0]}" if src else label
                    lines.append(f"  -> {what} is not logic 1"[:line_width])
    if dc:
        lines.append("? = contains unconstrained bits shown as 0")
    return WaveRender("\n".join(lines) + "\n", highlights)
