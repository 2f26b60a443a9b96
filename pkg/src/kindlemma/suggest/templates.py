"""Template candidate invariants, random-simulation filtering and CTI blocking."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .. import ir
from ..cex import Trace

# ranking priority per template family (lower is tried first)
PRIORITY = {"eq": 0, "bound": 1, "nibble": 2, "bit": 3}
LLM_PRIORITY = 0
USER_PRIORITY = 0


@dataclass(frozen=True)
class CandidateInvariant:
    name: str
    expr: ir.BitVecExpr
    origin: str = "template"  # template | llm | user
    template: Optional[str] = None
    model: Optional[str] = None
    source_text: Optional[str] = None

    @property
    def priority(self) -> int:
        if self.origin == "template":
            return PRIORITY.get(self.template, len(PRIORITY))
        return LLM_PRIORITY if self.origin == "llm" else USER_PRIORITY

    @property
    def text(self) -> str:
        if self.source_text:
            return self.source_text
        try:
            return ir.to_sva(self.expr)
        except ValueError:
            return ir.sexpr(self.expr)


def dedup(cands: Sequence[CandidateInvariant]) -> list[CandidateInvariant]:
    seen = set()
    out = []
    for c in cands:
        if c.expr in seen:
            continue
        seen.add(c.expr)
        out.append(c)
    return out


def gen_template_candidates(ts: ir.TransitionSystem) -> list[CandidateInvariant]:
    """Equalities, per-bit constants, power-of-two bounds and nibble equalities, in that order."""
    states = [ts.var(n) for n in ts.state_names]
    out: list[CandidateInvariant] = []
    for i, x in enumerate(states):
        for y in states[i + 1:]:
            if x.width == y.width:
                out.append(CandidateInvariant(f"{x.name}_eq_{y.name}", ir.Binop("eq", x, y), template="eq"))
    for x in states:
        for b in range(x.width):
            bit = ir.Slice(x, b, b)
            for v in (0, 1):
                out.append(CandidateInvariant(f"{x.name}_b{b}_is{v}",
                                              ir.Binop("eq", bit, ir.Const(v, 1)), template="bit"))
    for x in states:
        for j in range(x.width):
            out.append(CandidateInvariant(f"{x.name}_lt_2p{j}",
                                          ir.Binop("ult", x, ir.Const(1 << j, x.width)), template="bound"))
    for i, x in enumerate(states):
        for y in states[i + 1:]:
            if x.width != y.width or x.width <= 4:
                continue
            for lo in range(0, x.width, 4):
                hi = min(lo + 3, x.width - 1)
                out.append(CandidateInvariant(
                    f"{x.name}_{y.name}_eq_{hi}_{lo}",
                    ir.Binop("eq", ir.Slice(x, hi, lo), ir.Slice(y, hi, lo)), template="nibble"))
    return dedup(out)


def _random_inputs(ts: ir.TransitionSystem, rng: random.Random, state: dict, checks, tries: int = 32):
    for _ in range(tries):
        frame = dict(state)
        for n, w in ts.inputs:
            frame[n] = rng.getrandbits(w)
        if all(a(frame) for a in checks):
            return frame
    return None


def simulate_filter(ts: ir.TransitionSystem, candidates: Sequence[CandidateInvariant],
                    seeds: int = 8, steps: int = 128, seed: int = 0) -> list[CandidateInvariant]:
    """Drop candidates that are false in any frame of random runs from init."""
    live = list(candidates)
    if not live:
        return []
    funcs = {id(c): ir.compile_expr(c.expr) for c in live}
    nexts = [(s.name, ir.compile_expr(s.next)) for s in ts.states]
    assume = [ir.compile_expr(a) for a in ts.assumptions]
    for run in range(seeds):
        rng = random.Random(seed * 1_000_003 + run)
        state = {s.name: (s.init if s.init is not None else rng.getrandbits(s.width)) for s in ts.states}
        for _ in range(steps + 1):
            frame = _random_inputs(ts, rng, state, assume)
            if frame is None:
                break
            live = [c for c in live if funcs[id(c)](frame)]
            if not live:
                return []
            state = {n: f(frame) for n, f in nexts}
    return live


def rank(cands: Sequence[CandidateInvariant]) -> list[CandidateInvariant]:
    return sorted(cands, key=lambda c: (c.priority, ir.expr_size(c.expr), c.name))


def cti_block_candidates(ts: ir.TransitionSystem, cti: Trace,
                         survivors: Sequence[CandidateInvariant]) -> list[CandidateInvariant]:
    """Survivors that are false in the CTI's first frame, best first."""
    start = cti.frames[0]
    return rank([c for c in survivors if not ir.eval_expr(c.expr, start)])
