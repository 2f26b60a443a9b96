"""Bounded model checking, k-induction with lemmas, and an explicit-state oracle."""
from __future__ import annotations

import itertools
import logging
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from . import ir
from .cex import CEX_FROM_INIT, CTI, Trace, extract_trace
from .sat import BlastContext, ResourceLimit, Solver, blast, solve_external

log = logging.getLogger(__name__)

PROVEN = "proven"
FALSIFIED = "falsified"
UNKNOWN_CTI = "unknown_cti"
UNKNOWN_BOUND = "unknown_bound"
UNKNOWN_RESOURCE = "unknown_resource"

CANDIDATE = "candidate"
REJECTED = "rejected"


@dataclass
class ProofResult:
    status: str
    k: Optional[int] = None
    depth: Optional[int] = None
    trace: Optional[Trace] = None
    time_ms: float = 0.0
    lemmas_used: list = field(default_factory=list)

    @property
    def proven(self) -> bool:
        return self.status == PROVEN

    @property
    def cti(self) -> Optional[Trace]:
        return self.trace if self.status == UNKNOWN_CTI else None

    def __repr__(self) -> str:
        bits = [self.status]
        if self.k is not None:
            bits.append(f"k={self.k}")
        if self.depth is not None:
            bits.append(f"depth={self.depth}")
        return f"ProofResult({', '.join(bits)})"


@dataclass(frozen=True)
class Lemma:
    name: str
    expr: ir.BitVecExpr
    origin: str = "user"  # user | template | llm
    status: str = CANDIDATE  # candidate | proven | rejected
    k: Optional[int] = None
    reason: Optional[str] = None
    trace: Optional[Trace] = None
    source_text: Optional[str] = None

    def proven_at(self, k: int) -> "Lemma":
        return replace(self, status=PROVEN, k=k, reason=None, trace=None)

    def rejected(self, reason: str, trace: Optional[Trace] = None) -> "Lemma":
        return replace(self, status=REJECTED, reason=reason, trace=trace)


@dataclass
class EngineConfig:
    max_k: int = 5
    bmc_depth: int = 20
    simple_path: bool = False
    conflict_budget: Optional[int] = None
    lemma_mode: str = "sequential"  # sequential | simultaneous
    jobs: int = 1
    external_solver: Optional[str] = None

    def __post_init__(self):
        if self.max_k < 1:
            raise ValueError("max_k must be >= 1")
        if self.bmc_depth < 0:
            raise ValueError("bmc_depth must be >= 0")
        if self.lemma_mode not in ("sequential", "simultaneous"):
            raise ValueError(f"unknown lemma_mode {self.lemma_mode!r}")


class UnsoundLemmaError(RuntimeError):
    pass


class AdmissionAudit:
    """Counts every lemma placed into an assumption set (test instrumentation)."""

    def __init__(self):
        self._lock = threading.Lock()
        self.admitted = 0
        self.unproven = 0

    def admit(self, lemma: Lemma) -> ir.BitVecExpr:
        with self._lock:
            if lemma.status != PROVEN:
                self.unproven += 1
                raise UnsoundLemmaError(f"lemma {lemma.name!r} has status {lemma.status}")
            self.admitted += 1
        return lemma.expr

    def reset(self) -> None:
        with self._lock:
            self.admitted = self.unproven = 0


AUDIT = AdmissionAudit()


# ---------------------------------------------------------------- unrolling

class Unrolling:
    """Incrementally unrolled copy of a system feeding one SAT solver."""

    def __init__(self, ts: ir.TransitionSystem, cfg: Optional[EngineConfig] = None,
                 constraints: Sequence[ir.BitVecExpr] = ()):
        self.ts = ts
        self.cfg = cfg or EngineConfig()
        self.ctx = BlastContext()
        self.solver = Solver(conflict_budget=self.cfg.conflict_budget)
        self._fed = 0
        self.frames = 0
        self.constraints = list(ts.assumptions) + list(constraints)

    def lit(self, expr: ir.BitVecExpr, t: int) -> int:
        return blast(expr, t, self.ctx)[0]

    def bits(self, name: str, t: int) -> list[int]:
        return self.ctx.var_bits(name, self.ts.widths[name], t)

    def add(self, clause: Iterable[int]) -> None:
        self.ctx.cnf.add_clause(clause)

    def add_init(self, t: int = 0) -> None:
        for s in self.ts.states:
            if s.init is None:
                continue
            for i, lit in enumerate(self.bits(s.name, t)):
                self.add([lit if (s.init >> i) & 1 else -lit])

    def add_frame(self) -> int:
        """Extend by one frame (with its transition and constraints); returns its index."""
        t = self.frames
        for name, _ in self.ts.inputs:
            self.bits(name, t)
        for s in self.ts.states:
            self.bits(s.name, t)
        if t > 0:
            for s in self.ts.states:
                nxt = blast(s.next, t - 1, self.ctx)
                for a, b in zip(self.bits(s.name, t), nxt):
                    self.add([-a, b])
                    self.add([a, -b])
        for c in self.constraints:
            self.add([self.lit(c, t)])
        self.frames += 1
        return t

    def add_distinct(self, t1: int, t2: int) -> None:
        diffs = []
        for s in self.ts.states:
            for a, b in zip(self.bits(s.name, t1), self.bits(s.name, t2)):
                diffs.append(self.ctx.xor2(a, b))
        self.add(diffs)

    def solve(self, assumptions: Sequence[int] = ()):
        cnf = self.ctx.cnf
        if self.cfg.external_solver:
            return solve_external(cnf, self.cfg.external_solver, assumptions)
        self.solver.ensure_vars(cnf.num_vars)
        for c in cnf.clauses[self._fed:]:
            self.solver.add_clause(c)
        self._fed = len(cnf.clauses)
        return self.solver.solve(assumptions)

    def trace(self, model, frames: int, kind: str, prop_name: str = "") -> Trace:
        return extract_trace(self.ctx, model, self.ts, frames, kind, prop_name)


def lemma_exprs(lemmas: Sequence[Lemma]) -> list[ir.BitVecExpr]:
    """Expressions of ``lemmas`` for an assumption set; refuses anything unproven."""
    return [AUDIT.admit(l) for l in lemmas]


def _ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000.0, 3)


# ---------------------------------------------------------------- BMC

def bmc(ts: ir.TransitionSystem, prop: ir.BitVecExpr, depth: int, lemmas: Sequence[Lemma] = (),
        cfg: Optional[EngineConfig] = None, name: str = "") -> ProofResult:
    """Search frames 0..depth from init for the shallowest violation of ``prop``."""
    start = time.perf_counter()
    used = [l.name for l in lemmas]
    u = Unrolling(ts, cfg, lemma_exprs(lemmas))
    try:
        u.add_init(0)
        for d in range(depth + 1):
            u.add_frame()
            model = u.solve([-u.lit(prop, d)])
            if model is not None:
                return ProofResult(FALSIFIED, depth=d, trace=u.trace(model, d + 1, CEX_FROM_INIT, name),
                                   time_ms=_ms(start), lemmas_used=used)
    except ResourceLimit:
        return ProofResult(UNKNOWN_RESOURCE, time_ms=_ms(start), lemmas_used=used)
    return ProofResult(UNKNOWN_BOUND, depth=depth, time_ms=_ms(start), lemmas_used=used)


# ---------------------------------------------------------------- k-induction

def kinduction(ts: ir.TransitionSystem, prop: ir.BitVecExpr, lemmas: Sequence[Lemma] = (),
               cfg: Optional[EngineConfig] = None, name: str = "") -> ProofResult:
    """k-induction for increasing k = 1..cfg.max_k.

    Base: frames 0..k-1 from init.  Step: frames 0..k with no init
    constraint, ``prop`` assumed at 0..k-1 and refuted at k.  Assumptions
    and proven lemmas hold at every frame of both.
    """
    cfg = cfg or EngineConfig()
    start = time.perf_counter()
    used = [l.name for l in lemmas]
    extra = lemma_exprs(lemmas)
    base = Unrolling(ts, cfg, extra)
    step = Unrolling(ts, cfg, extra)
    base.add_init(0)
    step.add_frame()
    cti = None
    try:
        for k in range(1, cfg.max_k + 1):
            d = base.add_frame()
            model = base.solve([-base.lit(prop, d)])
            if model is not None:
                return ProofResult(FALSIFIED, k=k, depth=d, trace=base.trace(model, d + 1, CEX_FROM_INIT, name),
                                   time_ms=_ms(start), lemmas_used=used)
            step.add([step.lit(prop, k - 1)])
            t = step.add_frame()
            if cfg.simple_path:
                for j in range(t):
                    step.add_distinct(j, t)
            model = step.solve([-step.lit(prop, t)])
            if model is None:
                return ProofResult(PROVEN, k=k, time_ms=_ms(start), lemmas_used=used)
            cti = step.trace(model, t + 1, CTI, name)
    except ResourceLimit:
        return ProofResult(UNKNOWN_RESOURCE, time_ms=_ms(start), lemmas_used=used)
    return ProofResult(UNKNOWN_CTI, k=cfg.max_k, trace=cti, time_ms=_ms(start), lemmas_used=used)


def _mutual(ts: ir.TransitionSystem, members: list[tuple[str, ir.BitVecExpr]], lemmas: Sequence[Lemma],
            cfg: EngineConfig) -> dict[str, ProofResult]:
    """Mutual k-induction over ``members``; members that keep breaking the
    joint step are split off and retried alone."""
    results: dict[str, ProofResult] = {}
    live = list(members)
    used = [l.name for l in lemmas]
    while live:
        start = time.perf_counter()
        extra = lemma_exprs(lemmas)
        base = Unrolling(ts, cfg, extra)
        step = Unrolling(ts, cfg, extra)
        base.add_init(0)
        step.add_frame()
        blamed: list[str] = []
        restart = False
        try:
            for k in range(1, cfg.max_k + 1):
                d = base.add_frame()
                for n, p in live:
                    model = base.solve([-base.lit(p, d)])
                    if model is not None:
                        results[n] = ProofResult(FALSIFIED, k=k, depth=d,
                                                 trace=base.trace(model, d + 1, CEX_FROM_INIT, n),
                                                 time_ms=_ms(start), lemmas_used=used)
                        restart = True
                if restart:
                    break
                for _, p in live:
                    step.add([step.lit(p, k - 1)])
                t = step.add_frame()
                if cfg.simple_path:
                    for j in range(t):
                        step.add_distinct(j, t)
                viol = step.ctx.or_n([-step.lit(p, t) for _, p in live])
                model = step.solve([viol])
                if model is None:
                    for n, _ in live:
                        results[n] = ProofResult(PROVEN, k=k, time_ms=_ms(start), lemmas_used=used)
                    return results
                blamed = [n for n, p in live if not model[step.lit(p, t)]]
        except ResourceLimit:
            for n, _ in live:
                results[n] = ProofResult(UNKNOWN_RESOURCE, time_ms=_ms(start), lemmas_used=used)
            return results
        if restart:
            live = [(n, p) for n, p in live if n not in results]
            continue
        for n, p in live:
            if n in blamed:
                results[n] = kinduction(ts, p, lemmas, cfg, n)
        live = [(n, p) for n, p in live if n not in blamed]
    return results


def prove_all(ts: ir.TransitionSystem, properties: Sequence[tuple[str, ir.BitVecExpr]],
              lemmas: Sequence[Lemma] = (), cfg: Optional[EngineConfig] = None) -> dict[str, ProofResult]:
    """Prove candidate lemmas, then the target properties under every proven lemma.

    Lemmas already marked proven are assumed as-is; candidates are proven
    first (in order, or jointly in ``simultaneous`` mode) and only the ones
    that succeed are assumed for the targets.  Results are keyed by lemma
    and property name.
    """
    cfg = cfg or EngineConfig()
    results: dict[str, ProofResult] = {}
    proven: list[Lemma] = []
    pending: list[Lemma] = []
    for l in lemmas:
        if l.status == PROVEN:
            proven.append(l)
            results[l.name] = ProofResult(PROVEN, k=l.k)
        elif l.status == CANDIDATE:
            pending.append(l)

    if cfg.lemma_mode == "sequential":
        for l in pending:
            r = kinduction(ts, l.expr, proven, cfg, l.name)
            results[l.name] = r
            if r.proven:
                proven.append(l.proven_at(r.k))
        targets = list(properties)
        if cfg.jobs > 1 and len(targets) > 1:
            snapshot = tuple(proven)
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                futures = {n: pool.submit(kinduction, ts, p, snapshot, cfg, n) for n, p in targets}
                for n, _ in targets:
                    results[n] = futures[n].result()
        else:
            for n, p in targets:
                results[n] = kinduction(ts, p, proven, cfg, n)
    else:
        members = [(l.name, l.expr) for l in pending] + list(properties)
        results.update(_mutual(ts, members, proven, cfg))
    return results


def check_vacuity(ts: ir.TransitionSystem, lemmas: Sequence[Lemma] = (),
                  cfg: Optional[EngineConfig] = None) -> bool:
    """True when assumptions (plus lemmas) admit no initial state at all."""
    u = Unrolling(ts, cfg, lemma_exprs(lemmas))
    u.add_init(0)
    u.add_frame()
    vacuous = u.solve() is None
    if vacuous:
        log.warning("assumptions of %s are unsatisfiable in the initial state; proofs are vacuous", ts.name)
    return vacuous


# ---------------------------------------------------------------- explicit-state oracle

HOLDS = "holds"
VIOLATED = "violated"
EXHAUSTED = "exhausted"


@dataclass
class OracleResult:
    status: str
    trace: Optional[Trace] = None
    reachable: int = 0

    @property
    def depth(self) -> Optional[int]:
        return None if self.trace is None else len(self.trace.frames) - 1


def _valuations(items: Sequence[tuple[str, int]]) -> list[dict]:
    ranges = [range(1 << w) for _, w in items]
    return [dict(zip([n for n, _ in items], vals)) for vals in itertools.product(*ranges)]


def bfs_oracle(ts: ir.TransitionSystem, prop: ir.BitVecExpr, max_states: int = 1 << 20,
               max_bits: int = 24, name: str = "") -> OracleResult:
    """Breadth-first enumeration of every reachable state under every input valuation."""
    state_bits = sum(s.width for s in ts.states)
    input_bits = sum(w for _, w in ts.inputs)
    if state_bits + input_bits > max_bits:
        raise ValueError(f"{state_bits + input_bits} state+input bits exceeds the oracle limit of {max_bits}")
    names = ts.state_names
    nexts = [ir.compile_expr(s.next) for s in ts.states]
    check = ir.compile_expr(prop)
    assume = [ir.compile_expr(a) for a in ts.assumptions]
    inputs = _valuations(list(ts.inputs))

    fixed = {s.name: s.init for s in ts.states if s.init is not None}
    free = [(s.name, s.width) for s in ts.states if s.init is None]
    parent: dict[tuple, Optional[tuple]] = {}
    queue: deque = deque()
    for v in _valuations(free):
        v.update(fixed)
        key = tuple(v[n] for n in names)
        if key not in parent:
            parent[key] = None
            queue.append(key)
            if len(parent) > max_states:
                return OracleResult(EXHAUSTED, reachable=len(parent))

    while queue:
        key = queue.popleft()
        state = dict(zip(names, key))
        for inp in inputs:
            frame = {**state, **inp}
            if not all(a(frame) for a in assume):
                continue
            if not check(frame):
                return OracleResult(VIOLATED, _rebuild(parent, names, key, inp, name), len(parent))
            succ = tuple(f(frame) for f in nexts)
            if succ not in parent:
                parent[succ] = (key, tuple(sorted(inp.items())))
                if len(parent) > max_states:
                    return OracleResult(EXHAUSTED, reachable=len(parent))
                queue.append(succ)
    return OracleResult(HOLDS, reachable=len(parent))


def _rebuild(parent: Mapping, names: Sequence[str], key: tuple, last_inputs: Mapping, name: str) -> Trace:
    frames = [{**dict(zip(names, key)), **last_inputs}]
    while parent[key] is not None:
        prev, inp = parent[key]
        frames.append({**dict(zip(names, prev)), **dict(inp)})
        key = prev
    frames.reverse()
    return Trace(frames, CEX_FROM_INIT, name)
