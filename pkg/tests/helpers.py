"""Shared builders and independent reference oracles for the tests."""
from __future__ import annotations

import itertools
import random
from pathlib import Path

from kindlemma import engine as en
from kindlemma import frontend as fe
from kindlemma import ir
from kindlemma.cex import replay_ok
from kindlemma.sat import CnfFormula

FIX = Path(__file__).resolve().parent.parent / "src" / "kindlemma" / "fixtures"


def load_ts(design: str, *sva: str) -> ir.TransitionSystem:
    ast = fe.parse_design((FIX / design).read_text())
    syms = fe.module_symbols(ast)
    extra = []
    for f in sva:
        extra += fe.parse_assertion_file((FIX / f).read_text(), syms)
    return ir.elaborate(ast, extra)


# ---------------------------------------------------------------- reference semantics

def ref_eval(e, env) -> int:
    """Straight-line interpreter, written separately from ir.eval_expr."""
    m = (1 << e.width) - 1
    if isinstance(e, ir.Const):
        return e.value
    if isinstance(e, ir.Var):
        return env[e.name] & m
    if isinstance(e, ir.Slice):
        return (ref_eval(e.expr, env) >> e.lo) & m
    if isinstance(e, ir.Concat):
        v = 0
        for p in e.parts:
            v = (v << p.width) | ref_eval(p, env)
        return v
    if isinstance(e, ir.Unop):
        a = ref_eval(e.expr, env)
        w = e.expr.width
        bits = [(a >> i) & 1 for i in range(w)]
        return {"not": lambda: ~a & m, "neg": lambda: (-a) & m, "redand": lambda: int(all(bits)),
                "redor": lambda: int(any(bits)), "redxor": lambda: sum(bits) % 2}[e.op]()
    if isinstance(e, ir.Binop):
        a, b = ref_eval(e.lhs, env), ref_eval(e.rhs, env)
        return {"add": (a + b) & m, "sub": (a - b) & m, "and": a & b, "or": a | b, "xor": a ^ b,
                "eq": int(a == b), "ne": int(a != b), "ult": int(a < b), "ule": int(a <= b),
                "ugt": int(a > b), "uge": int(a >= b)}[e.op]
    if isinstance(e, ir.Ite):
        return ref_eval(e.then, env) if ref_eval(e.cond, env) else ref_eval(e.other, env)
    raise TypeError(e)


# ---------------------------------------------------------------- random expressions / systems

ARITH = ["add", "sub", "and", "or", "xor"]
CMP = ["eq", "ne", "ult", "ule", "ugt", "uge"]


def rand_expr(rng: random.Random, vars_: dict, width: int, depth: int):
    if depth <= 0 or rng.random() < 0.25:
        if vars_ and rng.random() < 0.7:
            n = rng.choice(sorted(vars_))
            return ir.fit(ir.Var(n, vars_[n]), width)
        return ir.Const(rng.randrange(1 << width), width)
    kind = rng.randrange(6)
    if kind == 0:
        return ir.Binop(rng.choice(ARITH), rand_expr(rng, vars_, width, depth - 1),
                        rand_expr(rng, vars_, width, depth - 1))
    if kind == 1:
        return ir.Ite(rand_bool(rng, vars_, depth - 1), rand_expr(rng, vars_, width, depth - 1),
                      rand_expr(rng, vars_, width, depth - 1))
    if kind == 2:
        return ir.Unop(rng.choice(["not", "neg"]), rand_expr(rng, vars_, width, depth - 1))
    if kind == 3 and width >= 2:
        k = rng.randrange(1, width)
        return ir.Concat((rand_expr(rng, vars_, width - k, depth - 1), rand_expr(rng, vars_, k, depth - 1)))
    if kind == 4:
        wide = width + rng.randrange(0, 3)
        lo = rng.randrange(0, wide - width + 1)
        return ir.Slice(rand_expr(rng, vars_, wide, depth - 1), lo + width - 1, lo)
    return ir.fit(rand_bool(rng, vars_, depth - 1), width)


def rand_bool(rng: random.Random, vars_: dict, depth: int):
    if depth <= 0 or rng.random() < 0.5:
        w = rng.randint(1, 4)
        return ir.Binop(rng.choice(CMP), rand_expr(rng, vars_, w, max(depth - 1, 0)),
                        rand_expr(rng, vars_, w, max(depth - 1, 0)))
    k = rng.randrange(3)
    if k == 0:
        return ir.Unop(rng.choice(["redand", "redor", "redxor"]), rand_expr(rng, vars_, rng.randint(1, 4), depth - 1))
    if k == 1:
        return ir.Unop("not", rand_bool(rng, vars_, depth - 1))
    return ir.Binop(rng.choice(["and", "or", "xor"]), rand_bool(rng, vars_, depth - 1), rand_bool(rng, vars_, depth - 1))


def random_system(rng: random.Random, max_state_bits: int = 12, max_input_bits: int = 2,
                  with_assumption: bool = True) -> ir.TransitionSystem:
    nstates = rng.randint(1, 3)
    budget = rng.randint(nstates, max_state_bits)
    widths = [1] * nstates
    for _ in range(budget - nstates):
        widths[rng.randrange(nstates)] += 1
    inputs = []
    ibits = rng.randint(0, max_input_bits)
    if ibits:
        inputs = [("i0", ibits)] if rng.random() < 0.5 or ibits == 1 else [("i0", 1), ("i1", 1)]
    vars_ = {f"s{j}": w for j, w in enumerate(widths)}
    vars_.update(dict(inputs))
    states = []
    for j, w in enumerate(widths):
        init = rng.randrange(1 << w) if rng.random() < 0.8 else None
        states.append(ir.StateVar(f"s{j}", w, init, rand_expr(rng, vars_, w, 3)))
    sv = {f"s{j}": w for j, w in enumerate(widths)}
    assumptions = ()
    if inputs and with_assumption and rng.random() < 0.3:
        assumptions = (rand_bool(rng, dict(inputs), 1),)
    # prefer properties true in the initial states so violations are not all at depth 0
    inits = [{**{s.name: s.init for s in states if s.init is not None}, **v}
             for v in all_valuations([(s.name, s.width) for s in states if s.init is None])]
    prop = rand_bool(rng, sv, 2)
    for _ in range(20):
        if all(ref_eval(prop, f) for f in inits):
            break
        prop = rand_bool(rng, sv, 2)
    return ir.TransitionSystem("rand", tuple(inputs), tuple(states), assumptions, (("p", prop),))


# ---------------------------------------------------------------- explicit-state oracles

def all_valuations(items):
    names = [n for n, _ in items]
    for vals in itertools.product(*[range(1 << w) for _, w in items]):
        yield dict(zip(names, vals))


def brute_max_inductive(ts: ir.TransitionSystem, cands) -> set:
    """Largest subset S (by index) with: init |= S, and S /\\ T |= S' (k = 1), by enumeration.

    Mirrors the engine's frame semantics: assumptions hold in both frames,
    so a transition counts only if some input satisfies them afterwards.
    """
    n = len(cands)
    states = [s.name for s in ts.states]
    st_items = [(s.name, s.width) for s in ts.states]
    inputs = list(all_valuations(list(ts.inputs)))

    def ok(frame):
        return all(ref_eval(a, frame) for a in ts.assumptions)

    def cmask(frame):
        return sum(1 << i for i, c in enumerate(cands) if ref_eval(c.expr, frame))

    pairs = set()
    init_masks = set()
    full = (1 << n) - 1
    for st in all_valuations(st_items):
        frames = [{**st, **i} for i in inputs]
        good = [f for f in frames if ok(f)]
        if not good:
            continue
        m0 = cmask(good[0])  # candidates reference states only
        if all(s.init is None or st[s.name] == s.init for s in ts.states):
            init_masks.add(m0)
        for f in good:
            nxt = {s.name: ref_eval(s.next, f) for s in ts.states}
            if any(ok({**nxt, **i}) for i in inputs):
                pairs.add((m0, cmask({**nxt, **inputs[0]})))
    best = 0
    for S in range(full + 1):
        if bin(S).count("1") <= bin(best).count("1"):
            continue
        if any(m & S != S for m in init_masks):
            continue
        if all((m1 & S) == S for m0, m1 in pairs if m0 & S == S):
            best = S
    return {i for i in range(n) if best >> i & 1}


# ---------------------------------------------------------------- CNF instances

def random_3sat(rng: random.Random, nvars: int, nclauses: int) -> CnfFormula:
    cnf = CnfFormula()
    for _ in range(nvars):
        cnf.new_var()
    for _ in range(nclauses):
        vs = rng.sample(range(1, nvars + 1), 3)
        cnf.add_clause([v if rng.random() < 0.5 else -v for v in vs])
    return cnf


def pigeonhole(pigeons: int, holes: int) -> CnfFormula:
    cnf = CnfFormula()
    x = {(p, h): cnf.new_var() for p in range(pigeons) for h in range(holes)}
    for p in range(pigeons):
        cnf.add_clause([x[p, h] for h in range(holes)])
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            cnf.add_clause([-x[p, h], -x[q, h]])
    return cnf


def brute_sat(cnf: CnfFormula) -> bool:
    for bits in itertools.product([False, True], repeat=cnf.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in cnf.clauses):
            return True
    return False


# ---------------------------------------------------------------- engine sweeps

def soundness_systems(seed: int, n: int) -> list:
    rng = random.Random(seed)
    systems = [random_system(rng) for _ in range(n)]
    systems.append(load_ts("wrap_counter.sv", "wrap_counter_ne70.sva", "wrap_counter_lt64.sva",
                           "wrap_counter_ne10.sva"))
    systems.append(load_ts("parity_reg.sv"))
    return systems


def soundness_sweep(systems, max_k: int = 4, depth: int = 12):
    """Cross-check kinduction and bmc against bfs_oracle; returns (totals, violations)."""
    totals = {"proven": 0, "falsified": 0, "cti": 0, "bmc_falsified": 0}
    bad = []
    for ts in systems:
        for name, p in ts.properties:
            o = en.bfs_oracle(ts, p)
            if o.status not in (en.HOLDS, en.VIOLATED):
                bad.append((ts, name, "oracle", o.status))
                continue
            r = en.kinduction(ts, p, cfg=en.EngineConfig(max_k=max_k), name=name)
            if r.status == en.PROVEN:
                totals["proven"] += 1
                if o.status != en.HOLDS:
                    bad.append((ts, name, "proven but violated", o.depth))
            elif r.status == en.FALSIFIED:
                totals["falsified"] += 1
                if o.status != en.VIOLATED or r.depth != o.depth or not replay_ok(ts, r.trace, p):
                    bad.append((ts, name, "kind falsified mismatch", r.depth, o.depth))
            elif r.status == en.UNKNOWN_CTI:
                totals["cti"] += 1
            b = en.bmc(ts, p, depth, name=name)
            if b.status == en.FALSIFIED:
                totals["bmc_falsified"] += 1
                # minimal depth: p holds before the last frame
                if o.status != en.VIOLATED or b.depth != o.depth or not replay_ok(ts, b.trace, p):
                    bad.append((ts, name, "bmc mismatch", b.depth, o.depth))
            elif o.status == en.VIOLATED and o.depth <= depth:
                bad.append((ts, name, "bmc missed violation", o.depth))
    return totals, bad


def collect_ctis(seed: int, n: int = 300) -> list:
    """(ts, prop, cti trace, k) for every UnknownCti found on random systems and fixtures."""
    out = []
    rng = random.Random(seed)
    for _ in range(n):
        ts = random_system(rng)
        p = ts.properties[0][1]
        for k in (1, 2, 3):
            r = en.kinduction(ts, p, cfg=en.EngineConfig(max_k=k, simple_path=(k == 3)))
            if r.cti is not None:
                out.append((ts, p, r.cti, k))
    for sva in ("wrap_counter_ne70.sva", "wrap_counter_ne10.sva"):
        ts = load_ts("wrap_counter.sv", sva)
        for k in (1, 2, 3):
            r = en.kinduction(ts, ts.properties[0][1], cfg=en.EngineConfig(max_k=k))
            if r.cti is not None:
                out.append((ts, ts.properties[0][1], r.cti, k))
    ts = load_ts("sync_counters.sv", "sync_counters.sva")
    r = en.kinduction(ts, ts.properties[0][1], cfg=en.EngineConfig(max_k=2))
    out.append((ts, ts.properties[0][1], r.cti, 2))
    return out


def cti_contract_ok(ts, p, trace, k) -> bool:
    """Frames chain under the reference step and p fails only at the last frame."""
    if len(trace.frames) != k + 1:
        return False
    for i in range(k):
        if any(trace.frames[i + 1][s.name] != ref_eval(s.next, trace.frames[i]) for s in ts.states):
            return False
    vals = [ref_eval(p, f) for f in trace.frames]
    if vals[-1] != 0 or not all(vals[:-1]):
        return False
    return all(ref_eval(a, f) for a in ts.assumptions for f in trace.frames)


def maximality_instances(seed: int, n: int) -> list:
    """Random systems (<= 10 state bits) paired with <= 12 template and random candidates."""
    from kindlemma.suggest import CandidateInvariant, gen_template_candidates
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        ts = random_system(rng, max_state_bits=10)
        sv = {s.name: s.width for s in ts.states}
        pool = gen_template_candidates(ts)
        rng.shuffle(pool)
        cs = pool[:rng.randint(0, 8)]
        cs += [CandidateInvariant(f"r{i}", rand_bool(rng, sv, 2), "user") for i in range(rng.randint(0, 12 - len(cs)))]
        cs = list({c.expr: c for c in cs}.values())[:12]
        out.append((ts, cs))
    return out
