import pytest

from kindlemma import engine as en
from kindlemma import ir
from kindlemma.cex import CTI, Trace
from kindlemma.suggest import (CandidateInvariant, admit, cti_block_candidates, gen_template_candidates,
                               houdini, rank, simulate_filter)
from helpers import brute_max_inductive, load_ts, maximality_instances, ref_eval

C8 = ir.Var("count", 8)


def cand(name, expr, **kw):
    return CandidateInvariant(name, expr, **kw)


def lt(n):
    return cand(f"count_lt_{n}", ir.Binop("ult", C8, ir.Const(n, 8)), template="bound")


def ne(n):
    return cand(f"count_ne_{n}", ir.Binop("ne", C8, ir.Const(n, 8)), origin="user")


def texts(cs):
    return [c.text for c in cs]


@pytest.fixture(scope="module")
def wrap():
    return load_ts("wrap_counter.sv", "wrap_counter_ne70.sva")


@pytest.fixture(scope="module")
def sync():
    return load_ts("sync_counters.sv", "sync_counters.sva")


# ---------------------------------------------------------------- templates

def test_templates_sync_counters_include_equality(sync):
    cs = gen_template_candidates(sync)
    assert "(count1 == count2)" in texts(cs)
    assert cs[0].template == "eq"


def test_templates_wrap_include_bound(wrap):
    assert "(count < 8'd64)" in texts(gen_template_candidates(wrap))


def test_templates_single_bit_state():
    ts = ir.TransitionSystem("t", (), (ir.StateVar("x", 1, 0, ir.Unop("not", ir.Var("x", 1))),))
    assert texts(gen_template_candidates(ts)) == ["(x[0] == 1'd0)", "(x[0] == 1'd1)", "(x < 1'd1)"]


def test_templates_are_deterministic_and_unique(sync):
    a, b = gen_template_candidates(sync), gen_template_candidates(sync)
    assert a == b
    assert len({c.expr for c in a}) == len(a) and len({c.name for c in a}) == len(a)


# ---------------------------------------------------------------- simulation filter

def test_simulate_keeps_true_bound_and_drops_bit0(wrap):
    bit0 = cand("count_b0_is0", ir.Binop("eq", ir.Slice(C8, 0, 0), ir.Const(0, 1)), template="bit")
    for seeds, steps in [(1, 2), (8, 128)]:
        assert simulate_filter(wrap, [lt(64), bit0], seeds, steps) == [lt(64)]


def test_simulate_empty(wrap):
    assert simulate_filter(wrap, []) == []


def test_simulate_survivors_hold_on_reachable_states(wrap):
    surv = simulate_filter(wrap, gen_template_candidates(wrap))
    assert set(texts(surv)) == {"(count[6] == 1'd0)", "(count[7] == 1'd0)", "(count < 8'd64)",
                                "(count < 8'd128)"}


# ---------------------------------------------------------------- Houdini

def test_houdini_keeps_mutually_inductive_pair(wrap):
    got = houdini(wrap, [lt(64), ne(70)], k=1)
    assert {l.name for l in got} == {"count_lt_64", "count_ne_70"}
    assert all(l.status == en.PROVEN and l.k == 1 for l in got)


def test_houdini_drops_non_inductive(wrap):
    assert houdini(wrap, [lt(32)], k=1) == []


def test_houdini_empty(wrap):
    stats = {}
    assert houdini(wrap, [], stats=stats) == []
    assert len(stats.get("sizes", [])) <= 1


def test_houdini_drops_base_violators(wrap):
    # count != 0 is inductive relative to nothing false at init; the base check removes it
    nz = cand("count_nz", ir.Binop("ne", C8, ir.Const(0, 8)))
    got = houdini(wrap, [lt(64), nz], k=1)
    assert [l.name for l in got] == ["count_lt_64"]


def test_houdini_terminates_by_shrinking(sync):
    cands = simulate_filter(sync, gen_template_candidates(sync))
    stats = {}
    got = houdini(sync, cands, k=1, stats=stats)
    sizes = stats["sizes"]
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    assert len(sizes) <= len(cands) + 1
    assert "(count1 == count2)" in [l.source_text or ir.to_sva(l.expr) for l in got]


def test_houdini_maximality_vs_brute_force():
    nonempty = 0
    for ts, cs in maximality_instances(seed=5, n=60):
        got = {l.name for l in houdini(ts, cs, k=1)}
        want = {cs[i].name for i in brute_max_inductive(ts, cs)}
        assert got == want, (ir.dump(ts), [c.text for c in cs])
        nonempty += bool(want)
    assert nonempty >= 20


# ---------------------------------------------------------------- CTI blocking

def test_cti_block_wrap_ranks_bound_first(wrap):
    cti = Trace([{"count": 69}, {"count": 70}], CTI, "never_70")
    surv = simulate_filter(wrap, gen_template_candidates(wrap))
    got = cti_block_candidates(wrap, cti, surv)
    assert got[0].text == "(count < 8'd64)"
    assert all(ref_eval(c.expr, cti.frames[0]) == 0 for c in got)


def test_cti_block_sync_selects_equality(sync):
    r = en.kinduction(sync, sync.property("msb_match"), cfg=en.EngineConfig(max_k=2))
    surv = simulate_filter(sync, gen_template_candidates(sync))
    got = cti_block_candidates(sync, r.cti, surv)
    assert "(count1 == count2)" in texts(got)
    assert got[0].text == "(count1 == count2)"
    assert all(ref_eval(c.expr, r.cti.frames[0]) == 0 for c in got)


def test_cti_block_empty_when_all_true(wrap):
    cti = Trace([{"count": 5}, {"count": 6}], CTI)
    assert cti_block_candidates(wrap, cti, [lt(64), ne(70)]) == []


def test_rank_is_priority_then_size_then_name():
    big = cand("a_big", ir.Binop("ult", ir.Binop("add", C8, ir.Const(1, 8)), ir.Const(9, 8)), template="bound")
    got = rank([big, lt(64), ne(3), lt(9)])
    assert [c.name for c in got] == ["count_ne_3", "count_lt_64", "count_lt_9", "a_big"]


# ---------------------------------------------------------------- admission gate

@pytest.mark.parametrize("mode", ["sequential", "simultaneous"])
def test_admit_examples(wrap, mode):
    cfg = en.EngineConfig(max_k=3, lemma_mode=mode)
    five = cand("count_is_5", ir.Binop("eq", C8, ir.Const(5, 8)), origin="llm")
    adm, rej = admit(wrap, [lt(64), five], (), cfg)
    assert [(l.name, l.status, l.k) for l in adm] == [("count_lt_64", en.PROVEN, 1)]
    (bad,) = rej
    assert bad.status == en.REJECTED and bad.reason == "falsified from reset"
    assert bad.trace.kind == "cex_from_init" and bad.trace.frames[0]["count"] == 0
    assert admit(wrap, [], (), cfg) == ([], [])


def test_admit_uses_existing_lemmas(wrap):
    proven = en.Lemma("count_lt_64", lt(64).expr, status=en.PROVEN, k=1)
    adm, rej = admit(wrap, [ne(70)], [proven], en.EngineConfig(max_k=1))
    assert [l.name for l in adm] == ["count_ne_70"] and rej == []
    adm, rej = admit(wrap, [ne(70)], [], en.EngineConfig(max_k=1))
    assert adm == [] and rej[0].reason == "not k-inductive" and rej[0].trace.kind == CTI


def test_admit_never_raises_audit(wrap):
    before = en.AUDIT.unproven
    admit(wrap, gen_template_candidates(wrap), (), en.EngineConfig(max_k=2))
    assert en.AUDIT.unproven == before
