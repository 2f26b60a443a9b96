"""Houdini: the largest conjunctively k-inductive subset of a candidate set."""
from __future__ import annotations

import logging
from typing import Optional, Sequence

from .. import engine as en
from ..sat import ResourceLimit
from .templates import CandidateInvariant, dedup

log = logging.getLogger(__name__)


def _step_fixpoint(ts, cands, k, lemmas, cfg, stats) -> list[int]:
    """Indices of candidates surviving the inductive-step fixpoint."""
    u = en.Unrolling(ts, cfg, en.lemma_exprs(lemmas))
    for _ in range(k + 1):
        u.add_frame()
    acts = []
    pick = []
    for c in cands:
        a = u.ctx.fresh()
        acts.append(a)
        for t in range(k):
            u.add([-a, u.lit(c.expr, t)])
        d = u.ctx.fresh()
        u.add([-d, a])
        u.add([-d, -u.lit(c.expr, k)])
        pick.append(d)
    if pick:
        u.add(pick)
    live = list(range(len(cands)))
    while live:
        stats.setdefault("sizes", []).append(len(live))
        on = set(live)
        model = u.solve([acts[i] if i in on else -acts[i] for i in range(len(cands))])
        if model is None:
            break
        bad = [i for i in live if not model[u.lit(cands[i].expr, k)]]
        live = [i for i in live if i not in bad]
    return live


def _base_violators(ts, cands, idx, k, lemmas, cfg) -> list[int]:
    u = en.Unrolling(ts, cfg, en.lemma_exprs(lemmas))
    u.add_init(0)
    for _ in range(k):
        u.add_frame()
    bad = []
    for i in idx:
        viol = u.ctx.or_n([-u.lit(cands[i].expr, t) for t in range(k)])
        if u.solve([viol]) is not None:
            bad.append(i)
    return bad


def houdini(ts, candidates: Sequence[CandidateInvariant], k: int = 1,
            cfg: Optional[en.EngineConfig] = None, lemmas: Sequence[en.Lemma] = (),
            stats: Optional[dict] = None) -> list[en.Lemma]:
    """Return the surviving candidates as lemmas with status proven at ``k``.

    Repeats the inductive-step fixpoint (all live candidates assumed at
    frames 0..k-1, any of them violated at frame k) and the base check
    until neither removes anything.  Budget exhaustion yields no lemmas.
    """
    cfg = cfg or en.EngineConfig()
    stats = stats if stats is not None else {}
    cands = dedup(candidates)
    idx = list(range(len(cands)))
    try:
        while idx:
            sub = [cands[i] for i in idx]
            keep = _step_fixpoint(ts, sub, k, lemmas, cfg, stats)
            idx = [idx[i] for i in keep]
            bad = set(_base_violators(ts, cands, idx, k, lemmas, cfg))
            if not bad:
                break
            idx = [i for i in idx if i not in bad]
    except ResourceLimit:
        log.warning("houdini: conflict budget exhausted, returning no lemmas")
        return []
    return [en.Lemma(c.name, c.expr, c.origin, en.PROVEN, k, source_text=c.source_text)
            for c in (cands[i] for i in idx)]
