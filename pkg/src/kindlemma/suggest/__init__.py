"""Candidate lemma generation (templates, Houdini, LLM flows) and the proof gate."""
from __future__ import annotations

from typing import Optional, Sequence

from .. import engine as en
from .. import ir
from .houdini import houdini
from .llm import (HttpError, LlmConfig, LlmConfigError, LlmError, LlmTimeout, MalformedResponse,
                  MissingPlaceholderInput, PromptBundle, Reject, TemplateNotFound, build_prompt,
                  extract_assertions, llm_request)
from .templates import (CandidateInvariant, cti_block_candidates, dedup, gen_template_candidates,
                        rank, simulate_filter)

__all__ = [
    "CandidateInvariant", "HttpError", "LlmConfig", "LlmConfigError", "LlmError", "LlmTimeout",
    "MalformedResponse", "MissingPlaceholderInput", "PromptBundle", "Reject", "TemplateNotFound",
    "admit", "build_prompt", "cti_block_candidates", "dedup", "extract_assertions",
    "gen_template_candidates", "houdini", "llm_request", "rank", "simulate_filter",
]


def _as_lemma(c: CandidateInvariant) -> en.Lemma:
    return en.Lemma(c.name, c.expr, c.origin, source_text=c.source_text)


def _reject(c: CandidateInvariant, r: en.ProofResult) -> en.Lemma:
    why = {en.FALSIFIED: "falsified from reset", en.UNKNOWN_CTI: "not k-inductive",
           en.UNKNOWN_RESOURCE: "solver budget exhausted"}.get(r.status, r.status)
    return _as_lemma(c).rejected(why, r.trace)


def admit(ts: ir.TransitionSystem, candidates: Sequence[CandidateInvariant],
          lemmas: Sequence[en.Lemma] = (), cfg: Optional[en.EngineConfig] = None,
          k: int = 1) -> tuple[list[en.Lemma], list[en.Lemma]]:
    """Prove candidates with the existing proven lemmas assumed.

    Returns ``(admitted, rejected)``: admitted lemmas carry status proven;
    rejected ones carry the counterexample or CTI that sank them.
    """
    cfg = cfg or en.EngineConfig()
    proven = [l for l in lemmas if l.status == en.PROVEN]
    admitted: list[en.Lemma] = []
    rejected: list[en.Lemma] = []
    cands = dedup(candidates)
    if cfg.lemma_mode == "sequential":
        for c in cands:
            r = en.kinduction(ts, c.expr, proven + admitted, cfg, c.name)
            if r.proven:
                admitted.append(_as_lemma(c).proven_at(r.k))
            else:
                rejected.append(_reject(c, r))
        return admitted, rejected

    admitted = houdini(ts, cands, k, cfg, proven)
    kept = {l.expr for l in admitted}
    for c in cands:
        if c.expr in kept:
            continue
        r = en.kinduction(ts, c.expr, proven + admitted, cfg, c.name)
        if r.proven:
            admitted.append(_as_lemma(c).proven_at(r.k))
        else:
            rejected.append(_reject(c, r))
    return admitted, rejected
