"""LLM-backed lemma suggestion: prompt construction, chat-completions client, extraction.

Flow A asks for helper assertions from a design specification plus RTL;
flow B asks for assertions that rule out an inductive-step counterexample.
Nothing returned here is trusted: candidates still have to be proven.
"""
from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import requests

from .. import frontend as fe
from .. import ir
from .templates import CandidateInvariant

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "LEMMA_AI_API_KEY"
PROMPT_DIR = Path(__file__).resolve().parent.parent / "prompts"
TEMPLATE_FILES = {"A": "prompt_spec.txt", "B": "prompt_cex.txt"}
_PLACEHOLDER = re.compile(r"\{\{([A-Z]+)\}\}")
_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


class LlmError(Exception):
    pass


class LlmConfigError(LlmError):
    pass


class HttpError(LlmError):
    def __init__(self, status: int, body: str = ""):
        self.status = status
        self.body = body
        super().__init__(f"HTTP {status}")


class LlmTimeout(LlmError):
    pass


class MalformedResponse(LlmError):
    pass


class MissingPlaceholderInput(LlmError):
    pass


class TemplateNotFound(LlmError):
    pass


@dataclass
class LlmConfig:
    endpoint_url: str = ""
    model_id: str = "gpt-4o"
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout_ms: int = 60_000
    api_key_env: str = DEFAULT_API_KEY_ENV
    max_retries: int = 0

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise LlmConfigError("temperature must lie in [0, 2]")
        if self.max_tokens < 1 or self.timeout_ms < 1 or self.max_retries < 0:
            raise LlmConfigError("max_tokens, timeout_ms must be positive and max_retries >= 0")


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    placeholders_filled: frozenset = field(default_factory=frozenset)

    def messages(self) -> list[dict]:
        return [{"role": "system", "content": self.system_text},
                {"role": "user", "content": self.user_text}]


def load_template(flow: str, template_dir: Optional[Path] = None) -> tuple[str, str]:
    path = Path(template_dir or PROMPT_DIR) / TEMPLATE_FILES[flow]
    try:
        text = path.read_text(encoding="utf-8")
    except OSError:
        raise TemplateNotFound(str(path)) from None
    m = re.match(r"=== SYSTEM ===\n(.*?)\n=== USER ===\n(.*)\Z", text, re.DOTALL)
    if m is None:
        raise TemplateNotFound(f"{path}: missing '=== SYSTEM ===' / '=== USER ===' sections")
    return m.group(1), m.group(2)


def build_prompt(flow: str, rtl_text: str, spec_text: Optional[str] = None,
                 cex_render: Optional[str] = None, template_dir: Optional[Path] = None) -> PromptBundle:
    if flow not in TEMPLATE_FILES:
        raise ValueError(f"unknown flow {flow!r} (expected 'A' or 'B')")
    values = {"RTL": rtl_text}
    if flow == "A":
        if spec_text is None:
            raise MissingPlaceholderInput("flow A needs the specification text")
        values["SPEC"] = spec_text
    else:
        if cex_render is None:
            raise MissingPlaceholderInput("flow B needs a rendered counterexample")
        values["CEX"] = cex_render
    system, user = load_template(flow, template_dir)

    filled = set()

    def sub(m: re.Match) -> str:
        key = m.group(1)
        if key not in values:
            raise MissingPlaceholderInput(f"template uses {{{{{key}}}}} but no value was given")
        filled.add(key)
        return values[key]

    user_text = _PLACEHOLDER.sub(sub, user)
    if "RTL" not in filled:
        raise TemplateNotFound("template has no {{RTL}} placeholder")
    return PromptBundle(system, user_text, frozenset(filled))


def _redact(text: str, secret: str) -> str:
    return text.replace(secret, "***") if secret else text


def llm_request(cfg: LlmConfig, prompt: PromptBundle, session: Optional[requests.Session] = None) -> str:
    """POST a chat-completions request and return the first choice's content."""
    if not cfg.endpoint_url:
        raise LlmConfigError("no LLM endpoint configured")
    key = os.environ.get(cfg.api_key_env)
    if not key:
        raise LlmConfigError(f"environment variable {cfg.api_key_env} is not set")
    body = {
        "model": cfg.model_id,
        "messages": prompt.messages(),
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    }
    headers = {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}
    log.info("LLM request to %s model=%s (Authorization: Bearer ***)", cfg.endpoint_url, cfg.model_id)
    log.debug("LLM request body: %s", _redact(json.dumps(body), key))
    http = session or requests
    attempts = cfg.max_retries + 1
    for attempt in range(attempts):
        try:
            resp = http.post(cfg.endpoint_url, json=body, headers=headers, timeout=cfg.timeout_ms / 1000.0)
        except requests.Timeout:
            if attempt + 1 < attempts:
                continue
            raise LlmTimeout(f"no response within {cfg.timeout_ms} ms") from None
        except requests.RequestException as exc:
            raise LlmError(_redact(str(exc), key)) from None
        log.debug("LLM response %s: %s", resp.status_code, _redact(resp.text[:2000], key))
        if resp.status_code != 200:
            if attempt + 1 < attempts and resp.status_code in (429, 500, 502, 503):
                continue
            raise HttpError(resp.status_code, _redact(resp.text, key))
        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            raise MalformedResponse("response has no choices[0].message.content") from None
        if not isinstance(content, str):
            raise MalformedResponse("message content is not text")
        return content
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class Reject:
    text: str
    reason: str  # NoCodeBlock | LexError | ParseError | UnknownSymbol | ElabError | Duplicate
    detail: str = ""


def _statements(block: str) -> list[str]:
    code = re.sub(r"/\*.*?\*/", " ", block, flags=re.DOTALL)
    code = re.sub(r"//[^\n]*", "", code)
    parts = [p.strip() for p in code.split(";")]
    return [p + ";" for p in parts if p]


def extract_assertions(raw: str, ts: ir.TransitionSystem, model: Optional[str] = None,
                       prefix: str = "llm") -> tuple[list[CandidateInvariant], list[Reject]]:
    """Parse fenced code blocks of an LLM answer into candidates; every failure becomes a reject."""
    blocks = _FENCE.findall(raw)
    if not blocks:
        return [], [Reject(raw.strip()[:200], "NoCodeBlock", "no fenced code block in response")]
    symbols = ts.symbols()
    cands: list[CandidateInvariant] = []
    rejects: list[Reject] = []
    seen = set()
    n = 0
    for block in blocks:
        for stmt in _statements(block):
            n += 1
            try:
                a = fe.parse_assertion(stmt, symbols, name=f"{prefix}_{n}")
                expr = ir.elaborate_expr(ts, a.body)
            except fe.UnknownSymbol as exc:
                rejects.append(Reject(stmt, "UnknownSymbol", exc.name))
                continue
            except (fe.LexError, fe.ParseError) as exc:
                rejects.append(Reject(stmt, type(exc).__name__, str(exc)))
                continue
            except (ir.ElabError, ValueError) as exc:
                rejects.append(Reject(stmt, "ElabError", str(exc)))
                continue
            if expr in seen:
                rejects.append(Reject(stmt, "Duplicate", a.name))
                continue
            seen.add(expr)
            cands.append(CandidateInvariant(a.name, expr, "llm", model=model, source_text=stmt))
    return cands, rejects
