"""Machine-readable reports: per-property JSON lines and the lemma-loop report."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .engine import ProofResult

RECORD_FIELDS = ("name", "status", "k", "depth", "time_ms", "lemma_names_used")


def result_record(name: str, result: ProofResult, **extra) -> dict:
    rec = {
        "name": name,
        "status": result.status,
        "k": result.k,
        "depth": result.depth,
        "time_ms": result.time_ms,
        "lemma_names_used": list(result.lemmas_used),
    }
    rec.update(extra)
    return rec


def dumps_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def loads_jsonl(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def write_jsonl(path: Path, records: Iterable[dict]) -> None:
    Path(path).write_text(dumps_jsonl(records), encoding="utf-8")


def read_jsonl(path: Path) -> list[dict]:
    return loads_jsonl(Path(path).read_text(encoding="utf-8"))


@dataclass
class LoopIteration:
    properties: dict = field(default_factory=dict)  # name -> result record
    cti_rendered: Optional[str] = None
    candidates_tried: list = field(default_factory=list)
    lemmas_admitted: list = field(default_factory=list)
    lemmas_rejected: list = field(default_factory=list)
    llm_rejects: list = field(default_factory=list)
    llm_error: Optional[str] = None


@dataclass
class LoopReport:
    iterations: list = field(default_factory=list)
    final_status: str = "exhausted"  # all_proven | falsified | exhausted

    def append(self, it: LoopIteration) -> None:
        self.iterations.append(it)

    def to_dict(self) -> dict:
        return {"final_status": self.final_status, "iterations": [asdict(i) for i in self.iterations]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "LoopReport":
        return cls([LoopIteration(**i) for i in d["iterations"]], d["final_status"])

    @classmethod
    def from_json(cls, text: str) -> "LoopReport":
        return cls.from_dict(json.loads(text))
