"""Command-line entry point.

Exit codes: 0 all proven (or no violation found, for ``bmc``), 1 falsified,
2 unknown, 3 usage or configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import cex
from . import engine as en
from . import frontend as fe
from . import ir
from . import suggest as sg
from .report import LoopIteration, LoopReport, result_record, write_jsonl

log = logging.getLogger(__name__)

EXIT_PROVEN, EXIT_FALSIFIED, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
INI_SECTION = "kindlemma"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    design_path: Optional[Path] = None
    assertion_paths: list = field(default_factory=list)
    lemma_paths: list = field(default_factory=list)
    spec_path: Optional[Path] = None
    cti_path: Optional[Path] = None
    engine: en.EngineConfig = field(default_factory=en.EngineConfig)
    suggester: str = "templates"  # templates | llm | both
    flow: Optional[str] = None  # A | B
    llm: dict = field(default_factory=dict)  # LlmConfig keyword arguments
    review: bool = False
    max_loop_iters: int = 5
    output_dir: Path = Path("kindlemma-out")
    json: bool = False
    max_states: int = 1 << 20

    def llm_config(self) -> sg.LlmConfig:
        return sg.LlmConfig(**self.llm)


# (ini key, argparse dest, type); list-valued keys take one path per line
_KEYS = [
    ("design", "design", Path), ("assert", "asserts", list), ("lemma", "lemmas", list),
    ("spec", "spec", Path), ("cti", "cti", Path), ("max_k", "max_k", int), ("depth", "depth", int),
    ("simple_path", "simple_path", bool), ("lemma_mode", "lemma_mode", str),
    ("conflict_budget", "conflict_budget", int), ("solver", "solver", str), ("jobs", "jobs", int),
    ("suggester", "suggester", str), ("flow", "flow", str), ("review", "review", bool),
    ("max_iters", "max_iters", int), ("out", "out", Path), ("json", "json", bool),
    ("max_states", "max_states", int), ("endpoint", "endpoint", str), ("model", "model", str),
    ("temperature", "temperature", float), ("max_tokens", "max_tokens", int),
    ("timeout_ms", "timeout_ms", int), ("api_key_env", "api_key_env", str),
    ("max_retries", "max_retries", int),
]


def _read_ini(path: Path) -> dict:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    if not cp.has_section(INI_SECTION):
        raise UsageError(f"config {path} has no [{INI_SECTION}] section")
    sec = cp[INI_SECTION]
    known = {k for k, _, _ in _KEYS}
    unknown = set(sec) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    base = path.parent
    out = {}
    for key, dest, typ in _KEYS:
        if key not in sec:
            continue
        raw = sec[key]
        try:
            if typ is bool:
                out[dest] = sec.getboolean(key)
            elif typ is list:
                out[dest] = [base / p.strip() for p in raw.splitlines() if p.strip()]
            elif typ is Path:
                out[dest] = base / raw.strip()
            else:
                out[dest] = typ(raw.strip())
        except ValueError:
            raise UsageError(f"config key {key!r}: bad value {raw!r}") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the INI file (if any) with command-line flags; flags win."""
    ini = _read_ini(Path(args.config)) if args.config else {}

    def get(dest, default=None):
        v = getattr(args, dest, None)
        if v is not None and v != []:
            return v
        return ini.get(dest, default)

    try:
        eng = en.EngineConfig(
            max_k=get("max_k", 5), bmc_depth=get("depth", 20), simple_path=bool(get("simple_path", False)),
            conflict_budget=get("conflict_budget"), lemma_mode=get("lemma_mode", "sequential"),
            jobs=get("jobs", 1), external_solver=get("solver"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    llm = {"endpoint_url": get("endpoint", ""), "model_id": get("model", "gpt-4o"),
           "temperature": get("temperature", 0.0), "max_tokens": get("max_tokens", 1024),
           "timeout_ms": get("timeout_ms", 60_000), "api_key_env": get("api_key_env", sg.llm.DEFAULT_API_KEY_ENV),
           "max_retries": get("max_retries", 0)}
    cfg = RunConfig(
        design_path=get("design"), assertion_paths=[Path(p) for p in get("asserts", [])],
        lemma_paths=[Path(p) for p in get("lemmas", [])], spec_path=get("spec"), cti_path=get("cti"),
        engine=eng, suggester=get("suggester", "templates"), flow=get("flow"), llm=llm,
        review=bool(get("review", False)), max_loop_iters=get("max_iters", 5),
        output_dir=Path(get("out", Path("kindlemma-out"))), json=bool(get("json", False)),
        max_states=get("max_states", 1 << 20))
    if cfg.suggester not in ("templates", "llm", "both"):
        raise UsageError(f"unknown suggester {cfg.suggester!r}")
    if cfg.flow not in (None, "A", "B"):
        raise UsageError(f"unknown flow {cfg.flow!r} (expected A or B)")
    if cfg.max_loop_iters < 1:
        raise UsageError("max_iters must be >= 1")
    return cfg


# ---------------------------------------------------------------- loading

@dataclass
class Loaded:
    ts: ir.TransitionSystem
    rtl_text: str
    lemmas: list  # candidate lemmas from --lemma files


def _read(path: Optional[Path], what: str) -> str:
    if path is None:
        raise UsageError(f"missing --{what}")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path}: {exc.strerror}") from None


def load(cfg: RunConfig) -> Loaded:
    rtl = _read(cfg.design_path, "design")
    try:
        ast = fe.parse_design(rtl)
        syms = fe.module_symbols(ast)
        extra = []
        for p in cfg.assertion_paths:
            extra += fe.parse_assertion_file(_read(p, "assert"), syms, prefix=f"{Path(p).stem}_")
        ts = ir.elaborate(ast, extra)
        lemmas = []
        for p in cfg.lemma_paths:
            for a in fe.parse_assertion_file(_read(p, "lemma"), syms, prefix=f"{Path(p).stem}_"):
                lemmas.append(en.Lemma(a.name, ir.elaborate_expr(ts, a.body), "user",
                                       source_text=fe.format_assertion(a)))
    except fe.FrontendError as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}") from None
    except ir.ElabError as exc:
        raise UsageError(f"ElabError: {exc}") from None
    names = [n for n, _ in ts.properties] + [l.name for l in lemmas]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise UsageError(f"duplicate property/lemma names: {', '.join(sorted(dup))}")
    return Loaded(ts, rtl, lemmas)


# ---------------------------------------------------------------- output helpers

def _status_exit(statuses: Sequence[str]) -> int:
    if any(s == en.FALSIFIED for s in statuses):
        return EXIT_FALSIFIED
    if all(s == en.PROVEN for s in statuses):
        return EXIT_PROVEN
    return EXIT_UNKNOWN


def _print_table(records: Sequence[dict], out: TextIO) -> None:
    w = max([len("property")] + [len(r["name"]) for r in records])
    out.write(f"{'property':<{w}}  {'status':<16} {'k':>3} {'depth':>5} {'ms':>9}  lemmas\n")
    for r in records:
        k = "-" if r["k"] is None else r["k"]
        d = "-" if r["depth"] is None else r["depth"]
        out.write(f"{r['name']:<{w}}  {r['status']:<16} {k:>3} {d:>5} {r['time_ms']:>9.1f}  "
                  f"{','.join(r['lemma_names_used']) or '-'}\n")


def _settle(ts, results: dict, names: Sequence[str], cfg: RunConfig) -> None:
    """Search deeper with BMC for targets k-induction left open; replaces them on a hit."""
    for n in names:
        r = results[n]
        if r.status in (en.UNKNOWN_CTI, en.UNKNOWN_RESOURCE) and cfg.engine.bmc_depth >= 0:
            b = en.bmc(ts, ts.property(n), cfg.engine.bmc_depth, (), cfg.engine, n)
            if b.status == en.FALSIFIED:
                b.time_ms += r.time_ms
                results[n] = b


def _write_trace(ts, trace: cex.Trace, out_dir: Path, stem: str) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    vcd = out_dir / f"{stem}.vcd"
    vcd.write_bytes(cex.to_vcd(trace, ts))
    js = out_dir / f"{stem}.trace.json"
    js.write_text(trace.dumps() + "\n", encoding="utf-8")
    return {"vcd": str(vcd), "trace": str(js)}


def _render(ts, trace: cex.Trace) -> cex.WaveRender:
    name = trace.violated_property
    focus = None
    if name:
        try:
            focus = ts.property(name)
        except KeyError:
            focus = None
    return cex.render_ascii(trace, ts, focus)


def _lemma_text(l) -> str:
    if l.source_text:
        return l.source_text
    try:
        return ir.to_sva(l.expr)
    except ValueError:
        return ir.sexpr(l.expr)


# ---------------------------------------------------------------- review gate

def review_gate(candidates: Sequence, interactive: bool, stdin: Optional[TextIO] = None,
                out: Optional[TextIO] = None) -> list:
    """Ask y/n per candidate when interactive; otherwise approve everything.

    Approval is only permission to try a proof; it never admits a lemma.
    """
    if not interactive:
        return list(candidates)
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    approved = []
    for c in candidates:
        out.write(f"[{c.origin}] {c.name}: {c.text}\napprove? [y/N] ")
        out.flush()
        line = stdin.readline()
        if not line:
            out.write("\n(end of input: remaining candidates rejected)\n")
            break
        if line.strip().lower() in ("y", "yes"):
            approved.append(c)
    return approved


# ---------------------------------------------------------------- commands

def cmd_check(cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    d = load(cfg)
    ts = d.ts
    if not ts.properties and not d.lemmas:
        raise UsageError("no properties to check (add assertions to the design or pass --assert)")
    en.check_vacuity(ts, (), cfg.engine)
    results = en.prove_all(ts, ts.properties, d.lemmas, cfg.engine)
    _settle(ts, results, [n for n, _ in ts.properties], cfg)
    records = []
    for name, r in results.items():
        extra = {}
        if r.trace is not None and r.status in (en.FALSIFIED, en.UNKNOWN_CTI):
            extra = _write_trace(ts, r.trace, cfg.output_dir, name)
            if not cfg.json:
                out.write(f"\n{name}: {r.status}\n{_render(ts, r.trace).text}\n")
        records.append(result_record(name, r, **extra))
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    write_jsonl(cfg.output_dir / "report.jsonl", records)
    if cfg.json:
        for rec in records:
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        _print_table(records, out)
    return _status_exit([r.status for r in results.values()])


def cmd_bmc(cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    d = load(cfg)
    ts = d.ts
    if not ts.properties:
        raise UsageError("no properties to check")
    records = []
    statuses = []
    for name, p in ts.properties:
        r = en.bmc(ts, p, cfg.engine.bmc_depth, (), cfg.engine, name)
        extra = _write_trace(ts, r.trace, cfg.output_dir, name) if r.trace is not None else {}
        if r.trace is not None and not cfg.json:
            out.write(f"\n{name}: {r.status}\n{_render(ts, r.trace).text}\n")
        records.append(result_record(name, r, **extra))
        statuses.append(r.status)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    write_jsonl(cfg.output_dir / "report.jsonl", records)
    if cfg.json:
        for rec in records:
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        _print_table(records, out)
    if en.FALSIFIED in statuses:
        return EXIT_FALSIFIED
    return EXIT_UNKNOWN if en.UNKNOWN_RESOURCE in statuses else EXIT_PROVEN


def cmd_oracle(cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    d = load(cfg)
    ts = d.ts
    if not ts.properties:
        raise UsageError("no properties to check")
    codes = []
    for name, p in ts.properties:
        try:
            r = en.bfs_oracle(ts, p, max_states=cfg.max_states, name=name)
        except ValueError as exc:
            out.write(f"{name}: skipped ({exc})\n")
            codes.append(EXIT_UNKNOWN)
            continue
        rec = {"name": name, "status": r.status, "depth": r.depth, "reachable": r.reachable}
        if r.trace is not None:
            rec.update(_write_trace(ts, r.trace, cfg.output_dir, f"{name}.oracle"))
        if cfg.json:
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            depth = "" if r.depth is None else f" at depth {r.depth}"
            out.write(f"{name}: {r.status}{depth} ({r.reachable} states)\n")
        codes.append({en.HOLDS: EXIT_PROVEN, en.VIOLATED: EXIT_FALSIFIED}.get(r.status, EXIT_UNKNOWN))
    if EXIT_FALSIFIED in codes:
        return EXIT_FALSIFIED
    return max(codes)


def cmd_dump(cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    out.write(ir.dump(load(cfg).ts) + "\n")
    return EXIT_PROVEN


def _template_blockers(ts, cti: Optional[cex.Trace]) -> list:
    cands = sg.simulate_filter(ts, sg.gen_template_candidates(ts))
    if cti is None:
        return sg.rank(cands)
    return sg.cti_block_candidates(ts, cti, cands)


def _llm_candidates(cfg: RunConfig, ts, prompt: sg.PromptBundle):
    llm_cfg = cfg.llm_config()
    raw = sg.llm_request(llm_cfg, prompt)
    return sg.extract_assertions(raw, ts, llm_cfg.model_id)


def cmd_suggest(cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    """Dry run of a suggester: print candidates and rejects, admit nothing."""
    d = load(cfg)
    ts = d.ts
    flow = cfg.flow
    if flow is None and cfg.suggester != "templates":
        flow = "A" if cfg.spec_path else "B"
    if flow == "B" and cfg.cti_path is None:
        raise UsageError("flow B needs a counterexample: pass --cti <trace file> (written by check/loop)")
    if flow == "A" and cfg.suggester != "templates" and cfg.spec_path is None:
        raise UsageError("flow A needs --spec <file>")
    cti = None
    if cfg.cti_path is not None:
        try:
            cti = cex.Trace.loads(_read(cfg.cti_path, "cti"))
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad trace file {cfg.cti_path}: {exc}") from None

    cands: list = []
    rejects: list = []
    if cfg.suggester in ("templates", "both"):
        cands += _template_blockers(ts, cti)
    if cfg.suggester in ("llm", "both"):
        if flow == "A":
            prompt = sg.build_prompt("A", d.rtl_text, spec_text=_read(cfg.spec_path, "spec"))
        else:
            prompt = sg.build_prompt("B", d.rtl_text, cex_render=_render(ts, cti).text)
        try:
            c, r = _llm_candidates(cfg, ts, prompt)
        except sg.LlmConfigError as exc:
            raise UsageError(str(exc)) from None
        except sg.LlmError as exc:
            out.write(f"LLM request failed: {type(exc).__name__}: {exc}\n")
            return EXIT_UNKNOWN
        cands += c
        rejects += r
    for c in cands:
        if cfg.json:
            out.write(json.dumps({"name": c.name, "text": c.text, "origin": c.origin}) + "\n")
        else:
            out.write(f"{c.name}: {c.text}  [{c.origin}]\n")
    for r in rejects:
        if cfg.json:
            out.write(json.dumps({"reject": r.reason, "text": r.text, "detail": r.detail}) + "\n")
        else:
            out.write(f"REJECT {r.reason}: {r.text}\n")
    return EXIT_PROVEN


def _unique(cands: Sequence, taken: set) -> list:
    """Rename candidates whose names clash with targets or stored lemmas."""
    out = []
    for c in cands:
        name, i = c.name, 1
        while name in taken:
            i += 1
            name = f"{c.name}_{i}"
        taken.add(name)
        out.append(c if name == c.name else sg.CandidateInvariant(
            name, c.expr, c.origin, c.template, c.model, c.source_text))
    return out


def run_loop(cfg: RunConfig, loaded: Loaded, stdin: Optional[TextIO] = None,
             out: TextIO = sys.stdout) -> LoopReport:
    ts = loaded.ts
    store: list[en.Lemma] = []  # the one mutable lemma store; modules get tuples
    report = LoopReport()
    targets = list(ts.properties)
    pending = list(loaded.lemmas)
    for it_no in range(1, cfg.max_loop_iters + 1):
        it = LoopIteration()
        report.append(it)
        results = en.prove_all(ts, targets, tuple(store) + tuple(pending), cfg.engine)
        _settle(ts, results, [n for n, _ in targets], cfg)
        for l in pending:
            r = results[l.name]
            store.append(l.proven_at(r.k) if r.proven else l.rejected(r.status, r.trace))
        pending = []
        store = [l for l in store if l.status == en.PROVEN]
        for name, _ in targets:
            r = results[name]
            extra = {}
            if r.trace is not None and r.status in (en.FALSIFIED, en.UNKNOWN_CTI):
                extra = _write_trace(ts, r.trace, cfg.output_dir, f"iter{it_no}_{name}")
            it.properties[name] = result_record(name, r, **extra)
        statuses = [results[n].status for n, _ in targets]
        if all(s == en.PROVEN for s in statuses):
            report.final_status = "all_proven"
            break
        if en.FALSIFIED in statuses:
            report.final_status = "falsified"
            break
        ctis = [results[n].cti for n, _ in targets if results[n].cti is not None]
        if not ctis:
            break  # resource limits only: nothing to learn from
        render = _render(ts, ctis[0])
        it.cti_rendered = render.text
        if not cfg.json:
            out.write(f"iteration {it_no}: CTI for {ctis[0].violated_property}\n{render.text}\n")

        known = {l.expr for l in store}
        taken = {n for n, _ in targets} | {l.name for l in store}
        admitted: list[en.Lemma] = []
        if cfg.suggester in ("templates", "both"):
            blockers = []
            for t in ctis:
                blockers += _template_blockers(ts, t)
            blockers = [c for c in sg.dedup(blockers) if c.expr not in known]
            blockers = _unique(review_gate(blockers, cfg.review, stdin, out), taken)
            it.candidates_tried += [c.name for c in blockers]
            adm, rej = sg.admit(ts, blockers, tuple(store), cfg.engine)
            admitted += adm
            it.lemmas_rejected += [{"name": l.name, "reason": l.reason} for l in rej]
        if cfg.suggester == "llm" or (cfg.suggester == "both" and not admitted):
            try:
                prompt = sg.build_prompt("B", loaded.rtl_text, cex_render=render.text)
                cands, rejects = _llm_candidates(cfg, ts, prompt)
            except sg.LlmError as exc:
                it.llm_error = f"{type(exc).__name__}: {exc}"
                log.warning("LLM suggestion failed: %s", it.llm_error)
                cands, rejects = [], []
            it.llm_rejects += [{"text": r.text, "reason": r.reason, "detail": r.detail} for r in rejects]
            cands = [c for c in cands if c.expr not in known | {l.expr for l in admitted}]
            cands = _unique(review_gate(cands, cfg.review, stdin, out), taken)
            it.candidates_tried += [c.name for c in cands]
            adm, rej = sg.admit(ts, cands, tuple(store) + tuple(admitted), cfg.engine)
            admitted += adm
            it.lemmas_rejected += [{"name": l.name, "reason": l.reason} for l in rej]
        it.lemmas_admitted = [l.name for l in admitted]
        if not admitted:
            break
        store += admitted
    return report


def cmd_loop(cfg: RunConfig, stdin: Optional[TextIO] = None, out: TextIO = sys.stdout) -> int:
    d = load(cfg)
    if not d.ts.properties:
        raise UsageError("no target properties for the loop")
    en.check_vacuity(d.ts, (), cfg.engine)
    report = run_loop(cfg, d, stdin, out)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    (cfg.output_dir / "loop_report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    last = report.iterations[-1].properties
    write_jsonl(cfg.output_dir / "report.jsonl", list(last.values()))
    if cfg.json:
        out.write(report.to_json() + "\n")
    else:
        for i, it in enumerate(report.iterations, 1):
            out.write(f"iteration {i}: admitted {', '.join(it.lemmas_admitted) or 'nothing'}\n")
        _print_table(list(last.values()), out)
        out.write(f"final: {report.final_status}\n")
    return {"all_proven": EXIT_PROVEN, "falsified": EXIT_FALSIFIED}.get(report.final_status, EXIT_UNKNOWN)


# ---------------------------------------------------------------- argument parsing

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("inputs")
    g.add_argument("--config", metavar="INI", help=f"INI file with a [{INI_SECTION}] section mirroring the flags")
    g.add_argument("--design", type=Path, help="RTL design file")
    g.add_argument("--assert", dest="asserts", type=Path, action="append", default=[], metavar="FILE",
                   help="assertion file (repeatable)")
    g.add_argument("--lemma", dest="lemmas", type=Path, action="append", default=[], metavar="FILE",
                   help="helper assertion file; proven before use (repeatable)")
    g.add_argument("--spec", type=Path, help="design specification text (suggest flow A)")
    g.add_argument("--cti", type=Path, help="trace JSON written by check/loop (suggest flow B)")
    e = common.add_argument_group("engine")
    e.add_argument("--max-k", type=int)
    e.add_argument("--depth", type=int, help="BMC depth")
    e.add_argument("--simple-path", action=argparse.BooleanOptionalAction, default=None)
    e.add_argument("--lemma-mode", choices=["sequential", "simultaneous"])
    e.add_argument("--conflict-budget", type=int)
    e.add_argument("--solver", help="external DIMACS solver command")
    e.add_argument("--jobs", type=int)
    e.add_argument("--max-states", type=int, help="oracle state limit")
    s = common.add_argument_group("suggestion")
    s.add_argument("--suggester", choices=["templates", "llm", "both"])
    s.add_argument("--flow", choices=["A", "B"])
    s.add_argument("--review", action=argparse.BooleanOptionalAction, default=None)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--endpoint", help="chat-completions URL")
    s.add_argument("--model")
    s.add_argument("--temperature", type=float)
    s.add_argument("--max-tokens", type=int)
    s.add_argument("--timeout-ms", type=int)
    s.add_argument("--api-key-env")
    s.add_argument("--max-retries", type=int)
    o = common.add_argument_group("output")
    o.add_argument("--out", type=Path, help="output directory (default kindlemma-out)")
    o.add_argument("--json", action=argparse.BooleanOptionalAction, default=None)
    o.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="kindlemma", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("check", "prove all properties by k-induction"), ("prove", "alias of check"),
                        ("bmc", "bounded search for violations"), ("suggest", "print candidate lemmas"),
                        ("loop", "prove, learn lemmas from CTIs, repeat"), ("oracle", "explicit-state check"),
                        ("dump", "print the elaborated transition system")]:
        sub.add_parser(name, parents=[common], help=help_)
    return p


COMMANDS = {"check": cmd_check, "prove": cmd_check, "bmc": cmd_bmc, "suggest": cmd_suggest,
            "loop": cmd_loop, "oracle": cmd_oracle, "dump": cmd_dump}


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None) -> int:
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_PROVEN if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, out=out)
    except UsageError as exc:
        sys.stderr.write(f"kindlemma: error: {exc}\n")
        return EXIT_USAGE
    except sg.LlmConfigError as exc:
        sys.stderr.write(f"kindlemma: error: {exc}\n")
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
