"""Benchmark corpus cases and their expectation sidecars.

Each ``NN_name.bdl`` knowledge base sits next to ``NN_name.expected.json``::

    {
      "id": 3,                        # case number
      "title": "Nixon diamond",
      "extension_count": 2,           # exact number of extensions
      "contains": ["..."],            # literals present in every extension
      "absent": ["..."],              # literals absent from every extension
      "alternatives": [["..."], ...], # each list is contained in some extension
      "no_new_facts": true,           # every extension equals the assertions
      "options": {"mode": "credulous", "semantics": "joint"}
    }

Only ``id`` and ``title`` are required.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .engine import EngineOptions, ReasoningOutcome, compute_extensions
from .kb import Literal
from .parser import parse_kb, parse_literal

CORPUS_DIR = Path(__file__).parent / "corpus"


@dataclass(frozen=True)
class CorpusCase:
    id: int
    title: str
    path: Path
    extension_count: Optional[int] = None
    contains: tuple[Literal, ...] = ()
    absent: tuple[Literal, ...] = ()
    alternatives: tuple[tuple[Literal, ...], ...] = ()
    no_new_facts: bool = False
    options: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.path.stem


@dataclass(frozen=True)
class CaseResult:
    case: CorpusCase
    passed: bool
    failures: tuple[str, ...]
    seconds: float
    outcome: Optional[ReasoningOutcome] = None

    def to_dict(self) -> dict:
        out = {"id": self.case.id, "name": self.case.name, "title": self.case.title,
               "passed": self.passed, "failures": list(self.failures)}
        if self.outcome is not None:
            out["extensions"] = [[str(l) for l in sorted(e.facts)]
                                 for e in self.outcome.extensions]
        return out


def load_case(kb_path: Path) -> CorpusCase:
    sidecar = kb_path.with_name(kb_path.stem + ".expected.json")
    data = json.loads(sidecar.read_text())
    return CorpusCase(
        id=int(data["id"]),
        title=data["title"],
        path=kb_path,
        extension_count=data.get("extension_count"),
        contains=tuple(parse_literal(s) for s in data.get("contains", ())),
        absent=tuple(parse_literal(s) for s in data.get("absent", ())),
        alternatives=tuple(tuple(parse_literal(s) for s in alt)
                           for alt in data.get("alternatives", ())),
        no_new_facts=bool(data.get("no_new_facts", False)),
        options=dict(data.get("options", {})),
    )


def load_corpus(directory: Path = CORPUS_DIR) -> list[CorpusCase]:
    cases = [load_case(p) for p in sorted(Path(directory).glob("*.bdl"))
             if p.with_name(p.stem + ".expected.json").exists()]
    return sorted(cases, key=lambda c: (c.id, c.name))


def check_outcome(case: CorpusCase, outcome: ReasoningOutcome) -> list[str]:
    failures = []
    exts = outcome.extensions
    if case.extension_count is not None and len(exts) != case.extension_count:
        failures.append(f"expected {case.extension_count} extensions, got {len(exts)}")
    for e in exts:
        for l in case.contains:
            if l not in e.facts:
                failures.append(f"{l} missing from an extension")
        for l in case.absent:
            if l in e.facts:
                failures.append(f"{l} present but expected absent")
        if case.no_new_facts and outcome.theory is not None \
                and e.facts != outcome.theory.facts:
            extra = sorted(map(str, e.facts - outcome.theory.facts))
            failures.append(f"unexpected new facts {extra}")
    for alt in case.alternatives:
        if not any(set(alt) <= e.facts for e in exts):
            failures.append(f"no extension contains {sorted(map(str, alt))}")
    return failures


def run_case(case: CorpusCase, base: EngineOptions = EngineOptions()) -> CaseResult:
    start = time.perf_counter()
    try:
        theory = parse_kb(case.path.read_text())
        opts = EngineOptions(**{**base.__dict__, **case.options})
        outcome = compute_extensions(theory, opts)
        failures = check_outcome(case, outcome)
    except Exception as exc:  # a crashing case is a failing case
        outcome, failures = None, [f"{type(exc).__name__}: {exc}"]
    return CaseResult(case, not failures, tuple(failures),
                      time.perf_counter() - start, outcome)


def run_corpus(directory: Path = CORPUS_DIR,
               base: EngineOptions = EngineOptions()) -> list[CaseResult]:
    return [run_case(c, base) for c in load_corpus(directory)]


def results_to_json(results: list[CaseResult]) -> str:
    """Timing is left out so the report is byte-for-byte reproducible."""
    report = {"cases": [r.to_dict() for r in results],
              "passed": sum(r.passed for r in results), "total": len(results)}
    return json.dumps(report, indent=2) + "\n"
