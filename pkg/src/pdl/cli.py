"""Command-line interface: ``pdl reason | explain | check | bench``.

Exit codes: 0 success, 1 benchmark failure, 2 parse error, 3 no extension
(every branch ended in an unresolvable conflict), 4 resource cap reached.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bench import CORPUS_DIR, results_to_json, run_corpus
from .engine import (CREDULOUS, JOINT, REITER, SKEPTICAL, EngineError, EngineOptions,
                     ReasoningOutcome, compute_extensions)
from .explain import explain, render, to_dict
from .kb import GroundingLimitError, format_order
from .parser import ParseError, parse_kb, parse_literal
from .serialize import serialize_outcome

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_NO_EXTENSION, EXIT_LIMIT = 0, 1, 2, 3, 4


def _engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=[CREDULOUS, SKEPTICAL], default=CREDULOUS)
    p.add_argument("--semantics", choices=[JOINT, REITER], default=JOINT)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--max-branches", type=int, default=64)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reason", help="compute the extensions of a knowledge base")
    p.add_argument("kb", type=Path)
    _engine_args(p)
    p.add_argument("--json", action="store_true", help="emit the outcome as JSON")
    p.add_argument("--dump-conflicts", action="store_true",
                   help="write every analyzed conflict tree to stderr as JSON")

    p = sub.add_parser("explain", help="explain why a fact holds or does not")
    p.add_argument("kb", type=Path)
    # nargs="?" so that a negative literal such as -flies(tweety) can be
    # recovered from the arguments argparse mistakes for options
    p.add_argument("fact", nargs="?")
    _engine_args(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("check", help="parse a knowledge base and report its contents")
    p.add_argument("kb", type=Path)

    p = sub.add_parser("bench", help="run the benchmark corpus")
    p.add_argument("corpus", type=Path, nargs="?", default=CORPUS_DIR)
    p.add_argument("--json", action="store_true")
    return parser


def _options(args, record_conflicts: bool = False) -> EngineOptions:
    return EngineOptions(mode=args.mode, semantics=args.semantics,
                         max_steps=args.max_steps, max_branches=args.max_branches,
                         record_conflicts=record_conflicts)


def _load(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return None
    try:
        return parse_kb(text)
    except ParseError as exc:
        print(f"{path}:{exc.span.line}:{exc.span.column}: parse error: {exc.message}"
              + (f" (got {exc.token!r})" if exc.token else ""), file=sys.stderr)
        return None


def _run(theory, options: EngineOptions) -> tuple[Optional[ReasoningOutcome], int]:
    try:
        return compute_extensions(theory, options), EXIT_OK
    except (EngineError, GroundingLimitError) as exc:
        print(f"error: resource limit reached: {exc}", file=sys.stderr)
        return None, EXIT_LIMIT


def _text_outcome(outcome: ReasoningOutcome) -> str:
    lines = [f"{len(outcome.extensions)} extension(s) "
             f"[{outcome.mode}, {outcome.semantics}]"]
    for i, ext in enumerate(outcome.extensions, 1):
        lines.append(f"extension {i}:")
        for l in sorted(ext.facts):
            orders = sorted({s.order for s in ext.state.supports(l)})
            lines.append(f"  {str(l):<32} {ext.state.status(l):<9}"
                         f" order {','.join(format_order(o) for o in orders)}")
        for d in sorted(ext.state.disjunctive_facts):
            lines.append(f"  {str(d):<32} asserted")
    if outcome.skeptical_core is not None:
        core = ", ".join(str(l) for l in sorted(outcome.skeptical_core))
        lines.append(f"skeptical core: {core or '(empty)'}")
    return "\n".join(lines)


def cmd_reason(args) -> int:
    theory = _load(args.kb)
    if theory is None:
        return EXIT_PARSE
    outcome, status = _run(theory, _options(args, args.dump_conflicts))
    if outcome is None:
        return status
    for d in outcome.diagnostics:
        print(f"{d.kind}: {d.message}", file=sys.stderr)
    if args.dump_conflicts:
        print(json.dumps(list(outcome.conflicts), indent=2), file=sys.stderr)
    print(serialize_outcome(outcome) if args.json else _text_outcome(outcome),
          end="" if args.json else "\n")
    return EXIT_OK if outcome.extensions else EXIT_NO_EXTENSION


def cmd_explain(args) -> int:
    theory = _load(args.kb)
    if theory is None:
        return EXIT_PARSE
    try:
        fact = parse_literal(args.fact)
    except ParseError as exc:
        print(f"error: cannot parse fact {args.fact!r}: {exc.message}", file=sys.stderr)
        return EXIT_PARSE
    outcome, status = _run(theory, _options(args))
    if outcome is None:
        return status
    trees = [explain(ext, fact) for ext in outcome.extensions]
    if args.json:
        print(json.dumps([{"extension": i, "explanation": to_dict(t)}
                          for i, t in enumerate(trees, 1)], indent=2))
    else:
        for i, t in enumerate(trees, 1):
            print(f"extension {i}:")
            print("\n".join("  " + line for line in render(t).splitlines()))
    return EXIT_OK if outcome.extensions else EXIT_NO_EXTENSION


def cmd_check(args) -> int:
    theory = _load(args.kb)
    if theory is None:
        return EXIT_PARSE
    print(f"{args.kb}: ok: {len(theory.facts)} facts, "
          f"{len(theory.disjunctive_facts)} disjunctive facts, "
          f"{len(theory.strict_rules)} strict rules, {len(theory.defaults)} defaults, "
          f"{len(theory.constants)} constants")
    return EXIT_OK


def cmd_bench(args) -> int:
    results = run_corpus(args.corpus)
    if not results:
        print(f"error: no cases found in {args.corpus}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        sys.stdout.write(results_to_json(results))
    else:
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            print(f"{mark}  {r.case.name:<22} {r.seconds * 1000:8.1f} ms  {r.case.title}")
            for f in r.failures:
                print(f"        {f}")
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} cases passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if args.command == "explain" and args.fact is None and len(extra) == 1 \
            and "(" in extra[0]:
        args.fact, extra = extra[0], []
    if extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    if args.command == "explain" and args.fact is None:
        parser.error("explain needs a fact")
    handler = {"reason": cmd_reason, "explain": cmd_explain,
               "check": cmd_check, "bench": cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
