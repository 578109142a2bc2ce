"""Explanation paths for facts in an extension, and for facts missing from it."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .classical import ASSERTED, DEFAULT, STRICT, Support
from typing import TYPE_CHECKING

from .kb import (Constant, DefaultTheory, Literal, Variable, format_order,
                 instantiate, match_all, substitute)

if TYPE_CHECKING:
    from . import engine as _engine


@dataclass(frozen=True)
class Derivation:
    support: Support
    premises: tuple["ExplanationTree", ...]


@dataclass(frozen=True)
class ExplanationTree:
    literal: Literal
    asserted: bool
    derivations: tuple[Derivation, ...] = ()


@dataclass(frozen=True)
class NotPresent:
    literal: Literal
    removals: tuple["_engine.TraceEvent", ...] = ()


def explain(ext: "_engine.Extension", literal: Literal) -> Union[ExplanationTree, NotPresent]:
    """Unfold every support of ``literal`` down to asserted facts.

    For an absent literal the trace events that removed it are reported.
    """
    state = ext.state
    if literal not in state.facts:
        return NotPresent(literal, tuple(e for e in ext.trace if literal in e.removed))
    memo: dict[Literal, ExplanationTree] = {}

    def unfold(l: Literal, path: frozenset) -> ExplanationTree:
        if l in memo:
            return memo[l]
        sups = sorted(state.supports(l), key=Support.sort_key)
        if any(s.kind == ASSERTED for s in sups):
            node = ExplanationTree(l, True)
        else:
            derivations = tuple(
                Derivation(s, tuple(unfold(p, path | {l}) for p in sorted(s.premises)))
                for s in sups if not (s.premises & (path | {l})))
            node = ExplanationTree(l, False, derivations)
        memo[l] = node
        return node

    return unfold(literal, frozenset())


def _label(s: Support) -> str:
    if not s.binding:
        return s.rule
    return s.rule + "{" + ",".join(f"{v}={c}" for v, c in s.binding) + "}"


def _text(tree: ExplanationTree, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if tree.asserted:
        lines.append(f"{pad}{tree.literal} (asserted)")
        return
    lines.append(f"{pad}{tree.literal}")
    for d in tree.derivations:
        s = d.support
        if s.kind == DEFAULT:
            head = f"<- default {_label(s)}, order {format_order(s.order)}"
            assumed = ", ".join(str(j) for j in sorted(s.justifications))
            head += f"; assuming {assumed}"
        else:
            head = f"<- strict {_label(s)}"
        if not d.premises:
            head += "; no prerequisite"
        lines.append(f"{pad}  {head}")
        for p in d.premises:
            _text(p, indent + 2, lines)


def to_dict(tree: Union[ExplanationTree, NotPresent]) -> dict:
    if isinstance(tree, NotPresent):
        return {"literal": str(tree.literal), "present": False,
                "removed_by": [e.to_dict() for e in tree.removals]}
    if tree.asserted:
        return {"literal": str(tree.literal), "present": True, "asserted": True}
    out = {"literal": str(tree.literal), "present": True, "asserted": False,
           "derivations": []}
    for d in tree.derivations:
        s = d.support
        entry = {"rule": _label(s), "kind": s.kind}
        if s.kind == DEFAULT:
            entry["order"] = format_order(s.order)
            entry["justifications"] = [str(j) for j in sorted(s.justifications)]
        entry["premises"] = [to_dict(p) for p in d.premises]
        out["derivations"].append(entry)
    return out


def render(tree: Union[ExplanationTree, NotPresent], fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_dict(tree), indent=2)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(tree, NotPresent):
        if not tree.removals:
            return f"{tree.literal} is not present"
        lines = [f"{tree.literal} is not present; it was removed"]
        for e in tree.removals:
            what = {"conflict": "by conflict resolution",
                    "justification": "because a justification was violated",
                    "reduce": "while deferring lower-priority conclusions",
                    "apply": "during expansion"}.get(e.kind, e.kind)
            line = f"  at step {e.step} {what}"
            if e.rules:
                line += f" (rules: {', '.join(e.rules)})"
            if e.cause:
                line += f"; caused by {', '.join(map(str, e.cause))}"
            lines.append(line)
        return "\n".join(lines)
    lines: list[str] = []
    _text(tree, 0, lines)
    return "\n".join(lines)


def replays(tree: ExplanationTree, theory: DefaultTheory) -> bool:
    """Check that every derivation step re-derives its node from its children."""
    rules = {r.name: r for r in theory.strict_rules}
    defaults = {d.name: d for d in theory.defaults}

    def ok(node: ExplanationTree) -> bool:
        if node.asserted:
            return node.literal in theory.facts
        if not node.derivations:
            return False
        for d in node.derivations:
            s = d.support
            premises = frozenset(p.literal for p in d.premises)
            if premises != s.premises:
                return False
            if s.kind == STRICT:
                rule = rules.get(s.rule)
                if rule is None or not any(
                        substitute(rule.head, b) == node.literal
                        and frozenset(substitute(x, b) for x in rule.body) == premises
                        for b in match_all(rule.body, premises)):
                    return False
            elif s.kind == DEFAULT:
                rule = defaults.get(s.rule)
                if rule is None:
                    return False
                inst = instantiate(rule, {Variable(v): Constant(c) for v, c in s.binding})
                if node.literal not in inst.conclusions or \
                        frozenset(inst.prerequisite) != premises:
                    return False
            if not all(ok(p) for p in d.premises):
                return False
        return True

    return ok(tree)

