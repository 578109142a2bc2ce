"""Stable JSON rendering of reasoning outcomes.

Extensions are sorted by their canonical fact lists and facts by canonical
literal order, so equal outcomes always serialize to identical bytes.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .classical import Support
from .engine import Extension, ReasoningOutcome
from .kb import INF, Priority

_ORDER = {"oneOf": [{"type": "number"}, {"const": "inf"}]}

OUTCOME_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["mode", "semantics", "extensions"],
    "properties": {
        "mode": {"enum": ["credulous", "skeptical"]},
        "semantics": {"enum": ["joint", "reiter"]},
        "extensions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["facts", "trace"],
                "properties": {
                    "facts": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["literal", "status", "orders", "rules"],
                            "properties": {
                                "literal": {"type": "string"},
                                "status": {"enum": ["asserted", "strict", "default"]},
                                "orders": {"type": "array", "items": _ORDER},
                                "rules": {"type": "array", "items": {"type": "string"}},
                            },
                        },
                    },
                    "disjunctive_facts": {"type": "array", "items": {"type": "string"}},
                    "trace": {"type": "array", "items": {"type": "object"}},
                },
            },
        },
        "skeptical_core": {"type": "array", "items": {"type": "string"}},
        "diagnostics": {"type": "array", "items": {"type": "object"}},
        "conflicts": {"type": "array", "items": {"type": "object"}},
    },
}


def order_to_json(order: Priority):
    if order == INF:
        return "inf"
    frac = Fraction(order)
    return frac.numerator if frac.denominator == 1 else float(frac)


def support_label(s: Support) -> str:
    if not s.binding:
        return s.rule
    return s.rule + "{" + ",".join(f"{v}={c}" for v, c in s.binding) + "}"


def extension_to_dict(ext: Extension) -> dict:
    state = ext.state
    facts = []
    for l in sorted(state.facts):
        sups = sorted(state.facts[l], key=Support.sort_key)
        facts.append({
            "literal": str(l),
            "status": state.status(l),
            "orders": sorted({order_to_json(s.order) for s in sups},
                             key=lambda o: (o == "inf", o if o != "inf" else 0)),
            "rules": sorted({support_label(s) for s in sups}),
        })
    out: dict = {"facts": facts}
    if state.disjunctive_facts:
        out["disjunctive_facts"] = sorted(str(d) for d in state.disjunctive_facts)
    out["trace"] = [e.to_dict() for e in ext.trace]
    return out


def outcome_to_dict(outcome: ReasoningOutcome) -> dict:
    out: dict = {
        "mode": outcome.mode,
        "semantics": outcome.semantics,
        "extensions": [extension_to_dict(e) for e in outcome.extensions],
    }
    if outcome.skeptical_core is not None:
        out["skeptical_core"] = [str(l) for l in sorted(outcome.skeptical_core)]
    if outcome.diagnostics:
        out["diagnostics"] = [d.to_dict() for d in outcome.diagnostics]
    if outcome.conflicts:
        out["conflicts"] = list(outcome.conflicts)
    return out


def serialize_outcome(outcome: ReasoningOutcome) -> str:
    return json.dumps(outcome_to_dict(outcome), indent=2, ensure_ascii=False) + "\n"
