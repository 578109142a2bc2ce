"""Prioritized default logic reasoning with explanations."""
from .classical import ReasonerState, Support, closure, entails, is_consistent
from .engine import (EngineOptions, Extension, ReasoningOutcome, check_extension,
                     compute_extensions)
from .explain import explain, render
from .kb import (Constant, DefaultRule, DefaultTheory, DisjunctiveFact, Literal,
                 StrictRule, Variable, complement, ground_defaults, lit, match)
from .parser import ParseError, format_theory, parse_kb, parse_literal
from .serialize import outcome_to_dict, serialize_outcome

__all__ = [
    "Constant", "DefaultRule", "DefaultTheory", "DisjunctiveFact", "EngineOptions",
    "Extension", "Literal", "ParseError", "ReasonerState", "ReasoningOutcome",
    "StrictRule", "Support", "Variable", "check_extension", "closure", "complement",
    "compute_extensions", "entails", "explain", "format_theory", "ground_defaults",
    "is_consistent", "lit", "match", "outcome_to_dict", "parse_kb", "parse_literal",
    "render", "serialize_outcome",
]
