"""The logical vocabulary and its grounding over named constants.

Everything here is an immutable value.  A literal carries its own polarity, so
strong negation never needs a separate "complement class".
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Union

INF = math.inf

Priority = Union[Fraction, float]


class GroundingLimitError(Exception):
    """Raised when instantiating a default would exceed the configured cap."""

    def __init__(self, rule: str, count: int, limit: int):
        super().__init__(
            f"grounding default {rule!r} needs {count} instances (limit {limit})")
        self.rule = rule
        self.count = count
        self.limit = limit


@dataclass(frozen=True, order=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Constant, Variable]
Substitution = Mapping[Variable, Constant]


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: tuple[Term, ...]
    negative: bool = False

    @property
    def is_ground(self) -> bool:
        return all(isinstance(a, Constant) for a in self.args)

    @property
    def atom(self) -> tuple:
        return (self.predicate, self.args)

    def variables(self) -> set[Variable]:
        return {a for a in self.args if isinstance(a, Variable)}

    def sort_key(self) -> tuple:
        return (self.predicate, tuple(a.name for a in self.args), self.negative)

    def __lt__(self, other: "Literal") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        inner = ",".join(str(a) for a in self.args)
        return f"{'-' if self.negative else ''}{self.predicate}({inner})"

    def __repr__(self) -> str:
        return f"Literal<{self}>"


def lit(predicate: str, *args: str, negative: bool = False) -> Literal:
    """Build a literal from plain strings; uppercase-initial names are variables."""
    terms = tuple(Variable(a) if a[:1].isupper() or a[:1] == "_" else Constant(a)
                  for a in args)
    return Literal(predicate, terms, negative)


def complement(literal: Literal) -> Literal:
    return Literal(literal.predicate, literal.args, not literal.negative)


def substitute(literal: Literal, binding: Substitution) -> Literal:
    if not binding:
        return literal
    return Literal(literal.predicate,
                   tuple(binding.get(a, a) if isinstance(a, Variable) else a
                         for a in literal.args),
                   literal.negative)


def match(pattern: Literal, fact: Literal,
          binding: Optional[Substitution] = None) -> Optional[dict[Variable, Constant]]:
    """Return the binding extending ``binding`` that maps ``pattern`` onto ``fact``.

    ``None`` means no match.  Polarity and predicate signature must agree.
    """
    if (pattern.predicate != fact.predicate or pattern.negative != fact.negative
            or len(pattern.args) != len(fact.args)):
        return None
    out = dict(binding) if binding else {}
    for p, f in zip(pattern.args, fact.args):
        if isinstance(p, Variable):
            bound = out.get(p)
            if bound is None:
                out[p] = f
            elif bound != f:
                return None
        elif p != f:
            return None
    return out


def match_all(patterns: Iterable[Literal], facts: Iterable[Literal],
              binding: Optional[Substitution] = None) -> Iterator[dict[Variable, Constant]]:
    """Enumerate bindings that satisfy every pattern against ``facts``."""
    by_pred: dict[tuple, list[Literal]] = {}
    for f in facts:
        by_pred.setdefault((f.predicate, f.negative, len(f.args)), []).append(f)
    patterns = list(patterns)

    def walk(i: int, current: dict) -> Iterator[dict]:
        if i == len(patterns):
            yield dict(current)
            return
        pat = patterns[i]
        for f in by_pred.get((pat.predicate, pat.negative, len(pat.args)), ()):
            b = match(pat, f, current)
            if b is not None:
                yield from walk(i + 1, b)

    yield from walk(0, dict(binding) if binding else {})


@dataclass(frozen=True)
class StrictRule:
    head: Literal
    body: tuple[Literal, ...]
    name: str

    def __post_init__(self):
        body_vars = set().union(*(b.variables() for b in self.body)) if self.body else set()
        if not self.head.variables() <= body_vars:
            raise ValueError(f"unsafe strict rule {self.name}: head variables "
                             "must occur in the body")


@dataclass(frozen=True)
class DisjunctiveFact:
    disjuncts: tuple[Literal, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise ValueError("a disjunctive fact needs at least one disjunct")
        if not all(d.is_ground for d in self.disjuncts):
            raise ValueError("disjunctive facts must be ground")
        # de-duplicate, canonical order
        object.__setattr__(self, "disjuncts", tuple(sorted(set(self.disjuncts))))

    def __str__(self) -> str:
        return " | ".join(str(d) for d in self.disjuncts)


@dataclass(frozen=True)
class DefaultRule:
    name: str
    prerequisite: tuple[Literal, ...]
    justifications: tuple[Literal, ...]
    conclusions: tuple[Literal, ...]
    order: Priority = Fraction(0)

    def __post_init__(self):
        if not self.justifications or not self.conclusions:
            raise ValueError(f"default {self.name}: justifications and conclusions "
                             "must be non-empty")
        if not (isinstance(self.order, (int, Fraction)) and self.order >= 0):
            raise ValueError(f"default {self.name}: order must be a finite "
                             "non-negative number")
        object.__setattr__(self, "order", Fraction(self.order))

    def variables(self) -> list[Variable]:
        seen: dict[Variable, None] = {}
        for part in (self.prerequisite, self.justifications, self.conclusions):
            for literal in part:
                for a in literal.args:
                    if isinstance(a, Variable):
                        seen.setdefault(a, None)
        return list(seen)


@dataclass(frozen=True)
class DefaultInstance:
    """A fully ground default; identity is the parent name plus the binding."""
    rule: str
    binding: tuple[tuple[str, str], ...]
    prerequisite: tuple[Literal, ...]
    justifications: tuple[Literal, ...]
    conclusions: tuple[Literal, ...]
    order: Priority

    @property
    def key(self) -> tuple:
        return (self.rule, self.binding)

    def label(self) -> str:
        if not self.binding:
            return self.rule
        return self.rule + "{" + ",".join(f"{v}={c}" for v, c in self.binding) + "}"

    def sort_key(self) -> tuple:
        return (-self.order, self.rule, self.binding)


@dataclass(frozen=True)
class DefaultTheory:
    facts: frozenset[Literal] = frozenset()
    disjunctive_facts: frozenset[DisjunctiveFact] = frozenset()
    strict_rules: tuple[StrictRule, ...] = ()
    defaults: tuple[DefaultRule, ...] = ()
    constants: frozenset[Constant] = field(default=frozenset())

    def __post_init__(self):
        for f in self.facts:
            if not f.is_ground:
                raise ValueError(f"fact {f} is not ground")
        names = [r.name for r in self.strict_rules] + [d.name for d in self.defaults]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate rule names: {sorted(dup)}")
        object.__setattr__(self, "constants",
                           frozenset(self.constants) | _mentioned_constants(self))


def _mentioned_constants(theory: DefaultTheory) -> set[Constant]:
    literals: list[Literal] = list(theory.facts)
    for d in theory.disjunctive_facts:
        literals.extend(d.disjuncts)
    for r in theory.strict_rules:
        literals.append(r.head)
        literals.extend(r.body)
    for d in theory.defaults:
        literals.extend(d.prerequisite + d.justifications + d.conclusions)
    return {a for l in literals for a in l.args if isinstance(a, Constant)}


def instantiate(rule: DefaultRule, binding: Substitution) -> DefaultInstance:
    return DefaultInstance(
        rule=rule.name,
        binding=tuple(sorted((v.name, c.name) for v, c in binding.items())),
        prerequisite=tuple(substitute(l, binding) for l in rule.prerequisite),
        justifications=tuple(substitute(l, binding) for l in rule.justifications),
        conclusions=tuple(substitute(l, binding) for l in rule.conclusions),
        order=rule.order,
    )


def ground_defaults(theory: DefaultTheory,
                    max_instances: int = 100_000) -> tuple[DefaultInstance, ...]:
    """Instantiate every default over the theory's named constants.

    Variables range over named individuals only, never invented ones, so the
    result is finite.  Variables that do not occur in the prerequisite range
    over the whole domain as well.
    """
    constants = sorted(theory.constants)
    out: list[DefaultInstance] = []
    for rule in theory.defaults:
        variables = rule.variables()
        count = len(constants) ** len(variables) if variables else 1
        if len(out) + count > max_instances:
            raise GroundingLimitError(rule.name, count, max_instances)
        for values in itertools.product(constants, repeat=len(variables)):
            out.append(instantiate(rule, dict(zip(variables, values))))
    return tuple(out)


def format_order(order: Priority) -> str:
    if order == INF:
        return "inf"
    frac = Fraction(order)
    if frac.denominator == 1:
        return str(frac.numerator)
    d = frac.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{frac.numerator}/{frac.denominator}"
    places = max(twos, fives)
    scaled = frac * 10 ** places
    digits = str(scaled.numerator).rjust(places + 1, "0")
    return (digits[:-places] + "." + digits[-places:]).rstrip("0")
