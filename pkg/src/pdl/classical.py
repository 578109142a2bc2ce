"""Classical consequence and consistency over a support (provenance) graph.

Strict rules are Horn and chain forward with provenance.  Disjunctive facts
never chain; they only take part in satisfiability and entailment queries.
"""
from __future__ import annotations

import dataclasses
import hashlib
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .kb import (INF, DefaultInstance, DefaultTheory, DisjunctiveFact, Literal,
                 Priority, StrictRule, complement, format_order, match_all, substitute)

ASSERTED = "asserted"
STRICT = "strict"
DEFAULT = "default"


@dataclass(frozen=True)
class Support:
    """One way a fact was obtained: the rule, what it used, what it assumed."""
    rule: str
    kind: str = ASSERTED
    premises: frozenset[Literal] = frozenset()
    justifications: frozenset[Literal] = frozenset()
    order: Priority = INF
    binding: tuple = ()

    @classmethod
    def asserted(cls) -> "Support":
        return cls(rule=ASSERTED)

    @classmethod
    def strict(cls, rule: str, premises: Iterable[Literal]) -> "Support":
        return cls(rule=rule, kind=STRICT, premises=frozenset(premises))

    @classmethod
    def from_default(cls, inst: DefaultInstance) -> "Support":
        return cls(rule=inst.rule, kind=DEFAULT, premises=frozenset(inst.prerequisite),
                   justifications=frozenset(inst.justifications), order=inst.order,
                   binding=inst.binding)

    @property
    def instance_key(self) -> tuple:
        return (self.rule, self.binding)

    def sort_key(self) -> tuple:
        return (self.kind, self.rule, self.binding,
                tuple(sorted(l.sort_key() for l in self.premises)))

    def describe(self) -> str:
        if self.kind == ASSERTED:
            return "asserted"
        name = self.rule
        if self.binding:
            name += "{" + ",".join(f"{v}={c}" for v, c in self.binding) + "}"
        if self.kind == STRICT:
            return f"strict {name}"
        return f"default {name}, order {format_order(self.order)}"


@dataclass(frozen=True)
class Tombstone:
    """Blocks a default instance while every blocker literal stays present."""
    instance: tuple
    literal: Literal
    blockers: frozenset[Literal]


@dataclass(frozen=True)
class FactRecord:
    literal: Literal
    supports: frozenset[Support]
    status: str


@dataclass(frozen=True)
class ConflictCore:
    members: tuple[Union[Literal, DisjunctiveFact], ...]
    reason: str  # DEFAULT or ASSERTED

    @property
    def literals(self) -> tuple[Literal, ...]:
        return tuple(m for m in self.members if isinstance(m, Literal))


# -- propositional satisfiability ---------------------------------------------

Clause = frozenset  # of (atom, bool)


def _encode(literal: Literal) -> tuple:
    return (literal.atom, not literal.negative)


def satisfiable(clauses: Iterable[Iterable[Literal]]) -> bool:
    """DPLL over ground clauses; a negative literal is a negated atom."""
    encoded = [frozenset(_encode(l) for l in c) for c in clauses]
    if any(not c for c in encoded):
        return False
    units = [c for c in encoded if len(c) == 1]
    if len(units) == len(encoded):
        seen = {}
        for (a, v), in units:
            if seen.setdefault(a, v) != v:
                return False
        return True
    return _dpll(encoded, {})


def _dpll(clauses: list[Clause], assignment: dict) -> bool:
    assignment = dict(assignment)
    while True:
        pending = []
        unit = None
        for c in clauses:
            if any(assignment.get(a) == v for a, v in c):
                continue
            free = [(a, v) for a, v in c if a not in assignment]
            if not free:
                return False
            if len(free) == 1 and unit is None:
                unit = free[0]
            pending.append(c)
        if not pending:
            return True
        if unit is None:
            break
        assignment[unit[0]] = unit[1]
        clauses = pending
    a, v = next((a, v) for c in pending for a, v in sorted(c, key=repr)
                if a not in assignment)
    return (_dpll(pending, {**assignment, a: v})
            or _dpll(pending, {**assignment, a: not v}))


# -- reasoner state -------------------------------------------------------------

@dataclass(frozen=True)
class ReasonerState:
    """An extension candidate: facts with their supports plus bookkeeping.

    ``facts`` is treated as read-only; every operation returns a new state.
    ``removed`` keeps default conclusions that were retracted so the full
    history of default results stays reconstructible.
    """
    facts: Mapping[Literal, frozenset[Support]] = field(default_factory=dict)
    disjunctive_facts: frozenset[DisjunctiveFact] = frozenset()
    strict_rules: tuple[StrictRule, ...] = ()
    tombstones: frozenset[Tombstone] = frozenset()
    removed: frozenset[tuple[Literal, Support]] = frozenset()

    def replace(self, **changes) -> "ReasonerState":
        return dataclasses.replace(self, **changes)

    @property
    def literals(self) -> frozenset[Literal]:
        return frozenset(self.facts)

    def __contains__(self, literal: Literal) -> bool:
        return literal in self.facts

    def supports(self, literal: Literal) -> frozenset[Support]:
        return self.facts.get(literal, frozenset())

    @cached_property
    def firm(self) -> frozenset[Literal]:
        """Facts with a derivation that uses no default at all."""
        firm: set[Literal] = set()
        changed = True
        while changed:
            changed = False
            for l, sups in self.facts.items():
                if l in firm:
                    continue
                if any(s.kind != DEFAULT and s.premises <= firm for s in sups):
                    firm.add(l)
                    changed = True
        return frozenset(firm)

    def status(self, literal: Literal) -> str:
        sups = self.facts[literal]
        if any(s.kind == ASSERTED for s in sups):
            return ASSERTED
        return STRICT if literal in self.firm else DEFAULT

    def record(self, literal: Literal) -> FactRecord:
        return FactRecord(literal, self.facts[literal], self.status(literal))

    @property
    def default_conclusions(self) -> frozenset[tuple[Literal, str, Priority]]:
        return frozenset((l, s.rule, s.order) for l, sups in self.facts.items()
                         for s in sups if s.kind == DEFAULT)

    def assumed_justifications(self, min_order: Optional[Priority] = None,
                               strict: bool = False) -> frozenset[Literal]:
        """Justifications of live default supports, optionally above an order."""
        out = set()
        for sups in self.facts.values():
            for s in sups:
                if s.kind != DEFAULT:
                    continue
                if min_order is not None and (s.order <= min_order if strict
                                              else s.order < min_order):
                    continue
                out |= s.justifications
        return frozenset(out)

    @cached_property
    def has_complementary_pair(self) -> bool:
        return any(complement(l) in self.facts for l in self.facts)

    def clauses(self) -> list[tuple[Literal, ...]]:
        return [(l,) for l in self.facts] + [d.disjuncts for d in self.disjunctive_facts]

    def fingerprint(self) -> str:
        parts = []
        for l in sorted(self.facts):
            sups = sorted(str(s.sort_key()) for s in self.facts[l])
            parts.append(f"{l}<-{sups}")
        for t in sorted(self.tombstones, key=lambda t: (t.instance, t.literal.sort_key())):
            parts.append(f"T{t.instance}:{t.literal}:{sorted(map(str, t.blockers))}")
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()


def initial_state(theory: DefaultTheory) -> ReasonerState:
    """E_0: the assertions closed under strict rules."""
    facts = {l: frozenset({Support.asserted()}) for l in sorted(theory.facts)}
    state = ReasonerState(facts=facts, disjunctive_facts=theory.disjunctive_facts,
                          strict_rules=theory.strict_rules)
    return closure(state)


def _ancestors(facts: Mapping[Literal, frozenset[Support]],
               start: Iterable[Literal]) -> set[Literal]:
    seen: set[Literal] = set()
    stack = list(start)
    while stack:
        l = stack.pop()
        if l in seen:
            continue
        seen.add(l)
        for s in facts.get(l, ()):
            stack.extend(s.premises)
    return seen


def closure(state: ReasonerState) -> ReasonerState:
    """Forward-chain the strict rules to a fixpoint, recording supports.

    A support that would make a fact its own ancestor is skipped, which keeps
    the support graph acyclic.
    """
    facts = dict(state.facts)
    changed = True
    while changed:
        changed = False
        for rule in state.strict_rules:
            for binding in list(match_all(rule.body, sorted(facts))):
                head = substitute(rule.head, binding)
                premises = frozenset(substitute(b, binding) for b in rule.body)
                sup = Support.strict(rule.name, premises)
                existing = facts.get(head, frozenset())
                if sup in existing:
                    continue
                if head in _ancestors(facts, premises):
                    continue
                facts[head] = existing | {sup}
                changed = True
    if len(facts) == len(state.facts) and all(facts[l] == state.facts[l] for l in facts):
        return state
    return state.replace(facts=facts)


def _minimum_core(members: Sequence) -> tuple:
    def unsat(group) -> bool:
        return not satisfiable(m.disjuncts if isinstance(m, DisjunctiveFact) else (m,)
                               for m in group)

    if len(members) <= 12:
        for size in range(1, len(members) + 1):
            for group in itertools.combinations(members, size):
                if unsat(group):
                    return group
    core = list(members)
    for m in list(core):
        trial = [c for c in core if c != m]
        if unsat(trial):
            core = trial
    return tuple(core)


def _member_key(m) -> tuple:
    if isinstance(m, DisjunctiveFact):
        return (1, tuple(d.sort_key() for d in m.disjuncts))
    return (0, m.sort_key())


def is_consistent(state: ReasonerState) -> Optional[ConflictCore]:
    """Return ``None`` when consistent, otherwise a minimal conflict core.

    A complementary pair is preferred; failing that the smallest unsatisfiable
    subset of facts and disjunctive facts.
    """
    for l in sorted(state.facts):
        if not l.negative and complement(l) in state.facts:
            return _classify(state, (l, complement(l)))
    if not state.disjunctive_facts:
        return None
    if satisfiable(state.clauses()):
        return None
    atoms = {d.atom for df in state.disjunctive_facts for d in df.disjuncts}
    relevant = sorted([l for l in state.facts if l.atom in atoms], key=_member_key)
    relevant += sorted(state.disjunctive_facts, key=_member_key)
    return _classify(state, _minimum_core(relevant))


def _classify(state: ReasonerState, members: tuple) -> ConflictCore:
    defeasible = any(isinstance(m, Literal) and m not in state.firm for m in members)
    return ConflictCore(tuple(members), DEFAULT if defeasible else ASSERTED)


def entails(state: ReasonerState, literal: Literal) -> bool:
    """True iff every model of the state's clause set satisfies ``literal``."""
    if literal in state.facts:
        return True
    if not state.disjunctive_facts:
        return state.has_complementary_pair
    return not satisfiable(state.clauses() + [(complement(literal),)])


def assert_fact(state: ReasonerState, literal: Literal, support: Support) -> ReasonerState:
    if not literal.is_ground:
        raise ValueError(f"cannot assert non-ground literal {literal}")
    missing = [p for p in support.premises if p not in state.facts]
    if missing:
        raise ValueError(f"premises not in state: {', '.join(map(str, missing))}")
    facts = dict(state.facts)
    facts[literal] = facts.get(literal, frozenset()) | {support}
    return closure(state.replace(facts=facts))


def retract_supports(state: ReasonerState,
                     removals: Iterable[tuple[Literal, Support]]) -> ReasonerState:
    """Remove specific supports, then every fact left without a grounded one."""
    facts = {l: set(s) for l, s in state.facts.items()}
    history = set(state.removed)
    for literal, sup in removals:
        if sup.kind == ASSERTED:
            raise ValueError(f"cannot retract asserted fact {literal}")
        if literal in facts and sup in facts[literal]:
            facts[literal].discard(sup)
            if sup.kind == DEFAULT:
                history.add((literal, sup))
    grounded: set[Literal] = set()
    changed = True
    while changed:
        changed = False
        for l, sups in facts.items():
            if l not in grounded and any(s.premises <= grounded for s in sups):
                grounded.add(l)
                changed = True
    new_facts = {}
    for l, sups in facts.items():
        if l in grounded:
            new_facts[l] = frozenset(s for s in sups if s.premises <= grounded)
        else:
            history.update((l, s) for s in sups if s.kind == DEFAULT)
    out = state.replace(facts=new_facts, removed=frozenset(history))
    return closure(out)


def retract_with_consequences(
        state: ReasonerState, literal: Literal,
        kill: Callable[[Support], bool] = lambda s: True) -> ReasonerState:
    """Retract the default supports of ``literal`` selected by ``kill``.

    Consequences that lose their last grounded explanation go too; facts with
    an independent explanation survive.
    """
    if literal not in state.facts:
        raise ValueError(f"{literal} is not in the state")
    chosen = [s for s in state.facts[literal] if s.kind == DEFAULT and kill(s)]
    if not chosen:
        raise ValueError(f"{literal} has no retractable default support")
    return retract_supports(state, [(literal, s) for s in chosen])
