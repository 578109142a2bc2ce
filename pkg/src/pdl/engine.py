"""The reasoning loop that turns a default theory into its extensions.

Each branch first restores consistency by priority-driven conflict
resolution and drops supports whose justification no longer holds; only a
clean state takes an expansion step.  An expansion step
first defers lower-priority default conclusions that block a higher-priority
default's justification, then applies every applicable default at once.
Branches fork on tied conflict plans and on mutually exclusive justifications.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .classical import (ASSERTED, DEFAULT, ConflictCore, ReasonerState, Support,
                        Tombstone, closure, entails, initial_state, is_consistent,
                        retract_supports, satisfiable)
from .conflict import (UnresolvableConflict, analyze, build_conflict_tree,
                       execute_plan, tree_to_dict)
from .kb import (DefaultInstance, DefaultTheory, Literal, Priority, complement,
                 ground_defaults)

log = logging.getLogger(__name__)

CREDULOUS, SKEPTICAL = "credulous", "skeptical"
JOINT, REITER = "joint", "reiter"

# subsets of one priority level are enumerated exhaustively up to this size
_MAX_EXCLUSIVE_GROUP = 14


class EngineError(Exception):
    def __init__(self, message: str, trace: Sequence["TraceEvent"] = ()):
        super().__init__(message)
        self.trace = tuple(trace)


class StepLimitError(EngineError):
    pass


class BranchLimitError(EngineError):
    pass


@dataclass(frozen=True)
class EngineOptions:
    mode: str = CREDULOUS
    semantics: str = JOINT
    max_steps: int = 1000
    max_branches: int = 64
    max_ground_instances: int = 100_000
    record_conflicts: bool = False

    def __post_init__(self):
        if self.mode not in (CREDULOUS, SKEPTICAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.semantics not in (JOINT, REITER):
            raise ValueError(f"unknown semantics {self.semantics!r}")


@dataclass(frozen=True)
class TraceEvent:
    step: int
    kind: str  # apply | conflict | justification | reduce
    rules: tuple[str, ...] = ()
    added: tuple[Literal, ...] = ()
    removed: tuple[Literal, ...] = ()
    cause: tuple[Literal, ...] = ()

    def to_dict(self) -> dict:
        out = {"step": self.step, "event": self.kind, "rules": list(self.rules)}
        if self.added:
            out["added"] = [str(l) for l in self.added]
        if self.removed:
            out["removed"] = [str(l) for l in self.removed]
        if self.cause:
            out["cause"] = [str(l) for l in self.cause]
        return out


@dataclass(frozen=True)
class Violation:
    literal: Literal
    support: Support
    cause: tuple[Literal, ...]


@dataclass(frozen=True)
class Extension:
    state: ReasonerState
    trace: tuple[TraceEvent, ...] = ()

    @property
    def facts(self) -> frozenset[Literal]:
        return self.state.literals

    def by_status(self) -> dict[str, list[Literal]]:
        out: dict[str, list[Literal]] = {}
        for l in sorted(self.facts):
            out.setdefault(self.state.status(l), []).append(l)
        return out

    def explain(self, literal: Literal):
        from .explain import explain
        return explain(self, literal)


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # cycle | unresolvable
    message: str
    trace: tuple[TraceEvent, ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message,
                "trace": [e.to_dict() for e in self.trace]}


@dataclass(frozen=True)
class ReasoningOutcome:
    mode: str
    semantics: str
    extensions: tuple[Extension, ...]
    skeptical_core: Optional[frozenset[Literal]] = None
    diagnostics: tuple[Diagnostic, ...] = ()
    conflicts: tuple[dict, ...] = ()
    theory: Optional[DefaultTheory] = field(default=None, compare=False)


# -- the individual operations --------------------------------------------------

def _blocked(state: ReasonerState, inst: DefaultInstance) -> bool:
    return any(t.instance == inst.key for t in state.tombstones)


def _prerequisite_holds(state: ReasonerState, inst: DefaultInstance) -> bool:
    # prerequisites must be facts so that the support can cite them
    return all(p in state.facts for p in inst.prerequisite)


def _units(literals: Iterable[Literal]) -> list[tuple[Literal, ...]]:
    return [(l,) for l in literals]


def _joint_ok(state: ReasonerState, justifications: Iterable[Literal],
              order: Priority, extra: Iterable[Literal] = ()) -> bool:
    assumed = state.assumed_justifications(min_order=order)
    return satisfiable(state.clauses() + _units(assumed) + _units(extra)
                       + _units(justifications))


def applicable_instances(state: ReasonerState, instances: Iterable[DefaultInstance],
                         semantics: str = JOINT) -> list[DefaultInstance]:
    """Instances whose prerequisite holds and whose justifications are open.

    Under joint semantics the justifications must also be satisfiable together
    with those already assumed by defaults of equal or higher priority, and an
    instance that lost a conflict stays blocked while the winner is present.
    """
    out = []
    for inst in instances:
        if not _prerequisite_holds(state, inst):
            continue
        if any(entails(state, complement(j)) for j in inst.justifications):
            continue
        if all(entails(state, c) for c in inst.conclusions):
            continue
        if semantics == JOINT:
            if _blocked(state, inst):
                continue
            if not _joint_ok(state, inst.justifications, inst.order):
                continue
        out.append(inst)
    return sorted(out, key=DefaultInstance.sort_key)


def extension_select(state: ReasonerState, instances: Iterable[DefaultInstance],
                     semantics: str = JOINT) -> ReasonerState:
    """Defer default conclusions that block a higher-priority default.

    For every instance whose prerequisite holds but one of whose
    justifications is contradicted by a purely default-derived fact of lower
    priority, that fact and whatever rests on it is withdrawn.  The next
    expansion may re-derive it; priorities then decide what survives.
    """
    removals: dict[tuple[Literal, Support], None] = {}
    for inst in sorted(instances, key=DefaultInstance.sort_key):
        if not _prerequisite_holds(state, inst):
            continue
        if all(c in state.facts for c in inst.conclusions):
            continue
        if semantics == JOINT and _blocked(state, inst):
            continue
        for j in inst.justifications:
            c = complement(j)
            sups = state.supports(c)
            if sups and all(s.kind == DEFAULT and s.order < inst.order for s in sups):
                for s in sorted(sups, key=Support.sort_key):
                    removals[(c, s)] = None
    if not removals:
        return state
    return _refresh_tombstones(retract_supports(state, list(removals)))


def execute_defaults(state: ReasonerState, chosen: Iterable[DefaultInstance]) -> ReasonerState:
    """Assert every conclusion of every chosen instance, then re-close."""
    facts = dict(state.facts)
    changed = False
    for inst in chosen:
        sup = Support.from_default(inst)
        for c in inst.conclusions:
            existing = facts.get(c, frozenset())
            if sup not in existing:
                facts[c] = existing | {sup}
                changed = True
    if not changed:
        return state
    return closure(state.replace(facts=facts))


def _violation(state: ReasonerState, literal: Literal, sup: Support,
               semantics: str) -> Optional[tuple[Literal, ...]]:
    violators = tuple(sorted(complement(j) for j in sup.justifications
                             if entails(state, complement(j))))
    if violators:
        return violators
    if semantics == JOINT:
        higher = state.assumed_justifications(min_order=sup.order, strict=True)
        if not satisfiable(state.clauses() + _units(higher) + _units(sup.justifications)):
            clash = sorted(h for h in higher if complement(h) in sup.justifications)
            return tuple(clash or sorted(higher))
    return None


def justification_check(state: ReasonerState, semantics: str = JOINT) -> list[Violation]:
    """Default supports whose justification the current state contradicts."""
    out = []
    for l in sorted(state.facts):
        for s in sorted(state.facts[l], key=Support.sort_key):
            if s.kind != DEFAULT:
                continue
            cause = _violation(state, l, s, semantics)
            if cause is not None:
                out.append(Violation(l, s, cause))
    return out


def _exclusive_choices(state: ReasonerState, apps: Sequence[DefaultInstance],
                       semantics: str) -> list[tuple[DefaultInstance, ...]]:
    """Split the applicable set into jointly consistent alternatives.

    Higher priority levels are decided first; within a level every maximal
    consistent subset is an alternative.
    """
    if semantics != JOINT or not apps:
        return [tuple(apps)]
    levels: dict[Priority, list[DefaultInstance]] = {}
    for inst in apps:
        levels.setdefault(inst.order, []).append(inst)
    candidates: list[tuple[DefaultInstance, ...]] = [()]
    for order in sorted(levels, reverse=True):
        group = levels[order]
        nxt = []
        for cand in candidates:
            extra = [j for inst in cand for j in inst.justifications]

            def ok(subset) -> bool:
                js = [j for inst in subset for j in inst.justifications]
                return _joint_ok(state, js, order, extra)

            usable = [g for g in group if ok((g,))]
            if ok(usable):
                nxt.append(cand + tuple(usable))
                continue
            if len(usable) > _MAX_EXCLUSIVE_GROUP:
                greedy: list[DefaultInstance] = []
                for g in usable:
                    if ok(greedy + [g]):
                        greedy.append(g)
                nxt.append(cand + tuple(greedy))
                continue
            maximal: list[frozenset] = []
            for size in range(len(usable), 0, -1):
                for subset in itertools.combinations(usable, size):
                    s = frozenset(subset)
                    if any(s < m for m in maximal):
                        continue
                    if ok(subset):
                        maximal.append(s)
            for subset in maximal or [frozenset()]:
                nxt.append(cand + tuple(sorted(subset, key=DefaultInstance.sort_key)))
        candidates = nxt
    return candidates


def _refresh_tombstones(state: ReasonerState) -> ReasonerState:
    live = frozenset(t for t in state.tombstones if t.blockers <= state.literals)
    return state if live == state.tombstones else state.replace(tombstones=live)


def _expansions(state: ReasonerState, instances: Sequence[DefaultInstance],
                semantics: str, step: int = 0
                ) -> list[tuple[ReasonerState, tuple[TraceEvent, ...]]]:
    """Successor states of one expansion step; empty at a fixed point.

    The step runs on the reduced state first.  If that only restores what the
    reduction withdrew, it runs again on the unreduced state so a default whose
    prerequisite was withdrawn is not starved.
    """
    reduced = extension_select(state, instances, semantics)
    bases = (reduced, state) if reduced is not state else (state,)
    for base in bases:
        results = []
        withdrawn = tuple(sorted(state.literals - base.literals))
        for choice in _exclusive_choices(base, applicable_instances(base, instances,
                                                                    semantics), semantics):
            nxt = _refresh_tombstones(execute_defaults(base, choice))
            if nxt.literals == state.literals:
                continue
            events: tuple[TraceEvent, ...] = ()
            if withdrawn:
                events += (TraceEvent(step, "reduce", (), (), withdrawn),)
            events += (TraceEvent(step, "apply", tuple(i.label() for i in choice),
                                  tuple(sorted(nxt.literals - base.literals)),
                                  tuple(sorted(base.literals - nxt.literals))),)
            results.append((nxt, events))
        if results:
            return results
    return []


def is_fixed_point(state: ReasonerState, instances: Sequence[DefaultInstance],
                   semantics: str = JOINT) -> bool:
    """True when neither a check nor an expansion step would change the state."""
    if is_consistent(state) is not None:
        return False
    if justification_check(state, semantics):
        return False
    return not _expansions(state, instances, semantics)


def _challengers(state: ReasonerState, instances: Sequence[DefaultInstance]
                 ) -> list[DefaultInstance]:
    """Instances kept out of a fixed point only by defeasible facts.

    Without priorities an earlier default can win merely by firing first;
    applying such an instance anyway lets conflict resolution try the
    alternative where it wins instead.
    """
    firm = state.firm
    out = []
    for inst in instances:
        if not _prerequisite_holds(state, inst):
            continue
        if all(c in state.facts for c in inst.conclusions):
            continue
        blockers = [complement(j) for j in inst.justifications
                    if complement(j) in state.facts]
        if not blockers or any(b in firm for b in blockers):
            continue
        if any(complement(c) in firm for c in inst.conclusions):
            continue
        if any(entails(state, complement(j)) and complement(j) not in state.facts
               for j in inst.justifications):
            continue
        out.append(inst)
    return sorted(out, key=DefaultInstance.sort_key)


def _challenge(state: ReasonerState, inst: DefaultInstance) -> list[ReasonerState]:
    """Defeat the facts blocking ``inst`` at their cheapest cause, then apply it.

    Applying the instance next to its blockers would only see it withdrawn
    again before anything that could defeat them gets a chance to fire.
    """
    states = [state]
    for j in inst.justifications:
        blocker = complement(j)
        nxt_states = []
        for s in states:
            if blocker not in s.facts:
                nxt_states.append(s)
                continue
            try:
                plans = analyze(build_conflict_tree(s, ConflictCore((blocker,), DEFAULT)))
            except UnresolvableConflict:
                continue
            nxt_states.extend(execute_plan(s, plan) for plan in plans)
        states = nxt_states
    return [execute_defaults(s, [inst]) for s in states
            if _prerequisite_holds(s, inst)]


def _resolve_violations(state: ReasonerState, viols: list[Violation],
                        semantics: str) -> list[list[Violation]]:
    """Decide which violated supports to retract, forking when it is a choice.

    A violation that survives retraction of all the others is retracted
    outright.  When every violation depends on another one, the lowest
    priority support goes first; ties fork.
    """
    unconditional = []
    for v in viols:
        others = [(o.literal, o.support) for o in viols if o != v]
        trial = retract_supports(state, others) if others else state
        if v.support in trial.supports(v.literal) and \
                _violation(trial, v.literal, v.support, semantics) is not None:
            unconditional.append(v)
    if unconditional:
        return [unconditional]
    lowest = min(v.support.order for v in viols)
    return [[v] for v in viols if v.support.order == lowest]


# -- the control loop ------------------------------------------------------------

@dataclass
class BranchNode:
    state: ReasonerState
    trace: tuple[TraceEvent, ...] = ()
    path: frozenset[str] = frozenset()
    steps: int = 0


def _support_label(s: Support) -> str:
    if not s.binding:
        return s.rule
    return s.rule + "{" + ",".join(f"{v}={c}" for v, c in s.binding) + "}"


def _removed_event(step: int, kind: str, before: ReasonerState, after: ReasonerState,
                   rules: Iterable[str], cause: Iterable[Literal]) -> TraceEvent:
    return TraceEvent(step, kind, tuple(rules), (),
                      tuple(sorted(before.literals - after.literals)),
                      tuple(sorted(set(cause))))


def _conflict_successors(node: BranchNode, core: ConflictCore, semantics: str,
                         conflicts: Optional[list]) -> list[BranchNode]:
    state = node.state
    tree = build_conflict_tree(state, core)
    if conflicts is not None:
        conflicts.append(tree_to_dict(tree))
    plans = analyze(tree)
    out = []
    for plan in plans:
        nxt = execute_plan(state, plan)
        if semantics == JOINT:
            blockers = frozenset(m for m in core.literals if m != plan.target)
            stones = {Tombstone(s.instance_key, l, blockers) for l, s in plan.cuts}
            nxt = nxt.replace(tombstones=nxt.tombstones | stones)
        nxt = _refresh_tombstones(nxt)
        rules = sorted(_support_label(s) for _, s in plan.cuts)
        event = _removed_event(node.steps, "conflict", state, nxt, rules, core.literals)
        out.append(BranchNode(nxt, node.trace + (event,)))
    return out


def compute_extensions(theory: DefaultTheory,
                       options: EngineOptions = EngineOptions()) -> ReasoningOutcome:
    """Enumerate the extensions of ``theory`` by exploring every branch."""
    instances = ground_defaults(theory, options.max_ground_instances)
    semantics = options.semantics
    conflicts: Optional[list] = [] if options.record_conflicts else None
    stack = [BranchNode(initial_state(theory))]
    seen: set[str] = set()
    found: dict[frozenset, Extension] = {}
    diagnostics: list[Diagnostic] = []
    branches = 1

    while stack:
        node = stack.pop()
        fp = node.state.fingerprint()
        if fp in node.path:
            diagnostics.append(Diagnostic(
                "cycle", "state revisited; a default keeps defeating itself",
                node.trace))
            continue
        if fp in seen:
            continue
        seen.add(fp)
        if node.steps >= options.max_steps:
            raise StepLimitError(f"branch exceeded {options.max_steps} steps", node.trace)
        state = node.state
        path = node.path | {fp}
        successors: list[BranchNode]

        core = is_consistent(state)
        if core is not None:
            try:
                if core.reason == ASSERTED:
                    raise UnresolvableConflict(core)
                successors = _conflict_successors(node, core, semantics, conflicts)
            except UnresolvableConflict as exc:
                diagnostics.append(Diagnostic("unresolvable", str(exc), node.trace))
                continue
        else:
            viols = justification_check(state, semantics)
            if viols:
                successors = []
                for group in _resolve_violations(state, viols, semantics):
                    nxt = _refresh_tombstones(retract_supports(
                        state, [(v.literal, v.support) for v in group]))
                    event = _removed_event(
                        node.steps, "justification", state, nxt,
                        sorted(_support_label(v.support) for v in group),
                        [c for v in group for c in v.cause])
                    successors.append(BranchNode(nxt, node.trace + (event,)))
            else:
                expansions = _expansions(state, instances, semantics, node.steps)
                if not expansions:
                    found.setdefault(state.literals, Extension(state, node.trace))
                    if semantics != REITER:
                        continue
                    # challengers start a fresh path: falling back to this
                    # extension is a known outcome, not a cycle
                    successors = []
                    for inst in _challengers(state, instances):
                        for nxt in _challenge(state, inst):
                            event = TraceEvent(node.steps, "apply", (inst.label(),),
                                               tuple(sorted(nxt.literals - state.literals)),
                                               tuple(sorted(state.literals - nxt.literals)))
                            successors.append(BranchNode(nxt, node.trace + (event,)))
                    path = frozenset()
                else:
                    successors = [BranchNode(nxt, node.trace + events)
                                  for nxt, events in expansions]

        # successors that land on explored states are not new branches, but
        # one closing a loop on this path must still be popped to report it
        successors = [s for s in successors
                      if s.state.fingerprint() not in seen or s.state.fingerprint() in path]
        branches += max(0, len(successors) - 1)
        if branches > options.max_branches:
            raise BranchLimitError(f"more than {options.max_branches} branches", node.trace)
        for s in reversed(successors):
            s.path = path
            s.steps = node.steps + 1
            stack.append(s)

    extensions = tuple(sorted(found.values(),
                              key=lambda e: [l.sort_key() for l in sorted(e.facts)]))
    core_facts = None
    if options.mode == SKEPTICAL:
        core_facts = (frozenset.intersection(*(e.facts for e in extensions))
                      if extensions else frozenset())
    return ReasoningOutcome(options.mode, semantics, extensions, core_facts,
                            tuple(diagnostics), tuple(conflicts or ()), theory)


# -- extension properties ------------------------------------------------------------

def check_extension(theory: DefaultTheory, ext: Extension,
                    semantics: str = JOINT,
                    instances: Optional[Sequence[DefaultInstance]] = None) -> list[str]:
    """Check the four extension properties; returns human-readable violations."""
    problems = []
    state = ext.state
    if instances is None:
        instances = ground_defaults(theory)
    missing = theory.facts - state.literals
    if missing or not theory.disjunctive_facts <= state.disjunctive_facts:
        problems.append(f"assertions missing: {sorted(map(str, missing))}")
    if closure(state).literals != state.literals:
        problems.append("not closed under strict rules")
    if is_consistent(state) is not None:
        problems.append("inconsistent")
    apps = applicable_instances(state, instances, semantics)
    if apps:
        problems.append(f"applicable defaults remain: {[i.label() for i in apps]}")
    grounded: set[Literal] = set()
    changed = True
    while changed:
        changed = False
        for l, sups in state.facts.items():
            if l not in grounded and any(s.premises <= grounded for s in sups):
                grounded.add(l)
                changed = True
    ungrounded = state.literals - grounded
    if ungrounded:
        problems.append(f"facts without an explanation: {sorted(map(str, ungrounded))}")
    for l, sups in state.facts.items():
        for s in sups:
            if s.kind == ASSERTED and l not in theory.facts:
                problems.append(f"{l} claims to be asserted")
    return problems
