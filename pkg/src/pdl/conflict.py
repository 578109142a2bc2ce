"""Conflict trees and min-max selection of the cheapest cause to defeat.

A statement node is defeated once every one of its explanation sets is
broken; an explanation set breaks at its cheapest member, or directly when it
is a default application.  Costs are therefore the smallest priority level at
which the statement can be defeated.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

from .classical import (ASSERTED, DEFAULT, ConflictCore, ReasonerState, Support,
                        retract_supports)
from .kb import INF, DisjunctiveFact, Literal, Priority, format_order

MAX_PLANS_PER_TARGET = 16


class UnresolvableConflict(Exception):
    """Every cause of the conflict is an assertion or a strict consequence of one."""

    def __init__(self, core: ConflictCore):
        super().__init__("conflict between " + ", ".join(map(str, core.members))
                         + " cannot be resolved by retracting defaults")
        self.core = core


@dataclass(eq=False)
class StatementNode:
    statement: Union[Literal, DisjunctiveFact]
    own_order: Priority
    explanations: tuple["ExplanationSetNode", ...]
    asserted: bool


@dataclass(eq=False)
class ExplanationSetNode:
    support: Support
    value: Priority
    children: tuple[StatementNode, ...]


@dataclass(eq=False)
class ConflictTree:
    core: ConflictCore
    children: tuple[StatementNode, ...]


@dataclass(frozen=True)
class RemovalPlan:
    target: Literal
    cuts: frozenset[tuple[Literal, Support]]
    cost: Priority

    def sort_key(self) -> tuple:
        return (self.target.sort_key(),
                sorted((l.sort_key(), s.sort_key()) for l, s in self.cuts))


def build_conflict_tree(state: ReasonerState, core: ConflictCore) -> ConflictTree:
    """Unfold the support graph below each member of the core.

    Node identity is by fact: a statement shared by several derivations is one
    node object reachable along several paths.
    """
    memo: dict[Literal, StatementNode] = {}

    def statement(l: Literal) -> StatementNode:
        if l in memo:
            return memo[l]
        sups = sorted(state.supports(l), key=Support.sort_key)
        if not sups or any(s.kind == ASSERTED for s in sups):
            node = StatementNode(l, INF, (), True)
        else:
            default_orders = [s.order for s in sups if s.kind == DEFAULT]
            own = min(default_orders) if len(default_orders) == len(sups) else INF
            sets = tuple(
                ExplanationSetNode(s, s.order if s.kind == DEFAULT else INF,
                                   tuple(statement(p) for p in sorted(s.premises)))
                for s in sups)
            node = StatementNode(l, own, sets, False)
        memo[l] = node
        return node

    children = []
    for m in core.members:
        if isinstance(m, DisjunctiveFact):
            children.append(StatementNode(m, INF, (), True))
        else:
            children.append(statement(m))
    return ConflictTree(core, tuple(children))


def node_cost(node: Union[StatementNode, ExplanationSetNode],
              _memo: dict | None = None) -> Priority:
    memo = {} if _memo is None else _memo
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, ExplanationSetNode):
        cost = min([node.value] + [node_cost(c, memo) for c in node.children])
    elif node.asserted or not node.explanations:
        cost = INF
    else:
        cost = max(node_cost(e, memo) for e in node.explanations)
    memo[key] = cost
    return cost


def tree_cost(tree: ConflictTree) -> Priority:
    return min((node_cost(c) for c in tree.children), default=INF)


def _cut_options(node: StatementNode, memo: dict) -> list[frozenset]:
    per_set: list[list[frozenset]] = []
    for e in node.explanations:
        # break each set at its cheapest member; the direct cut wins a tie
        cost = node_cost(e, memo)
        if e.support.kind == DEFAULT and e.value == cost:
            per_set.append([frozenset({(node.statement, e.support)})])
            continue
        opts: list[frozenset] = []
        for child in e.children:
            if node_cost(child, memo) == cost:
                opts.extend(_cut_options(child, memo))
        per_set.append(opts)
    combos: list[frozenset] = []
    seen = set()
    for pick in itertools.product(*per_set):
        cut = frozenset().union(*pick)
        if cut not in seen:
            seen.add(cut)
            combos.append(cut)
        if len(combos) >= MAX_PLANS_PER_TARGET:
            break
    return combos


def analyze(tree: ConflictTree) -> list[RemovalPlan]:
    """Pick the cheapest root statements and the cuts that defeat them.

    Ties are never broken silently: each tied alternative becomes a plan.
    """
    memo: dict = {}
    costs = [node_cost(c, memo) for c in tree.children]
    best = min(costs, default=INF)
    if best == INF:
        raise UnresolvableConflict(tree.core)
    plans: list[RemovalPlan] = []
    seen = set()
    for child, cost in zip(tree.children, costs):
        if cost != best:
            continue
        for cut in _cut_options(child, memo):
            if cut in seen:
                continue
            seen.add(cut)
            plans.append(RemovalPlan(child.statement, cut, best))
    return sorted(plans, key=RemovalPlan.sort_key)


def execute_plan(state: ReasonerState, plan: RemovalPlan) -> ReasonerState:
    return retract_supports(state, sorted(plan.cuts, key=lambda c: (c[0].sort_key(),
                                                                   c[1].sort_key())))


def _order_json(order: Priority):
    return "inf" if order == INF else format_order(order)


def tree_to_dict(tree: ConflictTree) -> dict:
    """Debug export giving the order and cost of every node."""
    memo: dict = {}

    def statement(node: StatementNode) -> dict:
        return {
            "kind": "statement",
            "literal": str(node.statement),
            "order": _order_json(node.own_order),
            "cost": _order_json(node_cost(node, memo)),
            "explanations": [explanation(e) for e in node.explanations],
        }

    def explanation(e: ExplanationSetNode) -> dict:
        return {
            "kind": "explanation",
            "rule": e.support.rule,
            "order": _order_json(e.value),
            "cost": _order_json(node_cost(e, memo)),
            "children": [statement(c) for c in e.children],
        }

    return {
        "kind": "conflict",
        "reason": tree.core.reason,
        "members": [str(m) for m in tree.core.members],
        "children": [statement(c) for c in tree.children],
    }
