"""Reader and writer for the ``.bdl`` knowledge-base format.

Grammar::

    fact        := literal "."
    disj_fact   := literal ("|" literal)+ "."
    strict_rule := literal ":-" literal ("," literal)* "."
    default     := "default" NAME ("[" "order" "=" NUMBER "]")? ":" prereq ":" justifs "/" concls "."
    prereq      := "true" | literal ("," literal)*
    justifs     := literal ("," literal)*
    concls      := literal ("," literal)*
    literal     := "-"? NAME "(" term ("," term)* ")"
    term        := NAME | VARNAME

Lowercase-initial names are constants, uppercase-initial names variables.
``#`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .kb import (Constant, DefaultRule, DefaultTheory, DisjunctiveFact, Literal,
                 StrictRule, Variable, format_order)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, token: str = ""):
        super().__init__(f"{span}: {message}" + (f" (got {token!r})" if token else ""))
        self.message = message
        self.span = span
        self.token = token


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>:-|[:().,|/\[\]=-])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1, pos, pos + 1)
        if m is None:
            raise ParseError("unexpected character", span, text[pos])
        kind = m.lastgroup
        value = m.group()
        span = SourceSpan(line, pos - line_start + 1, pos, m.end())
        if kind == "ws":
            newlines = value.count("\n")
            if newlines:
                line += newlines
                line_start = pos + value.rindex("\n") + 1
        else:
            tokens.append(Token(value if kind == "punct" else kind, value, span))
        pos = m.end()
    end = SourceSpan(line, pos - line_start + 1, pos, pos)
    tokens.append(Token("eof", "", end))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            raise ParseError(f"expected {what}", self.tok.span, self.tok.text)
        return self.advance()

    def expect_colon(self, what: str) -> None:
        # "true :-man(X)" lexes as ":-"; inside a default that is ":" then "-"
        if self.tok.kind == ":-":
            t = self.tok
            s = t.span
            self.tokens[self.i] = Token("-", "-", SourceSpan(s.line, s.column + 1,
                                                             s.start + 1, s.end))
            return
        self.expect(":", what)

    # -- literals ---------------------------------------------------------
    def literal(self) -> Literal:
        negative = False
        if self.tok.kind == "-":
            self.advance()
            negative = True
        name = self.expect("name", "a predicate name")
        self.expect("(", f"'(' after predicate {name.text!r}")
        args = [self.term()]
        while self.tok.kind == ",":
            self.advance()
            args.append(self.term())
        self.expect(")", "')' closing the argument list")
        return Literal(name.text, tuple(args), negative)

    def term(self):
        t = self.tok
        if t.kind == "name":
            self.advance()
            return Constant(t.text)
        if t.kind == "var":
            self.advance()
            return Variable(t.text)
        raise ParseError("expected a term (constant or variable)", t.span, t.text)

    def literal_list(self) -> list[Literal]:
        out = [self.literal()]
        while self.tok.kind == ",":
            self.advance()
            out.append(self.literal())
        return out

    # -- statements -------------------------------------------------------
    def default(self) -> DefaultRule:
        start = self.advance()  # "default"
        name = self.expect("name", "a default rule name")
        order = Fraction(0)
        if self.tok.kind == "[":
            self.advance()
            key = self.expect("name", "'order' inside brackets")
            if key.text != "order":
                raise ParseError("expected 'order' inside brackets", key.span, key.text)
            self.expect("=", "'=' after order")
            num = self.expect("number", "a numeric order")
            order = Fraction(Decimal(num.text))
            self.expect("]", "']' closing the order")
        self.expect_colon("':' before the prerequisite")
        if self.tok.kind == "name" and self.tok.text == "true" and self.peek().kind != "(":
            self.advance()
            prereq: list[Literal] = []
        else:
            prereq = self.literal_list()
        self.expect_colon("':' between prerequisite and justifications")
        justifs = self.literal_list()
        self.expect("/", "'/' between justifications and conclusions")
        concls = self.literal_list()
        self.expect(".", "'.' ending the default rule")
        try:
            return DefaultRule(name.text, tuple(prereq), tuple(justifs), tuple(concls), order)
        except ValueError as exc:
            raise ParseError(str(exc), start.span, name.text) from None

    def parse(self) -> DefaultTheory:
        facts: list[Literal] = []
        disjunctions: list[DisjunctiveFact] = []
        rules: list[StrictRule] = []
        defaults: list[DefaultRule] = []
        seen_names: dict[str, Token] = {}
        while self.tok.kind != "eof":
            start = self.tok
            if start.kind == "name" and start.text == "default" and self.peek().kind == "name":
                name_tok = self.peek()
                d = self.default()
                if d.name in seen_names:
                    raise ParseError(f"duplicate rule name {d.name!r}", name_tok.span, d.name)
                seen_names[d.name] = name_tok
                defaults.append(d)
                continue
            head = self.literal()
            if self.tok.kind == ".":
                self.advance()
                if not head.is_ground:
                    raise ParseError("facts must be ground", start.span, str(head))
                facts.append(head)
            elif self.tok.kind == "|":
                parts = [head]
                while self.tok.kind == "|":
                    self.advance()
                    parts.append(self.literal())
                self.expect(".", "'.' ending the disjunctive fact")
                if not all(p.is_ground for p in parts):
                    raise ParseError("disjunctive facts must be ground", start.span,
                                     str(next(p for p in parts if not p.is_ground)))
                disjunctions.append(DisjunctiveFact(tuple(parts)))
            elif self.tok.kind == ":-":
                self.advance()
                body = self.literal_list()
                self.expect(".", "'.' ending the strict rule")
                body_vars = set().union(*(b.variables() for b in body))
                unsafe = head.variables() - body_vars
                if unsafe:
                    raise ParseError("unsafe variable in rule head",
                                     start.span, sorted(v.name for v in unsafe)[0])
                rules.append(StrictRule(head, tuple(body), f"s#{len(rules) + 1}"))
            else:
                raise ParseError("expected '.', '|' or ':-' after literal",
                                 self.tok.span, self.tok.text)
        return DefaultTheory(facts=frozenset(facts),
                             disjunctive_facts=frozenset(disjunctions),
                             strict_rules=tuple(rules),
                             defaults=tuple(defaults))


def parse_kb(text: str) -> DefaultTheory:
    """Parse knowledge-base text; the first error raises :class:`ParseError`."""
    return _Parser(text).parse()


def parse_literal(text: str, ground: bool = True) -> Literal:
    p = _Parser(text)
    literal = p.literal()
    if p.tok.kind == ".":
        p.advance()
    if p.tok.kind != "eof":
        raise ParseError("trailing input after literal", p.tok.span, p.tok.text)
    if ground and not literal.is_ground:
        raise ParseError("expected a ground literal", p.tokens[0].span, text)
    return literal


def _lits(literals) -> str:
    return ", ".join(str(l) for l in literals)


def format_theory(theory: DefaultTheory) -> str:
    """Pretty-print a theory in the grammar accepted by :func:`parse_kb`."""
    lines = [f"{f}." for f in sorted(theory.facts)]
    lines += [f"{d}." for d in sorted(theory.disjunctive_facts, key=lambda d: d.disjuncts)]
    lines += [f"{r.head} :- {_lits(r.body)}." for r in theory.strict_rules]
    for d in theory.defaults:
        prereq = _lits(d.prerequisite) if d.prerequisite else "true"
        lines.append(f"default {d.name} [order={format_order(d.order)}]: {prereq} : "
                     f"{_lits(d.justifications)} / {_lits(d.conclusions)}.")
    return "\n".join(lines) + ("\n" if lines else "")
