"""Rule AST, parser and pretty-printer for the SWRL-style rule language.

Grammar::

    ruleset := { line }
    line    := comment | blank | [label ":"] rule
    rule    := atoms ("→" | "->") atoms
    atoms   := atom { "^" atom }
    atom    := name "(" term { "," term } ")"
    term    := "?" ident | number | quoted-text | name
    name    := [prefix ":"] ident
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Union

from ..exceptions import ArityError, RuleSyntaxError, SafetyError
from ..kb import Text

ARROWS = ("→", "->")


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return f"?{self.name}"


@dataclass(frozen=True)
class Const:
    """An individual (or class) name used as a term."""

    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Txt:
    value: str

    def __str__(self):
        return json.dumps(self.value, ensure_ascii=False)


Term = Union[Var, Const, Num, Txt]


@dataclass(frozen=True)
class ClassAtom:
    cls: str
    term: Term

    @property
    def terms(self):
        return (self.term,)

    def __str__(self):
        return f"{self.cls}({self.term})"


@dataclass(frozen=True)
class PropertyAtom:
    prop: str
    subject: Term
    object: Term

    @property
    def terms(self):
        return (self.subject, self.object)

    def __str__(self):
        return f"{self.prop}({self.subject}, {self.object})"


@dataclass(frozen=True)
class BuiltInAtom:
    name: str
    args: tuple

    @property
    def terms(self):
        return self.args

    def __str__(self):
        return f"{self.name}({', '.join(map(str, self.args))})"


Atom = Union[ClassAtom, PropertyAtom, BuiltInAtom]


@dataclass(frozen=True)
class Rule:
    label: str
    antecedent: tuple
    consequent: tuple

    def variables(self):
        seen = []
        for atom in self.antecedent + self.consequent:
            for t in atom.terms:
                if isinstance(t, Var) and t not in seen:
                    seen.append(t)
        return seen

    def __str__(self):
        return format_rule(self)


def term_value(term):
    """Ground value of a non-variable term."""
    if isinstance(term, Const):
        return term.name
    if isinstance(term, Num):
        return term.value
    if isinstance(term, Txt):
        return Text(term.value)
    raise TypeError(f"{term} is a variable")


def format_rule(rule: Rule, with_label: bool = True) -> str:
    body = " ^ ".join(map(str, rule.antecedent)) + " → " + " ^ ".join(map(str, rule.consequent))
    return f"{rule.label}: {body}" if with_label and rule.label else body


# -- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>→|->)
  | (?P<var>\?[A-Za-z0-9_]+)
  | (?P<num>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?(?![A-Za-z0-9_:]))
  | (?P<text>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z0-9_]+)
  | (?P<punct>[(),^:])
""", re.VERBOSE)


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", pos, "a rule token")
        kind = m.lastgroup
        if kind != "ws":
            value = m.group(kind)
            out.append((kind if kind != "punct" else value, value, pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, registry):
        self.toks = _tokenize(text)
        self.i = 0
        self.registry = registry

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind, expected=None):
        tok = self.peek()
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise RuleSyntaxError(f"unexpected {shown!r}", tok[2], expected or kind)
        self.i += 1
        return tok

    def name(self):
        first = self.take("ident", "a predicate name")[1]
        if self.peek()[0] == ":":
            self.i += 1
            return f"{first}:{self.take('ident', 'a name after the prefix')[1]}"
        return first

    def term(self):
        kind, value, pos = self.peek()
        if kind == "var":
            self.i += 1
            return Var(value[1:])
        if kind == "num":
            self.i += 1
            return Num(float(value))
        if kind == "text":
            self.i += 1
            return Txt(json.loads(value))
        if kind == "ident":
            return Const(self.name())
        raise RuleSyntaxError(f"unexpected {value or 'end of input'!r}", pos, "a term")

    def atom(self):
        start = self.peek()[2]
        name = self.name()
        self.take("(", "'('")
        terms = [self.term()]
        while self.peek()[0] == ",":
            self.i += 1
            terms.append(self.term())
        self.take(")", "',' or ')'")
        entry = self.registry.resolve(name) if self.registry is not None else None
        if entry is not None:
            if len(terms) != entry.arity:
                raise ArityError(f"built-in {entry.name} takes {entry.arity} arguments, got {len(terms)}")
            return BuiltInAtom(entry.name, tuple(terms))
        if len(terms) == 1:
            return ClassAtom(name, terms[0])
        if len(terms) == 2:
            return PropertyAtom(name, terms[0], terms[1])
        raise ArityError(f"{name}/{len(terms)} at column {start + 1} is neither a class, "
                         "a property nor a registered built-in")

    def atoms(self):
        out = [self.atom()]
        while self.peek()[0] == "^":
            self.i += 1
            out.append(self.atom())
        return tuple(out)

    def rule(self, label):
        ante = self.atoms()
        self.take("arrow", "'→' or '->'")
        cons = self.atoms()
        self.take("eof", "'^' or end of rule")
        return Rule(label, ante, cons)


def check_safety(rule: Rule) -> Rule:
    bound = {t for a in rule.antecedent for t in a.terms if isinstance(t, Var)}
    for atom in rule.consequent:
        if isinstance(atom, BuiltInAtom):
            raise SafetyError(f"rule {rule.label!r}: built-in {atom.name} may not appear in a consequent")
        for t in atom.terms:
            if isinstance(t, Var) and t not in bound:
                raise SafetyError(f"rule {rule.label!r}: consequent variable {t} is not bound "
                                  "by the antecedent")
    return rule


def _default_registry():
    from .builtins import default_registry
    return default_registry()


def parse_rule(text: str, registry=None, label: str = "") -> Rule:
    if registry is None:
        registry = _default_registry()
    return check_safety(_Parser(text, registry).rule(label))


_LABEL = re.compile(r"^\s*([A-Za-z0-9_]+)\s*:(.*)$", re.S)


def split_label(line: str, registry=None):
    """Separate an optional ``label:`` prefix from a rule line.

    A leading ``word:`` is a namespace prefix rather than a label when
    ``word`` is a namespace known to the registry.
    """
    m = _LABEL.match(line)
    if not m:
        return None, line
    word, rest = m.group(1), m.group(2)
    namespaces = registry.namespaces() if registry is not None else set()
    if word in namespaces:
        return None, line
    return word, rest


def parse_ruleset(text: str, registry=None) -> list:
    if registry is None:
        registry = _default_registry()
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        label, body = split_label(s, registry)
        try:
            rules.append(parse_rule(body, registry, label or f"r{lineno}"))
        except RuleSyntaxError as exc:
            raise RuleSyntaxError(str(exc), line=lineno) from exc
        except (SafetyError, ArityError) as exc:
            raise type(exc)(f"line {lineno}: {exc}") from exc
    return rules


def format_ruleset(rules) -> str:
    return "".join(format_rule(r) + "\n" for r in rules)
