"""In-memory knowledge base: class taxonomy, individuals and property facts.

Facts are sets. Class membership queries follow the transitive subclass
closure; no other description-logic inference is performed. Names that are
used before being declared are declared implicitly.

Text dump format, one fact per line::

    declare <Class>                 # class not mentioned by any other line
    property <prop>                 # declared property
    subclass <Child> <Parent>
    class <individual> <Class>
    obj <subject> <prop> <object>
    data <subject> <prop> <value>   # decimal real or "double-quoted text"
"""
from __future__ import annotations

import json
import math
import re
from collections import defaultdict
from dataclasses import dataclass
from numbers import Real

from .exceptions import CycleError, ParseError, TypeMismatch

_NAME = re.compile(r"^\S+$")
DECIMALS = 6


@dataclass(frozen=True, order=True)
class Text:
    """A text literal, kept distinct from individual names."""

    value: str

    def __str__(self):
        return self.value


def check_name(name) -> str:
    if not isinstance(name, str) or not _NAME.match(name):
        raise ValueError(f"invalid name {name!r}: must be non-empty without whitespace")
    return name


def normalize_value(value):
    """Data values are quantized reals or :class:`Text`."""
    if isinstance(value, Text):
        return value
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeMismatch(f"data value must be a real number or Text, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise TypeMismatch(f"data value must be finite, got {v}")
    return round(v, DECIMALS) + 0.0


def value_key(value):
    """Total order over names, numbers and text used for deterministic output."""
    if isinstance(value, Text):
        return (2, value.value)
    if isinstance(value, str):
        return (0, value)
    return (1, value)


def format_number(v: float) -> str:
    s = f"{v:.{DECIMALS}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def format_value(value) -> str:
    if isinstance(value, Text):
        return json.dumps(value.value, ensure_ascii=False)
    return format_number(value)


class KnowledgeBase:
    def __init__(self):
        self._parents = defaultdict(set)
        self._classes = set()
        self._properties = set()
        self._members = defaultdict(set)
        self._types = defaultdict(set)
        self._obj = set()
        self._obj_sp = defaultdict(set)
        self._obj_p = defaultdict(set)
        self._data = set()
        self._data_sp = defaultdict(set)
        self._data_p = defaultdict(set)
        self._sub_cache = {}

    # -- schema -------------------------------------------------------------

    def declare_class(self, name, parent=None) -> None:
        check_name(name)
        if parent is None:
            self._classes.add(name)
            return
        check_name(parent)
        if parent in self._parents.get(name, ()):
            return
        if name == parent or name in self.superclasses(parent):
            raise CycleError(f"{name} subClassOf {parent} would create a cycle")
        self._classes.update((name, parent))
        self._parents[name].add(parent)
        self._sub_cache.clear()

    def declare_property(self, name) -> None:
        self._properties.add(check_name(name))

    @property
    def classes(self) -> list:
        return sorted(self._classes)

    @property
    def properties(self) -> list:
        return sorted(self._properties)

    def parents(self, cls) -> list:
        return sorted(self._parents.get(cls, ()))

    def children(self, cls) -> list:
        return sorted(c for c, ps in self._parents.items() if cls in ps)

    def superclasses(self, cls) -> set:
        """``cls`` and all its transitive superclasses."""
        seen, stack = {cls}, [cls]
        while stack:
            for p in self._parents.get(stack.pop(), ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def subclasses(self, cls) -> frozenset:
        """``cls`` and all its transitive subclasses."""
        cached = self._sub_cache.get(cls)
        if cached is None:
            down = defaultdict(set)
            for c, ps in self._parents.items():
                for p in ps:
                    down[p].add(c)
            seen, stack = {cls}, [cls]
            while stack:
                for c in down.get(stack.pop(), ()):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
            cached = self._sub_cache[cls] = frozenset(seen)
        return cached

    def is_subclass(self, cls, ancestor) -> bool:
        return ancestor in self.superclasses(cls)

    # -- assertions ---------------------------------------------------------

    def assert_class(self, individual, cls) -> bool:
        check_name(individual)
        check_name(cls)
        if cls in self._types.get(individual, ()):
            return False
        self._classes.add(cls)
        self._types[individual].add(cls)
        self._members[cls].add(individual)
        return True

    def assert_object(self, subj, prop, obj) -> bool:
        fact = (check_name(subj), check_name(prop), check_name(obj))
        if fact in self._obj:
            return False
        self._properties.add(prop)
        self._obj.add(fact)
        self._obj_sp[subj, prop].add(obj)
        self._obj_p[prop].add((subj, obj))
        return True

    def assert_data(self, subj, prop, value) -> bool:
        value = normalize_value(value)
        fact = (check_name(subj), check_name(prop), value)
        if fact in self._data:
            return False
        self._properties.add(prop)
        self._data.add(fact)
        self._data_sp[subj, prop].add(value)
        self._data_p[prop].add((subj, value))
        return True

    def retract_class(self, individual, cls) -> bool:
        if cls not in self._types.get(individual, ()):
            return False
        self._types[individual].discard(cls)
        self._members[cls].discard(individual)
        return True

    # -- queries ------------------------------------------------------------

    def individuals_of(self, cls) -> list:
        out = set()
        for c in self.subclasses(cls):
            out |= self._members.get(c, set())
        return sorted(out)

    def has_class(self, individual, cls) -> bool:
        return any(cls in self.superclasses(c) for c in self._types.get(individual, ()))

    def asserted_classes(self, individual) -> list:
        return sorted(self._types.get(individual, ()))

    def classes_of(self, individual) -> list:
        out = set()
        for c in self._types.get(individual, ()):
            out |= self.superclasses(c)
        return sorted(out)

    def values_of(self, individual, prop) -> list:
        return sorted(self._data_sp.get((individual, prop), ()), key=value_key)

    def value(self, individual, prop, default=None):
        """The single (smallest) value of a data property, or ``default``."""
        vals = self.values_of(individual, prop)
        return vals[0] if vals else default

    def objects_of(self, subj, prop) -> list:
        return sorted(self._obj_sp.get((subj, prop), ()))

    def subjects_of(self, prop, obj) -> list:
        return sorted(s for s, o in self._obj_p.get(prop, ()) if o == obj)

    def object_pairs(self, prop) -> list:
        return sorted(self._obj_p.get(prop, ()))

    def data_pairs(self, prop) -> list:
        return sorted(self._data_p.get(prop, ()), key=lambda sv: (sv[0], value_key(sv[1])))

    def has_object(self, subj, prop, obj) -> bool:
        return (subj, prop, obj) in self._obj

    def has_data(self, subj, prop, value) -> bool:
        try:
            return (subj, prop, normalize_value(value)) in self._data
        except TypeMismatch:
            return False

    @property
    def individuals(self) -> list:
        out = {i for i, cs in self._types.items() if cs}
        out |= {s for s, _, _ in self._obj} | {o for _, _, o in self._obj}
        out |= {s for s, _, _ in self._data}
        return sorted(out)

    def class_facts(self) -> set:
        return {(i, c) for i, cs in self._types.items() for c in cs}

    def fact_set(self) -> frozenset:
        """Every assertion as a tagged tuple (schema excluded)."""
        facts = {("class",) + f for f in self.class_facts()}
        facts |= {("obj",) + f for f in self._obj}
        facts |= {("data",) + f for f in self._data}
        return frozenset(facts)

    def fact_count(self) -> int:
        return sum(len(cs) for cs in self._types.values()) + len(self._obj) + len(self._data)

    def schema(self) -> tuple:
        edges = frozenset((c, p) for c, ps in self._parents.items() for p in ps)
        return frozenset(self._classes), frozenset(self._properties), edges

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return self.schema() == other.schema() and self.fact_set() == other.fact_set()

    __hash__ = None

    def copy(self) -> "KnowledgeBase":
        return load(dump(self))

    # -- serialization ------------------------------------------------------

    def dump(self) -> str:
        return dump(self)

    @classmethod
    def load(cls, text) -> "KnowledgeBase":
        return load(text)


def dump(kb: KnowledgeBase) -> str:
    edges = sorted((c, p) for c, ps in kb._parents.items() for p in ps)
    classes_in_facts = {c for cs in kb._types.values() for c in cs}
    mentioned = {c for e in edges for c in e} | classes_in_facts
    used_props = {p for _, p, _ in kb._obj} | {p for _, p, _ in kb._data}

    lines = [f"declare {c}" for c in sorted(kb._classes - mentioned)]
    lines += [f"property {p}" for p in sorted(kb._properties - used_props)]
    lines += [f"subclass {c} {p}" for c, p in edges]
    lines += sorted(f"class {i} {c}" for i, c in kb.class_facts())
    lines += sorted(f"obj {s} {p} {o}" for s, p, o in kb._obj)
    lines += sorted(f"data {s} {p} {format_value(v)}" for s, p, v in kb._data)
    return "".join(line + "\n" for line in lines)


def parse_value(token: str, lineno=None):
    token = token.strip()
    if token.startswith('"'):
        try:
            s = json.loads(token)
        except json.JSONDecodeError:
            raise ParseError(f"malformed text literal {token}", lineno) from None
        if not isinstance(s, str):
            raise ParseError(f"malformed text literal {token}", lineno)
        return Text(s)
    try:
        return normalize_value(float(token))
    except (ValueError, TypeMismatch):
        raise ParseError(f"invalid data value {token!r}", lineno) from None


_ARITY = {"declare": 1, "property": 1, "subclass": 2, "class": 2, "obj": 3}


def load(text: str) -> KnowledgeBase:
    kb = KnowledgeBase()
    # split on newlines only: text literals may hold other line separators
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind = line.split(None, 1)[0]
        if kind == "data":
            parts = line.split(None, 3)
            if len(parts) != 4:
                raise ParseError("data line needs subject, property and value", lineno)
            _, s, p, v = parts
            kb.assert_data(s, p, parse_value(v, lineno))
            continue
        if kind not in _ARITY:
            raise ParseError(f"unknown line kind {kind!r}", lineno)
        parts = line.split()
        if len(parts) != _ARITY[kind] + 1:
            raise ParseError(f"{kind} line needs {_ARITY[kind]} field(s)", lineno)
        args = parts[1:]
        try:
            if kind == "declare":
                kb.declare_class(args[0])
            elif kind == "property":
                kb.declare_property(args[0])
            elif kind == "subclass":
                kb.declare_class(args[0], args[1])
            elif kind == "class":
                kb.assert_class(args[0], args[1])
            else:
                kb.assert_object(*args)
        except CycleError as exc:
            raise ParseError(str(exc), lineno) from exc
    return kb
