"""Forward-chaining evaluation of parsed rules against a knowledge base."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..exceptions import TypeMismatch, UnboundBuiltInArg
from ..kb import KnowledgeBase, value_key
from .builtins import GENERATOR, EvalContext, default_registry
from .syntax import ClassAtom, PropertyAtom, Rule, Var, term_value


@dataclass
class AnnotationReport:
    iterations: int = 0
    facts_added: int = 0
    per_pass: list = field(default_factory=list)
    firings: dict = field(default_factory=dict)
    conflicts: list = field(default_factory=list)


def _value(term, binding):
    if isinstance(term, Var):
        return binding.get(term.name)
    return term_value(term)


def _bind(binding, term, value):
    """Extend ``binding`` so ``term`` equals ``value``; None when inconsistent."""
    if isinstance(term, Var):
        current = binding.get(term.name)
        if current is None:
            out = dict(binding)
            out[term.name] = value
            return out
        return binding if current == value else None
    return binding if term_value(term) == value else None


def _class_matches(kb, atom, binding):
    v = _value(atom.term, binding)
    if v is not None:
        if isinstance(v, str) and kb.has_class(v, atom.cls):
            yield binding
        return
    for ind in kb.individuals_of(atom.cls):
        yield _bind(binding, atom.term, ind)


def _property_matches(kb, atom, binding):
    s = _value(atom.subject, binding)
    if s is not None:
        if not isinstance(s, str):
            return
        pairs = [(s, o) for o in kb.objects_of(s, atom.prop)]
        pairs += [(s, v) for v in kb.values_of(s, atom.prop)]
    else:
        pairs = kb.object_pairs(atom.prop) + kb.data_pairs(atom.prop)
    for subj, obj in pairs:
        b = _bind(binding, atom.subject, subj)
        if b is not None:
            b = _bind(b, atom.object, obj)
            if b is not None:
                yield b


def _builtin_matches(atom, binding, registry, ctx):
    entry = registry.resolve(atom.name)
    vals = [_value(t, binding) for t in atom.args]
    if entry.kind == GENERATOR:
        if any(v is None for v in vals[1:]):
            raise UnboundBuiltInArg(f"{atom.name}: input arguments must be bound")
        for out in ctx.call_generator(entry, tuple(vals[1:])):
            b = _bind(binding, atom.args[0], out)
            if b is not None:
                yield b
        return
    unbound = [str(t) for t, v in zip(atom.args, vals) if v is None]
    if unbound:
        raise UnboundBuiltInArg(f"{atom.name}: argument(s) {', '.join(unbound)} unbound")
    if entry.fn(ctx, *vals):
        yield binding


def match_antecedent(kb: KnowledgeBase, rule: Rule, registry=None, context=None) -> list:
    """All bindings satisfying the antecedent, sorted by bound values."""
    registry = registry or default_registry()
    ctx = context or EvalContext(kb)
    partial = [{}]
    for atom in rule.antecedent:
        nxt = []
        for b in partial:
            if isinstance(atom, ClassAtom):
                nxt.extend(_class_matches(kb, atom, b))
            elif isinstance(atom, PropertyAtom):
                nxt.extend(_property_matches(kb, atom, b))
            else:
                nxt.extend(_builtin_matches(atom, b, registry, ctx))
        partial = nxt
        if not partial:
            return []
    names = sorted({k for b in partial for k in b})
    unique = {tuple(b[n] for n in names): b for b in partial}
    return [unique[k] for k in sorted(unique, key=lambda t: tuple(map(value_key, t)))]


def _ground(term, binding):
    v = _value(term, binding)
    if v is None:
        raise UnboundBuiltInArg(f"consequent term {term} is unbound")
    return v


def instantiate(kb: KnowledgeBase, consequent, binding) -> int:
    added = 0
    for atom in consequent:
        if isinstance(atom, ClassAtom):
            ind = _ground(atom.term, binding)
            if not isinstance(ind, str):
                raise TypeMismatch(f"cannot assert class {atom.cls} of literal {ind!r}")
            added += kb.assert_class(ind, atom.cls)
        elif isinstance(atom, PropertyAtom):
            s, o = _ground(atom.subject, binding), _ground(atom.object, binding)
            if not isinstance(s, str):
                raise TypeMismatch(f"property {atom.prop} subject must be an individual, got {s!r}")
            if isinstance(o, str):
                added += kb.assert_object(s, atom.prop, o)
            else:
                added += kb.assert_data(s, atom.prop, o)
        else:
            raise TypeMismatch(f"built-in {atom.name} cannot be asserted")
    return added


def run_fixpoint(kb: KnowledgeBase, rules, registry=None, context=None,
                 report: AnnotationReport | None = None, on_pass=None,
                 max_passes: int = 10_000) -> AnnotationReport:
    """Apply ``rules`` in order, pass after pass, until a pass adds nothing.

    ``on_pass(pass_number, kb)`` is called after every pass.
    """
    registry = registry or default_registry()
    ctx = context or EvalContext(kb)
    report = report or AnnotationReport()
    start = kb.fact_count()
    for rule in rules:
        report.firings.setdefault(rule.label, 0)
    for _ in range(max_passes):
        before = kb.fact_count()
        for rule in rules:
            try:
                bindings = match_antecedent(kb, rule, registry, ctx)
            except UnboundBuiltInArg as exc:
                raise UnboundBuiltInArg(f"rule {rule.label}: {exc}") from exc
            for b in bindings:
                if instantiate(kb, rule.consequent, b):
                    report.firings[rule.label] += 1
        gained = kb.fact_count() - before
        report.per_pass.append(gained)
        report.iterations += 1
        if on_pass is not None:
            on_pass(report.iterations, kb)
        if gained == 0:
            break
    else:
        raise RuntimeError(f"no fixpoint after {max_passes} passes")
    report.facts_added += kb.fact_count() - start
    return report
