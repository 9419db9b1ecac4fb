import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontodetect.exceptions import TypeMismatch, UnboundBuiltInArg
from ontodetect.kb import KnowledgeBase, Text
from ontodetect.rules import (
    EvalContext,
    GENERATOR,
    PREDICATE,
    BuiltInRegistry,
    match_antecedent,
    parse_rule,
    parse_ruleset,
    run_fixpoint,
)

from oracles import kb_facts, load_facts, naive_fixpoint, random_program, rule_text

UNCLE = "hasParent(?x1,?x2)^hasBrother(?x2,?x3) → hasUncle(?x1,?x3)"


def family(*pairs):
    kb = KnowledgeBase()
    for s, p, o in pairs:
        kb.assert_object(s, p, o)
    return kb


def test_match_single_binding():
    kb = family(("a", "hasParent", "b"), ("b", "hasBrother", "c"))
    assert match_antecedent(kb, parse_rule(UNCLE)) == [{"x1": "a", "x2": "b", "x3": "c"}]


def test_match_empty_kb():
    assert match_antecedent(KnowledgeBase(), parse_rule(UNCLE)) == []


def test_match_two_chains_sorted():
    kb = family(("z", "hasParent", "m"), ("a", "hasParent", "b"),
                ("m", "hasBrother", "n"), ("b", "hasBrother", "c"))
    got = match_antecedent(kb, parse_rule(UNCLE))
    assert got == [{"x1": "a", "x2": "b", "x3": "c"}, {"x1": "z", "x2": "m", "x3": "n"}]


def test_fixpoint_uncle():
    kb = family(("a", "hasParent", "b"), ("b", "hasBrother", "c"))
    before = kb.fact_set()
    report = run_fixpoint(kb, [parse_rule(UNCLE)])
    assert kb.fact_set() - before == {("obj", "a", "hasUncle", "c")}
    assert report.iterations == 2 and report.per_pass == [1, 0] and report.facts_added == 1


def test_fixpoint_no_rules():
    report = run_fixpoint(KnowledgeBase(), [])
    assert report.iterations == 1 and report.facts_added == 0


def test_transitive_closure_matches_reachability():
    rnd = random.Random(5)
    nodes = [f"n{i}" for i in range(10)]
    edges = {(rnd.choice(nodes), rnd.choice(nodes)) for _ in range(15)}
    kb = KnowledgeBase()
    for s, o in edges:
        kb.assert_object(s, "edge", o)
    rules = parse_ruleset("edge(?x, ?y) → path(?x, ?y)\npath(?x, ?y) ^ edge(?y, ?z) → path(?x, ?z)\n")
    run_fixpoint(kb, rules)
    # Warshall on an adjacency matrix
    idx = {n: i for i, n in enumerate(nodes)}
    reach = [[False] * 10 for _ in range(10)]
    for s, o in edges:
        reach[idx[s]][idx[o]] = True
    for k in range(10):
        for i in range(10):
            for j in range(10):
                reach[i][j] = reach[i][j] or (reach[i][k] and reach[k][j])
    expected = {(nodes[i], nodes[j]) for i in range(10) for j in range(10) if reach[i][j]}
    assert set(kb.object_pairs("path")) == expected


def test_class_atoms_follow_subclasses():
    kb = KnowledgeBase()
    kb.declare_class("Student", "Person")
    kb.assert_class("ann", "Student")
    run_fixpoint(kb, [parse_rule("Person(?x) → Agent(?x)")])
    assert kb.has_class("ann", "Agent")


def test_data_literals_in_rules():
    kb = KnowledgeBase()
    kb.assert_data("m", "height", 7.2)
    kb.assert_data("n", "height", 6)
    kb.assert_data("t", "name", Text("x"))
    rules = parse_ruleset(
        "height(?x, ?h) ^ swrlb:moreThan(?h, 6) → Mast(?x)\n"
        "height(?x, 6) → Six(?x)\n"
        'name(?x, "x") → Named(?x)\n'
        "Mast(?x) → tag(?x, 1.5)\n"
    )
    run_fixpoint(kb, rules)
    assert kb.individuals_of("Mast") == ["m"]
    assert kb.individuals_of("Six") == ["n"]
    assert kb.individuals_of("Named") == ["t"]
    assert kb.values_of("m", "tag") == [1.5]


def test_comparisons():
    kb = KnowledgeBase()
    for name, v in (("a", 7.2), ("b", 6.0)):
        kb.assert_data(name, "h", v)
    got = {}
    for op in ("moreThan", "greaterThan", "lessThan", "greaterThanOrEqual", "lessThanOrEqual", "equal"):
        rule = parse_rule(f"h(?x, ?v) ^ swrlb:{op}(?v, 6) → C(?x)")
        got[op] = sorted(b["x"] for b in match_antecedent(kb, rule))
    assert got == {"moreThan": ["a"], "greaterThan": ["a"], "lessThan": [],
                   "greaterThanOrEqual": ["a", "b"], "lessThanOrEqual": ["b"], "equal": ["b"]}


def test_comparison_type_mismatch():
    kb = KnowledgeBase()
    kb.assert_data("a", "h", Text("tall"))
    with pytest.raises(TypeMismatch):
        run_fixpoint(kb, [parse_rule("h(?x, ?v) ^ swrlb:moreThan(?v, 6) → C(?x)")])


def test_unbound_builtin_argument_names_rule():
    kb = KnowledgeBase()
    kb.assert_class("a", "P")
    rules = parse_ruleset("bad: swrlb:lessThan(?v, 3) ^ h(?x, ?v) → C(?x)\n")
    kb.assert_data("a", "h", 1)
    with pytest.raises(UnboundBuiltInArg, match="rule bad"):
        run_fixpoint(kb, rules)


def test_generator_memoized_and_first_argument_only():
    calls = []

    def gen(ctx, n):
        calls.append(n)
        return [f"item{i}" for i in range(int(n))]

    reg = BuiltInRegistry()
    reg.register("ext:Items", 2, GENERATOR, gen)
    reg.register("ext:Odd", 1, PREDICATE, lambda ctx, x: x.endswith(("1", "3")))
    kb = KnowledgeBase()
    kb.assert_data("s", "count", 4)
    rules = parse_ruleset(
        "count(?s, ?n) ^ ext:Items(?i, ?n) → has(?s, ?i)\n"
        "has(?s, ?i) ^ ext:Odd(?i) → Odd(?i)\n", reg)
    ctx = EvalContext(kb)
    report = run_fixpoint(kb, rules, reg, ctx)
    assert calls == [4.0]
    assert kb.objects_of("s", "has") == ["item0", "item1", "item2", "item3"]
    assert kb.individuals_of("Odd") == ["item1", "item3"]
    again = run_fixpoint(kb, rules, reg, ctx)
    assert again.facts_added == 0 and calls == [4.0]
    assert report.firings == {"r1": 4, "r2": 2}


def test_report_counts_every_fact():
    kb = family(("a", "p", "b"))
    rules = parse_ruleset("p(?x, ?y) → q(?x, ?y) ^ C(?x) ^ D(?y)\n")
    report = run_fixpoint(kb, rules)
    assert report.facts_added == 3 and sum(report.per_pass) == 3


def test_on_pass_hook_sees_each_pass():
    kb = family(("a", "p", "b"), ("b", "p", "c"), ("c", "p", "d"))
    rules = parse_ruleset("p(?x, ?y) → t(?x, ?y)\nt(?x, ?y) ^ p(?y, ?z) → t(?x, ?z)\n")
    seen = []
    run_fixpoint(kb, rules, on_pass=lambda n, k: seen.append((n, k.fact_count())))
    assert [n for n, _ in seen] == list(range(1, len(seen) + 1))
    counts = [c for _, c in seen]
    assert counts == sorted(counts) and counts[-1] == counts[-2]


def run_engine(facts, rules, order=None):
    kb = load_facts(KnowledgeBase(), facts)
    parsed = parse_ruleset("\n".join(rule_text(r) for r in rules) + "\n")
    if order is not None:
        parsed = [parsed[i] for i in order]
    run_fixpoint(kb, parsed)
    return kb


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_engine_matches_naive_oracle(rnd):
    facts, rules = random_program(rnd)
    kb = run_engine(facts, rules)
    assert kb_facts(kb) == naive_fixpoint(facts, rules)


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_rule_order_independence(rnd):
    facts, rules = random_program(rnd)
    order = list(range(len(rules)))
    rnd.shuffle(order)
    assert run_engine(facts, rules).fact_set() == run_engine(facts, rules, order).fact_set()


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_monotone_and_idempotent(rnd):
    facts, rules = random_program(rnd)
    kb = load_facts(KnowledgeBase(), facts)
    parsed = parse_ruleset("\n".join(rule_text(r) for r in rules) + "\n")
    snapshots = [kb.fact_set()]
    report = run_fixpoint(kb, parsed, on_pass=lambda n, k: snapshots.append(k.fact_set()))
    for prev, cur in zip(snapshots, snapshots[1:]):
        assert prev <= cur
    assert report.facts_added == len(snapshots[-1]) - len(snapshots[0])
    assert run_fixpoint(kb, parsed).facts_added == 0
