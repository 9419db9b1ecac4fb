from .builtins import (
    GENERATOR,
    PREDICATE,
    BuiltIn,
    BuiltInRegistry,
    EvalContext,
    default_registry,
    register_builtin,
)
from .engine import AnnotationReport, instantiate, match_antecedent, run_fixpoint
from .syntax import (
    BuiltInAtom,
    ClassAtom,
    Const,
    Num,
    PropertyAtom,
    Rule,
    Txt,
    Var,
    check_safety,
    format_rule,
    format_ruleset,
    parse_rule,
    parse_ruleset,
)

__all__ = [
    "GENERATOR", "PREDICATE", "BuiltIn", "BuiltInRegistry", "EvalContext", "default_registry",
    "register_builtin", "AnnotationReport", "instantiate", "match_antecedent", "run_fixpoint",
    "BuiltInAtom", "ClassAtom", "Const", "Num", "PropertyAtom", "Rule", "Txt", "Var",
    "check_safety", "format_rule", "format_ruleset", "parse_rule", "parse_ruleset",
]
