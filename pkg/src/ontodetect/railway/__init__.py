"""Railway domain pack: taxonomy, rules, pipeline, synthetic scenes, scoring."""
from .evaluation import ClassScore, EvalResult, evaluate
from .pipeline import (
    Conflict,
    annotate_scene,
    detect_to_kb,
    label_tier,
    load_rule_pack,
    resolve_conflicts,
    shipped_rules_path,
)
from .ranges import ZETA, GeometricRanges, Range, ruleset_text
from .scenegen import (
    SceneObject,
    SceneSpec,
    acceptance_scene_spec,
    format_scene_spec,
    generate_scene,
    parse_scene_spec,
    truth_kb,
    with_seed,
    write_scene,
)
from .taxonomy import LEAF_CLASSES, install_schema, most_specific, taxonomy_text

__all__ = [
    "ClassScore", "EvalResult", "evaluate", "Conflict", "annotate_scene", "detect_to_kb",
    "label_tier", "load_rule_pack", "resolve_conflicts", "shipped_rules_path", "ZETA",
    "GeometricRanges", "Range", "ruleset_text", "SceneObject", "SceneSpec",
    "acceptance_scene_spec", "with_seed", "format_scene_spec", "generate_scene", "parse_scene_spec",
    "truth_kb", "write_scene", "LEAF_CLASSES", "install_schema", "most_specific", "taxonomy_text",
]
