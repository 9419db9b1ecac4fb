"""End-to-end annotation: detection, topology qualification, domain rules."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..config import PipelineConfig
from ..kb import KnowledgeBase, Text
from ..rules import AnnotationReport, EvalContext, default_registry, parse_ruleset, run_fixpoint
from .ranges import DIMENSIONS, TOPOLOGY_SUPPORT, GeometricRanges, detection_rules_text, ruleset_text
from .taxonomy import LEAF_CLASSES, install_schema

SCENE = "scene"
CLOUD_PROPERTY = "hasPointCloud"
DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class Conflict:
    individual: str
    labels: tuple
    tier: int

    def __str__(self):
        return f"{self.individual}: {' / '.join(self.labels)} (tier {self.tier})"


def shipped_rules_path() -> Path:
    return DATA_DIR / "railway.rules"


def load_rule_pack(path=None) -> str:
    return Path(path or shipped_rules_path()).read_text(encoding="utf-8")


def _scene_kb(cloud_path) -> KnowledgeBase:
    kb = install_schema(KnowledgeBase())
    kb.assert_class(SCENE, "Scene")
    kb.assert_data(SCENE, CLOUD_PROPERTY, Text(str(cloud_path)))
    return kb


def _run(cloud_path, config, rules_text, on_pass=None):
    config = config or PipelineConfig()
    registry = default_registry()
    rules = parse_ruleset(rules_text, registry)
    kb = _scene_kb(cloud_path)
    report = AnnotationReport(facts_added=kb.fact_count())
    ctx = EvalContext(kb, config.detect, config.ransac, config.topology)
    run_fixpoint(kb, rules, registry, ctx, report=report, on_pass=on_pass)
    return kb, report


def detect_to_kb(cloud_path, config: PipelineConfig | None = None):
    """Run only the detection rules: a KB of bounding boxes with geometry."""
    return _run(cloud_path, config, detection_rules_text())


def annotate_scene(cloud_path, config: PipelineConfig | None = None, rule_pack: str | None = None,
                   ranges: GeometricRanges | None = None, on_pass=None):
    """Detect, qualify and annotate; returns ``(kb, report)``."""
    text = rule_pack if rule_pack is not None else ruleset_text(ranges)
    kb, report = _run(cloud_path, config, text, on_pass)
    report.conflicts = resolve_conflicts(kb, ranges)
    return kb, report


def _dims(kb, ind):
    return {d: kb.value(ind, d) for d in DIMENSIONS}


def _has_support(kb, ind, cls):
    return any(kb.objects_of(ind, p) or kb.subjects_of(p, ind) for p in TOPOLOGY_SUPPORT.get(cls, ()))


def label_tier(kb: KnowledgeBase, ind: str, cls: str, ranges: GeometricRanges) -> int:
    """2: every size constraint and the topology support hold; 1: two or more
    kinds of evidence hold; 0: otherwise."""
    sat = ranges.satisfied(cls, _dims(kb, ind))
    support = _has_support(kb, ind, cls)
    needs_support = cls in TOPOLOGY_SUPPORT
    if all(sat.values()) and (support or not needs_support):
        return 2
    return 1 if sum(sat.values()) + support >= 2 else 0


def _nested_sibling_winners(kb, labels, ranges):
    out = []
    for c in labels:
        rc = ranges.constraints(c).get("height")
        beaten = any(
            d != c and set(kb.parents(d)) & set(kb.parents(c)) and rc is not None
            and ranges.constraints(d).get("height") is not None
            and ranges.constraints(d)["height"].strictly_inside(rc)
            for d in labels
        )
        if not beaten:
            out.append(c)
    return out


def resolve_conflicts(kb: KnowledgeBase, ranges: GeometricRanges | None = None) -> list:
    """Keep the best-supported leaf label of every multiply classified individual."""
    ranges = ranges or GeometricRanges()
    conflicts = []
    for ind in kb.individuals_of("DomainConcept"):
        labels = [c for c in kb.asserted_classes(ind) if c in LEAF_CLASSES]
        if len(labels) < 2:
            continue
        tiers = {c: label_tier(kb, ind, c, ranges) for c in labels}
        best = max(tiers.values())
        winners = _nested_sibling_winners(kb, [c for c in labels if tiers[c] == best], ranges)
        for c in labels:
            if c not in winners:
                kb.retract_class(ind, c)
        if len(winners) > 1:
            conflicts.append(Conflict(ind, tuple(winners), best))
    return conflicts
