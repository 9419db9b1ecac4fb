"""Railway class taxonomy and the object properties linking its layers."""
from __future__ import annotations

from ..exceptions import SchemaConflict
from ..kb import KnowledgeBase, dump

TOP_CLASSES = ("Algorithm", "Geometry", "DomainConcept", "Characteristics", "Scene")

SUBCLASS_EDGES = (
    ("Signals", "DomainConcept"),
    ("Mast", "DomainConcept"),
    ("Schaltanlage", "DomainConcept"),
    ("Primary_signal", "Signals"),
    ("Secondary_signal", "Signals"),
    ("Main_Signal", "Primary_signal"),
    ("Distant_Signal", "Primary_signal"),
    ("Vorsignalbake", "Secondary_signal"),
    ("Breakpoint_table", "Secondary_signal"),
    ("Chess_board", "Secondary_signal"),
    ("BigMast", "Mast"),
    ("NormalMast", "Mast"),
    ("Schalthouse", "Schaltanlage"),
    ("SchaltSchrack", "Schaltanlage"),
    ("VerticalBB", "Geometry"),
    ("Vertical_BoundingBox", "VerticalBB"),
    ("Horizontal_BoundingBox", "Geometry"),
    ("BoxExtent", "Characteristics"),
    ("ElementDetection", "Algorithm"),
)

OBJECT_PROPERTIES = ("hasTopologicRelation", "IsDeseignedFor", "hasGeometry", "hasCharacteristics")

LEAF_CLASSES = (
    "Main_Signal", "Distant_Signal",
    "Vorsignalbake", "Breakpoint_table", "Chess_board",
    "BigMast", "NormalMast",
    "Schalthouse", "SchaltSchrack",
)


def install_schema(kb: KnowledgeBase) -> KnowledgeBase:
    """Declare the taxonomy and the general object properties; idempotent.

    Raises SchemaConflict when ``kb`` already files one taxonomy class under
    another in a way the tree does not allow.
    """
    known = set(TOP_CLASSES) | {c for edge in SUBCLASS_EDGES for c in edge}
    allowed = set(SUBCLASS_EDGES)
    for cls in sorted(known & set(kb.classes)):
        for parent in kb.parents(cls):
            if parent in known and (cls, parent) not in allowed:
                raise SchemaConflict(f"existing edge {cls} ⊑ {parent} contradicts the railway taxonomy")
    for cls in TOP_CLASSES:
        kb.declare_class(cls)
    for child, parent in SUBCLASS_EDGES:
        kb.declare_class(child, parent)
    for prop in OBJECT_PROPERTIES:
        kb.declare_property(prop)
    return kb


def taxonomy_text() -> str:
    return dump(install_schema(KnowledgeBase()))


def is_leaf(kb: KnowledgeBase, cls: str) -> bool:
    return cls in LEAF_CLASSES or (kb.is_subclass(cls, "DomainConcept") and not kb.children(cls))


def most_specific(kb: KnowledgeBase, individual: str, root: str = "DomainConcept") -> list:
    """Classes of ``individual`` under ``root`` that have no subclass among them."""
    held = {c for c in kb.asserted_classes(individual) if kb.is_subclass(c, root)}
    return sorted(c for c in held if not any(d != c and kb.is_subclass(d, c) for d in held))
