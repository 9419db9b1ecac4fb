"""VRML 2.0 export of annotated bounding boxes, coloured by class."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .exceptions import MissingGeometry, ParseError
from .kb import KnowledgeBase, format_number
from .rules.builtins import BOX_FIELDS, HAS_GEOMETRY

HEADER = "#VRML V2.0 utf8"
GRAY = (0.5, 0.5, 0.5)

DEFAULT_COLORS = {
    "Mast": (0.0, 0.0, 1.0),
    "BigMast": (0.0, 0.0, 1.0),
    "NormalMast": (0.0, 0.0, 1.0),
    "Main_Signal": (1.0, 0.0, 0.0),
    "Distant_Signal": (1.0, 0.5, 0.0),
    "Vorsignalbake": (1.0, 1.0, 0.0),
    "Breakpoint_table": (1.0, 1.0, 0.0),
    "Chess_board": (1.0, 1.0, 0.0),
    "Schalthouse": (0.0, 1.0, 0.0),
    "SchaltSchrack": (0.0, 1.0, 0.0),
    "Vertical_BoundingBox": GRAY,
    "Horizontal_BoundingBox": GRAY,
}


@dataclass
class ColorMap:
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))
    fallback: tuple = GRAY

    def __post_init__(self):
        for cls, rgb in self.colors.items():
            self._check(cls, rgb)

    @staticmethod
    def _check(cls, rgb):
        if len(rgb) != 3 or not all(0.0 <= c <= 1.0 for c in rgb):
            raise ValueError(f"colour for {cls} must be three components in [0, 1], got {rgb}")

    def with_overrides(self, overrides: dict) -> "ColorMap":
        merged = dict(self.colors)
        merged.update(overrides)
        return ColorMap(merged, self.fallback)

    def color_for(self, kb: KnowledgeBase, individual: str) -> tuple:
        """Colour of the most specific mapped class, searching up the hierarchy."""
        held = set(kb.classes_of(individual))
        # most specific first: a class comes before its superclasses
        ordered = sorted(held, key=lambda c: (-len(kb.superclasses(c)), c))
        for cls in ordered:
            if cls in self.colors:
                return self.colors[cls]
        return self.fallback


def parse_colors(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError("expected '<Class> r g b'", lineno)
        try:
            rgb = tuple(float(v) for v in parts[1:])
        except ValueError:
            raise ParseError(f"non-numeric colour in {line!r}", lineno) from None
        if not all(0.0 <= c <= 1.0 for c in rgb):
            raise ParseError(f"colour components must lie in [0, 1]: {line!r}", lineno)
        out[parts[0]] = rgb
    return out


def load_color_map(path) -> ColorMap:
    return ColorMap().with_overrides(parse_colors(Path(path).read_text(encoding="utf-8")))


def _extent(kb, ind):
    """(center, size) from the linked extent record, else from size data."""
    for rec in kb.objects_of(ind, HAS_GEOMETRY):
        vals = [kb.value(rec, f) for f in BOX_FIELDS]
        if all(isinstance(v, float) for v in vals):
            lo, hi = vals[:3], vals[3:]
            return [(a + b) / 2 for a, b in zip(lo, hi)], [b - a for a, b in zip(lo, hi)]
    center = [kb.value(ind, p) for p in ("cx", "cy", "cz")]
    size = [kb.value(ind, p) for p in ("length", "width", "height")]
    if all(isinstance(v, float) for v in center + size):
        return center, size
    return None


def _fmt(values):
    return " ".join(format_number(float(v)) for v in values)


def _geometry_bearing(kb):
    boxes = set(kb.individuals_of("Geometry")) | set(kb.individuals_of("DomainConcept"))
    return sorted(boxes)


def export_vrml(kb: KnowledgeBase, color_map: ColorMap | None = None) -> str:
    color_map = color_map or ColorMap()
    out = [HEADER]
    for ind in _geometry_bearing(kb):
        ext = _extent(kb, ind)
        if ext is None:
            if kb.has_class(ind, "DomainConcept"):
                raise MissingGeometry(f"{ind} is classified but has no geometry")
            continue
        center, size = ext
        rgb = color_map.color_for(kb, ind)
        out.append(
            f"DEF {ind} Transform {{\n"
            f"  translation {_fmt(center)}\n"
            f"  children [\n"
            f"    Shape {{\n"
            f"      appearance Appearance {{ material Material {{ diffuseColor {_fmt(rgb)} }} }}\n"
            f"      geometry Box {{ size {_fmt(size)} }}\n"
            f"    }}\n"
            f"  ]\n"
            f"}}"
        )
    return "\n".join(out) + "\n"
