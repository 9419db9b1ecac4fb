"""Bounding-box size ranges per railway class and the rule pack built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..kb import format_number

ZETA = 0.5
DIMENSIONS = ("height", "length", "width")


@dataclass(frozen=True)
class Range:
    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True

    @classmethod
    def between(cls, lo, hi):
        return cls(lo, hi)

    @classmethod
    def more_than(cls, lo):
        return cls(lo=lo, lo_closed=False)

    @classmethod
    def less_than(cls, hi):
        return cls(hi=hi, hi_closed=False)

    @classmethod
    def at_most(cls, hi):
        return cls(hi=hi)

    def contains(self, v: float) -> bool:
        lo_ok = v >= self.lo if self.lo_closed else v > self.lo
        hi_ok = v <= self.hi if self.hi_closed else v < self.hi
        return lo_ok and hi_ok

    def strictly_inside(self, other: "Range") -> bool:
        """True when this range is a proper subset of ``other``."""
        lo_in = self.lo > other.lo or (self.lo == other.lo and (other.lo_closed or not self.lo_closed))
        hi_in = self.hi < other.hi or (self.hi == other.hi and (other.hi_closed or not self.hi_closed))
        return lo_in and hi_in and self != other

    def comparisons(self, var: str) -> list:
        out = []
        if math.isfinite(self.lo):
            op = "greaterThanOrEqual" if self.lo_closed else "greaterThan"
            out.append(f"swrlb:{op}({var}, {format_number(self.lo)})")
        if math.isfinite(self.hi):
            op = "lessThanOrEqual" if self.hi_closed else "lessThan"
            out.append(f"swrlb:{op}({var}, {format_number(self.hi)})")
        return out


@dataclass(frozen=True)
class GeometricRanges:
    """Size constraints per leaf class; a missing dimension is unconstrained."""

    zeta: float = ZETA
    table: dict = field(default=None)

    def __post_init__(self):
        if self.table is None:
            object.__setattr__(self, "table", default_table(self.zeta))

    def constraints(self, cls: str) -> dict:
        return dict(self.table.get(cls, {}))

    def satisfied(self, cls: str, dims: dict) -> dict:
        """Per constrained dimension, whether ``dims`` meets it (missing value fails)."""
        out = {}
        for dim, rng in self.table.get(cls, {}).items():
            v = dims.get(dim)
            out[dim] = isinstance(v, float) and rng.contains(v)
        return out

    def classes(self):
        return list(self.table)


def default_table(zeta: float = ZETA) -> dict:
    small = Range.at_most(zeta)
    return {
        "Main_Signal": {"height": Range.between(4, 6)},
        "Distant_Signal": {"height": Range.between(4, 6)},
        "Vorsignalbake": {"height": Range.between(1.5, 2.5), "width": small},
        "Breakpoint_table": {"height": Range.between(1, 2), "length": Range.between(1, 1.5), "width": small},
        "Chess_board": {"height": Range.between(1, 1.5), "length": small, "width": small},
        "BigMast": {"height": Range.more_than(6)},
        "NormalMast": {"height": Range.between(5, 6), "length": small},
        "Schalthouse": {"height": Range.less_than(1)},
        "SchaltSchrack": {"height": Range.less_than(0.5)},
    }


# Box class each size rule is matched against.
RANGE_RULE_SUBJECT = {
    "BigMast": "Vertical_BoundingBox",
    "NormalMast": "Vertical_BoundingBox",
    "Vorsignalbake": "Geometry",
    "Breakpoint_table": "Geometry",
    "Chess_board": "Geometry",
    "Schalthouse": "Horizontal_BoundingBox",
    "SchaltSchrack": "Horizontal_BoundingBox",
}

# Stored relations that back a class label beyond its size.
TOPOLOGY_SUPPORT = {
    "Main_Signal": ("hasConnectedCabinet", "hasDistanceFrom_1000", "hasDistanceFrom_700"),
    "Distant_Signal": ("hasConnectedCabinet", "hasDistanceFrom_1000", "hasDistanceFrom_700"),
    "BigMast": ("hasDistanceFrom_50",),
    "NormalMast": ("hasDistanceFrom_50",),
    "Vorsignalbake": ("hasDistanceFrom_75", "hasDistanceFrom_100"),
    "Schalthouse": ("isConnected",),
    "SchaltSchrack": ("isConnected",),
}

PROC = "3D_swrlb_Processing"
TOPO = "3D_swrlb_Topology"
SIGNAL_DISTANCES = (1000, 700)


def _range_rule(cls, subject, ranges):
    atoms = [f"{subject}(?v)"]
    for dim, rng in ranges.constraints(cls).items():
        var = f"?{dim[0]}"
        atoms.append(f"{dim}(?v, {var})")
        atoms.extend(rng.comparisons(var))
    return f"{cls.lower()}_size: " + " ^ ".join(atoms) + f" → {cls}(?v)"


def detection_rules_text() -> str:
    return (
        f"detect_vertical: Scene(?s) ^ hasPointCloud(?s, ?dir) ^ {PROC}:VerticalElementDetection(?v, ?dir)"
        " → detectedIn(?v, ?s)\n"
        f"detect_horizontal: Scene(?s) ^ hasPointCloud(?s, ?dir) ^ {PROC}:HorizontalElementDetection(?h, ?dir)"
        " → detectedIn(?h, ?s)\n"
    )


def ruleset_text(ranges: GeometricRanges | None = None) -> str:
    """The complete railway rule pack, in evaluation order."""
    ranges = ranges or GeometricRanges()
    lines = ["# 1. detection: point cloud to bounding boxes", detection_rules_text().rstrip("\n")]

    lines += ["", "# 2. size ranges per class"]
    lines.append("mast_altitude: Vertical_BoundingBox(?v) ^ height(?v, ?alt) ^ swrlb:moreThan(?alt, 6) → Mast(?v)")
    for cls, subject in RANGE_RULE_SUBJECT.items():
        lines.append(_range_rule(cls, subject, ranges))

    lines += ["", "# 3. topological qualification between vertical and horizontal boxes"]
    for builtin, prop in (("isConnected", "isConnected"), ("Upper", "isUpperOf"), ("Intersect", "intersects")):
        lines.append(
            f"qualify_{prop}: Vertical_BoundingBox(?v) ^ Horizontal_BoundingBox(?c) ^ "
            f"{TOPO}:{builtin}(?v, ?c) → {prop}(?v, ?c)"
        )
        if builtin == "Upper":
            lines.append(
                f"qualify_isUpperOf_rev: Horizontal_BoundingBox(?c) ^ Vertical_BoundingBox(?v) ^ "
                f"{TOPO}:Upper(?c, ?v) → isUpperOf(?c, ?v)"
            )

    lines += ["", "# 4. domain topology"]
    sig = ranges.constraints("Main_Signal")["height"].comparisons("?h")
    lines.append(
        "signal_candidate: Vertical_BoundingBox(?v) ^ height(?v, ?h) ^ " + " ^ ".join(sig)
        + " ^ Horizontal_BoundingBox(?c) ^ isConnected(?v, ?c) → Primary_signal(?v) ^ hasConnectedCabinet(?v, ?c)"
    )
    for d in SIGNAL_DISTANCES:
        lines.append(
            f"signal_pair_{d}: Primary_signal(?a) ^ Primary_signal(?b) ^ cx(?a, ?xa) ^ cx(?b, ?xb) ^ "
            f"swrlb:lessThan(?xa, ?xb) ^ {TOPO}:hasDistanceFrom(?a, ?b, {d}) → "
            f"Distant_Signal(?a) ^ Main_Signal(?b) ^ hasDistanceFrom_{d}(?a, ?b)"
        )
    lines.append(
        "vorsignal_chain: Vorsignalbake(?a) ^ Vorsignalbake(?b) ^ cx(?a, ?xa) ^ cx(?b, ?xb) ^ "
        f"swrlb:lessThan(?xa, ?xb) ^ {TOPO}:hasDistanceFrom(?a, ?b, 75) → hasDistanceFrom_75(?a, ?b)"
    )
    lines.append(
        "vorsignal_link: Vorsignalbake(?a) ^ Distant_Signal(?d) ^ "
        f"{TOPO}:hasDistanceFrom(?a, ?d, 100) → hasDistanceFrom_100(?a, ?d)"
    )
    lines.append(
        "mast_chain: Mast(?vert1) ^ VerticalBB(?vert2) ^ hasDistanceFrom(?vert1, ?vert2, 50) → "
        "Mast(?vert2) ^ hasDistanceFrom_50(?vert1, ?vert2)"
    )
    return "\n".join(lines) + "\n"
