"""Built-in registry and the comparison, processing and topology families.

A predicate built-in receives fully bound arguments and returns a bool. A
generator built-in receives every argument except the first and returns the
list of values its first argument may take; generator results are memoized
per argument tuple by the evaluation context, so side effects (asserting
detected boxes) happen once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..exceptions import DuplicateBuiltIn, NoGeometry, TypeMismatch
from ..geometry import (
    DetectParams,
    RansacParams,
    count_vertical_lines,
    detect_horizontal_elements,
    detect_vertical_elements,
    segment_elements,
)
from ..kb import KnowledgeBase, Text
from ..pointcloud import Aabb, Point3, load_xyz
from .. import topology
from ..topology import TopologyParams

PREDICATE = "predicate"
GENERATOR = "generator"

PROCESSING_NS = "3D_swrlb_Processing"
TOPOLOGY_NS = "3D_swrlb_Topology"
COMPARISON_NS = "swrlb"

VERTICAL_BB = "Vertical_BoundingBox"
HORIZONTAL_BB = "Horizontal_BoundingBox"
BOX_RECORD = "BoxExtent"
HAS_GEOMETRY = "hasGeometry"
BOX_FIELDS = ("minX", "minY", "minZ", "maxX", "maxY", "maxZ")
GEOMETRY_FIELDS = ("height", "length", "width", "cx", "cy", "cz")


@dataclass(frozen=True)
class BuiltIn:
    name: str
    arity: int
    kind: str
    fn: Callable = field(compare=False, repr=False)
    aliases: tuple = ()


class BuiltInRegistry:
    def __init__(self):
        self._entries = {}
        self._names = {}
        self._ns_aliases = {}

    def register(self, name, arity, kind, fn=None, aliases=()):
        if kind not in (PREDICATE, GENERATOR):
            raise ValueError(f"kind must be {PREDICATE!r} or {GENERATOR!r}")
        if arity < 1:
            raise ValueError("built-ins take at least one argument")
        for n in (name, *aliases):
            if n in self._names:
                raise DuplicateBuiltIn(f"built-in name {n!r} is already registered")
        if fn is None:
            def fn(ctx, *args):
                raise NotImplementedError(f"built-in {name} has no implementation")
        entry = BuiltIn(name, arity, kind, fn, tuple(aliases))
        self._entries[name] = entry
        for n in (name, *aliases):
            self._names[n] = name
        return entry

    def alias_namespace(self, prefix, *canonical):
        """Let ``prefix:X`` resolve to ``ns:X`` for each canonical namespace."""
        self._ns_aliases.setdefault(prefix, [])
        self._ns_aliases[prefix].extend(c for c in canonical if c not in self._ns_aliases[prefix])

    def resolve(self, name):
        canonical = self._names.get(name)
        if canonical is not None:
            return self._entries[canonical]
        if ":" in name:
            prefix, local = name.split(":", 1)
            for ns in self._ns_aliases.get(prefix, ()):
                canonical = self._names.get(f"{ns}:{local}")
                if canonical is not None:
                    return self._entries[canonical]
        return None

    def namespaces(self) -> set:
        out = {n.split(":", 1)[0] for n in self._names if ":" in n}
        return out | set(self._ns_aliases)

    def __contains__(self, name):
        return self.resolve(name) is not None

    def __iter__(self):
        return iter(sorted(self._entries.values(), key=lambda e: e.name))

    def __len__(self):
        return len(self._entries)


def register_builtin(registry, name, arity, kind, aliases=(), fn=None):
    return registry.register(name, arity, kind, fn, aliases)


class EvalContext:
    """Mutable evaluation state: the KB, parameters, memo table and caches."""

    def __init__(self, kb: KnowledgeBase, detect_params=None, ransac_params=None,
                 topology_params=None):
        self.kb = kb
        self.detect_params = detect_params or DetectParams()
        self.ransac_params = ransac_params or RansacParams()
        self.topology_params = topology_params or TopologyParams()
        self.memo = {}
        self._clouds = {}
        self._segmentations = {}
        self._boxes = {}
        self.supports = {}
        self._counters = {}

    def call_generator(self, entry: BuiltIn, inputs: tuple) -> list:
        key = (entry.name, inputs)
        if key not in self.memo:
            self.memo[key] = list(entry.fn(self, *inputs))
        return self.memo[key]

    def cloud(self, path):
        if path not in self._clouds:
            self._clouds[path] = load_xyz(path)
        return self._clouds[path]

    def segmentation(self, path):
        if path not in self._segmentations:
            self._segmentations[path] = segment_elements(self.cloud(path), self.detect_params)
        return self._segmentations[path]

    def fresh_name(self, prefix):
        known = set(self.kb.individuals)
        n = self._counters.get(prefix, 0)
        while True:
            n += 1
            name = f"{prefix}_{n:04d}"
            if name not in known:
                self._counters[prefix] = n
                return name

    def box_of(self, individual) -> Aabb:
        """Bounding box of an individual, via ``hasGeometry`` or its own extent facts."""
        if not isinstance(individual, str):
            raise TypeMismatch(f"expected an individual, got {individual!r}")
        box = self._boxes.get(individual)
        if box is None:
            kb = self.kb
            for holder in [individual, *kb.objects_of(individual, HAS_GEOMETRY)]:
                vals = [kb.value(holder, f) for f in BOX_FIELDS]
                if all(isinstance(v, float) for v in vals):
                    box = Aabb(Point3(*vals[:3]), Point3(*vals[3:]))
                    break
            else:
                raise NoGeometry(f"individual {individual!r} has no resolvable bounding box")
            self._boxes[individual] = box
        return box

    def direction_of(self, individual) -> np.ndarray:
        """Line direction of a line record, else the dominant axis of the box."""
        kb = self.kb
        for holder in [individual, *kb.objects_of(individual, HAS_GEOMETRY)]:
            vals = [kb.value(holder, f) for f in ("dx", "dy", "dz")]
            if all(isinstance(v, float) for v in vals):
                return np.array(vals)
        axis = int(np.argmax(self.box_of(individual).extent))
        return np.eye(3)[axis]


# -- comparison family -------------------------------------------------------

def _num(v):
    if isinstance(v, float) or (isinstance(v, int) and not isinstance(v, bool)):
        return float(v)
    raise TypeMismatch(f"numeric comparison on non-number {v!r}")


def _comparison(op):
    return lambda ctx, a, b: op(_num(a), _num(b))


COMPARISONS = {
    "greaterThan": (lambda a, b: a > b, ("moreThan",)),
    "lessThan": (lambda a, b: a < b, ()),
    "greaterThanOrEqual": (lambda a, b: a >= b, ()),
    "lessThanOrEqual": (lambda a, b: a <= b, ()),
    "equal": (lambda a, b: a == b, ()),
    "notEqual": (lambda a, b: a != b, ()),
}


# -- processing family -------------------------------------------------------

def _path(value) -> str:
    if isinstance(value, Text):
        return value.value
    if isinstance(value, str):
        return value
    raise TypeMismatch(f"point cloud location must be text, got {value!r}")


def assert_box(kb: KnowledgeBase, name: str, cls: str, bb) -> None:
    """Record a detected box: class, geometry data and a linked extent record."""
    kb.assert_class(name, cls)
    c = bb.centroid
    for prop, v in zip(GEOMETRY_FIELDS, (bb.height_above_ground, bb.length, bb.width, c.x, c.y, c.z)):
        kb.assert_data(name, prop, v)
    record = f"{name}_aabb"
    kb.assert_class(record, BOX_RECORD)
    kb.assert_object(name, HAS_GEOMETRY, record)
    for prop, v in zip(BOX_FIELDS, (*bb.box.min, *bb.box.max)):
        kb.assert_data(record, prop, v)
    kb.assert_data(record, "numPoints", len(bb.point_indices))


def _detection(detector, cls, prefix):
    def generate(ctx, location):
        path = _path(location)
        cloud = ctx.cloud(path)
        names = []
        for bb in detector(cloud, ctx.detect_params, ctx.segmentation(path)):
            name = ctx.fresh_name(prefix)
            assert_box(ctx.kb, name, cls, bb)
            ctx.supports[name] = (cloud, bb)
            names.append(name)
        return names
    return generate


def _count_vertical_lines(ctx, individual):
    if individual not in ctx.supports:
        raise NoGeometry(f"no supporting points recorded for {individual!r}")
    cloud, bb = ctx.supports[individual]
    return [float(count_vertical_lines(bb, cloud, ctx.ransac_params))]


# -- topology family ---------------------------------------------------------

def _pair(pred):
    def check(ctx, a, b):
        return pred(ctx.box_of(a), ctx.box_of(b), ctx.topology_params)
    return check


def _intersect(ctx, a, b):
    return topology.intersects(ctx.box_of(a), ctx.box_of(b))


def _perpendicular(ctx, a, b):
    return topology.perpendicular(ctx.direction_of(a), ctx.direction_of(b), ctx.topology_params)


def _distance(ctx, a, b, d):
    return topology.is_distant_from(ctx.box_of(a), ctx.box_of(b), _num(d), ctx.topology_params)


def default_registry() -> BuiltInRegistry:
    reg = BuiltInRegistry()
    for local, (op, aliases) in COMPARISONS.items():
        reg.register(f"{COMPARISON_NS}:{local}", 2, PREDICATE, _comparison(op),
                     tuple(f"{COMPARISON_NS}:{a}" for a in aliases))

    reg.register(f"{PROCESSING_NS}:VerticalElementDetection", 2, GENERATOR,
                 _detection(detect_vertical_elements, VERTICAL_BB, "vbb"))
    reg.register(f"{PROCESSING_NS}:HorizontalElementDetection", 2, GENERATOR,
                 _detection(detect_horizontal_elements, HORIZONTAL_BB, "hbb"))
    reg.register(f"{PROCESSING_NS}:CountVerticalLines", 2, GENERATOR, _count_vertical_lines)

    reg.register(f"{TOPOLOGY_NS}:Upper", 2, PREDICATE, _pair(topology.upper))
    reg.register(f"{TOPOLOGY_NS}:Intersect", 2, PREDICATE, _intersect)
    reg.register(f"{TOPOLOGY_NS}:Touch", 2, PREDICATE, _pair(topology.touches),
                 (f"{TOPOLOGY_NS}:touch",))
    reg.register(f"{TOPOLOGY_NS}:Perpendicular", 2, PREDICATE, _perpendicular)
    reg.register(f"{TOPOLOGY_NS}:isConnected", 2, PREDICATE, _pair(topology.is_connected))
    reg.register(f"{TOPOLOGY_NS}:hasDistanceFrom", 3, PREDICATE, _distance,
                 (f"{TOPOLOGY_NS}:isDistantFrom", f"{TOPOLOGY_NS}:isDistantfrom",
                  "hasDistanceFrom", "isDistantFrom", "isDistantfrom"))

    # spellings found in rule texts for the same two namespaces
    reg.alias_namespace("3Dswrlb", PROCESSING_NS, TOPOLOGY_NS)
    reg.alias_namespace("3DProcessing_swrlb", PROCESSING_NS)
    reg.alias_namespace("3D_swrlb_Processing", PROCESSING_NS)
    reg.alias_namespace("3D_Topologic", TOPOLOGY_NS)
    reg.alias_namespace("3DSWRL_Topologic", TOPOLOGY_NS)
    reg.alias_namespace("3D_swrlb_Topologic", TOPOLOGY_NS)
    return reg
