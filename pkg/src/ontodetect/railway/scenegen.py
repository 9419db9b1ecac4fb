"""Synthetic railway scenes with ground truth.

Scene spec text, one entry per line (``#`` starts a comment)::

    length_m = 1400
    seed = 7
    noise_sigma_m = 0.02
    outlier_fraction = 0.05
    density_ppm2 = 200
    normal_mast@450 y=3
    main_signal@1350 y=-3 height=5
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..exceptions import SpecError
from ..kb import KnowledgeBase
from ..pointcloud import PointCloud, save_xyz
from .taxonomy import install_schema

GROUND_HALF_WIDTH = 6.0
CABINET_SIZE = (0.5, 0.4, 0.4)

# kind -> (truth class, default sampler parameters)
KINDS = {
    "normal_mast": ("NormalMast", {"height": 5.5, "radius": 0.1}),
    "big_mast": ("BigMast", {"height": 7.0, "radius": 0.12}),
    "main_signal": ("Main_Signal", {"height": 5.0, "radius": 0.08}),
    "distant_signal": ("Distant_Signal", {"height": 5.0, "radius": 0.08}),
    "vorsignalbake": ("Vorsignalbake", {"height": 2.0, "length": 0.5, "width": 0.05}),
    "breakpoint_table": ("Breakpoint_table", {"height": 1.5, "length": 1.2, "width": 0.05}),
    "chess_board": ("Chess_board", {"height": 1.2, "length": 0.4, "width": 0.05}),
    "schalthouse": ("Schalthouse", {"height": 0.8, "length": 1.2, "width": 1.0}),
    "schaltschrack": ("SchaltSchrack", {"height": 0.4, "length": 0.6, "width": 0.5}),
}
ALIASES = {"mast": "normal_mast", "bigmast": "big_mast", "normalmast": "normal_mast"}
POLES = {"normal_mast", "big_mast", "main_signal", "distant_signal"}
SIGNALS = {"main_signal", "distant_signal"}


@dataclass(frozen=True)
class SceneObject:
    kind: str
    x: float
    y: float = 3.0
    params: dict = field(default_factory=dict)

    def setting(self, key):
        return self.params.get(key, KINDS[self.kind][1].get(key))


@dataclass(frozen=True)
class SceneSpec:
    length_m: float = 500.0
    objects: tuple = ()
    noise_sigma_m: float = 0.0
    outlier_fraction: float = 0.0
    density_ppm2: float = 200.0
    ground_density_ppm2: float = 2.0
    seed: int = 0

    def validate(self) -> "SceneSpec":
        if not self.length_m > 0:
            raise SpecError("length_m must be positive")
        if self.noise_sigma_m < 0:
            raise SpecError("noise_sigma_m must be non-negative")
        if not 0 <= self.outlier_fraction < 1:
            raise SpecError("outlier_fraction must lie in [0, 1)")
        if self.density_ppm2 <= 0 or self.ground_density_ppm2 < 0:
            raise SpecError("densities must be positive")
        for obj in self.objects:
            if obj.kind not in KINDS:
                raise SpecError(f"unknown object kind {obj.kind!r}")
            if not 0 <= obj.x <= self.length_m:
                raise SpecError(f"{obj.kind}@{obj.x} lies outside the {self.length_m} m track")
            if abs(obj.y) > GROUND_HALF_WIDTH - 1:
                raise SpecError(f"{obj.kind}@{obj.x}: lateral offset {obj.y} leaves the ground strip")
        return self


_SCALARS = {
    "length_m": float, "noise_sigma_m": float, "outlier_fraction": float,
    "density_ppm2": float, "ground_density_ppm2": float, "seed": int,
}


def _number(text, lineno):
    try:
        return float(text)
    except ValueError:
        raise SpecError(f"line {lineno}: {text!r} is not a number") from None


def parse_scene_spec(text: str) -> SceneSpec:
    settings, objects = {}, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "@" in line.split()[0]:
            head, *rest = line.split()
            kind, _, pos = head.partition("@")
            kind = ALIASES.get(kind.lower(), kind.lower())
            if kind not in KINDS:
                raise SpecError(f"line {lineno}: unknown object kind {kind!r}")
            kw = {}
            for item in rest:
                k, sep, v = item.partition("=")
                if not sep:
                    raise SpecError(f"line {lineno}: expected key=value, got {item!r}")
                kw[k] = _number(v, lineno)
            y = kw.pop("y", 3.0)
            objects.append(SceneObject(kind, _number(pos, lineno), y, kw))
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or key not in _SCALARS:
            raise SpecError(f"line {lineno}: unrecognised entry {line!r}")
        try:
            settings[key] = _SCALARS[key](value)
        except ValueError:
            raise SpecError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return SceneSpec(objects=tuple(objects), **settings).validate()


def format_scene_spec(spec: SceneSpec) -> str:
    lines = [f"{k} = {getattr(spec, k)}" for k in _SCALARS]
    for obj in spec.objects:
        extra = "".join(f" {k}={v}" for k, v in sorted(obj.params.items()))
        lines.append(f"{obj.kind}@{obj.x} y={obj.y}{extra}")
    return "\n".join(lines) + "\n"


# -- samplers ---------------------------------------------------------------

def _count(area, density):
    return max(1, int(round(area * density)))


def sample_cylinder(rng, cx, cy, radius, z0, z1, density):
    n = _count(2 * math.pi * radius * (z1 - z0), density)
    theta = rng.uniform(0, 2 * math.pi, n)
    z = rng.uniform(z0, z1, n)
    return np.column_stack([cx + radius * np.cos(theta), cy + radius * np.sin(theta), z])


def sample_box_surface(rng, lo, hi, density, bottom=False):
    """Points on the faces of an axis-aligned box (bottom face optional)."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    ext = hi - lo
    parts = []
    faces = [(2, hi[2])] + ([(2, lo[2])] if bottom else [])
    faces += [(0, lo[0]), (0, hi[0]), (1, lo[1]), (1, hi[1])]
    for axis, value in faces:
        others = [a for a in range(3) if a != axis]
        n = _count(ext[others[0]] * ext[others[1]], density)
        pts = lo + rng.uniform(0, 1, (n, 3)) * ext
        pts[:, axis] = value
        parts.append(pts)
    return np.vstack(parts)


def _footprint(obj):
    """Truth box (lo, hi) of the main body of an object."""
    h = obj.setting("height")
    if obj.kind in POLES:
        r = obj.setting("radius")
        return (obj.x - r, obj.y - r, 0.0), (obj.x + r, obj.y + r, h)
    length, width = obj.setting("length"), obj.setting("width")
    if obj.kind in ("schalthouse", "schaltschrack"):
        return (obj.x - length / 2, obj.y - width / 2, 0.0), (obj.x + length / 2, obj.y + width / 2, h)
    # plates face the track: extent along y, thin along x
    return (obj.x - width / 2, obj.y - length / 2, 0.0), (obj.x + width / 2, obj.y + length / 2, h)


def _cabinet(obj):
    """Cabinet abutting the pole base on the side away from the track."""
    r = obj.setting("radius")
    lx, ly, lz = CABINET_SIZE
    side = 1.0 if obj.y >= 0 else -1.0
    y0 = obj.y + side * r
    ys = sorted((y0, y0 + side * ly))
    return (obj.x - lx / 2, ys[0], 0.0), (obj.x + lx / 2, ys[1], lz)


def _sample_object(rng, obj, density):
    lo, hi = _footprint(obj)
    if obj.kind in POLES:
        pts = [sample_cylinder(rng, obj.x, obj.y, obj.setting("radius"), 0.0, hi[2], density)]
        if obj.kind in SIGNALS:
            pts.append(sample_box_surface(rng, *_cabinet(obj), density))
        return np.vstack(pts)
    return sample_box_surface(rng, lo, hi, density)


def _truth_entries(spec):
    entries = []
    for obj in spec.objects:
        entries.append((KINDS[obj.kind][0], _footprint(obj)))
        if obj.kind in SIGNALS:
            entries.append(("SchaltSchrack", _cabinet(obj)))
    entries.sort(key=lambda e: (e[1][0][0] + e[1][1][0], e[1][0][1] + e[1][1][1], e[0]))
    return entries


def truth_kb(spec: SceneSpec) -> KnowledgeBase:
    kb = install_schema(KnowledgeBase())
    for i, (cls, (lo, hi)) in enumerate(_truth_entries(spec), start=1):
        name = f"truth_{i:04d}"
        kb.assert_class(name, cls)
        dx, dy = hi[0] - lo[0], hi[1] - lo[1]
        values = {
            "cx": (lo[0] + hi[0]) / 2, "cy": (lo[1] + hi[1]) / 2, "cz": (lo[2] + hi[2]) / 2,
            "height": hi[2] - lo[2], "length": max(dx, dy), "width": min(dx, dy),
        }
        for prop, v in values.items():
            kb.assert_data(name, prop, v)
    return kb


def generate_scene(spec: SceneSpec):
    """Sample a noisy point cloud of ``spec``; returns ``(cloud, truth_kb)``."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    parts = []
    n_ground = _count(spec.length_m * 2 * GROUND_HALF_WIDTH, spec.ground_density_ppm2)
    if spec.ground_density_ppm2 > 0:
        ground = np.column_stack([
            rng.uniform(0, spec.length_m, n_ground),
            rng.uniform(-GROUND_HALF_WIDTH, GROUND_HALF_WIDTH, n_ground),
            np.zeros(n_ground),
        ])
        parts.append(ground)
    for obj in spec.objects:
        parts.append(_sample_object(rng, obj, spec.density_ppm2))
    xyz = np.vstack(parts)
    if spec.noise_sigma_m > 0:
        xyz = xyz + rng.normal(0.0, spec.noise_sigma_m, xyz.shape)
    if spec.outlier_fraction > 0:
        n_out = int(round(len(xyz) * spec.outlier_fraction / (1 - spec.outlier_fraction)))
        top = max([obj.setting("height") for obj in spec.objects], default=1.0) + 1.0
        lo = np.array([0.0, -GROUND_HALF_WIDTH, 0.0])
        hi = np.array([spec.length_m, GROUND_HALF_WIDTH, top])
        xyz = np.vstack([xyz, lo + rng.uniform(0, 1, (n_out, 3)) * (hi - lo)])
    # quantize to the precision written to disk so memory and file agree
    xyz = np.round(xyz, 4) + 0.0
    return PointCloud(xyz), truth_kb(spec)


def write_scene(spec: SceneSpec, out_prefix) -> tuple:
    """Write ``<prefix>.xyz`` and ``<prefix>.truth.kb``; returns both paths."""
    cloud, truth = generate_scene(spec)
    prefix = Path(out_prefix)
    xyz_path = prefix.with_name(prefix.name + ".xyz")
    kb_path = prefix.with_name(prefix.name + ".truth.kb")
    xyz_path.parent.mkdir(parents=True, exist_ok=True)
    save_xyz(cloud, xyz_path)
    kb_path.write_text(truth.dump(), encoding="utf-8")
    return xyz_path, kb_path


def acceptance_scene_spec(seed: int = 7) -> SceneSpec:
    """1.4 km validation scene: a mast run, a big mast, a signal pair 1 km
    apart fronted by four beacons, and three cabinets."""
    objs = [SceneObject("vorsignalbake", x, -3.0) for x in (25.0, 100.0, 175.0, 250.0)]
    objs.append(SceneObject("distant_signal", 350.0, -3.0))
    objs += [SceneObject("normal_mast", float(x), 3.0) for x in range(450, 901, 50)]
    objs.append(SceneObject("schalthouse", 975.0, 4.0))
    objs.append(SceneObject("big_mast", 1100.0, 3.0))
    objs.append(SceneObject("schaltschrack", 1200.0, 4.0))
    objs.append(SceneObject("schalthouse", 1275.0, 4.0))
    objs.append(SceneObject("main_signal", 1350.0, -3.0))
    return SceneSpec(length_m=1400.0, objects=tuple(objs), noise_sigma_m=0.02,
                     outlier_fraction=0.05, density_ppm2=200.0, ground_density_ppm2=2.0, seed=seed)


def with_seed(spec: SceneSpec, seed: int) -> SceneSpec:
    return replace(spec, seed=seed)
