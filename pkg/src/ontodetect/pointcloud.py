"""Point cloud ingestion, axis-aligned bounds and a uniform grid index.

Coordinates are meters, z is up and x runs along the track.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .exceptions import CloudIOError, EmptyCloud, InvalidCellSize, ParseError

DEFAULT_CELL_SIZE = 1.0


class Point3(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class Aabb:
    """Closed axis-aligned box ``[min, max]``."""

    min: Point3
    max: Point3

    def __post_init__(self):
        lo, hi = Point3(*map(float, self.min)), Point3(*map(float, self.max))
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"box min {tuple(lo)} exceeds max {tuple(hi)}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @classmethod
    def from_points(cls, xyz: np.ndarray) -> "Aabb":
        xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
        if len(xyz) == 0:
            raise EmptyCloud("cannot bound an empty point set")
        return cls(Point3(*xyz.min(axis=0)), Point3(*xyz.max(axis=0)))

    @property
    def extent(self) -> np.ndarray:
        return np.subtract(self.max, self.min)

    @property
    def center(self) -> Point3:
        return Point3(*((np.add(self.min, self.max)) / 2.0))

    def contains(self, xyz) -> np.ndarray:
        xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
        return np.all((xyz >= self.min) & (xyz <= self.max), axis=1)

    def expanded(self, dx=0.0, dy=0.0, dz=0.0) -> "Aabb":
        d = np.array([dx, dy, dz], dtype=float)
        return Aabb(Point3(*(np.subtract(self.min, d))), Point3(*(np.add(self.max, d))))


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    source_path: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i) -> Point3:
        return Point3(*self.points[i])

    def __iter__(self):
        return (Point3(*p) for p in self.points)


def load_xyz(path) -> PointCloud:
    """Read an ASCII ``x y z`` file; columns past the third are ignored."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CloudIOError(f"cannot read point cloud {path}: {exc}") from exc

    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        fields = s.split()
        if len(fields) < 3:
            raise ParseError(f"expected 3 coordinates, got {len(fields)}", lineno)
        try:
            xyz = [float(v) for v in fields[:3]]
        except ValueError:
            raise ParseError(f"non-numeric coordinate in {s!r}", lineno) from None
        if not all(math.isfinite(v) for v in xyz):
            raise ParseError(f"non-finite coordinate in {s!r}", lineno)
        rows.append(xyz)
    if not rows:
        raise EmptyCloud(f"{path} holds no points")
    return PointCloud(np.array(rows, dtype=float), str(path))


def save_xyz(cloud: PointCloud | np.ndarray, path, precision: int = 4) -> None:
    xyz = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    fmt = f"%.{precision}f"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        np.savetxt(fh, xyz.reshape(-1, 3), fmt=fmt, delimiter=" ")


def cloud_bounds(cloud: PointCloud) -> Aabb:
    if len(cloud) == 0:
        raise EmptyCloud("cloud has no points")
    return Aabb.from_points(cloud.points)


@dataclass(frozen=True, eq=False)
class GridIndex:
    cell_size: float
    cells: dict = field(repr=False)
    n_points: int = 0

    def cell_of(self, p) -> tuple:
        return tuple(int(math.floor(c / self.cell_size)) for c in p)


def build_index(cloud: PointCloud, cell_size: float = DEFAULT_CELL_SIZE) -> GridIndex:
    if not (cell_size > 0 and math.isfinite(cell_size)):
        raise InvalidCellSize(f"cell_size must be a positive finite length, got {cell_size}")
    keys = np.floor(cloud.points / cell_size).astype(np.int64)
    cells = {}
    if len(keys):
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        order = np.argsort(inverse, kind="stable")
        splits = np.cumsum(np.bincount(inverse, minlength=len(uniq)))[:-1]
        for key, members in zip(map(tuple, uniq.tolist()), np.split(order, splits)):
            members.setflags(write=False)
            cells[key] = members
    return GridIndex(float(cell_size), cells, len(cloud))


def query_box(index: GridIndex, cloud: PointCloud, box: Aabb) -> list[int]:
    """Indices of points inside the closed box, ascending."""
    lo = np.floor(np.asarray(box.min) / index.cell_size).astype(np.int64)
    hi = np.floor(np.asarray(box.max) / index.cell_size).astype(np.int64)
    span = int(np.prod(hi - lo + 1))
    if span <= len(index.cells):
        chunks = []
        for i in range(lo[0], hi[0] + 1):
            for j in range(lo[1], hi[1] + 1):
                for k in range(lo[2], hi[2] + 1):
                    members = index.cells.get((i, j, k))
                    if members is not None:
                        chunks.append(members)
    else:
        chunks = [m for key, m in index.cells.items()
                  if all(lo[a] <= key[a] <= hi[a] for a in range(3))]
    if not chunks:
        return []
    cand = np.concatenate(chunks)
    inside = box.contains(cloud.points[cand])
    return sorted(cand[inside].tolist())
