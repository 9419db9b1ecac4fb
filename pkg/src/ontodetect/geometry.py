"""Vertical/horizontal element detection and sequential RANSAC line fitting.

Detection segments the above-ground part of a cloud into candidate clusters
and reports each accepted cluster as an axis-aligned :class:`BoundingBox`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .exceptions import EmptyCloud, InvalidParams, TooFewPoints
from .pointcloud import Aabb, PointCloud, Point3, build_index, query_box

VERTICAL_COS = math.cos(math.radians(10.0))


@dataclass(frozen=True)
class DetectParams:
    ground_percentile: float = 0.05
    cell_size: float = 0.5
    min_points_per_cluster: int = 30
    min_height: float = 0.3
    merge_gap: float = 0.5
    vertical_aspect_min: float = 2.0
    horizontal_aspect_max: float = 2.0
    # points this close above the ground estimate are treated as ground
    ground_band: float = 0.2
    # tallest cluster still accepted as a horizontal element; also the
    # height above which points define a vertical stem footprint
    horizontal_max_height: float = 1.0
    stem_margin: float = 0.05
    noise_radius: float = 0.1
    noise_min_neighbors: int = 3

    def __post_init__(self):
        if not 0.0 < self.ground_percentile < 1.0:
            raise InvalidParams("ground_percentile must lie in (0, 1)")
        for name in ("cell_size", "min_height", "merge_gap", "vertical_aspect_min",
                     "horizontal_aspect_max", "ground_band", "horizontal_max_height",
                     "noise_radius"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidParams(f"{name} must be a positive length/ratio, got {v}")
        if self.stem_margin < 0:
            raise InvalidParams("stem_margin must be >= 0")
        if self.min_points_per_cluster < 1:
            raise InvalidParams("min_points_per_cluster must be >= 1")
        if self.noise_min_neighbors < 0:
            raise InvalidParams("noise_min_neighbors must be >= 0")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class RansacParams:
    iterations: int = 500
    inlier_threshold: float = 0.05
    min_inliers: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidParams("iterations must be >= 1")
        if not self.inlier_threshold > 0:
            raise InvalidParams("inlier_threshold must be > 0")
        if self.min_inliers < 2:
            raise InvalidParams("min_inliers must be >= 2")


@dataclass(frozen=True, eq=False)
class BoundingBox:
    id: str
    box: Aabb
    point_indices: np.ndarray = field(repr=False)
    ground_z: float = 0.0

    @property
    def height(self) -> float:
        return float(self.box.max.z - self.box.min.z)

    @property
    def length(self) -> float:
        e = self.box.extent
        return float(max(e[0], e[1]))

    @property
    def width(self) -> float:
        e = self.box.extent
        return float(min(e[0], e[1]))

    @property
    def centroid(self) -> Point3:
        return self.box.center

    @property
    def height_above_ground(self) -> float:
        """Top of the box relative to the estimated ground level."""
        return float(self.box.max.z - self.ground_z)


@dataclass(frozen=True, eq=False)
class Line3:
    anchor: Point3
    direction: tuple
    inlier_indices: list
    rms_residual: float

    def distances(self, xyz) -> np.ndarray:
        return _line_distances(np.asarray(xyz, dtype=float), np.asarray(self.anchor),
                               np.asarray(self.direction))


def estimate_ground_z(cloud: PointCloud, params: DetectParams = DetectParams()) -> float:
    if len(cloud) == 0:
        raise EmptyCloud("cloud has no points")
    return float(np.quantile(cloud.points[:, 2], params.ground_percentile))


# -- segmentation -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Segmentation:
    """Candidate clusters shared by the vertical and horizontal detectors."""

    ground_z: float  # height datum for the boxes
    clusters: list  # list of ascending index arrays into the cloud


def _grid_components(xy: np.ndarray, cell_size: float) -> np.ndarray:
    """Label points by 8-connected component of their occupied 2D cells."""
    if len(xy) == 0:
        return np.zeros(0, dtype=np.int64)
    cells = np.floor(xy / cell_size).astype(np.int64)
    uniq, inverse = np.unique(cells, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    lo = uniq.min(axis=0) - 1
    span = uniq.max(axis=0) - lo + 2
    codes = (uniq[:, 0] - lo[0]) * span[1] + (uniq[:, 1] - lo[1])  # sorted, as uniq is
    rows, cols = [], []
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        shifted = (uniq[:, 0] + di - lo[0]) * span[1] + (uniq[:, 1] + dj - lo[1])
        pos = np.searchsorted(codes, shifted)
        pos = np.minimum(pos, len(codes) - 1)
        hit = codes[pos] == shifted
        rows.append(np.nonzero(hit)[0])
        cols.append(pos[hit])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(uniq), len(uniq)))
    _, cell_label = connected_components(graph, directed=False)
    return cell_label[inverse]


def _merge_by_gap(xy: np.ndarray, labels: np.ndarray, gap: float) -> np.ndarray:
    """Union clusters whose xy bounding rectangles are within ``gap``."""
    ids = np.unique(labels)
    if len(ids) < 2:
        return labels
    lo = np.array([xy[labels == i].min(axis=0) for i in ids])
    hi = np.array([xy[labels == i].max(axis=0) for i in ids])
    parent = list(range(len(ids)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    order = np.argsort(lo[:, 0], kind="stable")
    for pos, a in enumerate(order):
        for b in order[pos + 1:]:
            if lo[b, 0] - hi[a, 0] > gap:
                break
            d = np.maximum(0.0, np.maximum(lo[a] - hi[b], lo[b] - hi[a]))
            if math.hypot(d[0], d[1]) <= gap:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    root = np.array([find(i) for i in range(len(ids))])
    return root[np.searchsorted(ids, labels)]


def _clusters(xy: np.ndarray, params: DetectParams) -> list:
    """Point groups (local indices) after grid clustering and gap merging."""
    labels = _grid_components(xy, params.cell_size)
    labels = _merge_by_gap(xy, labels, params.merge_gap)
    order = np.argsort(labels, kind="stable")
    _, starts = np.unique(labels[order], return_index=True)
    return [np.sort(g) for g in np.split(order, starts[1:])] if len(order) else []


def ground_level(z: np.ndarray, ground_z: float, band: float) -> float:
    """Median height of the points within ``band`` of a low ground estimate.

    A low quantile sits below the true ground by a couple of noise widths;
    the median of the band around it recovers the ground plane itself.
    """
    near = z[np.abs(z - ground_z) <= band]
    return float(np.median(near)) if len(near) else ground_z


def _denoise(xyz: np.ndarray, params: DetectParams) -> np.ndarray:
    """Mask of points with enough neighbours within ``noise_radius``."""
    if params.noise_min_neighbors == 0 or len(xyz) == 0:
        return np.ones(len(xyz), dtype=bool)
    tree = cKDTree(xyz)
    counts = tree.query_ball_point(xyz, params.noise_radius, return_length=True)
    return counts - 1 >= params.noise_min_neighbors


def segment_elements(cloud: PointCloud, params: DetectParams = DetectParams()) -> Segmentation:
    """Split the above-ground points of ``cloud`` into candidate clusters.

    Low parts hanging off a tall structure (a cabinet at the foot of a signal
    pole) are cut away from the structure's stem and returned as clusters of
    their own.
    """
    ground_z = estimate_ground_z(cloud, params)
    pts = cloud.points
    keep = np.nonzero(pts[:, 2] > ground_z + params.ground_band)[0]
    keep = keep[_denoise(pts[keep], params)]
    datum = ground_level(pts[:, 2], ground_z, params.ground_band)
    if len(keep) == 0:
        return Segmentation(datum, [])

    above = PointCloud(pts[keep])
    index = build_index(above, params.cell_size)
    split_z = datum + params.horizontal_max_height
    out = []
    for comp in _clusters(above.points[:, :2], params):
        comp_pts = above.points[comp]
        upper = comp[comp_pts[:, 2] >= split_z]
        taken = np.zeros(len(above), dtype=bool)
        if len(upper):
            zlo, zhi = float(comp_pts[:, 2].min()), float(comp_pts[:, 2].max())
            in_comp = np.zeros(len(above), dtype=bool)
            in_comp[comp] = True
            for sub in _clusters(above.points[upper, :2], params):
                foot = above.points[upper[sub]]
                m = params.stem_margin
                column = Aabb(
                    Point3(foot[:, 0].min() - m, foot[:, 1].min() - m, zlo),
                    Point3(foot[:, 0].max() + m, foot[:, 1].max() + m, zhi),
                )
                stem = np.array(query_box(index, above, column), dtype=np.int64)
                stem = stem[in_comp[stem] & ~taken[stem]]
                taken[stem] = True
                out.append(stem)
        rest = comp[~taken[comp]]
        if len(rest):
            out.extend(rest[g] for g in _clusters(above.points[rest, :2], params))
    return Segmentation(datum, [np.sort(keep[c]) for c in out if len(c)])


def _cluster_box(cloud: PointCloud, idx: np.ndarray, ground_z: float, params: DetectParams) -> Aabb:
    box = Aabb.from_points(cloud.points[idx])
    # clusters cut off by the ground band stand on the ground
    if box.min.z <= ground_z + params.ground_band + 0.1 and ground_z < box.min.z:
        box = Aabb(Point3(box.min.x, box.min.y, ground_z), box.max)
    return box


def _is_vertical(h, l, params):
    return h >= params.min_height and h >= params.vertical_aspect_min * l


def _is_horizontal(h, l, params):
    if h > params.horizontal_max_height or _is_vertical(h, l, params):
        return False
    return l * params.horizontal_aspect_max > h


def _detect(cloud, params, segmentation, accept, prefix):
    if len(cloud) == 0:
        raise EmptyCloud("cloud has no points")
    seg = segmentation if segmentation is not None else segment_elements(cloud, params)
    found = []
    for idx in seg.clusters:
        if len(idx) < params.min_points_per_cluster:
            continue
        box = _cluster_box(cloud, idx, seg.ground_z, params)
        e = box.extent
        if accept(float(e[2]), float(max(e[0], e[1])), params):
            found.append((box, idx))
    found.sort(key=lambda t: (t[0].center.x, t[0].center.y, t[0].center.z))
    return [BoundingBox(f"{prefix}_{n:04d}", box, idx, seg.ground_z)
            for n, (box, idx) in enumerate(found, start=1)]


def detect_vertical_elements(cloud: PointCloud, params: DetectParams = DetectParams(),
                             segmentation: Segmentation | None = None) -> list[BoundingBox]:
    """Tall, slender clusters (poles, masts, signal posts), ordered by centroid x, y."""
    return _detect(cloud, params, segmentation, _is_vertical, "vbb")


def detect_horizontal_elements(cloud: PointCloud, params: DetectParams = DetectParams(),
                               segmentation: Segmentation | None = None) -> list[BoundingBox]:
    """Low, wide clusters (cabinets, boxes) that fail the vertical test."""
    return _detect(cloud, params, segmentation, _is_horizontal, "hbb")


# -- RANSAC -----------------------------------------------------------------

def _line_distances(xyz, anchor, direction):
    rel = xyz - anchor
    along = rel @ direction
    perp = rel - np.outer(along, direction)
    return np.sqrt(np.einsum("ij,ij->i", perp, perp))


def _canonical(direction: np.ndarray) -> np.ndarray:
    d = direction / np.linalg.norm(direction)
    return -d if d[int(np.argmax(np.abs(d)))] < 0 else d


def _principal_line(xyz: np.ndarray):
    centroid = xyz.mean(axis=0)
    _, _, vt = np.linalg.svd(xyz - centroid, full_matrices=False)
    return centroid, _canonical(vt[0])


def _best_sample(xyz, params, rng):
    n = len(xyz)
    i = rng.integers(0, n, size=params.iterations)
    j = rng.integers(0, n - 1, size=params.iterations)
    j = j + (j >= i)
    best_count, best = -1, None
    chunk = max(1, int(2_000_000 // max(n, 1)))
    thr2 = params.inlier_threshold ** 2
    for s in range(0, params.iterations, chunk):
        a = xyz[i[s:s + chunk]]
        d = xyz[j[s:s + chunk]] - a
        norm = np.linalg.norm(d, axis=1)
        ok = norm > 1e-12
        d[ok] /= norm[ok, None]
        rel = xyz[None, :, :] - a[:, None, :]
        along = np.einsum("tnk,tk->tn", rel, d)
        dist2 = np.einsum("tnk,tnk->tn", rel, rel) - along ** 2
        counts = np.where(ok, (dist2 <= thr2).sum(axis=1), -1)
        t = int(np.argmax(counts))
        if counts[t] > best_count:
            best_count, best = int(counts[t]), (a[t], d[t])
    return best_count, best


def _fit_lines(xyz: np.ndarray, params: RansacParams, max_lines: int):
    """Sequential RANSAC on an array; returns (anchor, dir, local inliers, rms)."""
    rng = np.random.default_rng(params.rng_seed)
    remaining = np.arange(len(xyz))
    found = []
    thr = params.inlier_threshold
    while len(found) < max_lines and len(remaining) >= max(2, params.min_inliers):
        pts = xyz[remaining]
        count, model = _best_sample(pts, params, rng)
        if model is None or count < params.min_inliers:
            break
        anchor, direction = model[0], _canonical(model[1])
        inl = np.nonzero(_line_distances(pts, anchor, direction) <= thr)[0]
        for _ in range(3):
            c, d = _principal_line(pts[inl])
            refined = np.nonzero(_line_distances(pts, c, d) <= thr)[0]
            if len(refined) < params.min_inliers:
                break
            anchor, direction = c, d
            if np.array_equal(refined, inl):
                break
            inl = refined
        # the emitted inlier set is exactly the points within threshold of the emitted line
        inl = np.nonzero(_line_distances(pts, anchor, direction) <= thr)[0]
        if len(inl) < params.min_inliers:
            break
        res = _line_distances(pts[inl], anchor, direction)
        found.append((anchor, direction, remaining[inl], float(np.sqrt(np.mean(res ** 2)))))
        remaining = np.delete(remaining, inl)
    return found


def ransac_lines(cloud: PointCloud, point_indices, params: RansacParams = RansacParams(),
                 max_lines: int = 5) -> list[Line3]:
    """Greedy sequential RANSAC line extraction over a subset of ``cloud``.

    Each round samples point pairs with a seeded generator, keeps the pair
    with most points within ``inlier_threshold``, refines it to the
    principal axis of its inliers and removes those inliers.
    """
    idx = np.asarray(list(point_indices), dtype=np.int64)
    if len(idx) < 2:
        raise TooFewPoints(f"need at least 2 points, got {len(idx)}")
    lines = []
    for anchor, direction, inl, rms in _fit_lines(cloud.points[idx], params, max_lines):
        lines.append(Line3(Point3(*anchor), tuple(float(v) for v in direction),
                           sorted(idx[inl].tolist()), rms))
    return lines


def count_vertical_lines(bb: BoundingBox, cloud: PointCloud, params: RansacParams = RansacParams(),
                         max_lines: int = 5) -> int:
    """Number of fitted lines in the box that are within 10 degrees of vertical."""
    lines = ransac_lines(cloud, bb.point_indices, params, max_lines)
    return sum(1 for ln in lines if abs(ln.direction[2]) >= VERTICAL_COS)
