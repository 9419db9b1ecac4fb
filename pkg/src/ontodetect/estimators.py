"""scikit-learn style wrappers around element detection and line fitting."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_params, check_points
from .geometry import (
    DetectParams,
    RansacParams,
    detect_horizontal_elements,
    detect_vertical_elements,
    ransac_lines,
    segment_elements,
)
from .pointcloud import PointCloud


class ElementDetector(ClusterMixin, BaseEstimator):
    """Label each point with the detected element it belongs to.

    After ``fit``, ``labels_`` holds -1 for points outside every element;
    vertical elements are numbered first, then horizontal ones, matching
    the order of ``boxes_``. ``kinds_`` gives "vertical" or "horizontal"
    for each box.
    """

    def __init__(self, ground_percentile=0.05, cell_size=0.5, min_points_per_cluster=30,
                 min_height=0.3, merge_gap=0.5, vertical_aspect_min=2.0,
                 horizontal_aspect_max=2.0, ground_band=0.2, horizontal_max_height=1.0,
                 stem_margin=0.05, noise_radius=0.1, noise_min_neighbors=3):
        self.ground_percentile = ground_percentile
        self.cell_size = cell_size
        self.min_points_per_cluster = min_points_per_cluster
        self.min_height = min_height
        self.merge_gap = merge_gap
        self.vertical_aspect_min = vertical_aspect_min
        self.horizontal_aspect_max = horizontal_aspect_max
        self.ground_band = ground_band
        self.horizontal_max_height = horizontal_max_height
        self.stem_margin = stem_margin
        self.noise_radius = noise_radius
        self.noise_min_neighbors = noise_min_neighbors

    def _params(self) -> DetectParams:
        return check_params(DetectParams, {k: getattr(self, k) for k in DetectParams.field_names()})

    def fit(self, X, y=None):
        params = self._params()
        cloud = PointCloud(check_points(X))
        seg = segment_elements(cloud, params)
        vertical = detect_vertical_elements(cloud, params, seg)
        horizontal = detect_horizontal_elements(cloud, params, seg)
        self.boxes_ = vertical + horizontal
        self.kinds_ = ["vertical"] * len(vertical) + ["horizontal"] * len(horizontal)
        labels = np.full(len(cloud), -1, dtype=np.int64)
        for k, bb in enumerate(self.boxes_):
            labels[bb.point_indices] = k
        self.labels_ = labels
        self.ground_z_ = seg.ground_z
        self.n_elements_ = len(self.boxes_)
        return self

    def predict(self, X):
        """Index of the first fitted box containing each point, or -1."""
        check_is_fitted(self, "boxes_")
        pts = check_points(X)
        labels = np.full(len(pts), -1, dtype=np.int64)
        for k in range(len(self.boxes_) - 1, -1, -1):
            labels[self.boxes_[k].box.contains(pts)] = k
        return labels


class RansacLineDetector(ClusterMixin, BaseEstimator):
    """Sequential RANSAC; ``labels_`` gives each point's line index or -1."""

    def __init__(self, iterations=500, inlier_threshold=0.05, min_inliers=20, rng_seed=0,
                 max_lines=5):
        self.iterations = iterations
        self.inlier_threshold = inlier_threshold
        self.min_inliers = min_inliers
        self.rng_seed = rng_seed
        self.max_lines = max_lines

    def fit(self, X, y=None):
        params = check_params(RansacParams, {
            "iterations": self.iterations, "inlier_threshold": self.inlier_threshold,
            "min_inliers": self.min_inliers, "rng_seed": self.rng_seed,
        })
        pts = check_points(X, min_points=2)
        cloud = PointCloud(pts)
        self.lines_ = ransac_lines(cloud, range(len(pts)), params, self.max_lines)
        labels = np.full(len(pts), -1, dtype=np.int64)
        for k, line in enumerate(self.lines_):
            labels[line.inlier_indices] = k
        self.labels_ = labels
        self.directions_ = np.array([ln.direction for ln in self.lines_]).reshape(-1, 3)
        return self

    def predict(self, X):
        """Distance-based assignment of new points to the fitted lines."""
        check_is_fitted(self, "lines_")
        pts = check_points(X)
        labels = np.full(len(pts), -1, dtype=np.int64)
        if not self.lines_:
            return labels
        dists = np.column_stack([ln.distances(pts) for ln in self.lines_])
        best = dists.argmin(axis=1)
        ok = dists[np.arange(len(pts)), best] <= self.inlier_threshold
        labels[ok] = best[ok]
        return labels
