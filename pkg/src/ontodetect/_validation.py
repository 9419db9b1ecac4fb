"""Input checks shared by the estimator wrappers."""
from __future__ import annotations

import numpy as np

from .exceptions import EmptyCloud, InvalidParams
from .pointcloud import PointCloud


def check_points(X, min_points: int = 1) -> np.ndarray:
    """Return ``X`` as a finite float array of shape (n, 3)."""
    if isinstance(X, PointCloud):
        X = X.points
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected an array of shape (n, 3), got {arr.shape}")
    if len(arr) < min_points:
        raise EmptyCloud(f"need at least {min_points} point(s), got {len(arr)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def check_params(cls, params: dict):
    """Instantiate a parameter dataclass, reporting bad values as InvalidParams."""
    try:
        return cls(**params)
    except TypeError as exc:
        raise InvalidParams(str(exc)) from exc
