"""Knowledge-driven detection and semantic annotation of objects in 3D point clouds."""
from .config import PipelineConfig
from .estimators import ElementDetector, RansacLineDetector
from .exceptions import OntoDetectError
from .geometry import (
    BoundingBox,
    DetectParams,
    Line3,
    RansacParams,
    count_vertical_lines,
    detect_horizontal_elements,
    detect_vertical_elements,
    estimate_ground_z,
    ransac_lines,
)
from .kb import KnowledgeBase, Text, dump, load
from .pointcloud import Aabb, GridIndex, Point3, PointCloud, build_index, cloud_bounds, load_xyz, query_box, save_xyz
from .topology import TopologyParams

__version__ = "0.1.0"

__all__ = [
    "PipelineConfig", "ElementDetector", "RansacLineDetector", "OntoDetectError", "BoundingBox",
    "DetectParams", "Line3", "RansacParams", "count_vertical_lines", "detect_horizontal_elements",
    "detect_vertical_elements", "estimate_ground_z", "ransac_lines", "KnowledgeBase", "Text",
    "dump", "load", "Aabb", "GridIndex", "Point3", "PointCloud", "build_index", "cloud_bounds",
    "load_xyz", "query_box", "save_xyz", "TopologyParams",
]
