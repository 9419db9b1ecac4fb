import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontodetect.exceptions import InvalidDistance, InvalidParams
from ontodetect.pointcloud import Aabb, Point3
from ontodetect.topology import (
    TopologyParams,
    centroid_distance,
    gap_distance,
    interiors_overlap,
    intersects,
    is_connected,
    is_distant_from,
    line_angle,
    perpendicular,
    touches,
    upper,
)

from oracles import grid_intersects, grid_touches, grid_upper

P = TopologyParams()


def box(lo, hi):
    return Aabb(Point3(*map(float, lo)), Point3(*map(float, hi)))


def unit_at(x, y=0.0, z=0.0):
    return box((x - 0.5, y - 0.5, z - 0.5), (x + 0.5, y + 0.5, z + 0.5))


def test_centroid_distance_examples():
    assert centroid_distance(unit_at(0), unit_at(50)) == 50.0
    assert centroid_distance(unit_at(7), unit_at(7)) == 0.0
    assert centroid_distance(unit_at(3, 4), unit_at(0, 0)) == 5.0
    # height differences are ignored
    assert centroid_distance(unit_at(0, 0, 0), unit_at(0, 0, 9)) == 0.0


def test_distant_from_examples():
    assert is_distant_from(unit_at(0), unit_at(50), 50)
    # |56 - 50| = 6 exceeds 10 % of 50
    assert not is_distant_from(unit_at(0), unit_at(56), 50)
    assert is_distant_from(unit_at(0), unit_at(55), 50)
    assert is_distant_from(unit_at(0), unit_at(1000), 1000)


@pytest.mark.parametrize("d", [0, -5, math.nan])
def test_distant_from_rejects_bad_distance(d):
    with pytest.raises(InvalidDistance):
        is_distant_from(unit_at(0), unit_at(1), d)


def test_intersects_examples():
    a = box((0, 0, 0), (1, 1, 1))
    assert intersects(a, a)
    assert intersects(a, box((1, 0, 0), (2, 1, 1)))
    assert not intersects(unit_at(0), unit_at(10))


def test_touches_examples():
    a = box((0, 0, 0), (1, 1, 1))
    assert touches(a, box((1.05, 0, 0), (2, 1, 1)), P)
    assert not touches(a, box((0.5, 0.5, 0.5), (2, 2, 2)), P)
    assert not touches(a, box((2, 0, 0), (3, 1, 1)), P)


def test_is_connected_examples():
    pole = box((-0.1, -0.1, 0), (0.1, 0.1, 5))
    cabinet = box((0.1, -0.2, 0), (0.6, 0.2, 0.4))
    assert is_connected(pole, cabinet, P)
    assert not is_connected(unit_at(0), unit_at(5), P)
    assert is_connected(pole, pole, P)


def test_upper_examples():
    top = box((0, 0, 2), (1, 1, 3))
    bottom = box((0, 0, 0), (1, 1, 1))
    assert upper(top, bottom, P)
    assert not upper(bottom, top, P)
    assert not upper(box((5, 5, 2), (6, 6, 3)), bottom, P)


def test_perpendicular_examples():
    assert perpendicular((0, 0, 1), (1, 0, 0), P)
    assert not perpendicular((0, 0, 1), (0, 0, 1), P)
    assert not perpendicular((0, 0, 1), (1 / math.sqrt(2), 0, 1 / math.sqrt(2)), P)
    assert line_angle((0, 0, 1), (0, 0, -1)) == pytest.approx(0.0)


@pytest.mark.parametrize("kw", [
    {"touch_eps": 0}, {"perpendicular_tol": -1}, {"distance_tol_fraction": 0},
    {"footprint_overlap_min": 1.5},
])
def test_params_validated(kw):
    with pytest.raises(InvalidParams):
        TopologyParams(**kw)


coord = st.integers(0, 5)


@st.composite
def int_boxes(draw):
    lo = [draw(coord) for _ in range(3)]
    hi = [draw(st.integers(v, 5)) for v in lo]
    return tuple(lo), tuple(hi)


def as_box(t):
    return box(*t)


@settings(max_examples=300, deadline=None)
@given(int_boxes(), int_boxes())
def test_predicates_match_grid_oracle(a, b):
    A, B = as_box(a), as_box(b)
    assert intersects(A, B) == grid_intersects(a, b)
    assert touches(A, B, P) == grid_touches(a, b, P.touch_eps)
    assert upper(A, B, P) == grid_upper(a, b, P.touch_eps, P.footprint_overlap_min)


real = st.floats(-20, 20, allow_nan=False)


@st.composite
def real_boxes(draw):
    lo = [draw(real) for _ in range(3)]
    ext = [draw(st.floats(0, 5)) for _ in range(3)]
    return box(lo, [l + e for l, e in zip(lo, ext)])


@settings(max_examples=200, deadline=None)
@given(real_boxes(), real_boxes(), st.floats(0.5, 60))
def test_symmetric_predicates(a, b, d):
    assert intersects(a, b) == intersects(b, a)
    assert touches(a, b, P) == touches(b, a, P)
    assert is_connected(a, b, P) == is_connected(b, a, P)
    assert is_distant_from(a, b, d, P) == is_distant_from(b, a, d, P)
    assert gap_distance(a, b) == pytest.approx(gap_distance(b, a))


@settings(max_examples=200, deadline=None)
@given(real_boxes(), real_boxes())
def test_touch_excludes_interior_overlap(a, b):
    if touches(a, b, P):
        assert not interiors_overlap(a, b)


@settings(max_examples=200, deadline=None)
@given(real_boxes(), real_boxes())
def test_upper_antisymmetric_when_separated(a, b):
    separated = a.min.z - b.max.z > P.touch_eps or b.min.z - a.max.z > P.touch_eps
    if upper(a, b, P) and separated:
        assert not upper(b, a, P)


@settings(max_examples=200, deadline=None)
@given(real_boxes(), real_boxes(), real_boxes())
def test_centroid_distance_metric(a, b, c):
    assert centroid_distance(a, b) == centroid_distance(b, a)
    assert centroid_distance(a, c) <= centroid_distance(a, b) + centroid_distance(b, c) + 1e-9


unit = st.tuples(real, real, real).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=200, deadline=None)
@given(unit, unit)
def test_perpendicular_symmetric(u, v):
    assert perpendicular(u, v, P) == perpendicular(v, u, P)
    assert 0.0 <= line_angle(u, v) <= 90.0
