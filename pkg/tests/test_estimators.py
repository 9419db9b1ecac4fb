import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ontodetect import ElementDetector, RansacLineDetector
from ontodetect.exceptions import EmptyCloud, InvalidParams

from synth import box_shell, ground, pole


@pytest.fixture
def points():
    return np.vstack([ground(), pole(x=5.0), box_shell((0, -0.5, 0), (1, 0.5, 0.4))])


def test_get_params_and_clone():
    det = ElementDetector(cell_size=0.25)
    assert det.get_params()["cell_size"] == 0.25
    copy = clone(det)
    assert copy.get_params() == det.get_params() and copy is not det
    assert RansacLineDetector(max_lines=2).get_params()["max_lines"] == 2


def test_element_detector_fit_predict(points):
    det = ElementDetector()
    labels = det.fit_predict(points)
    assert det.kinds_ == ["vertical", "horizontal"] and det.n_elements_ == 2
    assert set(np.unique(det.labels_)) == {-1, 0, 1}
    pole_pts = pole(x=5.0)[200:210]
    assert (det.predict(pole_pts) == 0).all()
    assert det.predict(np.array([[100.0, 100.0, 100.0]])).tolist() == [-1]
    # ground points below the band stay unlabelled
    assert (labels[: len(ground())] == -1).all()


def test_element_detector_errors(points):
    with pytest.raises(NotFittedError):
        ElementDetector().predict(points)
    with pytest.raises(InvalidParams):
        ElementDetector(cell_size=-1).fit(points)
    with pytest.raises(EmptyCloud):
        ElementDetector().fit(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        ElementDetector().fit(np.zeros((5, 2)))
    with pytest.raises(ValueError):
        ElementDetector().fit(np.array([[0.0, 0.0, np.nan]]))


def test_ransac_estimator():
    pts = np.vstack([pole(x=0, n=200), np.column_stack([np.linspace(-1, 1, 100), np.zeros(100), np.full(100, 5.5)])])
    est = RansacLineDetector(max_lines=2).fit(pts)
    assert est.directions_.shape == (2, 3)
    assert abs(est.directions_[0][2]) == pytest.approx(1.0)
    assert (est.labels_[:200] == 0).all()
    assert est.predict(np.array([[0.0, 0.0, 2.0], [3.0, 3.0, 0.0]])).tolist() == [0, -1]


def test_ransac_estimator_needs_two_points():
    with pytest.raises(EmptyCloud):
        RansacLineDetector().fit(np.zeros((1, 3)))
