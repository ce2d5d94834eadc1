import numpy as np
import pytest
from sklearn.base import clone

from orbitscope.estimators import OrbitClassifier
from orbitscope.lie_core import Family, GroupSpec
from orbitscope.models import representative_point, slice_point

SO3, SU2 = GroupSpec(Family.SO0, 3), GroupSpec(Family.SU, 2)


def test_predict_so0_rows():
    X = np.array([slice_point(SO3, 1, 0.4).xi, slice_point(SO3, 2, 0.4).xi,
                  representative_point(SO3, "w1").xi, [0, 0, 0, 2]])
    clf = OrbitClassifier("SO0", 3).fit(X)
    assert list(clf.predict(X)) == ["l1", "l2", "w1", "unclassified"]


def test_predict_su_points_and_score():
    pts = [slice_point(SU2, 5, 0.3), representative_point(SU2, "w5"),
           representative_point(SU2, "z3")]
    y = ["l5", "w5", "z3"]
    clf = OrbitClassifier("SU", 2).fit(pts, y)
    assert list(clf.classes_) == sorted(y)
    assert clf.score(pts, y) == 1.0
    rows = np.array([np.concatenate([p.z, p.w]) for p in pts])
    assert list(clf.predict(rows)) == y


def test_transform_returns_f():
    clf = OrbitClassifier("SU", 2)
    F = clf.fit_transform([slice_point(SU2, 5, 0.3)])
    assert F.shape == (1, 1) and F[0, 0] == pytest.approx(-np.cosh(0.6) ** 2)


def test_clone_and_params():
    clf = OrbitClassifier("SU", 3, tol=1e-7)
    c = clone(clf)
    assert c.get_params() == {"family": "SU", "n": 3, "tol": 1e-7}


def test_bad_shape():
    with pytest.raises(ValueError):
        OrbitClassifier("SO0", 3).fit(np.zeros((2, 3)))
