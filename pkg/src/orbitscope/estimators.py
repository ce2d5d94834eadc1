"""scikit-learn adapter around the orbit classifier."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .lie_core import DEFAULT_TOL, Family, GroupSpec
from .models import ModelPoint
from .orbits import Unclassifiable, classify_point, invariant_f


def _points(spec: GroupSpec, X) -> list[ModelPoint]:
    if len(X) and isinstance(X[0], ModelPoint):
        return list(X)
    A = np.asarray(X, dtype=complex)
    N = spec.size
    if spec.family is Family.SO0:
        if A.ndim != 2 or A.shape[1] != N:
            raise ValueError(f"expected rows of length {N}")
        return [ModelPoint(spec, xi=row) for row in A]
    if A.ndim != 2 or A.shape[1] != 2 * N:
        raise ValueError(f"expected rows (z, w) of length {2 * N}")
    return [ModelPoint(spec, z=row[:N], w=row[N:]) for row in A]


class OrbitClassifier(ClassifierMixin, TransformerMixin, BaseEstimator):
    """Stateless estimator: `predict` returns orbit codes such as "z1", "l2", "w3".

    `fit` only validates the group and records the label set; there is nothing to learn.
    Rows of X are model coordinates (xi for SO0, z followed by w for SU) or ModelPoints.
    Points that cannot be classified get the label "unclassified".
    """

    def __init__(self, family: str = "SO0", n: int = 2, tol: float = DEFAULT_TOL):
        self.family = family
        self.n = n
        self.tol = tol

    def _spec(self) -> GroupSpec:
        return GroupSpec(Family(self.family), int(self.n))

    def fit(self, X, y=None):
        spec = self._spec()
        _points(spec, X)
        self.spec_ = spec
        self.classes_ = np.array(sorted(set(y))) if y is not None else np.array([])
        return self

    def predict(self, X) -> np.ndarray:
        spec = self._spec()
        out = []
        for p in _points(spec, X):
            try:
                out.append(classify_point(spec, p, self.tol).code)
            except Unclassifiable:
                out.append("unclassified")
        return np.array(out, dtype=object)

    def transform(self, X) -> np.ndarray:
        """The invariant f, one column."""
        spec = self._spec()
        return np.array([[invariant_f(spec, p)] for p in _points(spec, X)])
