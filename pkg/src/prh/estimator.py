"""Scikit-learn style front end for pairwise-rotation hashing."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import codec
from . import transform as ft
from ._validation import as_matrix
from .learn import LearnerConfig, learn


class PairwiseRotationHasher(BaseEstimator, TransformerMixin):
    """Learn a sparse factored rotation and binarize vectors with it.

    fit() estimates the training mean/covariance and composes pairwise
    rotation stages; transform() returns sign bits of the rotated, centered
    input. Encoding costs O(n log n) per vector instead of the O(n^2) of a
    dense learned rotation.

    Parameters
    ----------
    mode : {"iso", "pcat", "rspca", "srr"}, default="iso"
        Stage construction strategy: variance-equalizing rotations, tilted
        rotations, random-pairing decorrelation on top of iso, or the
        random baseline.
    lam : float, default=0.0
        Tilt in [0, 1] from the variance-equalizing angle (0) toward the
        decorrelating angle (1). Used by "pcat" only.
    iso_stages : int or None, default=None
        Sorted-stage count; None means ceil(log2(n_features)).
    pca_stages : int or None, default=None
        Extra random-pairing stages for "rspca"; None means
        ceil(log2(n_features)).
    center : bool, default=True
        Subtract the training mean before rotating.
    random_state : int, default=0
        Seed for the random pairings/angles of "rspca" and "srr".

    Attributes
    ----------
    transform_ : FactoredTransform
        The learned center and rotation stages.
    n_features_in_ : int
        Dimensionality seen during fit; equals the code width in bits.
    """

    def __init__(self, mode="iso", lam=0.0, iso_stages=None, pca_stages=None,
                 center=True, random_state=0):
        self.mode = mode
        self.lam = lam
        self.iso_stages = iso_stages
        self.pca_stages = pca_stages
        self.center = center
        self.random_state = random_state

    def _config(self):
        return LearnerConfig(
            mode=self.mode,
            lam=self.lam,
            iso_stages=self.iso_stages,
            pca_stages=self.pca_stages,
            seed=self.random_state,
            center=self.center,
        )

    def fit(self, X, y=None):
        X = as_matrix(X, name="X", min_rows=2, min_cols=2)
        self.transform_ = learn(X, self._config())
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "transform_"):
            raise NotFittedError("this PairwiseRotationHasher is not fitted yet")

    def rotate(self, X):
        """Real-valued transformed coordinates (before binarization)."""
        self._check_fitted()
        return ft.apply(self.transform_, as_matrix(X, name="X"))

    def transform(self, X):
        """Binary codes as a (n_samples, n_features_in_) uint8 0/1 array."""
        return (self.rotate(X) >= 0.0).astype(np.uint8)

    def encode(self, X):
        """Binary codes in packed form, ready for Hamming search."""
        self._check_fitted()
        return codec.encode(self.transform_, as_matrix(X, name="X"))
