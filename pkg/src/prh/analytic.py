"""Closed-form quantization error and code entropy for centered gaussians.

For a mean-centered gaussian, the expected squared distance between a point
and its nearest {-1,+1}^n corner depends only on the per-coordinate
variances:

    qerr = n + sum(s_kk) - 2*sqrt(2/pi) * sum(sqrt(s_kk))

Under rotations the trace is fixed, so qerr is minimized exactly when all
variances are equal (isotropy). The entropy of a 2-bit code is a function of
the eigenvalue spread gamma = sqrt(l1/l2) - sqrt(l2/l1) and the ellipse
angle theta, and moves opposite to qerr: minimal quantization error (theta =
pi/4) is also minimal entropy, so the two criteria trade off unless the
distribution is circular.

A seeded Monte-Carlo estimator of the 2-D quantization error is included as
the verification oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import transform
from ._validation import as_matrix, check_cov2x2

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class EigenAngleParam:
    """Eigenvalue/angle parameterization of a 2-D covariance ellipse.

    lambda1 >= lambda2 > 0 are the covariance eigenvalues and theta in
    [0, pi/2] is the angle between the first axis and the major ellipse axis
    (symmetry makes wider ranges redundant).
    """

    lambda1: float
    lambda2: float
    theta: float

    def __post_init__(self):
        if not (self.lambda1 >= self.lambda2 > 0.0):
            raise ValueError(
                f"need lambda1 >= lambda2 > 0, got ({self.lambda1}, {self.lambda2})"
            )
        if not (0.0 <= self.theta <= math.pi / 2.0):
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")


@dataclass(frozen=True)
class Cov2D:
    """A 2x2 covariance given by its three distinct entries."""

    s11: float
    s22: float
    s12: float

    def __post_init__(self):
        check_cov2x2(self.s11, self.s22, self.s12)

    def matrix(self):
        return np.array([[self.s11, self.s12], [self.s12, self.s22]])


def cov_from_eigen(p: EigenAngleParam) -> Cov2D:
    """Covariance entries from eigenvalues and ellipse angle.

    s11 = lbar + l*cos(2*theta), s22 = lbar - l*cos(2*theta),
    s12 = l*sin(2*theta), with lbar = (l1+l2)/2 and l = (l1-l2)/2.
    """
    lbar = (p.lambda1 + p.lambda2) / 2.0
    ldiff = (p.lambda1 - p.lambda2) / 2.0
    c2 = math.cos(2.0 * p.theta)
    s2 = math.sin(2.0 * p.theta)
    return Cov2D(s11=lbar + ldiff * c2, s22=lbar - ldiff * c2, s12=ldiff * s2)


def qerr_gauss2d(c: Cov2D) -> float:
    """Expected squared distance to the nearest {-1,+1}^2 corner."""
    return 2.0 + (c.s11 + c.s22) - 2.0 * SQRT_2_OVER_PI * (math.sqrt(c.s11) + math.sqrt(c.s22))


def qerr_gauss_nd(variances) -> float:
    """n-dimensional quantization error from per-coordinate variances."""
    v = np.asarray(variances, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("variances must be a nonempty 1-D sequence")
    if (v < 0).any():
        raise ValueError("variances must be nonnegative")
    n = v.size
    return float(n + v.sum() - 2.0 * SQRT_2_OVER_PI * np.sqrt(v).sum())


def gamma(lambda1, lambda2):
    """Eigenvalue spread sqrt(l1/l2) - sqrt(l2/l1).

    This is the largest correlation the two coordinates can attain under
    rotations of the ellipse.
    """
    if not (lambda1 >= lambda2 > 0.0):
        raise ValueError(f"need lambda1 >= lambda2 > 0, got ({lambda1}, {lambda2})")
    r = math.sqrt(lambda1 / lambda2)
    return r - 1.0 / r


def cell_probabilities(gamma_value, theta):
    """Probabilities of the (+,+) and (-,+) sign cells of a 2-D gaussian.

    p11 = 1/2 - arctan(2 / (gamma*sin(2*theta))) / (2*pi), p_neg = 1/2 - p11.
    When gamma*sin(2*theta) == 0 the arctangent limit is pi/2, giving the
    independent-bits value 1/4 for both. Symmetry supplies the remaining two
    cells, so 2*(p11 + p_neg) = 1.
    """
    if gamma_value < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma_value}")
    if not (0.0 <= theta <= math.pi / 2.0):
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    g = gamma_value * math.sin(2.0 * theta)
    if g == 0.0:
        return 0.25, 0.25
    p11 = 0.5 - math.atan2(2.0, g) / (2.0 * math.pi)
    # p11 lies in [1/4, 1/2], so 0.5 - p11 is exact (no rounding).
    return p11, 0.5 - p11


def entropy2d(gamma_value, theta):
    """Entropy (nats) of the 2-bit code, with the 0*log(0) = 0 convention."""
    p11, p_neg = cell_probabilities(gamma_value, theta)
    total = 0.0
    for p in (p11, p_neg):
        if p > 0.0:
            total -= p * math.log(p)
    return 2.0 * total


def empirical_qerr(data, t) -> float:
    """Mean squared distance between transformed vectors and their codes.

    Codes live in transformed coordinates: sign(apply(t, x)) with sign(0)
    mapped to +1.
    """
    X = as_matrix(data, name="data")
    y = transform.apply(t, X)
    b = np.where(y >= 0.0, 1.0, -1.0)
    return float(((y - b) ** 2).sum(axis=1).mean())


def sample_gauss2d(c: Cov2D, samples, rng):
    """Draw samples from the centered gaussian with covariance c.

    Uses an eigendecomposition so rank-deficient covariances are fine.
    """
    w, v = np.linalg.eigh(c.matrix())
    w = np.clip(w, 0.0, None)
    z = rng.standard_normal((samples, 2))
    return (z * np.sqrt(w)) @ v.T


def mc_qerr(c: Cov2D, samples, seed=0):
    """Monte-Carlo quantization error with its standard error.

    Estimates the mean squared distance to the nearest {-1,+1}^2 corner;
    brackets qerr_gauss2d within a few standard errors.
    """
    if samples < 10_000:
        raise ValueError(f"need at least 10000 samples, got {samples}")
    rng = np.random.default_rng(seed)
    x = sample_gauss2d(c, samples, rng)
    b = np.where(x >= 0.0, 1.0, -1.0)
    q = ((x - b) ** 2).sum(axis=1)
    return float(q.mean()), float(q.std(ddof=1) / math.sqrt(samples))
