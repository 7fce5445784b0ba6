"""Learning pairwise-rotation transforms from data statistics.

Everything here works off a single covariance estimate: the training data is
read exactly once, and each stage is built from (and then applied to) the
evolving covariance matrix. Four strategies are provided:

  iso    variance-sorted pairing, per-pair angle that equalizes the two
         variances ("isotropic" rotation)
  pcat   same pairing, angle interpolated between the isotropic angle and
         the decorrelating (principal-axis) angle by a tilt lam in [0, 1]
  rspca  full iso pass first, then extra stages with random pairings rotated
         to their per-pair principal-axis angles
  srr    random pairings with uniformly random angles (no statistics; the
         sparse-random-rotation baseline)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, check_cov2x2
from .transform import FactoredTransform, RotationStage

MODES = ("iso", "pcat", "rspca", "srr")

# Stage construction for rspca/srr draws from numpy's PCG64 stream; the name
# is recorded in model files so runs can be reproduced elsewhere.
RNG_ALGORITHM = "numpy-pcg64"


@dataclass
class CovarianceState:
    """Mean and population covariance of the (centered) training data.

    sigma is updated in place of the data as stages are constructed: rotating
    the data by a stage R maps sigma to R sigma R^T, which is computed
    sparsely pair by pair. mean stays in input coordinates (it is the
    translation of the final transform).
    """

    dim: int
    mean: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        if self.sigma.shape != (self.dim, self.dim):
            raise ValueError("sigma shape does not match dim")
        if self.mean.shape != (self.dim,):
            raise ValueError("mean shape does not match dim")
        if np.abs(self.sigma - self.sigma.T).max() > 1e-12 * max(1.0, np.abs(self.sigma).max()):
            raise ValueError("sigma must be symmetric")

    @property
    def variances(self):
        return np.diag(self.sigma)


@dataclass
class LearnerConfig:
    """Settings for learn(). Stage counts default to ceil(log2 n) at fit time."""

    mode: str = "iso"
    lam: float = 0.0
    iso_stages: int | None = None
    pca_stages: int | None = None
    seed: int = 0
    center: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        for name in ("iso_stages", "pca_stages"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be >= 0, got {v}")

    def to_dict(self):
        return {
            "mode": self.mode,
            "lam": self.lam,
            "iso_stages": self.iso_stages,
            "pca_stages": self.pca_stages,
            "seed": self.seed,
            "center": self.center,
        }


def default_stage_count(dim):
    """ceil(log2 dim): enough stages to equalize power-of-two dims exactly."""
    return max(1, math.ceil(math.log2(dim)))


def estimate(data) -> CovarianceState:
    """Column means and population (1/m) covariance of an m x n data matrix."""
    X = as_matrix(data, name="data", min_rows=2)
    m = X.shape[0]
    mean = X.mean(axis=0)
    centered = X - mean
    sigma = centered.T @ centered / m
    sigma = (sigma + sigma.T) / 2.0
    return CovarianceState(dim=X.shape[1], mean=mean, sigma=sigma)


def pair_angle_iso(s11, s22, s12):
    """Angle that equalizes the two variances of a 2x2 covariance.

    Defined by its postcondition: conjugating [[s11, s12], [s12, s22]] by the
    rotation R(theta) yields equal diagonal entries. Equal variances need no
    rotation, so that case returns 0 regardless of s12.
    """
    check_cov2x2(s11, s22, s12)
    if s11 == s22:
        return 0.0
    return 0.5 * math.atan2(s11 - s22, 2.0 * s12)


def pair_angle_pca(s11, s22, s12):
    """Angle that zeroes the off-diagonal of a 2x2 covariance.

    The branch follows the two-argument arctangent's principal value; the
    rotated diagonal is not forced into descending order. A diagonal input
    returns 0 (already aligned).
    """
    check_cov2x2(s11, s22, s12)
    if s12 == 0.0:
        return 0.0
    return 0.5 * math.atan2(-2.0 * s12, s11 - s22)


def wrap_half_turn(angle):
    """Reduce an angle difference into (-pi/2, pi/2].

    Plane rotations act on a covariance with period pi (theta and theta+pi
    differ only by a sign flip of both coordinates), so interpolation should
    follow the short arc.
    """
    w = angle % math.pi
    if w > math.pi / 2.0:
        w -= math.pi
    return w


def pair_angle_tilted(s11, s22, s12, lam):
    """Interpolate from the isotropic angle (lam=0) to the pca angle (lam=1)."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"lam must be in [0, 1], got {lam}")
    a_iso = pair_angle_iso(s11, s22, s12)
    if lam == 0.0:
        return a_iso
    a_pca = pair_angle_pca(s11, s22, s12)
    return a_iso + lam * wrap_half_turn(a_pca - a_iso)


def build_iso_stage(cov, lam=0.0):
    """Variance-sorted stage: pair largest with smallest, tilt angles by lam.

    Indices are sorted by diagonal variance descending (ties by ascending
    index) and rank k is paired with rank n+1-k; the middle index of an odd
    dim passes through.
    """
    n = cov.dim
    if n < 2:
        raise ValueError("need dim >= 2 to build a stage")
    var = cov.variances
    order = np.lexsort((np.arange(n), -var))
    pairs = []
    for k in range(n // 2):
        i = int(order[k])
        j = int(order[n - 1 - k])
        theta = pair_angle_tilted(cov.sigma[i, i], cov.sigma[j, j], cov.sigma[i, j], lam)
        pairs.append((i, j, theta))
    return RotationStage(n, pairs)


def _random_matching(dim, rng):
    perm = rng.permutation(dim)
    return [(int(perm[2 * k]), int(perm[2 * k + 1])) for k in range(dim // 2)]


def build_pca_stage(cov, rng):
    """Random pairing, each pair rotated to its principal-axis angle."""
    n = cov.dim
    if n < 2:
        raise ValueError("need dim >= 2 to build a stage")
    pairs = []
    for i, j in _random_matching(n, rng):
        theta = pair_angle_pca(cov.sigma[i, i], cov.sigma[j, j], cov.sigma[i, j])
        pairs.append((i, j, theta))
    return RotationStage(n, pairs)


def build_random_stage(dim, rng):
    """Random pairing with angles uniform in [0, 2*pi)."""
    if dim < 2:
        raise ValueError("need dim >= 2 to build a stage")
    matching = _random_matching(dim, rng)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=len(matching))
    return RotationStage(dim, [(i, j, float(t)) for (i, j), t in zip(matching, angles)])


def update_covariance(cov, stage) -> CovarianceState:
    """Conjugate sigma by a stage, sparsely: R sigma R^T in O(n) per pair.

    Rotates the paired rows, then the paired columns, and re-symmetrizes by
    averaging. The trace is invariant.
    """
    if stage.dim != cov.dim:
        raise ValueError(f"stage dim {stage.dim} != covariance dim {cov.dim}")
    sigma = cov.sigma.copy()
    ii, jj = stage._ii, stage._jj
    c = stage._cos[:, None]
    s = stage._sin[:, None]
    rows_i = sigma[ii, :]
    rows_j = sigma[jj, :]
    sigma[ii, :] = c * rows_i - s * rows_j
    sigma[jj, :] = s * rows_i + c * rows_j
    cols_i = sigma[:, ii]
    cols_j = sigma[:, jj]
    sigma[:, ii] = cols_i * c.T - cols_j * s.T
    sigma[:, jj] = cols_i * s.T + cols_j * c.T
    sigma = (sigma + sigma.T) / 2.0
    return CovarianceState(dim=cov.dim, mean=cov.mean, sigma=sigma)


def learn(data, config: LearnerConfig) -> FactoredTransform:
    """Build a factored transform from training data under the given config.

    iso/pcat estimate the covariance once and iterate iso_stages sorted
    stages (tilt 0 for iso, config.lam for pcat). rspca runs the full iso
    schedule and appends pca_stages random-pairing decorrelation stages,
    updating the covariance between all stages. srr draws random stages and
    needs no covariance. The center is the training mean unless
    config.center is False.
    """
    X = as_matrix(data, name="data", min_rows=2, min_cols=2)
    n = X.shape[1]
    iso_stages = config.iso_stages if config.iso_stages is not None else default_stage_count(n)
    pca_stages = config.pca_stages if config.pca_stages is not None else default_stage_count(n)
    rng = np.random.default_rng(config.seed)

    if config.mode == "srr":
        center = X.mean(axis=0) if config.center else np.zeros(n)
        stages = [build_random_stage(n, rng) for _ in range(iso_stages)]
        return FactoredTransform(dim=n, center=center, stages=stages)

    cov = estimate(X)
    center = cov.mean if config.center else np.zeros(n)
    lam = config.lam if config.mode == "pcat" else 0.0
    stages = []
    for _ in range(iso_stages):
        st = build_iso_stage(cov, lam)
        cov = update_covariance(cov, st)
        stages.append(st)
    if config.mode == "rspca":
        for _ in range(pca_stages):
            st = build_pca_stage(cov, rng)
            cov = update_covariance(cov, st)
            stages.append(st)
    return FactoredTransform(dim=n, center=center, stages=stages)
