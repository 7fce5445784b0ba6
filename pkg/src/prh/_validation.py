"""Input validation helpers shared by the public entry points."""

import numpy as np


def as_matrix(X, name="X", min_rows=1, min_cols=1, dtype=np.float64):
    """Coerce X to a 2-D float array, rejecting non-finite entries."""
    X = np.asarray(X, dtype=dtype)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {X.shape[0]}")
    if X.shape[1] < min_cols:
        raise ValueError(f"{name} needs at least {min_cols} columns, got {X.shape[1]}")
    if not np.isfinite(X).all():
        raise ValueError(f"{name} contains non-finite entries")
    return X


def as_vector(v, dim, name="v", dtype=np.float64):
    """Coerce v to a 1-D float array of the given length."""
    v = np.asarray(v, dtype=dtype)
    if v.ndim != 1 or v.shape[0] != dim:
        raise ValueError(f"{name} must be a vector of length {dim}, got shape {v.shape}")
    return v


def check_cov2x2(s11, s22, s12):
    """Validate that (s11, s22, s12) form a 2x2 covariance up to round-off."""
    if not (np.isfinite(s11) and np.isfinite(s22) and np.isfinite(s12)):
        raise ValueError("covariance entries must be finite")
    if s11 < 0 or s22 < 0:
        raise ValueError(f"diagonal entries must be nonnegative, got ({s11}, {s22})")
    bound = s11 * s22
    if s12 * s12 > bound + 1e-12 + 1e-9 * bound:
        raise ValueError(f"off-diagonal {s12} violates |s12|^2 <= s11*s22")
