"""Factored sparse orthogonal transforms built from pairwise plane rotations.

A transform is an ordered sequence of stages applied to mean-centered input.
Each stage rotates disjoint coordinate pairs independently, so applying a
stage costs 4 multiplications and 2 additions per pair instead of the O(n^2)
cost of a dense orthogonal matrix. A full stage on n dimensions touches every
coordinate once and leaves 2n nonzero entries (fill-ins) in its matrix form.
"""

from __future__ import annotations

import math

import numpy as np

from ._validation import as_vector

DENSE_DIM_CAP = 4096


class RotationStage:
    """One sparse rotation stage: disjoint index pairs, each with an angle.

    For every pair (i, j, theta) the stage maps
        (v_i, v_j) -> (cos(theta)*v_i - sin(theta)*v_j,
                       sin(theta)*v_i + cos(theta)*v_j)
    and passes unpaired coordinates through unchanged. A stage must pair all
    coordinates: dim//2 pairs, with exactly one index left over when dim is
    odd.
    """

    __slots__ = ("dim", "pairs", "_ii", "_jj", "_cos", "_sin")

    def __init__(self, dim, pairs):
        pairs = tuple((int(i), int(j), float(t)) for i, j, t in pairs)
        dim = int(dim)
        if dim < 2:
            raise ValueError(f"stage dim must be >= 2, got {dim}")
        if len(pairs) != dim // 2:
            raise ValueError(
                f"stage on dim {dim} needs exactly {dim // 2} pairs, got {len(pairs)}"
            )
        seen = set()
        for i, j, theta in pairs:
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"pair ({i}, {j}) out of range for dim {dim}")
            if i == j or i in seen or j in seen:
                raise ValueError(f"pair indices must be disjoint, ({i}, {j}) repeats")
            if not math.isfinite(theta):
                raise ValueError(f"angle for pair ({i}, {j}) is not finite")
            seen.add(i)
            seen.add(j)
        self.dim = dim
        self.pairs = pairs
        self._ii = np.array([p[0] for p in pairs], dtype=np.intp)
        self._jj = np.array([p[1] for p in pairs], dtype=np.intp)
        theta = np.array([p[2] for p in pairs], dtype=np.float64)
        self._cos = np.cos(theta)
        self._sin = np.sin(theta)

    @property
    def unpaired(self):
        """Indices the stage passes through unchanged."""
        used = {i for p in self.pairs for i in p[:2]}
        return tuple(k for k in range(self.dim) if k not in used)

    def __repr__(self):
        return f"RotationStage(dim={self.dim}, pairs={len(self.pairs)})"


class FactoredTransform:
    """An orthogonal transform factored into rotation stages plus a center.

    Applying the transform computes stages(v - center) with the stages in
    list order. The dense realization is orthogonal by construction (every
    stage is a direct sum of 2x2 rotations and identity), and its determinant
    is +1: plane rotations each have determinant one, so no parity correction
    is ever needed. The ``parity`` attribute records this for the model file.
    """

    __slots__ = ("dim", "center", "stages")

    parity = 1

    def __init__(self, dim, center, stages):
        dim = int(dim)
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        center = as_vector(center, dim, name="center")
        stages = tuple(stages)
        for st in stages:
            if st.dim != dim:
                raise ValueError(f"stage dim {st.dim} != transform dim {dim}")
        self.dim = dim
        self.center = center
        self.stages = stages

    def __repr__(self):
        return f"FactoredTransform(dim={self.dim}, stages={len(self.stages)})"


def apply_stage(stage, v):
    """Apply one stage to a vector or to the rows of a matrix."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != stage.dim:
        raise ValueError(f"input has {v.shape[-1]} coordinates, stage dim is {stage.dim}")
    out = v.copy()
    vi = out[..., stage._ii]
    vj = out[..., stage._jj]
    out[..., stage._ii] = stage._cos * vi - stage._sin * vj
    out[..., stage._jj] = stage._sin * vi + stage._cos * vj
    return out


def apply(t, v):
    """Apply the full transform: stages in order on (v - center).

    Accepts a single vector or a matrix of row vectors.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != t.dim:
        raise ValueError(f"input has {v.shape[-1]} coordinates, transform dim is {t.dim}")
    out = v - t.center
    for st in t.stages:
        vi = out[..., st._ii]
        vj = out[..., st._jj]
        out[..., st._ii] = st._cos * vi - st._sin * vj
        out[..., st._jj] = st._sin * vi + st._cos * vj
    return out


def apply_counted(t, v):
    """Reference scalar implementation of apply that tallies arithmetic.

    Returns (result, multiplications, additions). Slow; exists so tests and
    instrumented runs can assert the per-vector cost (4 multiplies and 2 adds
    per pair) against the accounting functions below.
    """
    v = as_vector(v, t.dim, name="v")
    out = [v[k] - t.center[k] for k in range(t.dim)]
    mults = 0
    adds = 0
    for st in t.stages:
        for i, j, theta in st.pairs:
            c = math.cos(theta)
            s = math.sin(theta)
            a = c * out[i] - s * out[j]
            b = s * out[i] + c * out[j]
            mults += 4
            adds += 2
            out[i] = a
            out[j] = b
    return np.array(out), mults, adds


def to_dense(t, max_dim=DENSE_DIM_CAP):
    """Materialize the stage product as a dense dim x dim matrix.

    apply(t, v) equals to_dense(t) @ (v - center). Intended as a testing
    oracle; refuses dims above max_dim to bound memory.
    """
    if t.dim > max_dim:
        raise ValueError(f"dim {t.dim} exceeds dense cap {max_dim}")
    m = np.eye(t.dim)
    for st in t.stages:
        rows_i = m[st._ii, :]
        rows_j = m[st._jj, :]
        m[st._ii, :] = st._cos[:, None] * rows_i - st._sin[:, None] * rows_j
        m[st._jj, :] = st._sin[:, None] * rows_i + st._cos[:, None] * rows_j
    return m


def stage_to_dense(stage):
    """Dense matrix of a single stage."""
    m = np.eye(stage.dim)
    rows_i = m[stage._ii, :]
    rows_j = m[stage._jj, :]
    m[stage._ii, :] = stage._cos[:, None] * rows_i - stage._sin[:, None] * rows_j
    m[stage._jj, :] = stage._sin[:, None] * rows_i + stage._cos[:, None] * rows_j
    return m


def multiply_count(t):
    """Scalar multiplications per encoded vector: 4 per pair."""
    return 4 * sum(len(st.pairs) for st in t.stages)


def addition_count(t):
    """Scalar additions per encoded vector: 2 per pair (half the multiplies)."""
    return 2 * sum(len(st.pairs) for st in t.stages)


def fill_in_count(t):
    """Stored nonzeros across all stage matrices.

    Each pair occupies a 2x2 block (4 entries); an unpaired coordinate keeps
    its diagonal 1. A full stage on even n therefore has 2n fill-ins, giving
    2n*ceil(log2 n) for the standard stage count.
    """
    total = 0
    for st in t.stages:
        total += 4 * len(st.pairs) + (st.dim - 2 * len(st.pairs))
    return total


def op_counts(t):
    """Per-vector encoding cost summary used in benchmark reports."""
    return {
        "multiplications": multiply_count(t),
        "additions": addition_count(t),
        "fill_ins": fill_in_count(t),
    }
