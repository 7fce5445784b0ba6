"""Independent reference implementations used to check the fast paths.

Everything here is deliberately naive (dense matrices, per-pair loops, full
sorts) and shares no code with the package internals it verifies.
"""

import math

import numpy as np

from prh.transform import RotationStage


def rot2(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def conj2x2(s11, s22, s12, theta):
    """Entries of R(theta) @ [[s11,s12],[s12,s22]] @ R(theta).T."""
    m = rot2(theta) @ np.array([[s11, s12], [s12, s22]]) @ rot2(theta).T
    return m[0, 0], m[1, 1], m[0, 1]


def dense_stage(stage):
    """Stage matrix assembled entry by entry."""
    m = np.eye(stage.dim)
    for i, j, theta in stage.pairs:
        c, s = math.cos(theta), math.sin(theta)
        m[i, i] = c
        m[i, j] = -s
        m[j, i] = s
        m[j, j] = c
    return m


def dense_transform(t):
    """Matrix product of the stage matrices in application order."""
    m = np.eye(t.dim)
    for st in t.stages:
        m = dense_stage(st) @ m
    return m


def dense_apply(t, v):
    return dense_transform(t) @ (np.asarray(v, dtype=float) - t.center)


def dense_update(sigma, stage):
    r = dense_stage(stage)
    return r @ sigma @ r.T


def random_stage(dim, rng):
    perm = rng.permutation(dim)
    pairs = [
        (int(perm[2 * k]), int(perm[2 * k + 1]), float(rng.uniform(0, 2 * math.pi)))
        for k in range(dim // 2)
    ]
    return RotationStage(dim, pairs)


def random_transform(dim, n_stages, rng, centered=True):
    from prh.transform import FactoredTransform

    center = rng.standard_normal(dim) if centered else np.zeros(dim)
    return FactoredTransform(dim, center, [random_stage(dim, rng) for _ in range(n_stages)])


def random_cov2x2(rng, scale=1.0):
    """A random valid 2x2 covariance via a random factor."""
    a = rng.standard_normal((2, 2)) * scale
    m = a @ a.T
    return m[0, 0], m[1, 1], m[0, 1]


def naive_knn_euclidean(db, queries, k):
    """Per-pair-loop Euclidean k-NN, ties by ascending index."""
    out = np.empty((len(queries), k), dtype=np.int64)
    for qi, q in enumerate(queries):
        d = [float(((row - q) ** 2).sum()) for row in db]
        order = sorted(range(len(db)), key=lambda i: (d[i], i))
        out[qi] = order[:k]
    return out


def naive_hamming_ranking(query_bits, db_bits):
    """Full ranking of unpacked bit rows by Hamming distance, ties by index."""
    d = [int((query_bits != row).sum()) for row in db_bits]
    return sorted(range(len(db_bits)), key=lambda i: (d[i], i)), d


def orthant_mc(cov2x2, samples, seed):
    """Monte-Carlo cell probabilities of the (+,+) and (-,+) orthants."""
    s11, s22, s12 = cov2x2
    m = np.array([[s11, s12], [s12, s22]])
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    rng = np.random.default_rng(seed)
    x = (rng.standard_normal((samples, 2)) * np.sqrt(w)) @ v.T
    p11 = float(((x[:, 0] >= 0) & (x[:, 1] >= 0)).mean())
    pneg = float(((x[:, 0] < 0) & (x[:, 1] >= 0)).mean())
    return p11, pneg


def counted_sparse_update(sigma, stage):
    """Scalar twin of the sparse covariance update, tallying arithmetic.

    Returns (new_sigma, multiplications, additions). Rotates the paired rows
    then the paired columns, then symmetrizes, exactly like the production
    path, but one scalar at a time so the operation count is observable.
    """
    sigma = np.array(sigma, dtype=float, copy=True)
    n = sigma.shape[0]
    mults = adds = 0
    for i, j, theta in stage.pairs:
        c, s = math.cos(theta), math.sin(theta)
        for col in range(n):
            a = c * sigma[i, col] - s * sigma[j, col]
            b = s * sigma[i, col] + c * sigma[j, col]
            mults += 4
            adds += 2
            sigma[i, col] = a
            sigma[j, col] = b
    for i, j, theta in stage.pairs:
        c, s = math.cos(theta), math.sin(theta)
        for row in range(n):
            a = c * sigma[row, i] - s * sigma[row, j]
            b = s * sigma[row, i] + c * sigma[row, j]
            mults += 4
            adds += 2
            sigma[row, i] = a
            sigma[row, j] = b
    sigma = (sigma + sigma.T) / 2.0
    return sigma, mults, adds
