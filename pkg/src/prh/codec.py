"""Binary codes: sign binarization, bit packing, and Hamming-distance search.

Codes are packed least-significant-bit first into little-endian 64-bit
words: bit b of a code row is coordinate b, stored at position b % 64 of
word b // 64. Bit 1 means the transformed coordinate was >= 0. Padding bits
past n_bits are always zero, so XOR + popcount over whole words computes
exact Hamming distances.
"""

from __future__ import annotations

import numpy as np

from . import transform
from ._validation import as_matrix

WORD_BITS = 64


def words_per_code(n_bits):
    return (n_bits + WORD_BITS - 1) // WORD_BITS


def _padding_mask(n_bits):
    """Mask of the valid bits in the last word (all-ones when aligned)."""
    rem = n_bits % WORD_BITS
    if rem == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << rem) - 1)


class BinaryCodeSet:
    """A set of fixed-width binary codes in packed form.

    Args:
        n_bits: Code width in bits (one per coordinate).
        words: Array of shape (count, words_per_code(n_bits)), dtype uint64.

    Padded bits must be zero; the constructor enforces this so that every
    downstream distance computation can run on whole words.
    """

    __slots__ = ("n_bits", "words")

    def __init__(self, n_bits, words):
        n_bits = int(n_bits)
        if n_bits < 1:
            raise ValueError(f"n_bits must be positive, got {n_bits}")
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 2 or words.shape[1] != words_per_code(n_bits):
            raise ValueError(
                f"words must have shape (count, {words_per_code(n_bits)}), got {words.shape}"
            )
        if words.shape[0] > 0 and (words[:, -1] & ~_padding_mask(n_bits)).any():
            raise ValueError("padding bits past n_bits must be zero")
        self.n_bits = n_bits
        self.words = words

    @property
    def count(self):
        return self.words.shape[0]

    @classmethod
    def from_bits(cls, bits):
        """Pack a (count, n_bits) array of 0/1 values."""
        bits = np.asarray(bits)
        if bits.ndim != 2:
            raise ValueError(f"bits must be 2-D, got shape {bits.shape}")
        count, n_bits = bits.shape
        if n_bits < 1:
            raise ValueError("codes need at least one bit")
        packed = np.packbits(bits.astype(np.uint8), axis=1, bitorder="little")
        n_bytes = words_per_code(n_bits) * 8
        if packed.shape[1] < n_bytes:
            pad = np.zeros((count, n_bytes - packed.shape[1]), dtype=np.uint8)
            packed = np.hstack([packed, pad])
        words = np.ascontiguousarray(packed).view(np.dtype("<u8"))
        return cls(n_bits, words)

    def to_bits(self):
        """Unpack to a (count, n_bits) uint8 array of 0/1 values."""
        raw = self.words.astype("<u8", copy=False).view(np.uint8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")
        return bits[:, : self.n_bits]

    def row(self, i):
        return self.words[i]

    def __len__(self):
        return self.count


def encode(t, data) -> BinaryCodeSet:
    """Binarize the rows of a data matrix through a factored transform.

    Bit b of row i is 1 iff coordinate b of apply(t, data[i]) is >= 0
    (exact zeros count as +1).
    """
    X = as_matrix(data, name="data")
    y = transform.apply(t, X)
    return BinaryCodeSet.from_bits(y >= 0.0)


def encode_counted(t, data):
    """Instrumented encode: also tally the arithmetic actually performed.

    Runs the scalar reference path per vector; returns
    (codes, multiplications_per_vector, additions_per_vector). Slow, for
    cost-accounting checks only.
    """
    X = as_matrix(data, name="data")
    rows = []
    mults = adds = 0
    for x in X:
        y, m, a = transform.apply_counted(t, x)
        mults, adds = m, a
        rows.append(y >= 0.0)
    return BinaryCodeSet.from_bits(np.array(rows)), mults, adds


def hamming(a, b):
    """Hamming distance between two packed code rows."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    if a.shape != b.shape:
        raise ValueError(f"code widths differ: {a.shape} vs {b.shape}")
    return int(np.bitwise_count(a ^ b).sum())


def hamming_to_all(query_words, db: BinaryCodeSet):
    """Distances from one packed query row to every code in db."""
    query_words = np.asarray(query_words, dtype=np.uint64)
    if query_words.shape != (db.words.shape[1],):
        raise ValueError(
            f"query has {query_words.shape} words, database rows have {db.words.shape[1]}"
        )
    return np.bitwise_count(query_words[None, :] ^ db.words).sum(axis=1, dtype=np.int64)


def knn_hamming(query_words, db: BinaryCodeSet, k):
    """Exact k nearest codes by Hamming distance, ties by ascending index.

    Returns a list of (index, distance) sorted by (distance, index).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > db.count:
        raise ValueError(f"k={k} exceeds database size {db.count}")
    dist = hamming_to_all(query_words, db)
    # Composite key makes the selection deterministic under distance ties.
    key = dist * db.count + np.arange(db.count, dtype=np.int64)
    if k < db.count:
        cand = np.argpartition(key, k - 1)[:k]
    else:
        cand = np.arange(db.count)
    cand = cand[np.argsort(key[cand])]
    return [(int(i), int(dist[i])) for i in cand]


def knn_hamming_batch(queries: BinaryCodeSet, db: BinaryCodeSet, k, chunk=64):
    """Top-k Hamming search for every query code; returns (ids, distances).

    ids has shape (queries.count, k) with rows sorted by (distance, index).
    """
    if queries.n_bits != db.n_bits:
        raise ValueError(f"code widths differ: {queries.n_bits} vs {db.n_bits}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > db.count:
        raise ValueError(f"k={k} exceeds database size {db.count}")
    nq = queries.count
    ids = np.empty((nq, k), dtype=np.int64)
    dists = np.empty((nq, k), dtype=np.int64)
    base = np.arange(db.count, dtype=np.int64)
    for start in range(0, nq, chunk):
        q = queries.words[start : start + chunk]
        d = np.bitwise_count(q[:, None, :] ^ db.words[None, :, :]).sum(axis=2, dtype=np.int64)
        key = d * db.count + base
        if k < db.count:
            cand = np.argpartition(key, k - 1, axis=1)[:, :k]
        else:
            cand = np.broadcast_to(base, d.shape).copy()
        ck = np.take_along_axis(key, cand, axis=1)
        order = np.argsort(ck, axis=1)
        cand = np.take_along_axis(cand, order, axis=1)
        ids[start : start + chunk] = cand
        dists[start : start + chunk] = np.take_along_axis(d, cand, axis=1)
    return ids, dists
