"""Dataset, model, and code-file I/O plus the toy gaussian generator.

Vector files use the common ANN benchmark record layout: every record is a
4-byte little-endian signed integer dimension followed by that many 4-byte
little-endian values (IEEE-754 single precision for vectors, int32 for id
lists). All records in a file must share the dimension.

Model files are single-line JSON (format "prh-model", version 1) holding the
center, stage pair triples with double-precision angles, the learner config,
the RNG algorithm identifier, and the parity flag.

Code files are binary: magic "PRHC", uint32 version, uint32 n_bits, uint64
count, then the packed little-endian 64-bit words row by row.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np

from .codec import BinaryCodeSet, words_per_code
from .learn import RNG_ALGORITHM
from .transform import FactoredTransform, RotationStage

MODEL_FORMAT = "prh-model"
MODEL_VERSION = 1
CODES_MAGIC = b"PRHC"
CODES_VERSION = 1
_CODES_HEADER = struct.Struct("<4sIIQ")


class FileFormatError(ValueError):
    """A file does not conform to its declared format.

    The byte offset of the first offending structure is carried in .offset
    when it is known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class MalformedHeaderError(FileFormatError):
    pass


class InconsistentDimError(FileFormatError):
    pass


class TruncatedFileError(FileFormatError):
    pass


def _read_records(path, payload_dtype):
    buf = Path(path).read_bytes()
    if len(buf) == 0:
        return np.zeros((0, 0), dtype=payload_dtype)
    if len(buf) < 4:
        raise MalformedHeaderError(f"{path}: file shorter than a record header", offset=0)
    dim = int(np.frombuffer(buf, dtype="<i4", count=1)[0])
    if dim <= 0:
        raise MalformedHeaderError(f"{path}: record dimension {dim} is not positive", offset=0)
    record_size = 4 + 4 * dim
    count, leftover = divmod(len(buf), record_size)
    if leftover != 0:
        raise TruncatedFileError(
            f"{path}: {len(buf)} bytes is not a whole number of {record_size}-byte records",
            offset=count * record_size,
        )
    headers = np.frombuffer(buf, dtype="<i4").reshape(count, 1 + dim)[:, 0]
    bad = np.nonzero(headers != dim)[0]
    if bad.size:
        k = int(bad[0])
        raise InconsistentDimError(
            f"{path}: record {k} declares dimension {int(headers[k])}, expected {dim}",
            offset=k * record_size,
        )
    data = np.frombuffer(buf, dtype=payload_dtype).reshape(count, 1 + dim)[:, 1:]
    return np.ascontiguousarray(data)


def read_vectors(path):
    """Read a float vector file into a (count, dim) float32 array."""
    return _read_records(path, "<f4")


def read_ids(path):
    """Read an integer id file into a (count, dim) int32 array."""
    return _read_records(path, "<i4")


def _write_records(data, path, payload_dtype):
    data = np.asarray(data)
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {data.shape}")
    count, dim = data.shape
    if count > 0 and dim == 0:
        raise ValueError("records must have at least one value")
    out = np.empty((count, 1 + dim), dtype="<i4")
    out[:, 0] = dim
    out[:, 1:] = data.astype(payload_dtype, copy=False).view("<i4")
    Path(path).write_bytes(out.tobytes())


def write_vectors(data, path):
    """Write a matrix as float32 records (values are cast to single)."""
    _write_records(np.asarray(data, dtype=np.float64).astype("<f4"), path, "<f4")


def write_ids(data, path):
    """Write an integer matrix as int32 records."""
    _write_records(np.asarray(data, dtype="<i4"), path, "<i4")


def _draw_toy_model(rng, dim, log_var, log_mean):
    eig = np.exp(rng.normal(log_mean, math.sqrt(log_var), size=dim))
    a = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    return eig, q


def toy_covariance_factors(dim, log_var, seed, log_mean=0.0):
    """Eigenvalues and rotation used by gen_toy for the same seed.

    The generated data has true covariance q @ diag(eig) @ q.T; its trace is
    eig.sum() exactly.
    """
    rng = np.random.default_rng(seed)
    return _draw_toy_model(rng, dim, log_var, log_mean)


def gen_toy(dim, log_var, n_train, n_query, n_db, seed, log_mean=0.0):
    """Sample a rotated anisotropic gaussian, split into train/query/db.

    Eigenvalues are drawn log-normally (log location log_mean, log variance
    log_var), rotated by a Haar-random dense rotation, and the centered
    gaussian is sampled once and split. The dense rotation is generation-time
    machinery only (O(dim^3), fine for desk-scale dims).
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if log_var < 0:
        raise ValueError(f"log_var must be >= 0, got {log_var}")
    counts = (n_train, n_query, n_db)
    if any(c < 1 for c in counts):
        raise ValueError(f"all split sizes must be >= 1, got {counts}")
    rng = np.random.default_rng(seed)
    eig, q = _draw_toy_model(rng, dim, log_var, log_mean)
    total = sum(counts)
    x = rng.standard_normal((total, dim)) * np.sqrt(eig) @ q.T
    return x[:n_train], x[n_train : n_train + n_query], x[n_train + n_query :]


def save_model(t, path, config=None):
    """Write a transform (and optional learner-config echo) as JSON."""
    obj = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "dim": t.dim,
        "center": [float(v) for v in t.center],
        "stages": [[[i, j, theta] for i, j, theta in st.pairs] for st in t.stages],
        "config": dict(config) if config else None,
        "rng_algorithm": RNG_ALGORITHM,
        "parity": t.parity,
    }
    # Compact, no trailing newline: every byte is semantic, so any single-byte
    # corruption either fails to parse/validate or visibly changes the value.
    Path(path).write_text(json.dumps(obj, separators=(",", ":")))


class ModelFileError(FileFormatError):
    pass


def load_model(path):
    """Load a model file back into a FactoredTransform.

    Angles round-trip bit exactly (JSON floats are written with shortest
    round-trip precision); stage invariants are re-validated.
    """
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"{path}: corrupt model file: {e}") from e
    if not isinstance(obj, dict) or obj.get("format") != MODEL_FORMAT:
        raise ModelFileError(f"{path}: not a {MODEL_FORMAT} file")
    if obj.get("version") != MODEL_VERSION:
        raise ModelFileError(
            f"{path}: unsupported model version {obj.get('version')!r}"
        )
    try:
        dim = obj["dim"]
        center = obj["center"]
        stages = [RotationStage(dim, [(i, j, t) for i, j, t in st]) for st in obj["stages"]]
        return FactoredTransform(dim=dim, center=center, stages=stages)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFileError(f"{path}: corrupt model file: {e}") from e


def load_model_info(path):
    """Raw metadata dict of a model file (config echo, rng id, parity)."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ModelFileError(f"{path}: corrupt model file: {e}") from e
    return obj


def save_codes(codes: BinaryCodeSet, path):
    """Write packed codes with a fixed-size header."""
    header = _CODES_HEADER.pack(CODES_MAGIC, CODES_VERSION, codes.n_bits, codes.count)
    body = codes.words.astype("<u8", copy=False).tobytes()
    Path(path).write_bytes(header + body)


class CodesFileError(FileFormatError):
    pass


def load_codes(path) -> BinaryCodeSet:
    """Read a code file, re-validating size and the zero-padding invariant."""
    buf = Path(path).read_bytes()
    if len(buf) < _CODES_HEADER.size:
        raise CodesFileError(f"{path}: file shorter than the header", offset=0)
    magic, version, n_bits, count = _CODES_HEADER.unpack_from(buf)
    if magic != CODES_MAGIC:
        raise CodesFileError(f"{path}: bad magic {magic!r}", offset=0)
    if version != CODES_VERSION:
        raise CodesFileError(f"{path}: unsupported codes version {version}", offset=4)
    if n_bits < 1:
        raise CodesFileError(f"{path}: n_bits must be positive, got {n_bits}", offset=8)
    expected = _CODES_HEADER.size + count * words_per_code(n_bits) * 8
    if len(buf) != expected:
        raise CodesFileError(
            f"{path}: expected {expected} bytes for {count} codes, found {len(buf)}",
            offset=min(len(buf), expected),
        )
    words = np.frombuffer(buf, dtype="<u8", offset=_CODES_HEADER.size)
    words = words.reshape(count, words_per_code(n_bits))
    try:
        return BinaryCodeSet(n_bits, words)
    except ValueError as e:
        raise CodesFileError(f"{path}: {e}") from e
