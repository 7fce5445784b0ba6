import json
import os
from pathlib import Path

import numpy as np
import pytest

import oracles
from prh import dataio
from prh.codec import BinaryCodeSet
from prh.dataio import (
    CodesFileError,
    FileFormatError,
    InconsistentDimError,
    MalformedHeaderError,
    ModelFileError,
    TruncatedFileError,
    gen_toy,
    load_codes,
    load_model,
    load_model_info,
    read_ids,
    read_vectors,
    save_codes,
    save_model,
    toy_covariance_factors,
    write_ids,
    write_vectors,
)
from prh.learn import LearnerConfig, learn
from prh.transform import apply, to_dense


class TestVectorFiles:
    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.fvecs"
        p.write_bytes(b"")
        out = read_vectors(p)
        assert out.shape[0] == 0

    def test_round_trip_bit_identical_singles(self, tmp_path):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((37, 12))
        p = tmp_path / "x.fvecs"
        write_vectors(X, p)
        got = read_vectors(p)
        assert got.dtype == np.float32
        np.testing.assert_array_equal(got, X.astype(np.float32))
        write_vectors(got, tmp_path / "y.fvecs")
        assert (tmp_path / "y.fvecs").read_bytes() == p.read_bytes()

    def test_ids_round_trip(self, tmp_path):
        ids = np.array([[3, 1, 4], [1, 5, 9]], dtype=np.int32)
        p = tmp_path / "x.ivecs"
        write_ids(ids, p)
        np.testing.assert_array_equal(read_ids(p), ids)

    def test_malformed_header_offset_zero(self, tmp_path):
        p = tmp_path / "bad.fvecs"
        p.write_bytes(np.array([-3], dtype="<i4").tobytes() + b"\x00" * 12)
        with pytest.raises(MalformedHeaderError) as e:
            read_vectors(p)
        assert e.value.offset == 0

    def test_short_header(self, tmp_path):
        p = tmp_path / "bad.fvecs"
        p.write_bytes(b"\x01\x00")
        with pytest.raises(MalformedHeaderError):
            read_vectors(p)

    def test_truncated_reports_offset(self, tmp_path):
        p = tmp_path / "t.fvecs"
        write_vectors(np.ones((3, 4), dtype=np.float32), p)
        blob = p.read_bytes()
        p.write_bytes(blob[:-5])
        with pytest.raises(TruncatedFileError) as e:
            read_vectors(p)
        assert e.value.offset == 2 * 20  # two whole 20-byte records survive

    def test_inconsistent_dims_reports_record(self, tmp_path):
        a = tmp_path / "a.fvecs"
        b = tmp_path / "b.fvecs"
        write_vectors(np.ones((2, 4), dtype=np.float32), a)
        write_vectors(np.ones((2, 9), dtype=np.float32), b)
        p = tmp_path / "mixed.fvecs"
        # second file's records parse as dim-4 records at offset 40
        p.write_bytes(a.read_bytes() + b.read_bytes())
        with pytest.raises((InconsistentDimError, TruncatedFileError)) as e:
            read_vectors(p)
        assert e.value.offset is not None

    def test_inconsistent_dims_exact(self, tmp_path):
        rec = np.zeros((1, 5), dtype="<i4")
        rec[0, 0] = 4
        bad = rec.copy()
        bad[0, 0] = 7
        p = tmp_path / "mixed.fvecs"
        p.write_bytes(rec.tobytes() + rec.tobytes() + bad.tobytes())
        with pytest.raises(InconsistentDimError) as e:
            read_vectors(p)
        assert e.value.offset == 40


class TestModelFiles:
    def make_model(self, dim=16, seed=0):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((200, dim)) * np.exp(rng.normal(0, 1, dim))
        cfg = LearnerConfig(mode="rspca", seed=seed)
        return learn(X, cfg), cfg

    def test_round_trip_bit_exact_apply(self, tmp_path):
        t, cfg = self.make_model(128)
        p = tmp_path / "m.json"
        save_model(t, p, cfg.to_dict())
        t2 = load_model(p)
        rng = np.random.default_rng(1)
        v = rng.standard_normal(128)
        np.testing.assert_array_equal(apply(t, v), apply(t2, v))
        np.testing.assert_array_equal(to_dense(t), to_dense(t2))
        np.testing.assert_array_equal(t.center, t2.center)

    def test_metadata_recorded(self, tmp_path):
        t, cfg = self.make_model()
        p = tmp_path / "m.json"
        save_model(t, p, cfg.to_dict())
        info = load_model_info(p)
        assert info["rng_algorithm"] == "numpy-pcg64"
        assert info["parity"] == 1
        assert info["config"]["mode"] == "rspca"
        assert info["version"] == 1

    def test_truncated_rejected(self, tmp_path):
        t, cfg = self.make_model()
        p = tmp_path / "m.json"
        save_model(t, p)
        p.write_text(p.read_text()[:-10])
        with pytest.raises(ModelFileError, match="corrupt"):
            load_model(p)

    def test_version_mismatch_rejected(self, tmp_path):
        t, _ = self.make_model()
        p = tmp_path / "m.json"
        save_model(t, p)
        obj = json.loads(p.read_text())
        obj["version"] = 99
        p.write_text(json.dumps(obj, separators=(",", ":")))
        with pytest.raises(ModelFileError, match="version"):
            load_model(p)

    def test_wrong_format_rejected(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text('{"format":"other"}')
        with pytest.raises(ModelFileError):
            load_model(p)

    def test_invalid_stage_rejected(self, tmp_path):
        t, _ = self.make_model(4)
        p = tmp_path / "m.json"
        save_model(t, p)
        obj = json.loads(p.read_text())
        obj["stages"][0][0][1] = obj["stages"][0][0][0]  # duplicate index
        p.write_text(json.dumps(obj, separators=(",", ":")))
        with pytest.raises(ModelFileError):
            load_model(p)


class TestCodeFiles:
    def make_codes(self, count=40, n_bits=70, seed=0):
        rng = np.random.default_rng(seed)
        return BinaryCodeSet.from_bits(rng.integers(0, 2, size=(count, n_bits)))

    def test_round_trip(self, tmp_path):
        cs = self.make_codes()
        p = tmp_path / "c.codes"
        save_codes(cs, p)
        got = load_codes(p)
        assert got.n_bits == cs.n_bits
        np.testing.assert_array_equal(got.words, cs.words)

    def test_truncated_rejected(self, tmp_path):
        cs = self.make_codes()
        p = tmp_path / "c.codes"
        save_codes(cs, p)
        p.write_bytes(p.read_bytes()[:-3])
        with pytest.raises(CodesFileError):
            load_codes(p)

    def test_bad_magic_rejected(self, tmp_path):
        cs = self.make_codes()
        p = tmp_path / "c.codes"
        save_codes(cs, p)
        blob = bytearray(p.read_bytes())
        blob[0] ^= 0xFF
        p.write_bytes(bytes(blob))
        with pytest.raises(CodesFileError, match="magic"):
            load_codes(p)

    def test_nonzero_padding_rejected(self, tmp_path):
        cs = self.make_codes(n_bits=70)
        p = tmp_path / "c.codes"
        save_codes(cs, p)
        blob = bytearray(p.read_bytes())
        blob[-1] |= 0x80  # highest padding bit of the last word
        p.write_bytes(bytes(blob))
        with pytest.raises(CodesFileError, match="padding"):
            load_codes(p)


class TestFuzzSingleByteMutation:
    """A mutated file must be rejected or visibly change the loaded value.

    Every byte position is hit once with a random replacement value.
    """

    def mutations(self, blob, rng):
        for pos in range(len(blob)):
            out = bytearray(blob)
            new = int(rng.integers(0, 256))
            while new == out[pos]:
                new = int(rng.integers(0, 256))
            out[pos] = new
            yield pos, bytes(out)

    def test_vector_files(self, tmp_path):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((6, 3))
        p = tmp_path / "x.fvecs"
        write_vectors(X, p)
        original = p.read_bytes()
        baseline = read_vectors(p)
        q = tmp_path / "mut.fvecs"
        for pos, blob in self.mutations(original, rng):
            q.write_bytes(blob)
            try:
                got = read_vectors(q)
            except FileFormatError:
                continue
            assert (
                got.shape != baseline.shape or got.tobytes() != baseline.tobytes()
            ), f"mutation at byte {pos} was silent"

    def test_model_files(self, tmp_path):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((50, 5))
        cfg = LearnerConfig(mode="rspca", seed=3)
        t = learn(X, cfg)
        p = tmp_path / "m.json"
        save_model(t, p, cfg.to_dict())
        original = p.read_bytes()
        info0 = load_model_info(p)
        q = tmp_path / "mut.json"
        for pos, blob in self.mutations(original, rng):
            q.write_bytes(blob)
            try:
                load_model(q)
                info = load_model_info(q)
            except (FileFormatError, ValueError):
                continue
            assert info != info0, f"mutation at byte {pos} was silent"

    def test_code_files(self, tmp_path):
        rng = np.random.default_rng(2)
        cs = BinaryCodeSet.from_bits(rng.integers(0, 2, size=(5, 70)))
        p = tmp_path / "c.codes"
        save_codes(cs, p)
        original = p.read_bytes()
        q = tmp_path / "mut.codes"
        for pos, blob in self.mutations(original, rng):
            q.write_bytes(blob)
            try:
                got = load_codes(q)
            except FileFormatError:
                continue
            changed = (
                got.n_bits != cs.n_bits
                or got.count != cs.count
                or got.words.tobytes() != cs.words.tobytes()
            )
            assert changed, f"mutation at byte {pos} was silent"


class TestGenToy:
    def test_deterministic(self):
        a = gen_toy(8, 1.0, 10, 5, 7, seed=42)
        b = gen_toy(8, 1.0, 10, 5, 7, seed=42)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_split_sizes(self):
        train, query, db = gen_toy(4, 1.0, 11, 3, 6, seed=0)
        assert train.shape == (11, 4)
        assert query.shape == (3, 4)
        assert db.shape == (6, 4)

    def test_sample_covariance_matches_construction(self):
        dim = 6
        train, _, _ = gen_toy(dim, 1.0, 50_000, 1, 1, seed=7)
        eig, q = toy_covariance_factors(dim, 1.0, seed=7)
        true_cov = (q * eig) @ q.T
        got = np.cov(train.T, bias=True)
        scale = np.abs(true_cov).max()
        assert np.abs(got - true_cov).max() <= 5.0 / np.sqrt(50_000) * scale * 3

    def test_trace_equals_eigenvalue_sum(self):
        eig, q = toy_covariance_factors(10, 2.0, seed=3)
        true_cov = (q * eig) @ q.T
        assert true_cov.trace() == pytest.approx(eig.sum(), rel=1e-12)

    def test_degenerate_log_var(self):
        train, _, _ = gen_toy(16, 0.0, 20_000, 1, 1, seed=1)
        v = train.var(axis=0)
        assert v.max() / v.min() <= 1.1

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            gen_toy(1, 1.0, 10, 10, 10, seed=0)
        with pytest.raises(ValueError):
            gen_toy(4, 1.0, 0, 10, 10, seed=0)
        with pytest.raises(ValueError):
            gen_toy(4, -1.0, 10, 10, 10, seed=0)


@pytest.mark.skipif(
    "PRH_SIFT1M_DIR" not in os.environ,
    reason="set PRH_SIFT1M_DIR to check the reference dataset layout",
)
def test_sift1m_base_file_shape():
    base = Path(os.environ["PRH_SIFT1M_DIR"]) / "sift_base.fvecs"
    data = read_vectors(base)
    assert data.shape == (1_000_000, 128)
