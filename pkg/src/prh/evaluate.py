"""Ground truth, recall curves, and the end-to-end benchmark pipeline.

Recall@R is the fraction of the true Euclidean top-k neighbors (k defaults
to 10, computed in the original feature space) that appear among the top R
Hamming-ranked results, averaged over queries. Competing definitions exist;
this one matches "how much of the true top-10 did R retrieved points catch".
Hamming ties at the R boundary are cut strictly at rank R after
deterministic index tie-breaking.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import codec, dataio, transform
from ._validation import as_matrix
from .learn import LearnerConfig, learn

DEFAULT_R_VALUES = (1, 10, 100, 1000)
DEFAULT_TRUTH_K = 10


@dataclass
class GroundTruth:
    """True nearest-neighbor ids per query, ascending distance, ties by id."""

    k: int
    ids: np.ndarray

    def __post_init__(self):
        if self.ids.ndim != 2 or self.ids.shape[1] != self.k:
            raise ValueError(f"ids must be (queries, {self.k}), got {self.ids.shape}")


def ground_truth(db, queries, k=DEFAULT_TRUTH_K) -> GroundTruth:
    """Exact brute-force Euclidean k-NN of each query against the database."""
    db = as_matrix(db, name="db")
    queries = as_matrix(queries, name="queries")
    if db.shape[1] != queries.shape[1]:
        raise ValueError(f"dim mismatch: db {db.shape[1]} vs queries {queries.shape[1]}")
    if k < 1 or k > db.shape[0]:
        raise ValueError(f"k={k} out of range for database of {db.shape[0]} rows")
    db_sq = (db * db).sum(axis=1)
    ids = np.empty((queries.shape[0], k), dtype=np.int64)
    chunk = max(1, 4_000_000 // max(1, db.shape[0]))
    for start in range(0, queries.shape[0], chunk):
        q = queries[start : start + chunk]
        d = db_sq[None, :] - 2.0 * (q @ db.T) + (q * q).sum(axis=1)[:, None]
        # Stable sort breaks exact distance ties by ascending database index.
        order = np.argsort(d, axis=1, kind="stable")
        ids[start : start + chunk] = order[:, :k]
    return GroundTruth(k=k, ids=ids)


@dataclass
class RecallReport:
    """Recall curve plus the run's cost accounting and configuration echo."""

    R_values: list
    recall: list
    k: int
    timings: dict = field(default_factory=dict)
    op_counts: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b < a for a, b in zip(self.recall, self.recall[1:])):
            raise ValueError("recall must be non-decreasing in R")

    def to_dict(self, with_timings=True):
        out = {
            "R_values": [int(r) for r in self.R_values],
            "recall": [float(r) for r in self.recall],
            "k": self.k,
            "op_counts": dict(self.op_counts),
            "config": dict(self.config),
        }
        if with_timings:
            out["timings"] = {k: float(v) for k, v in self.timings.items()}
        return out

    def to_json(self, with_timings=True):
        return json.dumps(self.to_dict(with_timings), sort_keys=True, indent=2) + "\n"

    def write_text(self, path):
        """Line-oriented report: '<key> <value...>' pairs, one per line."""
        lines = [f"# prh benchmark report v1, recall of true top-{self.k}"]
        for key, value in sorted(self.config.items()):
            lines.append(f"config {key} {value}")
        for key, value in sorted(self.op_counts.items()):
            lines.append(f"ops {key} {value}")
        for key, value in sorted(self.timings.items()):
            lines.append(f"seconds {key} {value:.6f}")
        for r, v in zip(self.R_values, self.recall):
            lines.append(f"recall {r} {v!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("R,recall\n")
            for r, v in zip(self.R_values, self.recall):
                fh.write(f"{r},{v!r}\n")


def recall_curve(retrieved_ids, truth: GroundTruth, R_values=DEFAULT_R_VALUES) -> RecallReport:
    """Mean fraction of true top-k ids found in the top R retrieved, per R."""
    retrieved_ids = np.asarray(retrieved_ids)
    R_values = sorted(int(r) for r in R_values)
    if retrieved_ids.ndim != 2 or retrieved_ids.shape[0] != truth.ids.shape[0]:
        raise ValueError(
            f"retrieved ids must be (queries, depth); got {retrieved_ids.shape} "
            f"for {truth.ids.shape[0]} queries"
        )
    if retrieved_ids.shape[1] < max(R_values):
        raise ValueError(
            f"retrieval depth {retrieved_ids.shape[1]} < max R {max(R_values)}"
        )
    recalls = []
    for r in R_values:
        hits = (retrieved_ids[:, :r, None] == truth.ids[:, None, :]).any(axis=1).sum(axis=1)
        recalls.append(float(hits.mean()) / truth.k)
    return RecallReport(R_values=R_values, recall=recalls, k=truth.k)


@dataclass
class BenchmarkConfig:
    """Inputs for run_benchmark: a data source plus learner and eval settings.

    Exactly one data source: generator parameters (dim/log_var/counts) or
    file paths (train/query/db).
    """

    learner: LearnerConfig = field(default_factory=LearnerConfig)
    R_values: tuple = DEFAULT_R_VALUES
    truth_k: int = DEFAULT_TRUTH_K
    dim: int | None = None
    log_var: float | None = None
    counts: tuple | None = None
    data_seed: int = 0
    train_path: str | None = None
    query_path: str | None = None
    db_path: str | None = None

    def uses_generator(self):
        gen = self.dim is not None
        files = self.train_path is not None
        if gen == files:
            raise ValueError("supply either generator parameters or dataset paths, not both")
        if gen and (self.log_var is None or self.counts is None):
            raise ValueError("generator mode needs dim, log_var and counts")
        if files and (self.query_path is None or self.db_path is None):
            raise ValueError("file mode needs train, query and db paths")
        return gen

    def echo(self):
        out = {
            "R_values": list(self.R_values),
            "truth_k": self.truth_k,
            "data_seed": self.data_seed,
        }
        if self.dim is not None:
            out.update(dim=self.dim, log_var=self.log_var, counts=list(self.counts))
        else:
            out.update(train=self.train_path, query=self.query_path, db=self.db_path)
        out.update({f"learner_{k}": v for k, v in self.learner.to_dict().items()})
        return out


def _load_benchmark_data(cfg: BenchmarkConfig):
    if cfg.uses_generator():
        n_train, n_query, n_db = cfg.counts
        return dataio.gen_toy(cfg.dim, cfg.log_var, n_train, n_query, n_db, cfg.data_seed)
    train = np.asarray(dataio.read_vectors(cfg.train_path), dtype=np.float64)
    query = np.asarray(dataio.read_vectors(cfg.query_path), dtype=np.float64)
    db = np.asarray(dataio.read_vectors(cfg.db_path), dtype=np.float64)
    return train, query, db


def run_benchmark(cfg: BenchmarkConfig, artifacts_dir=None) -> RecallReport:
    """learn -> encode -> search -> recall, with timings and op counters.

    When artifacts_dir is given, the model, code files and rankings are also
    written there.
    """
    train, query, db = _load_benchmark_data(cfg)
    depth = max(cfg.R_values)
    if depth > db.shape[0]:
        raise ValueError(f"max R {depth} exceeds database size {db.shape[0]}")

    t0 = time.perf_counter()
    model = learn(train, cfg.learner)
    t1 = time.perf_counter()
    db_codes = codec.encode(model, db)
    query_codes = codec.encode(model, query)
    t2 = time.perf_counter()
    ranked_ids, _ = codec.knn_hamming_batch(query_codes, db_codes, depth)
    t3 = time.perf_counter()
    truth = ground_truth(db, query, cfg.truth_k)
    t4 = time.perf_counter()

    report = recall_curve(ranked_ids, truth, cfg.R_values)
    report.timings = {
        "learn": t1 - t0,
        "encode": t2 - t1,
        "search": t3 - t2,
        "ground_truth": t4 - t3,
        "total": t4 - t0,
    }
    per_vec = transform.op_counts(model)
    report.op_counts = {f"{k}_per_vector": v for k, v in per_vec.items()}
    report.op_counts["encode_multiplications_total"] = per_vec["multiplications"] * (
        db.shape[0] + query.shape[0]
    )
    report.op_counts["encode_additions_total"] = per_vec["additions"] * (
        db.shape[0] + query.shape[0]
    )
    report.config = cfg.echo()

    if artifacts_dir is not None:
        out = Path(artifacts_dir)
        out.mkdir(parents=True, exist_ok=True)
        dataio.save_model(model, out / "model.json", config=cfg.learner.to_dict())
        dataio.save_codes(db_codes, out / "db.codes")
        dataio.save_codes(query_codes, out / "query.codes")
        dataio.write_ids(ranked_ids, out / "rankings.ivecs")
    return report
