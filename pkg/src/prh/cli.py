"""Command-line front end.

Subcommands cover the full pipeline: gen-toy, learn, encode, search, eval,
bench (all of the former chained), and analyze (quantization-error/entropy
curves). Every run writes a manifest JSON recording the effective
configuration so results can be replayed; no subcommand mutates its inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic, codec, dataio, evaluate
from .learn import RNG_ALGORITHM, LearnerConfig, learn


def _parse_int_list(text, flag):
    try:
        values = [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects a comma-separated integer list")
    if not values:
        raise argparse.ArgumentTypeError(f"{flag} must not be empty")
    return values


def _write_manifest(path, command, args_dict, seed=None):
    manifest = {
        "command": command,
        "package": "prh",
        "version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "seed": seed,
        "args": args_dict,
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _learner_config(args):
    return LearnerConfig(
        mode=args.mode,
        lam=args.lam,
        iso_stages=args.iso_stages,
        pca_stages=args.pca_stages,
        seed=args.seed,
        center=not args.no_center,
    )


def _add_learner_flags(p):
    p.add_argument("--mode", choices=("iso", "pcat", "rspca", "srr"), default="iso")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                   help="pcat tilt in [0,1]: 0=isotropic angles, 1=pca angles")
    p.add_argument("--iso-stages", type=int, default=None,
                   help="sorted stages (default ceil(log2 dim))")
    p.add_argument("--pca-stages", type=int, default=None,
                   help="extra rspca stages (default ceil(log2 dim))")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-center", action="store_true",
                   help="skip mean centering (zero translation)")


def cmd_gen_toy(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n_train, n_query, n_db = args.counts
    train, query, db = dataio.gen_toy(
        args.dim, args.log_var, n_train, n_query, n_db, args.seed
    )
    dataio.write_vectors(train, out / "train.fvecs")
    dataio.write_vectors(query, out / "query.fvecs")
    dataio.write_vectors(db, out / "db.fvecs")
    _write_manifest(out / "manifest.json", "gen-toy", {
        "dim": args.dim, "log_var": args.log_var,
        "counts": [n_train, n_query, n_db], "out": str(out),
    }, seed=args.seed)
    print(f"wrote {n_train}/{n_query}/{n_db} vectors of dim {args.dim} to {out}")
    return 0


def cmd_learn(args):
    config = _learner_config(args)
    train = np.asarray(dataio.read_vectors(args.train), dtype=np.float64)
    model = learn(train, config)
    dataio.save_model(model, args.model, config=config.to_dict())
    _write_manifest(str(args.model) + ".manifest.json", "learn", {
        "train": args.train, "model": args.model, **config.to_dict(),
    }, seed=args.seed)
    print(f"learned {config.mode} transform: dim {model.dim}, "
          f"{len(model.stages)} stages -> {args.model}")
    return 0


def cmd_encode(args):
    model = dataio.load_model(args.model)
    data = np.asarray(dataio.read_vectors(args.db), dtype=np.float64)
    codes = codec.encode(model, data)
    dataio.save_codes(codes, args.codes)
    _write_manifest(str(args.codes) + ".manifest.json", "encode", {
        "model": args.model, "db": args.db, "codes": args.codes,
        "n_bits": codes.n_bits, "count": codes.count,
    })
    print(f"encoded {codes.count} vectors to {codes.n_bits}-bit codes -> {args.codes}")
    return 0


def cmd_search(args):
    db = dataio.load_codes(args.codes)
    queries = dataio.load_codes(args.query)
    ids, _ = codec.knn_hamming_batch(queries, db, args.depth)
    dataio.write_ids(ids, args.out)
    _write_manifest(str(args.out) + ".manifest.json", "search", {
        "codes": args.codes, "query": args.query,
        "depth": args.depth, "out": args.out,
    })
    print(f"ranked top-{args.depth} of {db.count} codes for "
          f"{queries.count} queries -> {args.out}")
    return 0


def _emit_report(report, out_prefix):
    out_prefix = Path(out_prefix)
    out_prefix.parent.mkdir(parents=True, exist_ok=True)
    json_path = Path(str(out_prefix) + ".report.json")
    json_path.write_text(report.to_json())
    report.write_text(str(out_prefix) + ".report.txt")
    report.write_csv(str(out_prefix) + ".recall.csv")
    return json_path


def cmd_eval(args):
    if not args.truth and not (args.db and args.query):
        raise ValueError("eval needs either --truth or both --db and --query")
    ranked = np.asarray(dataio.read_ids(args.rankings), dtype=np.int64)
    if args.truth:
        truth_ids = np.asarray(dataio.read_ids(args.truth), dtype=np.int64)[:, : args.k]
        truth = evaluate.GroundTruth(k=args.k, ids=truth_ids)
    else:
        db = np.asarray(dataio.read_vectors(args.db), dtype=np.float64)
        query = np.asarray(dataio.read_vectors(args.query), dtype=np.float64)
        truth = evaluate.ground_truth(db, query, args.k)
    report = evaluate.recall_curve(ranked, truth, args.R)
    report.config = {"rankings": args.rankings, "k": args.k}
    path = _emit_report(report, args.out)
    _write_manifest(str(args.out) + ".manifest.json", "eval", {
        "rankings": args.rankings, "truth": args.truth, "db": args.db,
        "query": args.query, "k": args.k, "R": args.R, "out": args.out,
    })
    for r, v in zip(report.R_values, report.recall):
        print(f"recall@{r} = {v:.4f}")
    print(f"report -> {path}")
    return 0


def cmd_bench(args):
    learner = _learner_config(args)
    if args.dim is not None:
        counts = args.counts or [10000, 2000, 100000]
        cfg = evaluate.BenchmarkConfig(
            learner=learner, R_values=tuple(args.R), truth_k=args.k,
            dim=args.dim, log_var=args.log_var, counts=tuple(counts),
            data_seed=args.data_seed,
        )
    else:
        cfg = evaluate.BenchmarkConfig(
            learner=learner, R_values=tuple(args.R), truth_k=args.k,
            train_path=args.train, query_path=args.query, db_path=args.db,
        )
    cfg.uses_generator()  # validates the source combination
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = evaluate.run_benchmark(cfg, artifacts_dir=out)
    (out / "report.json").write_text(report.to_json())
    report.write_text(out / "report.txt")
    report.write_csv(out / "recall.csv")
    _write_manifest(out / "manifest.json", "bench", report.config, seed=args.seed)
    for r, v in zip(report.R_values, report.recall):
        print(f"recall@{r} = {v:.4f}")
    print(f"artifacts -> {out}")
    return 0


def cmd_analyze(args):
    g = analytic.gamma(args.lambda1, args.lambda2)
    thetas = np.linspace(0.0, math.pi / 2.0, args.grid)
    rows = []
    for theta in thetas:
        c = analytic.cov_from_eigen(
            analytic.EigenAngleParam(args.lambda1, args.lambda2, float(theta))
        )
        eq = analytic.qerr_gauss2d(c)
        s = analytic.entropy2d(g, float(theta))
        rows.append((float(theta), eq, s, s / math.log(2.0)))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        fh.write("theta,qerr,entropy_nats,entropy_bits\n")
        for row in rows:
            fh.write(",".join(repr(v) for v in row) + "\n")
    _write_manifest(str(out) + ".manifest.json", "analyze", {
        "lambda1": args.lambda1, "lambda2": args.lambda2,
        "grid": args.grid, "out": str(out),
    })
    print(f"wrote {args.grid}-point curve (gamma={g:.5f}) -> {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="prh",
        description="Sparse pairwise-rotation hashing for binary ANN search.",
    )
    parser.add_argument("--version", action="version", version=f"prh {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-toy", help="generate a rotated lognormal-eigenvalue gaussian")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--log-var", type=float, default=1.0)
    p.add_argument("--counts", type=lambda s: _parse_int_list(s, "--counts"),
                   default=[10000, 2000, 100000],
                   help="train,query,db sizes (default 10000,2000,100000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_toy)

    p = sub.add_parser("learn", help="learn a factored transform from training vectors")
    p.add_argument("--train", required=True)
    p.add_argument("--model", required=True, help="output model path")
    _add_learner_flags(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("encode", help="binarize a vector file with a learned model")
    p.add_argument("--model", required=True)
    p.add_argument("--db", required=True, help="vector file to encode")
    p.add_argument("--codes", required=True, help="output code file")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("search", help="rank database codes by Hamming distance")
    p.add_argument("--codes", required=True, help="database code file")
    p.add_argument("--query", required=True, help="query code file")
    p.add_argument("--depth", type=int, default=1000)
    p.add_argument("--out", required=True, help="output rankings (int records)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="recall of rankings against Euclidean ground truth")
    p.add_argument("--rankings", required=True)
    p.add_argument("--db", help="database vectors (to compute ground truth)")
    p.add_argument("--query", help="query vectors (to compute ground truth)")
    p.add_argument("--truth", help="precomputed ground-truth id file")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--R", type=lambda s: _parse_int_list(s, "--R"),
                   default=list(evaluate.DEFAULT_R_VALUES))
    p.add_argument("--out", required=True, help="output report prefix")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="full pipeline: learn, encode, search, evaluate")
    src = p.add_argument_group("data source (generator or files)")
    src.add_argument("--dim", type=int)
    src.add_argument("--log-var", type=float, default=1.0)
    src.add_argument("--counts", type=lambda s: _parse_int_list(s, "--counts"))
    src.add_argument("--data-seed", type=int, default=0)
    src.add_argument("--train")
    src.add_argument("--query")
    src.add_argument("--db")
    _add_learner_flags(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--R", type=lambda s: _parse_int_list(s, "--R"),
                   default=list(evaluate.DEFAULT_R_VALUES))
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("analyze", help="quantization error and entropy over the ellipse angle")
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
