"""``rosgns`` command line: build statistics, train, evaluate, inspect neighbours.

Exit codes: 0 success, 1 usage error, 2 data/contract error, 3 numerical abort.
Flag defaults can be overridden with ``ROSGNS_<FLAG>`` environment variables,
e.g. ``ROSGNS_MIN_COUNT=20``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import shutil
import sys
import time
import warnings
from contextlib import contextmanager

import numpy as np
from threadpoolctl import threadpool_limits

from . import baselines, corpus, embeddings, evaluation, manifold, sgns
from .errors import ContractError, NumericalAbort, RosgnsError, TokenNotFoundError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
METHODS = ("ro-sgns", "svd-sppmi", "sgd-sgns")

logger = logging.getLogger("rosgns")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env(name, default, conv=str):
    raw = os.environ.get("ROSGNS_" + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return conv(raw)
    except ValueError:
        raise UsageError(f"bad value for ROSGNS_{name.upper()}: {raw!r}") from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class _Timer:
    def __init__(self):
        self.phases = {}

    @contextmanager
    def phase(self, name):
        t0 = time.perf_counter()
        yield
        dt = time.perf_counter() - t0
        self.phases[name] = round(dt, 6)
        print(f"[time] {name}: {dt:.2f}s", file=sys.stderr)


def cmd_build_cooc(args):
    timer = _Timer()
    with timer.phase("tokenize"):
        tokens = corpus.read_tokens(args.corpus)
    with timer.phase("vocabulary"):
        vocab = corpus.build_vocabulary(tokens, args.min_count)
    if len(vocab) == 0:
        print(f"warning: no token occurs more than {args.min_count} times", file=sys.stderr)
        raise UsageError("empty vocabulary; lower --min-count")
    with timer.phase("count"):
        stats = corpus.count_cooccurrences(tokens, vocab, args.window)
    with timer.phase("write"):
        corpus.save_stats(stats, args.out)
    print(f"n={stats.n} m={stats.m} |D|={stats.total_pairs} nnz={stats.nnz} window={stats.window} "
          f"min_count={vocab.min_count}")
    return EXIT_OK


def _initial_point(args, stats, d, k):
    if args.init in (None, "svd-sppmi"):
        return baselines.svd_sppmi_factors(stats, d, k), sgns.InitMode.SVD_SPPMI
    if args.init == "random":
        scale = np.linalg.norm(baselines.svd_sppmi_factors(stats, d, k).S)
        return baselines.random_factors((stats.n, stats.m), d, args.seed, scale), sgns.InitMode.RANDOM
    factors, _ = manifold.load_checkpoint(args.init)
    return factors, sgns.InitMode.PROVIDED


def cmd_train(args):
    timer = _Timer()
    with timer.phase("load-stats"):
        stats = corpus.load_stats(args.stats)
    d = args.dim
    if d > min(stats.n, stats.m):
        raise UsageError(f"--dim {d} exceeds min(n, m) = {min(stats.n, stats.m)}")
    if args.method == "svd-sppmi":
        for flag in ("step", "iters", "init"):
            if getattr(args, flag) is not None:
                print(f"warning: --{flag} is ignored for svd-sppmi", file=sys.stderr)
    if args.method == "sgd-sgns" and args.corpus is None:
        raise UsageError("--corpus is required for sgd-sgns")
    try:
        config = sgns.SgnsConfig(d, args.neg, args.step, args.iters)
    except ContractError as exc:
        raise UsageError(str(exc)) from None
    manifest = {
        "method": args.method,
        "config": {
            "dimension": config.dimension,
            "negative_samples": config.negative_samples,
            "seed": args.seed,
            "scaling": args.scaling,
            "threads": args.threads,
        },
        "inputs": {args.stats: _sha256(args.stats)},
        "outputs": {"embeddings": args.out},
    }
    if args.method == "ro-sgns":
        with timer.phase("init"):
            init, mode = _initial_point(args, stats, d, config.negative_samples)
        if init.shape != (stats.n, stats.m) or init.rank != d:
            raise ContractError("provided initial factors do not match the statistics and --dim")
        if mode is sgns.InitMode.PROVIDED:
            manifest["inputs"][args.init] = _sha256(args.init)
        manifest["config"].update(step_size=config.step_size, iterations=config.iterations, init_mode=mode.value)
        with timer.phase("train"):
            result = manifold.train(stats, config, init)
        for i, value in enumerate(result.trace):
            print(f"iter {i}: F = {value:.6e}", file=sys.stderr)
        factors = result.factors
        if args.trace:
            manifold.write_trace(result.trace, args.trace)
            manifest["outputs"]["trace"] = args.trace
        manifest["objective"] = {"initial": result.trace[0], "final": result.trace[-1]}
    elif args.method == "svd-sppmi":
        with timer.phase("train"):
            factors = baselines.svd_sppmi_factors(stats, d, config.negative_samples)
        manifest["objective"] = {"final": sgns.objective(factors.to_dense(), stats, config.negative_samples)}
    else:
        with timer.phase("tokenize"):
            tokens = corpus.read_tokens(args.corpus)
        manifest["inputs"][args.corpus] = _sha256(args.corpus)
        manifest["config"].update(epochs=args.epochs, learning_rate=args.lr, window=stats.window)
        with timer.phase("train"):
            pair = baselines.sgd_sgns_train(tokens, stats.vocab, config, args.epochs, args.seed,
                                            window=stats.window, learning_rate=args.lr)
        value = sgns.objective(pair.W @ pair.C.T, stats, config.negative_samples)
        manifest["objective"] = {"final": value}
        factors = None
    with timer.phase("extract"):
        if factors is not None:
            W, _ = embeddings.extract_embeddings(factors, args.scaling)
            if args.checkpoint:
                manifold.save_checkpoint(factors, args.checkpoint, config.iterations if args.method == "ro-sgns" else 0)
                manifest["outputs"]["checkpoint"] = args.checkpoint
        else:
            W = pair.W
        emb = embeddings.EmbeddingSet(stats.vocab.tokens, W, {"method": args.method})
        embeddings.save_embeddings(emb, args.out)
    print(f"F(final) = {manifest['objective']['final']:.6e}")
    manifest["timing_seconds"] = timer.phases
    with open(args.out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _method_label(path):
    try:
        with open(path + ".manifest.json") as fh:
            return json.load(fh)["method"]
    except (OSError, ValueError, KeyError):
        return os.path.basename(path)


def cmd_evaluate(args):
    datasets = [evaluation.load_dataset(p) for p in args.dataset]
    names = args.names.split(",") if args.names else [_method_label(p) for p in args.embeddings]
    if len(names) != len(args.embeddings):
        raise UsageError("--names must give one label per embeddings file")
    rows = {}
    for label, path in zip(names, args.embeddings):
        emb = embeddings.load_embeddings(path)
        rows[label] = [evaluation.evaluate_or_na(emb, ds) for ds in datasets]
    print(evaluation.format_table(rows), end="")
    for label, reports in rows.items():
        for r in reports:
            print(f"{label} {r.dataset}: {r.pairs_used}/{r.pairs_total} pairs in vocabulary", file=sys.stderr)
    text = evaluation.reports_to_csv(rows)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_neighbors(args):
    emb = embeddings.load_embeddings(args.embeddings)
    hits = embeddings.nearest_neighbors(emb, args.query, args.count, args.offset)
    for rank, (token, cos) in enumerate(hits, args.offset + 1):
        print(f"{rank:>4}  {token}  {cos:.3f}")
    return EXIT_OK


def cmd_toy_data(args):
    from .data import toy_corpus_path, toy_similarity_path

    os.makedirs(args.outdir, exist_ok=True)
    for src in (toy_corpus_path(), toy_similarity_path()):
        with src.open("rb") as fin, open(os.path.join(args.outdir, src.name), "wb") as fout:
            shutil.copyfileobj(fin, fout)
        print(os.path.join(args.outdir, src.name))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="rosgns", description="SGNS embeddings by Riemannian optimization, with baselines.")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--threads", type=_positive_int, default=_env("threads", None, int),
                   help="BLAS threads (default: all cores; 1 guarantees bitwise reproducibility)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build-cooc", help="count word-context pairs in a text corpus")
    b.add_argument("corpus", help="text file, or - for stdin")
    b.add_argument("--window", type=_positive_int, default=_env("window", 5, int))
    b.add_argument("--min-count", type=_positive_int, default=_env("min_count", 200, int),
                   help="keep tokens occurring strictly more often than this")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build_cooc)

    t = sub.add_parser("train", help="train embeddings from a statistics file")
    t.add_argument("stats")
    t.add_argument("--method", choices=METHODS, default=_env("method", "ro-sgns"))
    t.add_argument("--dim", type=_positive_int, default=_env("dim", 100, int))
    t.add_argument("--neg", type=_positive_int, default=_env("neg", 5, int),
                   help="negative samples k (the reference experiments do not report theirs; 5 is conventional)")
    t.add_argument("--step", type=float, default=_env("step", None, float))
    t.add_argument("--iters", type=int, default=_env("iters", None, int))
    t.add_argument("--init", default=_env("init", None),
                   help="svd-sppmi (default), random, or a checkpoint .npz")
    t.add_argument("--seed", type=int, default=_env("seed", 0, int))
    t.add_argument("--scaling", choices=embeddings.SCALINGS, default=_env("scaling", "sqrt"))
    t.add_argument("--corpus", help="token stream for sgd-sgns")
    t.add_argument("--epochs", type=_positive_int, default=_env("epochs", 5, int))
    t.add_argument("--lr", type=float, default=_env("lr", 0.025, float))
    t.add_argument("--out", required=True)
    t.add_argument("--trace", help="write per-iteration objective CSV")
    t.add_argument("--checkpoint", help="write final factors (.npz)")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="Spearman correlation on word-similarity datasets")
    e.add_argument("embeddings", nargs="+")
    e.add_argument("--dataset", action="append", required=True)
    e.add_argument("--names", help="comma-separated row labels")
    e.add_argument("--csv")
    e.set_defaults(func=cmd_evaluate)

    nb = sub.add_parser("neighbors", help="nearest neighbours by cosine")
    nb.add_argument("embeddings")
    nb.add_argument("query")
    nb.add_argument("--count", type=_positive_int, default=10)
    nb.add_argument("--offset", type=int, default=0)
    nb.set_defaults(func=cmd_neighbors)

    td = sub.add_parser("toy-data", help="copy the bundled toy corpus and similarity set")
    td.add_argument("outdir")
    td.set_defaults(func=cmd_toy_data)
    return p


def main(argv=None):
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"rosgns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    warnings.simplefilter("always", manifold.RankDeficiencyWarning)
    if getattr(args, "offset", 0) < 0:
        print("rosgns: error: --offset must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        with threadpool_limits(limits=args.threads):
            return args.func(args)
    except UsageError as exc:
        print(f"rosgns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalAbort as exc:
        print(f"rosgns: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TokenNotFoundError as exc:
        print(f"rosgns: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (RosgnsError, OSError) as exc:
        print(f"rosgns: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
