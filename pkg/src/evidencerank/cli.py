"""Command-line surface: score packs, rank models, evaluate rankings, benchmark.

Exit codes are a stable contract: 0 success, 2 input/validation error,
3 numeric failure. Reports go to stdout, diagnostics to stderr. Every
subcommand accepts --json for machine-readable output (schemas documented
in the README).
"""

import argparse
import concurrent.futures
import csv
import json
import os
import statistics
import sys
import time

import numpy as np

from .baselines import argmax_pseudo_labels, leep, linear_probe_score, nce
from .errors import FeatPackError, InvalidInputError, NumericFailureError
from .evidence import SolverOptions, logme
from .io import inspect_featpack, one_hot, read_featpack, write_featpack
from .metrics import rank_report
from .synthetic import ToyConfig, gen_clusters, gen_random, gen_regression

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

DEFAULT_PROBE_LAMBDAS = "1e-4,1e-2,1,1e2,1e4"


def _env_workers():
    raw = os.environ.get("EVIDENCERANK_THREADS")
    if not raw:
        return None
    try:
        v = int(raw)
    except ValueError:
        raise InvalidInputError(f"EVIDENCERANK_THREADS must be an integer, got {raw!r}")
    if v < 1:
        raise InvalidInputError("EVIDENCERANK_THREADS must be >= 1")
    return v


def _labels_from(targets):
    """Class labels from a pack: either the stored int vector or exact one-hot rows."""
    if targets.ndim == 1:
        return targets
    if np.all((targets == 0.0) | (targets == 1.0)) and np.all(targets.sum(axis=1) == 1.0):
        return np.argmax(targets, axis=1).astype(np.int64)
    return None


def _solver_options(args) -> SolverOptions:
    return SolverOptions(
        rel_tol=args.rel_tol,
        max_iter=args.max_iter,
        m_step="naive" if args.naive else "optimized",
        standardize=args.standardize,
    )


def score_pack(path, method, opts: SolverOptions, probe_lambdas, probe_folds, workers=None):
    """Score one pack; returns a flat dict used by both `score` and `rank`."""
    F, targets, theta = read_featpack(path)
    num_classes = inspect_featpack(path)["K"]  # declared class count, not max(label)+1
    t0 = time.perf_counter()
    out = {"method": method, "degenerate": False}

    if method == "logme":
        if targets.ndim == 1:
            Y = one_hot(targets, num_classes)
        else:
            Y = targets
        result = logme(F, Y, opts, workers=workers)
        out["score"] = result.score
        out["per_dim"] = [float(v) for v in result.per_dim]
        out["iterations"] = [s.iterations for s in result.states]
        out["converged"] = [s.converged for s in result.states]
        out["degenerate"] = result.degenerate
    elif method in ("leep", "nce"):
        if theta is None:
            raise InvalidInputError(f"{method}: theta block required")
        y = _labels_from(targets)
        if y is None:
            raise InvalidInputError(f"{method}: pack must carry class labels (or exact one-hot targets)")
        if method == "leep":
            out["score"] = leep(theta, y)
        else:
            out["score"] = nce(argmax_pseudo_labels(theta), y)
    elif method == "probe":
        y = targets if targets.ndim == 1 else None
        Y = one_hot(y, num_classes) if y is not None else targets
        best_lambda, score = linear_probe_score(F, Y, probe_lambdas, probe_folds)
        out["score"] = score
        out["best_lambda"] = best_lambda
    else:
        raise InvalidInputError(f"unknown method {method!r}")

    out["wall_ms"] = (time.perf_counter() - t0) * 1000.0
    return out


def cmd_score(args) -> int:
    out = score_pack(
        args.featpack, args.method, _solver_options(args),
        _parse_grid(args.probe_lambdas), args.probe_folds, workers=_env_workers(),
    )
    if args.json:
        print(json.dumps({"command": "score", **out}))
        return EXIT_OK
    print(f"method: {out['method']}")
    print(f"score: {out['score']:.10g}")
    if "per_dim" in out:
        print("per_dim: " + " ".join(f"{v:.10g}" for v in out["per_dim"]))
        print("iterations: " + " ".join(str(i) for i in out["iterations"]))
    if "best_lambda" in out:
        print(f"best_lambda: {out['best_lambda']:g}")
    if out["degenerate"]:
        print("degenerate: yes")
    print(f"wall_ms: {out['wall_ms']:.2f}")
    return EXIT_OK


def _read_manifest(path):
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected name<TAB>path")
            name, pack = line.split("\t", 1)
            entries.append((name.strip(), pack.strip()))
    if len(entries) < 2:
        raise InvalidInputError("need >= 2 models to rank")
    names = [n for n, _ in entries]
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise InvalidInputError(f"duplicate model name {dup!r} in manifest")
    for name, pack in entries:
        if not os.path.exists(pack):
            raise InvalidInputError(f"entry {name!r}: pack file not found: {pack}")
    return entries


def cmd_rank(args) -> int:
    entries = _read_manifest(args.manifest)
    opts = _solver_options(args)
    lambdas = _parse_grid(args.probe_lambdas)
    workers = _env_workers() or min(len(entries), os.cpu_count() or 1)

    def run(entry):
        name, pack = entry
        res = score_pack(pack, args.method, opts, lambdas, args.probe_folds)
        return {"model_name": name, "featpack_path": pack, "score": res["score"],
                "method": args.method, "degenerate": res["degenerate"],
                "wall_ms": res["wall_ms"]}

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(run, entries))
    rows.sort(key=lambda r: (-r["score"], r["model_name"]))

    if args.json:
        print(json.dumps({"command": "rank", "method": args.method, "entries": rows}))
        return EXIT_OK
    width = max(len(r["model_name"]) for r in rows)
    print(f"{'rank':>4}  {'model':<{width}}  {'score':>14}  {'wall_ms':>9}  flags")
    for i, r in enumerate(rows, start=1):
        flag = "degenerate" if r["degenerate"] else ""
        print(f"{i:>4}  {r['model_name']:<{width}}  {r['score']:>14.6g}  {r['wall_ms']:>9.1f}  {flag}")
    return EXIT_OK


def _read_column(path):
    vals = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                vals.append(float(s))
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: cannot parse {s!r} as a number")
    return np.asarray(vals)


def cmd_eval(args) -> int:
    S = _read_column(args.scores)
    T = _read_column(args.truths)
    if S.size != T.size:
        raise InvalidInputError(f"length mismatch: {S.size} scores vs {T.size} truths")
    report = rank_report(S, T, higher_truth_better=not args.lower_truth_better)
    prob = (report.tau + 1.0) / 2.0
    if args.json:
        print(json.dumps({
            "command": "eval", "tau": report.tau, "tau_w": report.tau_w,
            "concordant_fraction": report.concordant_fraction,
            "selection_probability": prob, "m": int(S.size),
        }))
        return EXIT_OK
    print(f"tau: {report.tau:.6f}")
    print(f"tau_w: {report.tau_w:.6f}")
    if report.concordant_fraction is None:
        print("concordant_fraction: n/a (ties present)")
    else:
        print(f"concordant_fraction: {report.concordant_fraction:.6f}")
    print(f"interpretation: if score_i > score_j, truth_i > truth_j with probability (tau+1)/2 = {prob:.3f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = ToyConfig(seed=args.seed, n=args.n, kind="random")
    F, Y = gen_random(cfg, args.d, args.k)

    results = {}
    timings = {}
    for path in ("optimized", "naive"):
        opts = SolverOptions(m_step=path)
        walls = []
        res = None
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            res = logme(F, Y, opts)
            walls.append(time.perf_counter() - t0)
        results[path] = res
        timings[path] = walls

    diff = np.abs(results["naive"].per_dim - results["optimized"].per_dim)
    denom = np.maximum(np.maximum(np.abs(results["naive"].per_dim),
                                  np.abs(results["optimized"].per_dim)), 1e-12)
    max_rel = float(np.max(diff / denom))
    if max_rel > 1e-8:
        raise NumericFailureError(f"paths disagree: max per-dim relative difference {max_rel:.3e}")

    med_naive = statistics.median(timings["naive"])
    med_opt = statistics.median(timings["optimized"])
    ratio = med_opt / med_naive
    iters = {path: sum(s.iterations for s in results[path].states)
             for path in ("naive", "optimized")}
    if args.json:
        print(json.dumps({
            "command": "bench", "n": args.n, "d": args.d, "k": args.k,
            "repeats": args.repeats, "naive_median_s": med_naive,
            "optimized_median_s": med_opt, "ratio": ratio,
            "speedup": 1.0 / ratio, "max_rel_diff": max_rel,
            "naive_iterations": iters["naive"],
            "optimized_iterations": iters["optimized"],
        }))
        return EXIT_OK
    print(f"instance: n={args.n} D={args.d} K={args.k} repeats={args.repeats}")
    print(f"{'path':<10} {'median_s':>10}  runs_s")
    for path in ("naive", "optimized"):
        runs = " ".join(f"{w:.3f}" for w in timings[path])
        print(f"{path:<10} {statistics.median(timings[path]):>10.3f}  {runs}")
    print(f"speedup: {1.0 / ratio:.1f}x (optimized/naive ratio {ratio:.4f})")
    print(f"paths agree: max per-dim relative difference {max_rel:.3e}")
    return EXIT_OK


def cmd_toy(args) -> int:
    grid = _parse_grid(args.noise_grid)
    os.makedirs(args.out_dir, exist_ok=True)
    opts = SolverOptions()
    rows = []
    for t in grid:
        cfg = ToyConfig(seed=args.seed, n=args.n, noise_level=t, kind=args.kind)
        pack = os.path.join(args.out_dir, f"toy_{args.kind}_t{t:g}.featpack")
        if args.kind == "classification3":
            F, labels = gen_clusters(cfg)
            write_featpack(pack, F, labels, num_classes=3)
            score = logme(F, one_hot(labels, 3), opts).score
        else:
            F, Y = gen_regression(cfg)
            write_featpack(pack, F, Y)
            score = logme(F, Y, opts).score
        rows.append((t, score, pack))

    summary = os.path.join(args.out_dir, "summary.csv")
    with open(summary, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["noise_level", "logme"])
        for t, score, _ in rows:
            w.writerow([f"{t:g}", f"{score:.12g}"])

    monotone = all(rows[i][1] > rows[i + 1][1] for i in range(len(rows) - 1))
    if args.json:
        print(json.dumps({
            "command": "toy", "kind": args.kind, "seed": args.seed, "n": args.n,
            "points": [{"noise_level": t, "logme": s, "featpack": p} for t, s, p in rows],
            "summary_csv": summary, "monotone_decreasing": monotone,
        }))
    else:
        print(f"{'noise':>8}  {'logme':>14}  featpack")
        for t, score, pack in rows:
            print(f"{t:>8g}  {score:>14.6g}  {pack}")
        print(f"summary: {summary}")
    if args.assert_monotone and not monotone:
        print("monotonicity violated: LogME is not strictly decreasing along the grid", file=sys.stderr)
        return 1
    return EXIT_OK


def _parse_grid(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidInputError(f"cannot parse grid {text!r}")
    if not vals:
        raise InvalidInputError(f"empty grid {text!r}")
    return vals


def _add_solver_flags(p):
    p.add_argument("--rel-tol", type=float, default=1e-3, help="fixed-point relative tolerance")
    p.add_argument("--max-iter", type=int, default=100, help="iteration cap")
    p.add_argument("--naive", action="store_true", help="use the naive m-step path")
    p.add_argument("--standardize", action="store_true",
                   help="standardize features first (deviates from the plain recipe)")


def _add_probe_flags(p):
    p.add_argument("--probe-lambdas", default=DEFAULT_PROBE_LAMBDAS,
                   help="comma-separated ridge grid for --method probe")
    p.add_argument("--probe-folds", type=int, default=5)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="evidencerank",
                                 description="Score and rank pre-trained models from extracted features.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score one feature pack")
    p.add_argument("featpack")
    p.add_argument("--method", choices=["logme", "leep", "nce", "probe"], default="logme")
    p.add_argument("--json", action="store_true")
    _add_solver_flags(p)
    _add_probe_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="rank the models listed in a manifest (name<TAB>pack per line)")
    p.add_argument("manifest")
    p.add_argument("--method", choices=["logme", "leep", "nce", "probe"], default="logme")
    p.add_argument("--json", action="store_true")
    _add_solver_flags(p)
    _add_probe_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", help="rank-correlate scores against ground truth")
    p.add_argument("scores", help="file with one score per line")
    p.add_argument("truths", help="file with one ground-truth value per line")
    p.add_argument("--lower-truth-better", action="store_true",
                   help="ground truth is an error measure (negate before correlating)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time the naive vs optimized solver paths")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--d", type=int, default=1024)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("toy", help="generate noise-swept toy packs and score them")
    p.add_argument("--kind", choices=["regression1d", "classification3"], default="regression1d")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--noise-grid", default="0,0.5,1,2")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--assert-monotone", action="store_true",
                   help="exit nonzero unless LogME strictly decreases along the grid")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_toy)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FeatPackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
