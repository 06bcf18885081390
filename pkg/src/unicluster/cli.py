"""Command-line front end.

    unicluster generate --preset fig5 --seed 1 --out data.csv
    unicluster fit --algo gmm --k 3 --in data.csv --out report.json
    unicluster score --pred report.json --truth data.csv

Exit codes: 0 ok, 2 bad flags or parameters, 3 I/O failure, 4 algorithm failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import datagen, density, gmm, kernels, kmeans, spectral
from .core import ClusteringReport, Dataset, RunConfig, child_seeds, harden
from .errors import ClusteringError
from .metrics import ami, ari

EXIT_USAGE, EXIT_IO, EXIT_ALGO = 2, 3, 4
ALGOS = ("gmm", "kmeans", "kkmeans", "sc", "dbscan", "dbscan-spectral", "dbscan-climb", "meanshift")
# flags each algorithm cannot run without
REQUIRED = {
    "gmm": ("k",),
    "kmeans": ("k",),
    "kkmeans": ("k", "sigma"),
    "sc": ("k", "sigma"),
    "dbscan": ("eps", "min_pts"),
    "dbscan-spectral": ("eps", "min_pts"),
    "dbscan-climb": ("eps", "min_pts"),
    "meanshift": ("eps",),
}


class UsageError(Exception):
    pass


def read_csv(path: str) -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path}: empty file, header row required")
    header, body = rows[0], rows[1:]
    if not body:
        raise UsageError(f"{path}: no data rows")
    try:
        table = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if table.ndim != 2 or table.shape[1] != len(header):
        raise UsageError(f"{path}: ragged rows")
    if "label" in header:
        j = header.index("label")
        return Dataset(np.delete(table, j, axis=1), table[:, j].astype(int))
    return Dataset(table)


def write_csv(ds: Dataset, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{j}" for j in range(ds.d)] + (["label"] if ds.labels is not None else []))
    for i in range(ds.n):
        row = [repr(float(v)) for v in ds.points[i]]
        if ds.labels is not None:
            row.append(str(int(ds.labels[i])))
        w.writerow(row)


def _default_seed() -> int:
    try:
        return int(os.environ.get("UNICLUSTER_SEED", "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unicluster", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset as CSV")
    gen.add_argument("--preset", required=True, choices=datagen.PRESET_NAMES)
    gen.add_argument("--n", type=int, help="override the preset's point count")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True)

    fit = sub.add_parser("fit", help="cluster a CSV dataset and write a JSON report")
    fit.add_argument("--algo", required=True, choices=ALGOS)
    fit.add_argument("--in", dest="input", required=True)
    fit.add_argument("--out", help="JSON report path (default: stdout)")
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--restarts", type=int, default=None)
    fit.add_argument("--k", type=int)
    fit.add_argument("--sigma", type=float)
    fit.add_argument("--eps", type=float)
    fit.add_argument("--min-pts", dest="min_pts", type=int)
    fit.add_argument("--max-iters", dest="max_iters", type=int, default=RunConfig.max_iters)
    fit.add_argument("--tol", type=float, default=RunConfig.tol)
    fit.add_argument("--emit-plot-data", dest="plot_data", help="also write x<TAB>y<TAB>label rows here")

    score = sub.add_parser("score", help="AMI and ARI between predicted and true labels")
    score.add_argument("--pred", required=True, help="JSON report from `fit` or a labeled CSV")
    score.add_argument("--truth", required=True, help="labeled CSV or JSON report")
    return parser


def cmd_generate(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    if args.preset == "circles":
        n = 300 if args.n is None else args.n
        if n < 2:
            raise UsageError("--n must be >= 2")
        ds = datagen.circles(n, 1.0, 3.0, 0.05, datagen.rng_stream(seed))
    else:
        params = dict(datagen.PRESETS[args.preset])
        if args.n is not None:
            if args.n < 1:
                raise UsageError("--n must be >= 1")
            params["n"] = args.n
        ds = datagen.blobs(rng=datagen.rng_stream(seed), **params)
    with open(args.out, "w", newline="") as fh:
        write_csv(ds, fh)
    return 0


def run_algorithm(algo: str, X: np.ndarray, args, cfg: RunConfig) -> tuple[ClusteringReport, dict]:
    extra: dict = {}
    restarts = args.restarts
    if algo == "gmm":
        res = gmm.fit_best(X, args.k, cfg, restarts or 1)
        report = ClusteringReport(
            "gmm", {"k": args.k}, harden(res.resp), res.trace.iterations,
            loglik_trace=res.trace.loglik, centers=res.model.means,
        )
        extra["mixture"] = res.model.to_dict()
    elif algo == "kmeans":
        res = kmeans.fit_best(X, args.k, cfg, restarts or 1)
        report = ClusteringReport(
            "kmeans", {"k": args.k}, res.labels, res.iterations,
            objective_trace=res.objective_trace, centers=res.centroids,
        )
    elif algo == "kkmeans":
        K = kernels.kernel_matrix(kernels.KernelSpec.gaussian(args.sigma), X).K
        best = None
        for seed in child_seeds(cfg.seed, restarts) if (restarts or 1) > 1 else [cfg.seed]:
            run = kernels.wkk_fit(K, None, args.k, RunConfig(seed, cfg.max_iters, cfg.tol))
            if best is None or run.objective_trace[-1] < best.objective_trace[-1]:
                best = run
        report = ClusteringReport(
            "kkmeans", {"k": args.k, "sigma": args.sigma}, best.labels, len(best.history),
            objective_trace=best.objective_trace,
        )
    elif algo == "sc":
        report = spectral.njw_fit(X, args.k, args.sigma, cfg, restarts or spectral.DEFAULT_RESTARTS)
    elif algo == "meanshift":
        report = density.mean_shift(X, args.eps)
    else:
        p = density.DbscanParams(args.eps, args.min_pts)
        fn = {"dbscan": density.dbscan_graph, "dbscan-spectral": density.dbscan_spectral,
              "dbscan-climb": density.dbscan_climb}[algo]
        report = fn(X, p)
    return report, extra


def _check_fit_args(args) -> None:
    missing = [f for f in REQUIRED[args.algo] if getattr(args, f) is None]
    if missing:
        flags = ", ".join("--" + f.replace("_", "-") for f in missing)
        raise UsageError(f"--algo {args.algo} requires {flags}")
    if args.k is not None and args.k < 1:
        raise UsageError("--k must be >= 1")
    for name in ("sigma", "eps", "tol"):
        v = getattr(args, name)
        if v is not None and not v > 0:
            raise UsageError(f"--{name} must be > 0")
    if args.min_pts is not None and args.min_pts < 1:
        raise UsageError("--min-pts must be >= 1")
    if args.restarts is not None and args.restarts < 1:
        raise UsageError("--restarts must be >= 1")
    if args.max_iters < 1:
        raise UsageError("--max-iters must be >= 1")


def report_json(report: ClusteringReport, seed: int, extra: dict, wall_ms: float) -> dict:
    out = {
        "algorithm": report.algorithm,
        "params": report.params,
        "seed": seed,
        "labels": [int(v) for v in report.labels],
        "n_outliers": report.n_outliers,
        "iterations": int(report.iterations),
        "wall_time_ms": round(wall_ms, 3),
    }
    if report.centers is not None:
        out["centers"] = np.asarray(report.centers).tolist()
    if report.loglik_trace is not None:
        out["loglik_trace"] = [float(v) for v in report.loglik_trace]
    if report.objective_trace is not None:
        out["objective_trace"] = [float(v) for v in report.objective_trace]
    if report.eigenvalues is not None:
        out["eigenvalues"] = [float(v) for v in report.eigenvalues]
    out.update(extra)
    return out


def cmd_fit(args) -> int:
    _check_fit_args(args)
    ds = read_csv(args.input)
    if args.k is not None and args.k > ds.n:
        raise UsageError("--k exceeds the number of points")
    seed = _default_seed() if args.seed is None else args.seed
    cfg = RunConfig(seed, args.max_iters, args.tol)
    t0 = time.perf_counter()
    report, extra = run_algorithm(args.algo, ds.points, args, cfg)
    wall_ms = (time.perf_counter() - t0) * 1e3
    payload = json.dumps(report_json(report, seed, extra, wall_ms), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    if args.plot_data:
        with open(args.plot_data, "w") as fh:
            fh.write("x\ty\tlabel\n")
            for row, lab in zip(ds.points, report.labels):
                y = row[1] if ds.d > 1 else 0.0
                fh.write(f"{row[0]!r}\t{float(y)!r}\t{int(lab)}\n")
    return 0


def _load_labels(path: str) -> np.ndarray:
    if path.endswith(".json"):
        with open(path) as fh:
            try:
                return np.asarray(json.load(fh)["labels"], dtype=int)
            except (KeyError, json.JSONDecodeError) as exc:
                raise UsageError(f"{path}: not a fit report ({exc})") from None
    ds = read_csv(path)
    if ds.labels is None:
        raise UsageError(f"{path}: no `label` column")
    return ds.labels


def cmd_score(args) -> int:
    pred = _load_labels(args.pred)
    truth = _load_labels(args.truth)
    if pred.shape != truth.shape:
        raise UsageError(f"length mismatch: {pred.size} predicted vs {truth.size} true labels")
    print(json.dumps({"ami": round(ami(pred, truth), 6), "ari": round(ari(pred, truth), 6)}))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"generate": cmd_generate, "fit": cmd_fit, "score": cmd_score}[args.command]
    try:
        return handler(args)
    except ClusteringError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ALGO
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
