"""Command line entry point.

Subcommands cover the library end to end: sampling, single-sample fits,
mixture clustering, the bundled two-group experiments, and estimator
benchmarks. Every command writes a delimited (or JSON) table, a
``<stem>.meta.json`` sidecar holding the resolved configuration and run
summary, and, unless ``--no-plot`` is given, matplotlib figures next to the
table. Runs with equal arguments produce byte-identical outputs.
"""

import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from .data import (
    read_compositional_csv,
    read_points_csv,
    sample_household_standin,
    sample_small_mix,
    compositional_to_sphere,
    write_points_csv,
)
from .density import SLParams
from .metrics import jaccard_index, normalized_mutual_information, rand_index
from .mixture import EMOptions, fit_em, predict_labels
from .mle import (
    WeightedSample,
    estimate_sigma_newton_approx,
    estimate_sigma_newton_exact,
    fit_mle,
    frechet_median,
)
from .plots import plot_benchmark, plot_points, plot_radial_histogram, plot_trace
from .sampling import (
    expected_acceptance_rate,
    sample_mh,
    sample_radial_oracle,
    sample_rejection,
)
from .sphere import geodesic_distance, geodesic_distances


def _parse_floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError(f"no values in {text!r}")
    return vals


def _parse_ints(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError(f"no values in {text!r}")
    return vals


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _cell(value) -> str:
    # empty string marks a column an estimator run did not fill
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_table(path, columns, rows, fmt: str):
    if fmt == "json":
        payload = [{c: _jsonable(r.get(c)) for c in columns} for r in rows]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for r in rows:
                writer.writerow([_cell(r.get(c)) for c in columns])
    return path


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2)
        fh.write("\n")
    return path


def _write_meta(stem: str, command: str, args, extra: dict):
    config = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k != "func"}
    meta = {"command": command, "version": __version__, "config": config}
    meta.update(_jsonable(extra))
    return _write_json(stem + ".meta.json", meta)


def _stem(path: str) -> str:
    return os.path.splitext(path)[0]


def _north_pole(p: int) -> np.ndarray:
    mu = np.zeros(p + 1)
    mu[-1] = 1.0
    return mu


def _report_dict(report) -> dict:
    return {
        "n_accepted": report.n_accepted,
        "n_proposed": report.n_proposed,
        "acceptance_rate": report.acceptance_rate,
    }


def cmd_sample(args) -> int:
    if args.mu is not None:
        mu = np.asarray(args.mu, dtype=float)
        if args.p is not None and args.p != mu.size - 1:
            raise ValueError(f"--p {args.p} conflicts with --mu of length {mu.size}")
    elif args.p is not None:
        mu = _north_pole(args.p)
    else:
        raise ValueError("provide --p or --mu")
    params = SLParams(mu, args.sigma)
    rng = np.random.default_rng(args.seed)
    report = None
    if args.method == "oracle":
        points = sample_radial_oracle(params, args.n, rng)
    elif args.method == "rejection":
        points, report = sample_rejection(params, args.n, rng)
    else:
        points, report = sample_mh(
            params, args.n, rng,
            burn_in=args.burn_in, thin=args.thin,
            proposal_stddev=args.proposal_stddev,
        )
    if args.format == "csv":
        write_points_csv(args.output, points)
    else:
        columns = [f"x{i}" for i in range(points.shape[1])]
        rows = [dict(zip(columns, map(float, row))) for row in points]
        _write_table(args.output, columns, rows, "json")
    extra = {
        "p": params.p,
        "location": params.mu,
        "scale": params.sigma,
        "n_samples": int(points.shape[0]),
    }
    if report is not None:
        extra["sampler"] = _report_dict(report)
    if args.method == "rejection":
        extra["expected_acceptance_rate"] = expected_acceptance_rate(params.p, params.sigma)
    stem = _stem(args.output)
    written = [args.output, _write_meta(stem, "sample", args, extra)]
    if args.plot:
        written.append(plot_radial_histogram(points, params, stem + "_radial.png"))
        fig = plot_points(points, stem + "_scatter.png", locations=params.mu)
        if fig:
            written.append(fig)
    for path in written:
        print(path)
    return 0


def cmd_fit(args) -> int:
    points, _ = read_points_csv(args.input)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params, loglik = fit_mle(points, eps=args.eps, max_iter=args.max_iter)
    notes = [str(w.message) for w in caught]
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    columns = ["n", "p", "sigma_hat", "loglik"] + [f"mu{i}" for i in range(params.p + 1)]
    row = {
        "n": points.shape[0],
        "p": params.p,
        "sigma_hat": float(params.sigma),
        "loglik": loglik,
    }
    row.update({f"mu{i}": float(v) for i, v in enumerate(params.mu)})
    _write_table(args.output, columns, [row], args.format)
    extra = {
        "location": params.mu,
        "scale": params.sigma,
        "loglik": loglik,
        "warnings": notes,
    }
    stem = _stem(args.output)
    written = [args.output, _write_meta(stem, "fit", args, extra)]
    if args.plot:
        written.append(plot_radial_histogram(points, params, stem + "_radial.png"))
        fig = plot_points(points, stem + "_scatter.png", locations=params.mu)
        if fig:
            written.append(fig)
    for path in written:
        print(path)
    return 0


def _em_options(args, seed: int | None = None) -> EMOptions:
    return EMOptions(
        assignment=args.assignment,
        homogeneous=args.homogeneous,
        eps_gamma=args.eps_gamma,
        max_iter=args.max_iter,
        seed=args.seed if seed is None else seed,
    )


def _cluster_rows(gamma, labels, truth=None):
    k = gamma.shape[1]
    columns = ["index"] + (["truth"] if truth is not None else []) + ["label"]
    columns += [f"gamma{j}" for j in range(k)]
    rows = []
    for i in range(gamma.shape[0]):
        row = {"index": i, "label": int(labels[i])}
        if truth is not None:
            row["truth"] = truth[i]
        row.update({f"gamma{j}": float(gamma[i, j]) for j in range(k)})
        rows.append(row)
    return columns, rows


def _model_payload(result) -> dict:
    return {
        "mixture": result.mixture.to_dict(),
        "loglik": result.trace[-1] if result.trace else None,
        "iterations": result.iterations,
        "converged": result.converged,
        "trace": list(result.trace),
    }


def cmd_cluster(args) -> int:
    points, truth = read_points_csv(args.input)
    result = fit_em(points, args.k, _em_options(args))
    labels = predict_labels(result.gamma)
    columns, rows = _cluster_rows(result.gamma, labels, truth)
    _write_table(args.output, columns, rows, args.format)
    stem = _stem(args.output)
    extra = {
        "iterations": result.iterations,
        "converged": result.converged,
        "loglik": result.trace[-1] if result.trace else None,
    }
    if truth is not None:
        extra["metrics"] = {
            "jaccard": jaccard_index(truth, labels),
            "rand": rand_index(truth, labels),
            "nmi": normalized_mutual_information(truth, labels),
        }
    written = [
        args.output,
        _write_json(stem + ".model.json", _model_payload(result)),
        _write_meta(stem, "cluster", args, extra),
    ]
    if args.plot:
        written.append(plot_trace(result.trace, stem + "_trace.png"))
        fig = plot_points(points, stem + "_scatter.png", labels=labels,
                          locations=result.mixture.locations)
        if fig:
            written.append(fig)
    for path in written:
        print(path)
    return 0


def cmd_smallmix(args) -> int:
    metric_names = ("jaccard", "rand", "nmi")
    columns = ["repeat", "seed"]
    for assignment in ("soft", "hard"):
        columns += [f"{m}_{assignment}" for m in metric_names]
    rows = []
    last = None
    for rep in range(args.repeats):
        seed = args.seed ^ rep
        rng = np.random.default_rng(seed)
        points, truth = sample_small_mix(rng, args.n, multinomial=args.multinomial)
        row = {"repeat": rep, "seed": seed}
        for assignment in ("soft", "hard"):
            options = EMOptions(assignment=assignment, eps_gamma=args.eps_gamma,
                                max_iter=args.max_iter, seed=seed)
            result = fit_em(points, 2, options)
            pred = predict_labels(result.gamma)
            row[f"jaccard_{assignment}"] = jaccard_index(truth, pred)
            row[f"rand_{assignment}"] = rand_index(truth, pred)
            row[f"nmi_{assignment}"] = normalized_mutual_information(truth, pred)
            if assignment == "soft":
                last = (points, pred, result)
        rows.append(row)
    _write_table(args.output, columns, rows, args.format)
    summary = {c: float(np.mean([r[c] for r in rows])) for c in columns[2:]}
    stem = _stem(args.output)
    written = [args.output, _write_meta(stem, "smallmix", args, {"mean": summary})]
    if args.plot and last is not None:
        points, pred, result = last
        fig = plot_points(points, stem + "_scatter.png", labels=pred,
                          locations=result.mixture.locations)
        if fig:
            written.append(fig)
    for path in written:
        print(path)
    return 0


def cmd_household(args) -> int:
    if args.input:
        values, truth = read_compositional_csv(args.input)
        source = args.input
    else:
        rng = np.random.default_rng(args.seed)
        values, truth = sample_household_standin(rng, args.n_per_group)
        source = "synthetic"
    points = compositional_to_sphere(values)
    result = fit_em(points, args.k, _em_options(args))
    labels = predict_labels(result.gamma)
    columns, rows = _cluster_rows(result.gamma, labels, truth)
    _write_table(args.output, columns, rows, args.format)
    extra = {
        "source": source,
        "iterations": result.iterations,
        "converged": result.converged,
        "loglik": result.trace[-1] if result.trace else None,
        "metrics": {
            "jaccard": jaccard_index(truth, labels),
            "rand": rand_index(truth, labels),
            "nmi": normalized_mutual_information(truth, labels),
        },
    }
    stem = _stem(args.output)
    written = [
        args.output,
        _write_json(stem + ".model.json", _model_payload(result)),
        _write_meta(stem, "household", args, extra),
    ]
    if args.plot:
        written.append(plot_trace(result.trace, stem + "_trace.png"))
        fig = plot_points(points, stem + "_scatter.png", labels=labels,
                          locations=result.mixture.locations)
        if fig:
            written.append(fig)
    for path in written:
        print(path)
    return 0


def cmd_bench_location(args) -> int:
    rows = []
    series: dict[str, tuple[list, list]] = {}
    cells = []
    for p in args.p_list:
        for sigma0 in args.sigma_list:
            params = SLParams(_north_pole(p), sigma0)
            for n in args.n_list:
                errs = []
                for rep in range(args.repeats):
                    seed = args.seed ^ rep
                    rng = np.random.default_rng(seed)
                    x = sample_radial_oracle(params, n, rng)
                    med = frechet_median(WeightedSample.uniform(x))
                    err = float(geodesic_distance(med.mu_hat, params.mu))
                    rows.append({
                        "p": p, "sigma0": sigma0, "n": n, "repeat": rep,
                        "seed": seed, "err_weiszfeld": err, "err_rgd": None,
                    })
                    errs.append(err)
                mean = float(np.mean(errs))
                cells.append({"p": p, "sigma0": sigma0, "n": n,
                              "mean_weiszfeld": mean})
                key = f"p={p} sigma0={sigma0:g}"
                series.setdefault(key, ([], []))
                series[key][0].append(n)
                series[key][1].append(mean)
    columns = ["p", "sigma0", "n", "repeat", "seed", "err_weiszfeld", "err_rgd"]
    _write_table(args.output, columns, rows, args.format)
    stem = _stem(args.output)
    written = [args.output, _write_meta(stem, "bench-location", args, {"cells": cells})]
    if args.plot:
        written.append(plot_benchmark(series, stem + "_curve.png",
                                      ylabel="mean geodesic error"))
    for path in written:
        print(path)
    return 0


def cmd_bench_scale(args) -> int:
    rows = []
    series: dict[str, tuple[list, list]] = {}
    cells = []
    for p in args.p_list:
        for sigma0 in args.sigma_list:
            params = SLParams(_north_pole(p), sigma0)
            for n in args.n_list:
                errs_exact, errs_approx, disagree = [], [], []
                for rep in range(args.repeats):
                    seed = args.seed ^ rep
                    rng = np.random.default_rng(seed)
                    x = sample_radial_oracle(params, n, rng)
                    med = frechet_median(WeightedSample.uniform(x))
                    s = float(geodesic_distances(x, med.mu_hat).mean())
                    exact = estimate_sigma_newton_exact(s, p)
                    approx = estimate_sigma_newton_approx(s, p)
                    err_e = abs(exact.sigma_hat - sigma0) / sigma0
                    err_a = abs(approx.sigma_hat - sigma0) / sigma0
                    rows.append({
                        "p": p, "sigma0": sigma0, "n": n, "repeat": rep,
                        "seed": seed,
                        "err_newton_exact": err_e, "err_newton_approx": err_a,
                        "err_roptim": None, "err_de": None,
                    })
                    errs_exact.append(err_e)
                    errs_approx.append(err_a)
                    disagree.append(abs(exact.sigma_hat - approx.sigma_hat)
                                    / exact.sigma_hat)
                cells.append({
                    "p": p, "sigma0": sigma0, "n": n,
                    "mean_newton_exact": float(np.mean(errs_exact)),
                    "mean_newton_approx": float(np.mean(errs_approx)),
                    "max_solver_disagreement": float(np.max(disagree)),
                })
                key = f"p={p} sigma0={sigma0:g}"
                series.setdefault(key, ([], []))
                series[key][0].append(n)
                series[key][1].append(float(np.mean(errs_exact)))
    columns = ["p", "sigma0", "n", "repeat", "seed",
               "err_newton_exact", "err_newton_approx", "err_roptim", "err_de"]
    _write_table(args.output, columns, rows, args.format)
    stem = _stem(args.output)
    written = [args.output, _write_meta(stem, "bench-scale", args, {"cells": cells})]
    if args.plot:
        written.append(plot_benchmark(series, stem + "_curve.png",
                                      ylabel="mean relative scale error"))
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slaplace",
        description="Sampling, estimation and clustering on the unit hypersphere.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    io_parent = argparse.ArgumentParser(add_help=False)
    io_parent.add_argument("--output", required=True, help="path of the main table")
    io_parent.add_argument("--format", choices=("csv", "json"), default="csv")
    io_parent.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True,
                           help="render figures next to the table")

    seed_parent = argparse.ArgumentParser(add_help=False)
    seed_parent.add_argument("--seed", type=int, default=0)

    em_parent = argparse.ArgumentParser(add_help=False)
    em_parent.add_argument("--eps-gamma", type=float, default=1e-6,
                           help="responsibility convergence threshold")
    em_parent.add_argument("--max-iter", type=int, default=200)

    ps = sub.add_parser("sample", parents=[io_parent, seed_parent],
                        help="draw from the distribution")
    ps.add_argument("--p", type=int, help="sphere dimension (location at the last axis pole)")
    ps.add_argument("--mu", type=_parse_floats, help="location as comma separated coordinates")
    ps.add_argument("--sigma", type=float, required=True)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--method", choices=("oracle", "rejection", "mh"), default="oracle")
    ps.add_argument("--burn-in", type=int, default=1000)
    ps.add_argument("--thin", type=int, default=1)
    ps.add_argument("--proposal-stddev", type=float, default=None)
    ps.set_defaults(func=cmd_sample)

    pf = sub.add_parser("fit", parents=[io_parent],
                        help="fit location and scale to a point file")
    pf.add_argument("--input", required=True)
    pf.add_argument("--eps", type=float, default=1e-8)
    pf.add_argument("--max-iter", type=int, default=500)
    pf.set_defaults(func=cmd_fit)

    pc = sub.add_parser("cluster", parents=[io_parent, seed_parent, em_parent],
                        help="mixture clustering of a point file")
    pc.add_argument("--input", required=True)
    pc.add_argument("--k", type=int, required=True)
    pc.add_argument("--assignment", choices=("soft", "hard", "stochastic"), default="soft")
    pc.add_argument("--homogeneous", action="store_true",
                    help="share one scale across components")
    pc.set_defaults(func=cmd_cluster)

    pm = sub.add_parser("smallmix", parents=[io_parent, seed_parent, em_parent],
                        help="repeated two-component circle benchmark")
    pm.add_argument("--repeats", type=int, default=100)
    pm.add_argument("--n", type=int, default=200)
    pm.add_argument("--multinomial", action="store_true",
                    help="draw class sizes instead of an even split")
    pm.set_defaults(func=cmd_smallmix)

    ph = sub.add_parser("household", parents=[io_parent, seed_parent, em_parent],
                        help="cluster compositional expenditure data")
    ph.add_argument("--input", help="compositional CSV; omitted runs the synthetic stand-in")
    ph.add_argument("--k", type=int, default=2)
    ph.add_argument("--assignment", choices=("soft", "hard", "stochastic"), default="soft")
    ph.add_argument("--homogeneous", action="store_true")
    ph.add_argument("--n-per-group", type=int, default=20,
                    help="synthetic stand-in group size")
    ph.set_defaults(func=cmd_household)

    pl = sub.add_parser("bench-location", parents=[io_parent, seed_parent],
                        help="location estimator error over a sampling grid")
    pl.add_argument("--p-list", type=_parse_ints, default=[5])
    pl.add_argument("--sigma-list", type=_parse_floats, default=[0.1, 0.01])
    pl.add_argument("--n-list", type=_parse_ints, default=[100, 500, 1000])
    pl.add_argument("--repeats", type=int, default=100)
    pl.set_defaults(func=cmd_bench_location)

    pb = sub.add_parser("bench-scale", parents=[io_parent, seed_parent],
                        help="scale estimator error over a sampling grid")
    pb.add_argument("--p-list", type=_parse_ints, default=[5])
    pb.add_argument("--sigma-list", type=_parse_floats, default=[0.1])
    pb.add_argument("--n-list", type=_parse_ints, default=[100, 500, 1000])
    pb.add_argument("--repeats", type=int, default=100)
    pb.set_defaults(func=cmd_bench_scale)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
