"""Command line front end: ``zosimplex {run,bias,fit,plot,project,sample}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dirichlet import DirichletSampler, parse_seed
from .errors import ZOSimplexError
from .estimator import BiasReport
from .experiment import (
    SLOPE_BAND,
    ExperimentConfig,
    bias_study,
    default_out_dir,
    emit_csv,
    rate_fit,
    read_csv,
    run_experiment,
    write_csv,
)
from .simplex import project_to_simplex

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSERT = 3


def _ints(s: str) -> list[int]:
    try:
        return [int(float(v)) for v in s.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _floats(s: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def _seed(s: str) -> int:
    try:
        return parse_seed(s)
    except ZOSimplexError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _print_fits(fits, band=SLOPE_BAND) -> bool:
    ok = True
    for key, fit in fits.items():
        good = fit.strictly_decreasing and fit.in_band(band)
        ok &= good
        means = " ".join(f"{m:.4g}" for m in fit.means)
        print(
            f"{' '.join(map(str, key))}: slope={fit.slope:.4f} r2={fit.r_squared:.4f} "
            f"decreasing={fit.strictly_decreasing} means=[{means}] {'PASS' if good else 'FAIL'}"
        )
    return ok


def cmd_run(args) -> int:
    out = args.out or default_out_dir() / "run.csv"
    cfg = ExperimentConfig(
        algo=args.algo,
        objective_id=args.objective,
        d=args.d,
        horizons=args.horizons,
        alpha=args.alpha,
        c_eta=args.c_eta,
        c_delta=args.c_delta,
        n_seeds=args.seeds,
        base_seed=args.base_seed,
        output_path=str(out),
    )
    res = run_experiment(cfg, workers=args.workers, full_trace=args.full_trace)
    print(f"wrote {len(res.rows)} rows to {res.path}")
    n_q = sum(a["T"] for a in res.audits)
    ok_q = sum(a["queries_on_simplex"] for a in res.audits)
    print(f"query points on the simplex: {ok_q}/{n_q}; oracle gradient calls: "
          f"{sum(a['oracle_grad_calls'] for a in res.audits)}")
    if res.trace_path:
        print(f"wrote per-iteration trace to {res.trace_path}")
    if args.plot:
        from .report import render_run_report

        for p in render_run_report(res.rows, res.path):
            print(f"wrote {p}")
    return EXIT_OK


def cmd_bias(args) -> int:
    out = Path(args.out or default_out_dir() / "bias.csv")
    reports = bias_study(args.d, args.alpha, args.delta, args.objective, n=args.n, base_seed=args.base_seed)
    rows = [r.to_row() for r in reports]
    write_csv(out, rows, BiasReport.FIELDS)
    n_pass = sum(r.passed for r in reports)
    n_cor = sum(bool(r.cor_passed) for r in reports)
    print(f"wrote {len(rows)} rows to {out}")
    print(f"bias bound: {n_pass}/{len(reports)} pass; directional bound: {n_cor}/{len(reports)} pass")
    if args.plot:
        from .report import plot_bias

        print(f"wrote {plot_bias(rows, out.with_suffix('.png'))}")
    return EXIT_OK


def cmd_fit(args) -> int:
    rows = [r for r in read_csv(args.csv) if r.get(args.metric) is not None]
    fits = rate_fit(rows, metric=args.metric)
    ok = _print_fits(fits)
    if args.plot:
        from .report import plot_rates

        print(f"wrote {plot_rates(fits, args.plot, args.metric)}")
    if args.assert_:
        return EXIT_OK if ok else EXIT_ASSERT
    return EXIT_OK


def cmd_plot(args) -> int:
    from .report import render_run_report

    rows = read_csv(args.csv)
    stem = Path(args.out) if args.out else Path(args.csv)
    for p in render_run_report(rows, stem, args.metric):
        print(f"wrote {p}")
    return EXIT_OK


def cmd_project(args) -> int:
    x = project_to_simplex(args.vector)
    print(",".join(repr(float(v)) for v in x.coords))
    return EXIT_OK


def cmd_sample(args) -> int:
    u = DirichletSampler(args.alpha, args.d, args.seed).sample_n(args.n)
    fields = [f"u{i}" for i in range(args.d)]
    rows = [dict(zip(fields, r)) for r in u.tolist()]
    if args.out:
        write_csv(args.out, rows, fields)
    else:
        sys.stdout.write(emit_csv(rows, fields))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zosimplex", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="sweep horizons and seeds for one optimizer")
    r.add_argument("--algo", choices=["pgd", "ew"], default="pgd")
    r.add_argument("--objective", default="quaddist:0.6,0.3,0.1")
    r.add_argument("--d", type=int, default=3)
    r.add_argument("--alpha", type=float, default=1.0)
    r.add_argument("--c-eta", type=float, default=1.0)
    r.add_argument("--c-delta", type=float, default=1.0)
    r.add_argument("--horizons", type=_ints, default=[100, 1000, 10000])
    r.add_argument("--seeds", type=int, default=5)
    r.add_argument("--base-seed", type=_seed, default=0)
    r.add_argument("--out", help="summary CSV path (default $ZOSIMPLEX_OUT_DIR/run.csv)")
    r.add_argument("--full-trace", action="store_true", help="also write <out>.trace.csv")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--plot", action="store_true", help="render .dat and .png next to the CSV")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bias", help="Monte-Carlo bias study over a parameter grid")
    b.add_argument("--d", type=_ints, default=[2, 3, 10])
    b.add_argument("--alpha", type=_floats, default=[0.5, 1.0])
    b.add_argument("--delta", type=_floats, default=[0.2, 0.1, 0.05, 0.02])
    b.add_argument("--objective", action="append", help="kind:seed, repeatable (default quaddist:1)")
    b.add_argument("--n", type=int, default=10**6)
    b.add_argument("--base-seed", type=_seed, default=0)
    b.add_argument("--out", help="CSV path (default $ZOSIMPLEX_OUT_DIR/bias.csv)")
    b.add_argument("--plot", action="store_true", help="render a .png next to the CSV")
    b.set_defaults(func=cmd_bias)

    f = sub.add_parser("fit", help="log-log rate fit of a run summary CSV")
    f.add_argument("csv")
    f.add_argument("--metric", default="avg_gap", choices=["avg_gap", "f_avg_iterate_minus_opt"])
    f.add_argument("--assert", dest="assert_", action="store_true",
                   help=f"exit 3 unless every group decreases with slope in {list(SLOPE_BAND)}")
    f.add_argument("--plot", metavar="PNG")
    f.set_defaults(func=cmd_fit)

    pl = sub.add_parser("plot", help="gnuplot data and a figure from a run summary CSV")
    pl.add_argument("csv")
    pl.add_argument("--metric", default="avg_gap", choices=["avg_gap", "f_avg_iterate_minus_opt"])
    pl.add_argument("--out", help="output stem (default: next to the CSV)")
    pl.set_defaults(func=cmd_plot)

    pr = sub.add_parser("project", help="Euclidean projection of a vector onto the simplex")
    pr.add_argument("vector", type=_floats, help="comma-separated entries, e.g. 0.5,0.7")
    pr.set_defaults(func=cmd_project)

    s = sub.add_parser("sample", help="emit Dirichlet draws as CSV")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "objective", None) is None and args.command == "bias":
        args.objective = ["quaddist:1"]
    try:
        return args.func(args)
    except ZOSimplexError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
