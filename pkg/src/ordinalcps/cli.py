"""Command-line surface: one binary, subcommands per task.

Every run echoes its fully-resolved configuration (as a ``# config: {...}``
line, also embedded as the first comment line of every output CSV), so any
output file documents how to reproduce itself. Given identical flags --
seed included -- every subcommand writes byte-identical data output;
``compare`` reports additionally contain wall-clock timings, which are the
one intentionally non-reproducible field.

Errors are printed to stderr as a single line with an ``ERROR:`` prefix and
a nonzero exit code; exit code 0 means success.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as ocio
from .calibrate import (
    METHOD_MIN_CPS,
    METHOD_MIN_RCPS,
    METHOD_NAIVE_CDF,
    METHOD_ORDINAL_APS,
    calibrate_binary_search,
    calibrate_exact,
)
from .baselines import aps_as_predictor, ordinal_aps_calibrate
from .errors import OrdinalCpsError
from .harness import (
    DEFAULT_LAMBDA_GRID,
    SynthSpec,
    apply_predictor,
    avg_set_size,
    coverage_metric,
    lambda_sweep,
    run_trials,
    synth_generate,
    tau_curve,
)

COMPARE_METHODS = (METHOD_NAIVE_CDF, METHOD_ORDINAL_APS, METHOD_MIN_CPS, METHOD_MIN_RCPS)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"ERROR: {message}", file=sys.stderr)
        raise SystemExit(2)


def _config_line(cmd: str, args: argparse.Namespace, skip=("func", "quiet")) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg["cmd"] = cmd
    return "# config: " + json.dumps(cfg, sort_keys=True)


def _echo(line: str, args) -> None:
    if not getattr(args, "quiet", False):
        print(line)


def _add_common(sp, out_required=True):
    sp.add_argument("--seed", type=int, default=42, help="base RNG seed")
    sp.add_argument("--quiet", action="store_true", help="suppress config echo")
    sp.add_argument("--out", required=out_required, help="output path")


def _cmd_generate(args) -> int:
    spec = SynthSpec(
        k=args.k,
        n=args.n,
        sigma_range=(args.sigma_min, args.sigma_max),
        miscal_temp=args.miscal_temp,
        seed=args.seed,
    )
    d = synth_generate(spec)
    line = _config_line("generate", args)
    _echo(line, args)
    ocio.save_dataset_csv(d, args.out, header=True, config_line=line)
    _echo(f"wrote {d.n} rows x {d.K} classes to {args.out}", args)
    return 0


def _cmd_calibrate(args) -> int:
    if args.lam is not None and args.method != METHOD_MIN_RCPS:
        raise OrdinalCpsError("--lambda applies to --method min-rcps only")
    if args.exact and args.method == METHOD_ORDINAL_APS:
        raise OrdinalCpsError("--exact applies to min-cps/min-rcps only")
    lam = args.lam if args.lam is not None else 0.0
    d = ocio.load_dataset_csv(args.data)
    if args.method == METHOD_ORDINAL_APS:
        pred = aps_as_predictor(ordinal_aps_calibrate(d, args.alpha), d.K)
    elif args.exact:
        pred = calibrate_exact(d, args.alpha, lam, method=args.method)
    else:
        pred = calibrate_binary_search(d, args.alpha, lam, method=args.method)
    line = _config_line("calibrate", args)
    _echo(line, args)
    ocio.save_predictor(pred, args.out)
    diag = pred.diagnostics
    print(
        f"method={pred.method} tau_hat={pred.tau_hat!r} "
        f"coverage_count={diag.get('coverage_count', 'n/a')} "
        f"target_count={diag.get('target_count', 'n/a')} "
        f"monotone_fraction={diag.get('monotone_fraction', 'n/a')}"
    )
    return 0


def _cmd_predict(args) -> int:
    pred = ocio.load_predictor(args.model)
    d = ocio.load_dataset_csv(args.data)
    lowers, uppers = apply_predictor(pred, d)
    line = _config_line("predict", args)
    _echo(line, args)
    rows = [line, "lower,upper"]
    rows += [f"{int(l)},{int(u)}" for l, u in zip(lowers, uppers)]
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
    _echo(f"wrote {len(lowers)} intervals to {args.out}", args)
    return 0


def _cmd_evaluate(args) -> int:
    pred = ocio.load_predictor(args.model)
    d = ocio.load_dataset_csv(args.data)
    bounds = apply_predictor(pred, d)
    cov = coverage_metric(bounds, d.labels)
    size = avg_set_size(bounds)
    line = _config_line("evaluate", args)
    _echo(line, args)
    print(f"coverage={cov!r} avg_set_size={size!r}")
    if args.out:
        text = "\n".join([line, "coverage,avg_set_size", f"{cov!r},{size!r}"]) + "\n"
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def _cmd_compare(args) -> int:
    d = ocio.load_dataset_csv(args.data)
    report = run_trials(
        d, COMPARE_METHODS, args.alpha, args.lam, args.trials, args.seed
    )
    line = _config_line("compare", args)
    _echo(line, args)
    fmt = "json" if str(args.out).endswith(".json") else "csv"
    ocio.write_report(report, args.out, fmt, config_line=line if fmt == "csv" else None)
    print(f"{'method':<12} {'coverage':>20} {'set size':>20}")
    for agg in report.aggregates():
        print(
            f"{agg.method:<12} "
            f"{agg.coverage_mean:>12.4f} ± {agg.coverage_std:.4f} "
            f"{agg.avg_set_size_mean:>12.4f} ± {agg.avg_set_size_std:.4f}"
        )
    return 0


def _cmd_curve(args) -> int:
    d = ocio.load_dataset_csv(args.data)
    taus = np.linspace(args.tau_min, args.tau_max, args.points)
    rows = tau_curve(d, taus, args.lam)
    line = _config_line("curve", args)
    _echo(line, args)
    ocio.write_curve_csv(rows, args.out, config_line=line)
    _echo(f"wrote {len(rows)} grid points to {args.out}", args)
    return 0


def _cmd_sweep(args) -> int:
    d = ocio.load_dataset_csv(args.data)
    lambdas = [float(tok) for tok in args.lambdas.split(",") if tok.strip() != ""]
    rows = lambda_sweep(d, args.alpha, lambdas, args.trials, args.seed)
    line = _config_line("sweep", args)
    _echo(line, args)
    ocio.write_sweep_csv(rows, args.out, config_line=line)
    _echo(f"wrote {len(rows)} lambda rows to {args.out}", args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ordinalcps", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("generate", help="write a synthetic dataset CSV")
    sp.add_argument("--k", type=int, required=True, help="number of ordered classes (>= 2)")
    sp.add_argument("--n", type=int, required=True, help="number of rows")
    sp.add_argument("--sigma-min", type=float, default=1.0)
    sp.add_argument("--sigma-max", type=float, default=5.0)
    sp.add_argument("--miscal-temp", type=float, default=1.0,
                    help="score miscalibration temperature (1.0 = calibrated)")
    _add_common(sp)
    sp.set_defaults(func=_cmd_generate)

    sp = sub.add_parser("calibrate", help="calibrate a method on a dataset CSV")
    sp.add_argument("--data", required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--method", default=METHOD_MIN_CPS,
                    choices=[METHOD_MIN_CPS, METHOD_MIN_RCPS, METHOD_ORDINAL_APS])
    sp.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="length penalty (min-rcps only)")
    sp.add_argument("--exact", action="store_true",
                    help="order-statistic path (requires radially monotone rows)")
    _add_common(sp)
    sp.set_defaults(func=_cmd_calibrate)

    sp = sub.add_parser("predict", help="write per-row intervals for a dataset")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    _add_common(sp)
    sp.set_defaults(func=_cmd_predict)

    sp = sub.add_parser("evaluate", help="coverage and mean set size on a dataset")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    _add_common(sp, out_required=False)
    sp.set_defaults(func=_cmd_evaluate)

    sp = sub.add_parser("compare", help="multi-trial comparison of all methods")
    sp.add_argument("--data", required=True)
    sp.add_argument("--alpha", type=float, default=0.1)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.003,
                    help="length penalty used by min-rcps")
    sp.add_argument("--trials", type=int, default=10)
    _add_common(sp)
    sp.set_defaults(func=_cmd_compare)

    sp = sub.add_parser("curve", help="empirical coverage F(tau) over a tau grid")
    sp.add_argument("--data", required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.0)
    sp.add_argument("--tau-min", type=float, default=0.005)
    sp.add_argument("--tau-max", type=float, default=1.0)
    sp.add_argument("--points", type=int, default=200)
    _add_common(sp)
    sp.set_defaults(func=_cmd_curve)

    sp = sub.add_parser("sweep", help="min-rcps coverage/size across a lambda grid")
    sp.add_argument("--data", required=True)
    sp.add_argument("--alpha", type=float, default=0.1)
    sp.add_argument("--lambdas", default=",".join(str(x) for x in DEFAULT_LAMBDA_GRID))
    sp.add_argument("--trials", type=int, default=10)
    _add_common(sp)
    sp.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OrdinalCpsError, ValueError, OSError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
