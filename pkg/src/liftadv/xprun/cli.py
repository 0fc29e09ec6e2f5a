"""Command-line entry point: ``liftadv <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from ..featurelift import build_ensemble, make_training_set
from ..interpolate import AliasStructureViolated, GramSingular, fit
from ..riskexact import (
    DirichletForm,
    FourierSeries,
    UnresolvedRoot,
    adversarial_risk,
    bilevel_predictions,
    classification_risk,
    critical_survival,
    find_zero_crossings,
    resolve_epsilon,
    risk_report,
)
from .config import load_config
from .records import emit, load, to_csv, to_json
from .sweeps import DEFAULT_D, DEFAULT_N, default_workers, sweep_cdf, sweep_over_d, sweep_over_n
from .validate import report, run_validation

EXIT_OK, EXIT_VALIDATION, EXIT_ARGS, EXIT_NUMERIC = 0, 1, 2, 3


class ArgError(Exception):
    pass


def _eps(s: str) -> str:
    try:
        resolve_epsilon(s, 2, 5)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--eps must be 1/n, 2/n, 2pi/h, 2/h or a real, got {s!r}")
    return s


def _ints(s: str) -> tuple:
    try:
        return tuple(int(v) for v in str(s).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _add_ensemble(p: argparse.ArgumentParser, n=True):
    if n:
        p.add_argument("--n", type=int, default=30)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=1.45)
    p.add_argument("--B-override", dest="B_override", type=int, default=None)


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $LIFTADV_WORKERS or 1)")
    p.add_argument("--config", default=None, help="flat key = value file of flag defaults")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liftadv", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("coeffs", help="print the learned coefficients of one ensemble")
    _add_ensemble(p)
    p.add_argument("--layout", choices=("grid", "random"), default="grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("risk", help="exact risks and theory quantities for one ensemble")
    _add_ensemble(p)
    p.add_argument("--eps", type=_eps, action="append", default=None)
    p.add_argument("--layout", choices=("grid", "random"), default="grid")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep-n", help="risks versus sample size")
    _add_ensemble(p, n=False)
    p.add_argument("--ns", type=_ints, default=DEFAULT_N)
    p.add_argument("--layout", choices=("grid", "random"), default="grid")
    p.add_argument("--seeds", type=_ints, default=(0,))
    p.add_argument("--seed", type=int, default=None, help="single seed (overrides --seeds)")
    p.add_argument("--eps", type=_eps, default="1/n")
    p.add_argument("--n-test", dest="n_test", type=int, default=20_000)
    _add_output(p)

    p = sub.add_parser("sweep-d", help="random-Fourier-sum models versus width d")
    _add_ensemble(p)
    p.set_defaults(n=8)
    p.add_argument("--ds", type=_ints, default=DEFAULT_D)
    p.add_argument("--seeds", type=_ints, default=tuple(range(20)))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--eps", type=_eps, default="1/n")
    p.add_argument("--n-test", dest="n_test", type=int, default=20_000)
    _add_output(p)

    p = sub.add_parser("cdf", help="distance-to-training-point CDF of misclassified points")
    _add_ensemble(p)
    p.add_argument("--ds", type=_ints, default=(0, 60, 8192), help="0 = closed-form Fourier")
    p.add_argument("--seeds", type=_ints, default=(0,))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-test", dest="n_test", type=int, default=100_000)
    _add_output(p)

    p = sub.add_parser("validate", help="run every oracle cross-check")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("emit", help="convert a CSV/JSON table to csv, json or svg")
    p.add_argument("table")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="svg")
    p.add_argument("--out", required=True)
    p.add_argument("--x", default=None, help="x-axis field for svg")
    p.add_argument("--metrics", default="classification,adversarial")
    return ap


def _parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        try:
            cfg = load_config(cfg_path)
        except (OSError, ValueError) as exc:
            raise ArgError(str(exc))
        # config supplies defaults; explicit flags still win
        sp = ap._subparsers._group_actions[0].choices[args.cmd]
        known = {a.dest for a in sp._actions}
        unknown = set(cfg) - known
        if unknown:
            raise ArgError(f"unknown config keys: {sorted(unknown)}")
        sp.set_defaults(**cfg)
        args = ap.parse_args(argv)
    return args


def _seeds(args) -> tuple:
    return (args.seed,) if args.seed is not None else tuple(args.seeds)


def _write(records, args, x: str, metrics) -> None:
    if args.out:
        path = emit(records, args.format, args.out, x=x, metrics=metrics)
        print(f"wrote {len(records)} rows to {path}", file=sys.stderr)
    elif args.format == "json":
        sys.stdout.write(to_json(records))
    elif args.format == "svg":
        raise ArgError("--format svg needs --out")
    else:
        sys.stdout.write(to_csv(records))


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def cmd_coeffs(args) -> int:
    ens = build_ensemble(args.n, args.p, args.q, args.B_override)
    cv = fit(ens, make_training_set(args.n, args.layout, args.seed if args.layout == "random" else None))
    nz = np.flatnonzero(np.abs(cv.alpha) > 1e-14)
    if args.format == "json":
        print(json.dumps({"n": ens.n, "B": ens.B, "N_A": ens.N_A, "a": cv.a, "b": cv.b,
                          "alpha": {int(i): float(cv.alpha[i]) for i in nz}}, indent=1))
    else:
        print(f"n={ens.n} B={ens.B} N_A={ens.N_A} a={cv.a!r} b={cv.b!r}")
        for i in nz[:50]:
            print(f"  alpha[{i}] = {float(cv.alpha[i])!r}")
        if len(nz) > 50:
            print(f"  ... {len(nz) - 50} more nonzero entries")
    return EXIT_OK


def cmd_risk(args) -> int:
    ens = build_ensemble(args.n, args.p, args.q, args.B_override)
    eps = args.eps or ["1/n", "2/n", "2pi/h"]
    ts = make_training_set(args.n, args.layout, args.seed if args.layout == "random" else None)
    cv = fit(ens, ts)
    if cv.b_consistent:
        rep = risk_report(DirichletForm(cv.a, cv.b, ens.N_A, ens.n), eps, q=ens.q)
        out = asdict(rep)
        pred = bilevel_predictions(ens)
        out.update(a=cv.a, b=cv.b, B=ens.B, N_A=ens.N_A, regime=pred.regime.value,
                   asymptotic_bound=pred.asymptotic_bound,
                   critical_a=critical_survival(ens.n, ens.B) if ens.alias_structure else None)
    else:
        zs = find_zero_crossings(FourierSeries(cv.alpha, n=ens.n))
        out = {"a": cv.a, "B": ens.B, "classification": classification_risk(zs),
               "adversarial": {e: adversarial_risk(zs, resolve_epsilon(e, ens.n, ens.B)) for e in eps}}
    print(json.dumps(_clean(out), indent=1))
    return EXIT_OK


def cmd_sweep_n(args) -> int:
    recs = sweep_over_n(p=args.p, q=args.q, ns=args.ns, layout=args.layout, eps_rule=args.eps,
                        seeds=_seeds(args), workers=args.workers, B_override=args.B_override,
                        n_test=args.n_test if args.layout == "random" else 0)
    _write(recs, args, "n", ("classification", "adversarial", "adversarial_2n", "a", "critical_a"))
    return EXIT_OK


def cmd_sweep_d(args) -> int:
    recs = sweep_over_d(n=args.n, p=args.p, q=args.q, ds=args.ds, seeds=_seeds(args), eps_rule=args.eps,
                        n_test=args.n_test, workers=args.workers, B_override=args.B_override)
    _write(recs, args, "d", ("classification", "adversarial", "regression_mse", "alpha_err"))
    return EXIT_OK


def cmd_cdf(args) -> int:
    recs = sweep_cdf(n=args.n, p=args.p, q=args.q, ds=args.ds, seeds=_seeds(args),
                     n_test=args.n_test, workers=args.workers, B_override=args.B_override)
    _write(recs, args, "d", ("ks_to_fourier", "within_half"))
    return EXIT_OK


def cmd_validate(args) -> int:
    checks = run_validation(verbose=not args.quiet)
    rep = report(checks)
    text = json.dumps(rep, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if not rep["passed"]:
        print(json.dumps({"failures": rep["failures"]}), file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_emit(args) -> int:
    try:
        recs = load(args.table)
    except OSError as exc:
        raise ArgError(f"cannot read {args.table}: {exc}")
    emit(recs, args.format, args.out, x=args.x, metrics=[m for m in args.metrics.split(",") if m])
    return EXIT_OK


COMMANDS = {"coeffs": cmd_coeffs, "risk": cmd_risk, "sweep-n": cmd_sweep_n, "sweep-d": cmd_sweep_d,
            "cdf": cmd_cdf, "validate": cmd_validate, "emit": cmd_emit}


def main(argv=None) -> int:
    try:
        args = _parse(argv)
        if getattr(args, "workers", None) is None and hasattr(args, "workers"):
            args.workers = default_workers()
        return COMMANDS[args.cmd](args)
    except SystemExit as exc:  # argparse
        return int(exc.code) if isinstance(exc.code, int) else EXIT_ARGS
    except (ArgError, AliasStructureViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (GramSingular, UnresolvedRoot, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
