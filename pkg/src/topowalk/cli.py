"""``topowalk`` command-line entry point."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .lattice import DomainError
from .momentum import (
    BOUNDARY_LABEL,
    PhaseBoundaryError,
    classify_split,
    classify_split_numeric,
    dispersion_branches,
    phase_diagram,
    simple_invariants,
)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _params(kind: str, theta: list[float]):
    if kind == "simple":
        if len(theta) != 1:
            raise ex.ConfigError("--kind simple takes one --theta value")
        return theta[0]
    if len(theta) != 2:
        raise ex.ConfigError("--kind split takes two --theta values (theta1 theta2)")
    return tuple(theta)


def momentum_grid(n_k: int) -> np.ndarray:
    """n_k equally spaced momenta in (-pi, pi]."""
    return -np.pi + 2 * np.pi * np.arange(1, n_k + 1) / n_k


def cmd_run(args) -> int:
    config = ex.load_config(args.config)
    result = ex.run(config, args.out)
    s = result.summary
    print(f"wrote {result.csv_path}")
    print(f"wrote {result.manifest_path}")
    print(
        f"norm_drift={s['norm_drift']:.3e} boundary_probability_final={s['boundary_probability_final']:.6f} "
        f"edge_probability={s['edge_probability']:.3e}"
    )
    return ex.EXIT_OK


def cmd_sweep(args) -> int:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ex.ConfigError("--values needs at least one value")
    outcomes = ex.sweep(args.config, args.param, values, jobs=args.jobs, out_dir=args.out)
    failed = [o for o in outcomes if o.code != ex.EXIT_OK]
    for o in outcomes:
        where = o.manifest_path or "-"
        print(f"{args.param}={o.label}: {o.message} {where}")
    if failed:
        listing = ", ".join(f"{args.param}={o.label}" for o in failed)
        print(f"topowalk: {len(failed)} sweep run(s) failed: {listing}", file=sys.stderr)
        return max(o.code for o in failed)
    return ex.EXIT_OK


def cmd_dispersion(args) -> int:
    params = _params(args.kind, args.theta)
    if args.nk < 1:
        raise ex.ConfigError("--nk must be >= 1")
    k = momentum_grid(args.nk)
    plus, minus = dispersion_branches(params, k)
    rows = ["k,omega_plus,omega_minus"]
    rows += [f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(k, plus, minus)]
    _emit("\n".join(rows) + "\n", args.output)
    return ex.EXIT_OK


def cmd_invariants(args) -> int:
    kind = "simple" if args.simple else "split" if args.split else args.kind
    params = _params(kind, args.theta)
    if kind == "simple":
        nu0, nu1 = simple_invariants(params, args.nk)
        print(f"nu0={nu0} nu1={nu1}")
        return ex.EXIT_OK
    if args.method == "closed_form":
        label = classify_split(*params)
    else:
        label = classify_split_numeric(*params, n_k=args.nk)
    print(f"nu0={label.nu0} nu1={label.nu1} phase={label}")
    return ex.EXIT_OK


def cmd_phasediagram(args) -> int:
    diagram = phase_diagram((args.t1min, args.t1max), (args.t2min, args.t2max), args.res, args.method)
    rows = ["theta1,theta2,nu0,nu1,label"]
    for t1, t2, nu0, nu1, label in diagram.rows():
        if label == BOUNDARY_LABEL:
            rows.append(f"{t1:.17g},{t2:.17g},,,{label}")
        else:
            rows.append(f"{t1:.17g},{t2:.17g},{nu0},{nu1},{label}")
    _emit("\n".join(rows) + "\n", args.output)
    return ex.EXIT_OK


def cmd_configs(args) -> int:
    for name in ex.bundled_names():
        print(name)
    return ex.EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topowalk", description="1D topological quantum walk experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment config (file path or bundled name)")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: $TOPOWALK_OUT or the config's output.dir)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a config once per parameter value")
    p.add_argument("config")
    p.add_argument("--param", required=True, help="key name or dotted path, e.g. R or rates.R")
    p.add_argument("--values", required=True, help="comma-separated numbers")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out", help="output directory root")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dispersion", help="write k, omega_plus, omega_minus as CSV")
    p.add_argument("--kind", choices=("simple", "split"), default="simple")
    p.add_argument("--theta", type=float, nargs="+", required=True)
    p.add_argument("--nk", type=int, default=256)
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("invariants", help="print winding numbers nu0, nu1")
    p.add_argument("--kind", choices=("simple", "split"), default="simple")
    p.add_argument("--simple", action="store_true", help="shorthand for --kind simple")
    p.add_argument("--split", action="store_true", help="shorthand for --kind split")
    p.add_argument("--theta", type=float, nargs="+", required=True)
    p.add_argument("--nk", type=int, default=1024)
    p.add_argument("--method", choices=("winding", "closed_form"), default="winding")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("phasediagram", help="label a (theta1, theta2) grid as CSV")
    p.add_argument("--t1min", type=float, default=-np.pi)
    p.add_argument("--t1max", type=float, default=np.pi)
    p.add_argument("--t2min", type=float, default=-np.pi)
    p.add_argument("--t2max", type=float, default=np.pi)
    p.add_argument("--res", type=int, default=21)
    p.add_argument("--method", choices=("closed_form", "winding"), default="closed_form")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_phasediagram)

    p = sub.add_parser("configs", help="list bundled configs")
    p.set_defaults(func=cmd_configs)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ex.ConfigError as exc:
        print(f"topowalk: config error: {exc}", file=sys.stderr)
        return ex.EXIT_CONFIG
    except PhaseBoundaryError as exc:
        print(f"topowalk: {exc}", file=sys.stderr)
        return ex.EXIT_NUMERICAL
    except ex.NumericalError as exc:
        print(f"topowalk: numerical failure: {exc}", file=sys.stderr)
        return ex.EXIT_NUMERICAL
    except DomainError as exc:
        print(f"topowalk: config error: {exc}", file=sys.stderr)
        return ex.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
