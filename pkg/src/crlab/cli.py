"""Command-line driver: build maps, run verification suites, sweep levels, export grids."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys

import numpy as np

from .config import DEFAULT_SIZES, DEFAULT_TOLERANCES
from .fibers import (SQRT5_HALF, complete_sibling_array, sibling_candidates_array,
                     write_grid_csv)
from .maps import ConstructionError, build_immersion
from .quadric import degenerate_witness, ellipse_distance, level, sample_level_array
from .suites import COLLISION_LEVELS, SUITES, criterion_values, run_suite, witness_criterion

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _tol_flag(name):
    return "--tol-" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: $CRLAB_SEED, else 0)")
        sp.add_argument("--out", default=None, help="write output here instead of stdout")

    b = sub.add_parser("build", help="construct F_n and serialise it as JSON")
    b.add_argument("--n", type=_positive_int, required=True)
    b.add_argument("--precision", type=_positive_int, default=None,
                   help="decimal digits for an mpmath construction")
    b.add_argument("--out", default=None)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v)
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--n-max", type=_positive_int, default=None,
                   help="largest n in the construction suite")
    v.add_argument("--t", type=float, action="append", default=None,
                   help="collision level for the witnesses suite (repeatable)")
    v.add_argument("--samples", type=_positive_int, default=None,
                   help="override every per-check sample count")
    v.add_argument("--resolution", type=int, default=None, help="phi minimisation grid")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    for name in DEFAULT_TOLERANCES.names():
        v.add_argument(_tol_flag(name), dest="tol_" + name, type=float, default=None)

    s = sub.add_parser("sweep", help="criterion margins and level gaps over a range of t")
    common(s)
    s.add_argument("--n", type=_positive_int, default=1)
    s.add_argument("--t-min", type=float, required=True)
    s.add_argument("--t-max", type=float, required=True)
    s.add_argument("--steps", type=_positive_int, default=15)
    s.add_argument("--samples", type=_positive_int, default=1000)
    s.add_argument("--format", choices=("json", "csv"), default="csv")

    g = sub.add_parser("grid", help="export phi and membership in D on a grid of the b-plane")
    g.add_argument("--what", choices=("phi", "D"), default="phi")
    g.add_argument("--resolution", type=int, default=501)
    g.add_argument("--out", default=None)
    return p


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("CRLAB_SEED")
    return int(env) if env else 0


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_build(args) -> int:
    try:
        m = build_immersion(args.n, precision=args.precision)
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    info = sys.stdout if args.out else sys.stderr
    print(f"a={m.a!r}", file=info)
    print(f"t={m.t_threshold!r}", file=info)
    _emit(m.to_json(indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    tol = DEFAULT_TOLERANCES.override(
        **{k: getattr(args, "tol_" + k) for k in DEFAULT_TOLERANCES.names()})
    sizes = DEFAULT_SIZES
    if args.n_max is not None:
        sizes = dataclasses.replace(sizes, n_max=args.n_max)
    if args.samples is not None:
        sizes = dataclasses.replace(sizes, nondeg_samples=args.samples,
                                    fiber_samples=args.samples,
                                    restriction_samples=args.samples,
                                    injectivity_samples=args.samples)
    if args.resolution is not None:
        if args.resolution < 101:
            print("--resolution must be at least 101", file=sys.stderr)
            return EXIT_USAGE
        sizes = dataclasses.replace(sizes, phi_grid=args.resolution)
    kw = {}
    if args.t is not None:
        kw["levels"] = tuple(args.t)
    elif args.suite in ("witnesses", "all"):
        kw["levels"] = COLLISION_LEVELS
    rep = run_suite(args.suite, resolve_seed(args.seed), tol, sizes, **kw)
    if args.format == "json":
        _emit(rep.to_json() + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "status", "margin", "anchor"])
        for c in rep.checks:
            w.writerow([c.id, c.status, "" if c.margin is None else repr(c.margin), c.anchor])
        _emit(buf.getvalue(), args.out)
    if args.out is not None:
        print("\n".join(rep.summary_lines()))
    print(f"{len(rep.checks)} checks, {len(rep.failures)} failed, "
          f"{rep.wall_time:.2f}s", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


SWEEP_COLUMNS = ["step", "t", "seed", "min_abs_criterion", "lower_bound", "criterion_ok",
                 "degenerate", "witness_criterion"]
FIBER_COLUMNS = ["min_level_gap", "gap_ok"]


def sweep_rows(n: int, t_min: float, t_max: float, steps: int, samples: int, seed: int):
    """One dict per level; the seed of step k is ``seed + k``."""
    if not 1 < t_min < t_max:
        raise ValueError("need 1 < t_min < t_max")
    m = build_immersion(n)
    rows = []
    for k, t in enumerate(np.linspace(t_min, t_max, steps) if steps > 1 else [t_min]):
        t = float(t)
        W = sample_level_array(t, samples, seed + k)
        crit = float(np.abs(criterion_values(m.P, W)).min())
        degenerate = t >= m.t_threshold
        bound = ellipse_distance(m.center, t) ** (2 * n)
        row = {"step": k, "t": t, "seed": seed + k, "min_abs_criterion": crit,
               "lower_bound": bound,
               "criterion_ok": int(crit >= bound * (1 - DEFAULT_TOLERANCES.criterion_rel)),
               "degenerate": int(degenerate),
               "witness_criterion": (witness_criterion(n, degenerate_witness(m, t).coords)
                                     if degenerate else None)}
        if n == 1:
            G = sample_level_array(t, samples, seed + k, boundary_prob=0.0, y_root="random")
            gaps = [np.abs(level(complete_sibling_array(G, c)) - t)
                    for c in sibling_candidates_array(G)]
            gap = float(np.concatenate(gaps).min())
            row["min_level_gap"] = gap
            row["gap_ok"] = int(gap > DEFAULT_TOLERANCES.level_gap) if t < SQRT5_HALF else None
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    try:
        rows = sweep_rows(args.n, args.t_min, args.t_max, args.steps, args.samples,
                          resolve_seed(args.seed))
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
        return EXIT_OK
    cols = SWEEP_COLUMNS + (FIBER_COLUMNS if args.n == 1 else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else
                    (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in cols])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_grid(args) -> int:
    if args.resolution < 101:
        print("--resolution must be at least 101", file=sys.stderr)
        return EXIT_USAGE
    buf = io.StringIO()
    write_grid_csv(args.resolution, buf, args.what)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "sweep": cmd_sweep, "grid": cmd_grid}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
