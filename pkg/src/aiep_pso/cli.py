"""Command-line entry point: ``aiep-pso <subcommand>``.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import embedding, experiment, femodel, linalg, perturbation
from .errors import NumericalError, ValidationError

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

JL_EPSILON_GRIDS = {110: (0.1, 0.3, 0.7, 1.0), 40602: (0.1, 0.3, 0.5, 0.7, 1.0)}
DEFAULT_JL_EPSILONS = (0.1, 0.3, 0.5, 0.7, 1.0)

PRESETS = {
    "toy": lambda: experiment.toy_spec(50, output_dir="runs/toy_d50"),
    "toy-d10": lambda: experiment.toy_spec(10, output_dir="runs/toy_d10"),
    "toy-full": lambda: experiment.toy_spec(None, output_dir="runs/toy_full"),
    "fe": lambda: experiment.fe_spec(5, 26, output_dir="runs/fe5_d26"),
    "fe-massive": lambda: experiment.fe_spec(100, 300, particles=250, seeds=tuple(range(5)),
                                             output_dir="runs/fe100_d300"),
}


def _out_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


# ---------------------------------------------------------------- jl-table

def jl_table(n: int, epsilons) -> list[embedding.JlBound]:
    return [embedding.jl_min_dimension(n, e) for e in epsilons]


def format_jl_table(rows) -> str:
    eps = ["epsilon"] + [f"{r.epsilon:g}" for r in rows]
    ks = ["k"] + [str(r.k) for r in rows]
    width = max(len(s) for s in eps + ks)
    return "\n".join(" ".join(s.rjust(width) for s in line) for line in (eps, ks))


def cmd_jl_table(args):
    eps = args.eps or JL_EPSILON_GRIDS.get(args.n, DEFAULT_JL_EPSILONS)
    rows = jl_table(args.n, eps)
    print(f"JL minimal dimension for n={args.n}")
    print(format_jl_table(rows))
    if args.out:
        out = _out_dir(args.out)
        header = experiment.header_lines({"n": args.n, "epsilons": list(eps)}, "aiep-pso jl-table")
        body = "\n".join(f"{r.epsilon!r},{r.k}" for r in rows)
        (out / f"jl_n{args.n}.csv").write_text(header + "epsilon,k\n" + body + "\n")


# ---------------------------------------------------------------- perturb-study

def cmd_perturb_study(args):
    p_values = tuple(args.p) + tuple(args.extension)
    dims = tuple(args.dims) if args.dims else perturbation.DEFAULT_DIMS
    reports = perturbation.step_size_study(p_values, dims, trials=args.trials, seed=args.seed,
                                           variant=args.variant)
    resolved = {"p_values": list(p_values), "dims": list(dims), "trials": args.trials,
                "seed": args.seed, "variant": args.variant}
    header = experiment.header_lines(resolved, "aiep-pso perturb-study")
    out = _out_dir(args.out)
    perturbation.write_reports_csv(out / "step_sizes.csv", reports, header=header)
    for r in reports:
        print(f"d={r.d:3d} p={r.p:<8g} mean |error| = {r.mean_abs_pct_error:.6g} %")


# ---------------------------------------------------------------- modal-report

def modal_report(config: femodel.WingConfig, out: Path, modes: int = 4, freqs: int = 3) -> dict:
    """Frequency table (R = 0 and R = config.R) and mode shapes, as CSV."""
    out = _out_dir(out)
    header = experiment.header_lines(dataclasses.asdict(config), "aiep-pso modal-report")
    baseline = dataclasses.replace(config, R=0.0)
    table = {}
    lines = [header.rstrip("\n"), f"symmetry,mode,R=0,R={config.R:g}"]
    for sym in (femodel.SYMMETRIC, femodel.ANTISYMMETRIC):
        f0 = femodel.nondim_frequencies(baseline, sym, freqs)
        f1 = femodel.nondim_frequencies(config, sym, freqs)
        table[sym] = (f0, f1)
        lines += [f"{sym},{i + 1},{float(a)!r},{float(b)!r}" for i, (a, b) in enumerate(zip(f0, f1))]
    (out / "frequencies.csv").write_text("\n".join(lines) + "\n")
    for sym in (femodel.SYMMETRIC, femodel.ANTISYMMETRIC):
        x, shapes = femodel.mode_shapes(config, sym, modes)
        cols = ",".join(f"mode_{j + 1}" for j in range(modes))
        rows = [header.rstrip("\n"), f"x,{cols}"]
        rows += [",".join(repr(float(v)) for v in (xi, *s)) for xi, s in zip(x, shapes)]
        (out / f"mode_shapes_{sym}.csv").write_text("\n".join(rows) + "\n")
    return table


def cmd_modal_report(args):
    config = femodel.WingConfig(args.elements, R=args.R)
    table = modal_report(config, args.out, modes=args.modes)
    print(f"Non-dimensional frequencies, {args.elements} elements per half-span")
    for sym, (f0, f1) in table.items():
        print(f"{sym}:")
        print(f"  {'mode':>4} {'R=0':>10} {f'R={args.R:g}':>10}")
        for i, (a, b) in enumerate(zip(f0, f1)):
            print(f"  {i + 1:>4} {a:10.4f} {b:10.4f}")


# ---------------------------------------------------------------- eig

def cmd_eig(args):
    M = linalg.read_matrix(args.mass)
    K = linalg.read_matrix(args.stiffness)
    spec = linalg.generalized_eig(M, K, args.k)
    for i, lam in enumerate(spec.eigenvalues):
        print(f"{i + 1}: {lam:.10g}")
    if args.out:
        out = _out_dir(args.out)
        header = experiment.header_lines({"mass": str(args.mass), "stiffness": str(args.stiffness), "k": args.k},
                                         "aiep-pso eig")
        body = "\n".join(f"{i + 1},{float(lam)!r}" for i, lam in enumerate(spec.eigenvalues))
        (out / "eigenvalues.csv").write_text(header + "index,eigenvalue\n" + body + "\n")


# ---------------------------------------------------------------- run

def resolve_spec(name_or_path) -> experiment.ExperimentSpec:
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    return experiment.load_spec(name_or_path)


def cmd_run(args):
    spec = resolve_spec(args.spec)
    overrides = {}
    if args.seed is not None:
        overrides["seeds"] = tuple(args.seed)
    if args.threads is not None:
        overrides["threads"] = args.threads
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
        experiment.validate(spec)
    summary = experiment.run_experiment(spec, output_dir=args.out, log=print)
    print(f"median final objective over {len(summary.finals)} seeds: {summary.median_final:.6g}")
    print(f"artifacts in {summary.output_dir}")


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aiep-pso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment file or preset")
    p.add_argument("--spec", required=True, help=f"experiment file or preset ({', '.join(PRESETS)})")
    p.add_argument("--seed", type=int, nargs="+", help="override the seed list")
    p.add_argument("--out", help="output directory (default: from the experiment)")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("jl-table", help="minimal JL dimensions for n points")
    p.add_argument("--n", type=int, default=40602)
    p.add_argument("--eps", type=float, nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_jl_table)

    p = sub.add_parser("perturb-study", help="first-order eigenvalue step-size study")
    p.add_argument("--p", type=float, nargs="+", default=list(perturbation.DEFAULT_P_VALUES))
    p.add_argument("--extension", type=float, nargs="*", default=[1e-6],
                   help="extra step sizes appended to the grid")
    p.add_argument("--dims", type=int, nargs="+")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=("textbook", "delta"), default="textbook")
    p.add_argument("--out", default="runs/perturb_study")
    p.add_argument("--threads", type=int, help="accepted for interface symmetry; the study is serial")
    p.set_defaults(func=cmd_perturb_study)

    p = sub.add_parser("modal-report", help="wing frequency table and mode shapes")
    p.add_argument("--elements", type=int, default=30)
    p.add_argument("--R", type=float, default=femodel.B737_MASS_RATIO)
    p.add_argument("--modes", type=int, default=4)
    p.add_argument("--out", default="runs/modal_report")
    p.set_defaults(func=cmd_modal_report)

    p = sub.add_parser("eig", help="solve K v = lambda M v for matrix files")
    p.add_argument("--mass", required=True)
    p.add_argument("--stiffness", required=True)
    p.add_argument("-k", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eig)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
