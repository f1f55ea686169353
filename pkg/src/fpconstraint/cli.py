"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .assembly import DRIFT_STYLES, LOAD_STYLES, assemble, write_system_csv
from .csvio import format_block, write_csv
from .experiments import DEFAULT_N, PRESETS, get_preset, run_preset
from .inversion import Status, invert, scan_monotonicity
from .mesh import build_mesh
from .model import ConfigError, RunConfig, check_hypotheses, parse_config
from .oracles import ResolutionWarning, check_asymptote, check_moments, mass_prefactor, source_moment
from .solver import solve_adjoint, solve_primal, solve_sensitivity, write_solution_csv
from .tridiag import SolverError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _common(p: argparse.ArgumentParser, model_source: bool = True) -> None:
    if model_source:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="key=value model file")
        src.add_argument("--preset", choices=sorted(PRESETS), help="use a preset's model")
    p.add_argument("--n", type=int, default=None, help="number of mesh intervals")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--load-style", choices=LOAD_STYLES, default="hat")
    p.add_argument("--drift", choices=DRIFT_STYLES, default="galerkin")
    p.add_argument("--dump-system", type=Path, default=None,
                   help="write the system matrix diagonals and load as CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpconstraint",
        description="Constrained stationary Fokker-Planck problem, radial P1 scheme.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a preset experiment")
    p.add_argument("--preset", choices=sorted(PRESETS), required=True)
    _common(p, model_source=False)
    p.add_argument("--mu", type=float, default=1.0, help="mu used for --dump-system")

    p = sub.add_parser("solve", help="forward solve at one mu")
    _common(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--dump-solution", action="store_true", help="write solution.csv")

    p = sub.add_parser("scan", help="sample F and F' over a mu grid")
    _common(p)
    p.add_argument("--mu-lo", type=float, default=0.0)
    p.add_argument("--mu-hi", type=float, required=True)
    p.add_argument("--samples", type=int, default=60)

    p = sub.add_parser("invert", help="find mu with F(mu) = ell")
    _common(p)
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--mu-max", type=float, default=1e8)
    p.add_argument("--tol-f", type=float, default=None)

    p = sub.add_parser("moments", help="discrete moments against closed forms")
    _common(p)
    p.add_argument("--mu", type=float, required=True)

    p = sub.add_parser("asymptote", help="F(mu)/mu against the large-mu slope")
    _common(p)
    p.add_argument("--mu", type=float, nargs="+", required=True)
    return parser


def _load_run_config(args) -> RunConfig:
    if args.preset is not None:
        return RunConfig(get_preset(args.preset).model, get_preset(args.preset).default_n)
    try:
        text = args.config.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    return parse_config(text)


def _emit(block: dict, path: Path | None = None) -> None:
    text = format_block(block)
    sys.stdout.write(text)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _custom(args) -> int:
    cfg = _load_run_config(args)
    model = cfg.model
    n = args.n or cfg.n_intervals or DEFAULT_N
    mesh = build_mesh(n, model.dim, cfg.radius)
    system = assemble(model, mesh, load_style=args.load_style, drift=args.drift)
    out: Path = args.out
    base = {"command": args.command, "N": n, "radius": cfg.radius, "drift": args.drift,
            "load_style": args.load_style, **model.describe()}
    if args.dump_system is not None:
        mu = args.mu if isinstance(getattr(args, "mu", None), float) else 1.0
        write_system_csv(args.dump_system, system, mu, model.gamma, base)

    if args.command == "solve":
        primal = solve_primal(system, model, args.mu)
        adjoint = solve_adjoint(system, model, args.mu)
        sens = solve_sensitivity(system, model, args.mu, primal.U)
        mass = model.gamma * float(np.sum(system.A.matvec(primal.U)))
        predicted = model.gamma * mass_prefactor(args.mu, model.gamma, float(np.sum(system.load)))
        block = {**base, "mu": args.mu, "F": primal.f_value, "Fprime": sens.fprime_value,
                 "duality_value": adjoint.duality_value, "residual": primal.residual,
                 "min_value": primal.min_value,
                 "mass_gamma_int_u": mass, "mass_mu_int_S": predicted,
                 "mass_rel_error": abs(mass - predicted) / predicted if predicted else 0.0}
        if args.dump_solution:
            write_solution_csv(out / "solution.csv", system, model, primal, adjoint, sens)
        _emit(block, out / "summary.txt")
        return EXIT_OK

    if args.command == "scan":
        scan = scan_monotonicity(system, model, args.mu_lo, args.mu_hi, args.samples)
        write_csv(out / "fscan.csv", {**base, "mu_lo": args.mu_lo, "mu_hi": args.mu_hi,
                                      "samples": args.samples},
                  ["mu", "F", "Fprime"], scan.rows())
        _emit({**base, "samples": args.samples, "sign_changes": len(scan.sign_changes),
               "monotone": scan.monotone, "f_max": float(scan.f_values.max())},
              out / "summary.txt")
        return EXIT_OK

    if args.command == "invert":
        report = invert(system, model, args.ell, mu_max=args.mu_max, tol_f=args.tol_f)
        _emit({**base, **report.summary()}, out / "inversion.txt")
        return EXIT_NUMERIC if report.status is Status.NO_BRACKET else EXIT_OK

    if args.command == "moments":
        rep = check_moments(solve_primal(system, model, args.mu), model, mesh)
        block = {**base, **rep.summary()}
        try:
            block["source_integral"] = source_moment(model, 0)
        except TypeError:
            pass
        _emit(block, out / "moments.txt")
        return EXIT_OK

    if args.command == "asymptote":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ResolutionWarning)
            rep = check_asymptote(model, mesh, args.mu, sys=system)
        write_csv(out / "asymptote.csv", base,
                  ["mu", "ratio", "rel_deviation", "nodes_in_core", "resolved"], rep.rows())
        block = {**base, **rep.summary()}
        if caught:
            block["warning"] = "resolution proxy violated"
        block["hphi_ok"] = check_hypotheses(model, mesh).hphi_ok
        _emit(block, out / "asymptote.txt")
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            res = run_preset(args.preset, args.n, args.out, args.load_style, args.drift,
                             dump_system=args.dump_system, dump_mu=args.mu)
            sys.stdout.write(format_block(res.summary))
            return EXIT_OK
        return _custom(args)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"fpconstraint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"fpconstraint: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
