"""Command-line interface.

Subcommands: simulate, reconstruct, crossval, dfe, bootstrap, sweep-m,
sweep-grid.  Every command is a pure function of its inputs and --seed.
Exit codes: 0 success, 1 invalid input, 2 infeasible reconstruction,
3 internal or numerical error.
"""

import argparse
import json
import sys

from . import analysis, dfe, model_selection
from .data import Dataset, RandomSource, sample_counts
from .exceptions import (
    DegenerateSolutionError,
    InfeasibleError,
    InvalidArgumentError,
    TomographyError,
)
from .model_selection import epsilon_hat
from .pauli import SettingsPlan, enumerate_settings
from .data import draw_settings, restrict_dataset
from .solver import SolverConfig, reconstruct
from .states import DensityMatrix, dephased_ghz, ghz_state, maximally_mixed

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_INTERNAL = 3


def _int_list(text):
    return [int(t) for t in text.split(",") if t]


def _float_list(text):
    return [float(t) for t in text.split(",") if t]


def _add_state_args(parser, prefix=""):
    pre = f"--{prefix}" if prefix else "--"
    parser.add_argument(f"{pre}state", choices=["ghz", "dephased-ghz", "mixed"],
                        help="built-in reference state")
    parser.add_argument(f"{pre}state-file", help="density-matrix JSON file")
    parser.add_argument(f"{pre}n", type=int, default=4, help="qubit count")
    parser.add_argument(f"{pre}dephase", type=float, default=0.0,
                        help="dephasing strength for dephased-ghz")


def _resolve_state(args, prefix=""):
    key = (prefix + "_" if prefix else "") + "state"
    file_key = key + "_file"
    path = getattr(args, file_key, None)
    if path:
        with open(path) as fh:
            return DensityMatrix.from_json(fh.read())
    kind = getattr(args, key, None)
    n = getattr(args, (prefix + "_" if prefix else "") + "n", 4)
    if kind == "ghz":
        return ghz_state(n)
    if kind == "dephased-ghz":
        lam = getattr(args, (prefix + "_" if prefix else "") + "dephase", 0.0)
        return dephased_ghz(n, lam)
    if kind == "mixed":
        return maximally_mixed(n)
    raise InvalidArgumentError(
        f"no state given; use --{prefix + '-' if prefix else ''}state or "
        f"--{prefix + '-' if prefix else ''}state-file"
    )


def _resolve_settings(spec, n, rng):
    if spec == "all":
        return enumerate_settings(n)
    if spec.startswith("random:"):
        m = int(spec.split(":", 1)[1])
        return sorted(draw_settings(enumerate_settings(n), m, rng))
    return spec.split(",")


def _solver_config(args):
    return SolverConfig(
        max_iterations=args.max_iterations,
        primal_tolerance=args.primal_tolerance,
        constraint_tolerance=args.constraint_tolerance,
        penalty_parameter=args.penalty_parameter,
    )


def _add_solver_args(parser):
    parser.add_argument("--max-iterations", type=int, default=5000)
    parser.add_argument("--primal-tolerance", type=float, default=1e-9)
    parser.add_argument("--constraint-tolerance", type=float, default=None)
    parser.add_argument("--penalty-parameter", type=float, default=1.0)


def _emit(args, json_payload, csv_text=None):
    if args.format == "csv":
        if csv_text is None:
            raise InvalidArgumentError("this command has no CSV representation")
        text = csv_text
    else:
        text = json.dumps(json_payload, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_dataset(path):
    with open(path) as fh:
        return Dataset.from_json(fh.read())


def _resolve_target(args):
    if args.target == "ghz":
        return dfe.ghz_pauli_decomposition(4)
    with open(args.target) as fh:
        payload = json.load(fh)
    return dfe.PauliCoefficients(payload)


def _cmd_simulate(args):
    rng = RandomSource(args.seed)
    rho = _resolve_state(args)
    import math

    n = int(math.log2(rho.dim))
    words = _resolve_settings(args.settings, n, rng.substream(0))
    plan = SettingsPlan(words, args.shots)
    ds = sample_counts(rho, plan, rng.substream(1))
    _emit(args, ds.to_json_dict(), ds.to_csv())
    return EXIT_OK


def _cmd_reconstruct(args):
    ds = _load_dataset(args.input)
    if args.epsilon is not None:
        eps = args.epsilon
    elif args.auto_epsilon:
        eps = args.multiplier * epsilon_hat(ds)
    else:
        raise InvalidArgumentError("pass --epsilon or --auto-epsilon")
    if eps <= 0:
        # epsilon = 0 means a strict ball with empty interior on noisy data
        raise InfeasibleError("epsilon <= 0 leaves no feasible state")
    result = reconstruct(ds, eps, _solver_config(args))
    _emit(args, result.to_json_dict())
    if result.status == "infeasible":
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_crossval(args):
    ds = _load_dataset(args.input)
    report = model_selection.cross_validate(
        ds,
        m_values=args.m_values,
        epsilon_multipliers=args.multipliers,
        folds=args.folds,
        repetitions=args.repetitions,
        rng=RandomSource(args.seed),
        config=_solver_config(args),
    )
    _emit(args, report.to_json_dict(), report.to_csv())
    return EXIT_OK


def _cmd_dfe(args):
    ds = _load_dataset(args.input)
    coeffs = _resolve_target(args)
    if args.canonical_settings:
        wanted = dfe.required_settings(coeffs)
        ds = restrict_dataset(ds, [w for w in ds.words if w in set(wanted)])
    estimate = dfe.direct_fidelity(ds, coeffs)
    _emit(args, estimate.to_json_dict())
    return EXIT_OK


def _cmd_bootstrap(args):
    with open(args.estimate) as fh:
        estimate = DensityMatrix.from_json(fh.read())
    import math

    n = int(math.log2(estimate.dim))
    rng = RandomSource(args.seed)
    words = _resolve_settings(args.settings, n, rng.substream(0))
    plan = SettingsPlan(words, args.shots)
    if args.target_file:
        with open(args.target_file) as fh:
            target = DensityMatrix.from_json(fh.read())
        label = args.target_file
    else:
        target = ghz_state(n)
        label = "ghz"
    report = analysis.bootstrap_fidelity(
        estimate,
        plan,
        target,
        repetitions=args.repetitions,
        rng=rng.substream(1),
        config=_solver_config(args),
        target_label=label,
        threads=args.threads,
    )
    _emit(args, report.to_json_dict())
    return EXIT_OK


def _cmd_sweep_m(args):
    ds = _load_dataset(args.input)
    if args.target_file:
        with open(args.target_file) as fh:
            target = DensityMatrix.from_json(fh.read())
    else:
        target = ghz_state(ds.n_qubits)
    report = analysis.sweep_settings(
        ds,
        m_values=args.m_values,
        draws_per_m=args.draws,
        target=target,
        rng=RandomSource(args.seed),
        config=_solver_config(args),
        threads=args.threads,
    )
    _emit(args, report.to_json_dict(), report.to_csv())
    return EXIT_OK


def _cmd_sweep_grid(args):
    rng = RandomSource(args.seed)
    generator = _resolve_state(args)
    import math

    n = int(math.log2(generator.dim))
    plan = SettingsPlan(enumerate_settings(n), args.shots)
    report = analysis.sweep_grid(
        generator,
        plan,
        m_values=args.m_values,
        epsilon_multipliers=args.multipliers,
        repetitions=args.repetitions,
        rng=rng.substream(1),
        config=_solver_config(args),
        threads=args.threads,
    )
    _emit(args, report.to_json_dict(), report.to_csv())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cstomo",
        description="Compressed-sensing quantum state tomography toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="root RNG seed")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument(
            "--threads", type=int, default=analysis.default_threads(),
            help="task-pool size (default: CS_TOMO_THREADS or 1)",
        )

    p = sub.add_parser("simulate", help="simulate multinomial count data")
    common(p)
    _add_state_args(p)
    p.add_argument("--shots", type=int, default=650)
    p.add_argument("--settings", default="all",
                   help="'all', 'random:M', or a comma-separated word list")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconstruct", help="compressed-sensing reconstruction")
    common(p)
    p.add_argument("--input", required=True, help="dataset JSON")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--auto-epsilon", action="store_true")
    p.add_argument("--multiplier", type=float, default=1.0)
    _add_solver_args(p)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("crossval", help="cross-validated epsilon selection")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--m-values", type=_int_list, default=[10, 15, 20, 40, 60, 80])
    p.add_argument("--multipliers", type=_float_list,
                   default=[0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0])
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--repetitions", type=int, default=50)
    _add_solver_args(p)
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser("dfe", help="direct fidelity estimation")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--target", default="ghz",
                   help="'ghz' or a JSON file of Pauli coefficients")
    p.add_argument("--canonical-settings", action="store_true",
                   help="restrict to the minimal covering settings")
    p.set_defaults(func=_cmd_dfe)

    p = sub.add_parser("bootstrap", help="parametric bootstrap of the fidelity")
    common(p)
    p.add_argument("--estimate", required=True, help="density-matrix JSON")
    p.add_argument("--target-file", help="density-matrix JSON (default: GHZ)")
    p.add_argument("--shots", type=int, default=650)
    p.add_argument("--settings", default="all")
    p.add_argument("--repetitions", type=int, default=100)
    _add_solver_args(p)
    p.set_defaults(func=_cmd_bootstrap)

    p = sub.add_parser("sweep-m", help="fidelity vs number of settings")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--target-file", help="density-matrix JSON (default: GHZ)")
    p.add_argument("--m-values", type=_int_list, default=[6, 10, 20, 40, 81])
    p.add_argument("--draws", type=int, default=50)
    _add_solver_args(p)
    p.set_defaults(func=_cmd_sweep_m)

    p = sub.add_parser("sweep-grid", help="fidelity over an (m, epsilon) grid")
    common(p)
    _add_state_args(p)
    p.add_argument("--shots", type=int, default=650)
    p.add_argument("--m-values", type=_int_list, default=[3, 6, 10, 15, 20])
    p.add_argument("--multipliers", type=_float_list, default=[0.25, 0.5, 1.0, 2.0, 3.0])
    p.add_argument("--repetitions", type=int, default=100)
    _add_solver_args(p)
    p.set_defaults(func=_cmd_sweep_grid)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (InfeasibleError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvalidArgumentError, DegenerateSolutionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TomographyError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
