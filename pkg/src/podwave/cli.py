"""Command-line front end: solve, POD diagnostics, ROM sweeps, CSV output.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import os
import sys

from . import experiments, wave
from .config import ConfigError, RunConfig, make_config
from .linalg import LinAlgFailure

_FLOAT_FMT = "%.16e"  # 17 significant digits


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return _FLOAT_FMT % v
    return str(v)


def write_csv(path: str, config: RunConfig, command: str, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# command={command}\n")
        for key, value in config.as_items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")
    return path


def _out_path(config: RunConfig, name: str) -> str:
    return os.path.join(config.resolve_output_dir(), name)


def cmd_solve(config: RunConfig, args) -> int:
    space, grid, params, u0, u00 = experiments.setup(config)
    traj = wave.solve(space, grid, params, u0, u00)
    header, rows = experiments.trajectory_rows(traj, config.stride)
    p1 = write_csv(_out_path(config, "trajectory.csv"), config, "solve", header, rows)
    header, rows = experiments.energy_rows(traj, params)
    p2 = write_csv(_out_path(config, "energy.csv"), config, "solve", header, rows)
    print(p1)
    print(p2)
    return 0


def cmd_singvals(config: RunConfig, args) -> int:
    header, rows = experiments.singular_value_rows(config)
    name = f"singvals_{config.pod_method}.csv"
    print(write_csv(_out_path(config, name), config, "singvals", header, rows))
    return 0


def cmd_error_formulas(config: RunConfig, args) -> int:
    header, rows = experiments.error_formula_rows(config)
    print(write_csv(_out_path(config, "error_formulas.csv"), config,
                    "error-formulas", header, rows))
    return 0


def cmd_rom_sweep(config: RunConfig, args) -> int:
    param = args.param
    if param is None:
        param = "G" if config.G > 0 and config.D == 0 else "D"
    values = args.values if args.values else [getattr(config, param)]
    header, rows = experiments.rom_sweep_rows(config, param, values)
    print(write_csv(_out_path(config, "rom_sweep.csv"), config, "rom-sweep",
                    header, rows))
    return 0


def cmd_profiles(config: RunConfig, args) -> int:
    r = args.r if args.r is not None else int(config.r_list[0])
    header, rows = experiments.profile_rows(config, args.times, r)
    print(write_csv(_out_path(config, "profiles.csv"), config, "profiles",
                    header, rows))
    return 0


def cmd_train_interval(config: RunConfig, args) -> int:
    r = args.r if args.r is not None else int(config.r_list[0])
    header, rows = experiments.train_interval_rows(config, args.t_train, r)
    print(write_csv(_out_path(config, "train_interval.csv"), config,
                    "train-interval", header, rows))
    return 0


def cmd_convergence(config: RunConfig, args) -> int:
    header, rows = experiments.convergence_rows(config, args.dt_list)
    print(write_csv(_out_path(config, "convergence.csv"), config,
                    "convergence", header, rows))
    return 0


def cmd_check(config: RunConfig, args) -> int:
    results = experiments.invariant_checks(config)
    ok = True
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok = ok and passed
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="podwave",
        description="Damped-wave POD/ROM toolkit: solve, build bases, "
                    "verify error formulas and bounds, emit CSV tables.",
        allow_abbrev=False,
    )
    parser.add_argument("--config", help="flat key=value configuration file")
    cfg = parser.add_argument_group("configuration overrides")
    cfg.add_argument("--n-elements", dest="n_elements", type=int)
    cfg.add_argument("--dt", type=str, help="time step (fractions like 1/800 allowed)")
    cfg.add_argument("--T", type=str)
    cfg.add_argument("--T-train", dest="T_train", type=str)
    cfg.add_argument("--c", type=str)
    cfg.add_argument("--D", type=str)
    cfg.add_argument("--G", type=str)
    cfg.add_argument("--pod-method", dest="pod_method",
                     choices=("standard", "dq1", "ddq"))
    cfg.add_argument("--r-list", dest="r_list", type=str,
                     help="comma separated basis sizes, e.g. 10,20,40")
    cfg.add_argument("--seed", type=int)
    cfg.add_argument("--output-dir", dest="output_dir")
    cfg.add_argument("--u0", choices=("default", "sine", "zero"))
    cfg.add_argument("--u00", choices=("default", "sine", "zero"))
    cfg.add_argument("--rank-tol", dest="rank_tol", type=str)
    cfg.add_argument("--k-max", dest="k_max", type=int)
    cfg.add_argument("--stride", type=int)

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", help="write trajectory.csv and energy.csv")
    sub.add_parser("singvals", help="write the POD singular values")
    sub.add_parser("error-formulas", help="actual vs formula data errors per r")

    p = sub.add_parser("rom-sweep", help="ROM errors and bound ratios over damping values")
    p.add_argument("--param", choices=("D", "G"))
    p.add_argument("--values", type=float, nargs="+")

    p = sub.add_parser("profiles", help="FE vs ROM spatial profiles at chosen times")
    p.add_argument("--times", type=float, nargs="+", default=[0.0, 5.0, 10.0])
    p.add_argument("--r", type=int)

    p = sub.add_parser("train-interval", help="final-time error vs training window")
    p.add_argument("--t-train", dest="t_train", type=float, nargs="+",
                   default=[10.0, 5.0, 1.0, 0.5])
    p.add_argument("--r", type=int)

    p = sub.add_parser("convergence", help="final-time error vs dt against the series")
    p.add_argument("--dt-list", dest="dt_list", type=float, nargs="+",
                   default=[1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0])

    sub.add_parser("check", help="run the invariant self-checks")
    return parser


_COMMANDS = {
    "solve": cmd_solve,
    "singvals": cmd_singvals,
    "error-formulas": cmd_error_formulas,
    "rom-sweep": cmd_rom_sweep,
    "profiles": cmd_profiles,
    "train-interval": cmd_train_interval,
    "convergence": cmd_convergence,
    "check": cmd_check,
}

_OVERRIDE_KEYS = (
    "n_elements", "dt", "T", "T_train", "c", "D", "G", "pod_method",
    "r_list", "seed", "output_dir", "u0", "u00", "rank_tol", "k_max", "stride",
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS if getattr(args, k) is not None}
        config = make_config(args.config, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (LinAlgFailure, ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
