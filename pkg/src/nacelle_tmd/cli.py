"""Command-line entry point: simulate, verify, tune, demo.

Exit status: 0 success, 1 invalid input, 2 numerical failure, 3 verification
thresholds not met.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, MotionError, NumericalFailure
from .io import parse_config, read_motion_csv, write_result_csv

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0.0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _read(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    p = Path(path)
    if p.parent != Path(""):
        p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_simulate(args) -> int:
    from .integrate import simulate

    cfg = parse_config(_read(args.config, "config"))
    series = read_motion_csv(_read(args.motion, "motion"))
    result = simulate(series, cfg, args.dt, horizon=args.horizon)
    _write(args.out, write_result_csv(result))
    print(f"wrote {len(result)} rows to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .harness.oracle import PenaltyOracleConfig
    from .harness.verify import compare_series, default_verify_config, run_suite

    cfg = parse_config(_read(args.config, "config")) if args.config else default_verify_config()
    oracle_cfg = PenaltyOracleConfig(dt_oracle=args.oracle_dt)
    if args.motion:
        series = read_motion_csv(_read(args.motion, "motion"))
        reports = [compare_series(series, cfg, args.dt, args.horizon, oracle_cfg, name=Path(args.motion).stem)]
    else:
        horizon = 10.0 if args.horizon is None else args.horizon
        reports = run_suite(cfg, args.profiles, args.dt, horizon, oracle_cfg)
    lines = [r.line() for r in reports]
    worst_pos = max(r.max_position_error for r in reports)
    worst_force = max(r.max_force_error for r in reports)
    ok = all(r.passed for r in reports)
    lines.append(f"max position error {worst_pos:.3e} m, max force error {worst_force:.3e} N: "
                 + ("PASS" if ok else "FAIL"))
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


def _tower(args):
    from .harness.tower import TowerModel

    return TowerModel.symmetric(args.tower_mass, args.tower_stiffness, args.tower_damping).validate()


def cmd_tune(args) -> int:
    from .harness.tune import tune_passive

    result = tune_passive(_tower(args), args.mass_ratio, objective=args.objective)
    rows = ["eval,k,c,objective"]
    rows += [f"{i},{k:.12g},{c:.12g},{v:.12g}" for i, k, c, v in result.audit]
    if args.out:
        _write(args.out, "\n".join(rows) + "\n")
    flag = "" if result.converged else "  (not converged: best so far)"
    print(f"k={result.k:.9g} N/m c={result.c:.9g} N*s/m objective={result.objective:.9g} "
          f"evaluations={result.evaluations}{flag}")
    print(f"frequency_ratio={result.frequency_ratio:.6f} damping_ratio={result.damping_ratio:.6f}")
    return EXIT_OK


def _coupled_csv(res) -> str:
    header = "time,q_x,q_x_dot,q_y,q_y_dot,x,xdot,y,ydot,ftmd_x,ftmd_y,fexc_x,fexc_y"
    table = np.column_stack([res.t, res.states, res.tmd_force, res.excitation])
    lines = [header] + [",".join(f"{v:.9g}" for v in row) for row in table.tolist()]
    return "\n".join(lines) + "\n"


def cmd_demo(args) -> int:
    from .harness.tower import Multisine, coupled_tower_simulate
    from .harness.tune import tune_passive
    from .tmd_core import TmdAxisParams, TmdConfig

    tower = _tower(args)
    if args.config:
        cfg = parse_config(_read(args.config, "config"))
    else:
        tuned = tune_passive(tower, args.mass_ratio, objective="hinf")
        m = args.mass_ratio * tower.mass_fa
        cfg = TmdConfig(TmdAxisParams(mass=m, k=tuned.k, c=tuned.c, stop_max=10.0, stop_min=-10.0),
                        TmdAxisParams.disabled())
    bare = TmdConfig(TmdAxisParams.disabled(), TmdAxisParams.disabled(), gravity=cfg.gravity)
    w_t = tower.omega_fa
    excitation = Multisine(0.2 * w_t, 2.0 * w_t, amplitude=0.01 * tower.stiffness_fa)
    base = coupled_tower_simulate(tower, bare, excitation, args.dt, args.horizon)
    with_tmd = coupled_tower_simulate(tower, cfg, excitation, args.dt, args.horizon)
    out = Path(args.out)
    _write(str(out / "baseline.csv"), _coupled_csv(base))
    _write(str(out / "tmd.csv"), _coupled_csv(with_tmd))
    reduction = 1.0 - with_tmd.rms(0) / base.rms(0)
    print(f"RMS fore-aft displacement: baseline {base.rms(0):.6g} m, with TMD "
          f"{with_tmd.rms(0):.6g} m, reduction {100.0 * reduction:.1f}%")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nacelle-tmd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="integrate the TMDs under a motion CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--motion", required=True)
    s.add_argument("--dt", type=_positive, required=True)
    s.add_argument("--horizon", type=_positive)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="compare the core against the inertial oracle")
    v.add_argument("--config")
    v.add_argument("--motion", help="motion CSV (default: built-in profile suite)")
    v.add_argument("--dt", type=_positive, default=1e-3)
    v.add_argument("--horizon", type=_positive)
    v.add_argument("--oracle-dt", type=_positive, default=1e-6)
    v.add_argument("--profiles", type=int, default=10, choices=range(1, 11), metavar="N")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    for name, helptext in (("tune", "tune passive TMD stiffness and damping"),
                           ("demo", "coupled tower demo, baseline versus TMD")):
        t = sub.add_parser(name, help=helptext)
        t.add_argument("--mass-ratio", type=_positive, default=0.05)
        t.add_argument("--tower-mass", type=_positive, default=100.0)
        t.add_argument("--tower-stiffness", type=_positive, default=1e4)
        t.add_argument("--tower-damping", type=float, default=2.0)
        t.add_argument("--out", required=(name == "demo"))
        if name == "tune":
            t.add_argument("--objective", choices=("rms", "hinf"), default="hinf")
            t.set_defaults(func=cmd_tune)
        else:
            t.add_argument("--config")
            t.add_argument("--dt", type=_positive, default=0.01)
            t.add_argument("--horizon", type=_positive, default=200.0)
            t.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, MotionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
