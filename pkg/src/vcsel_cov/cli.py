"""Command-line entry point: ``vcsel-cov {map,train,baseline,calibrate-n0}``.

Exit codes: 0 ok, 2 bad config or input table, 3 invalid geometry,
4 calibration could not match the target table.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import subprocess
import sys
from importlib import metadata
from pathlib import Path

from .agent import ExplorationSchedule, Policy, QTable, train
from .baseline import exhaustive_policy
from .calibrate import (
    REFERENCE_ES_ROWS,
    CalibrationError,
    apply_calibration,
    calibrate_n0,
    default_n0_grid,
    default_width_grid,
    load_calibration,
)
from .env import VCSELEnv
from .errors import ConfigError, ContractError, GeometryError
from .radio_map import coverage, write_sinr_csv
from .scene import load_config

log = logging.getLogger("vcsel_cov")

EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_CALIBRATION = 4
CALIBRATION_FILE = "calibration.json"


def version_string() -> str:
    try:
        base = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        base = "0+unknown"
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=5, check=True,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"{base}-g{desc}" if desc else base


def _load_scene(args):
    cfg = load_config(args.config)
    calib = args.calibration
    if calib is None:
        auto = Path(args.out) / CALIBRATION_FILE
        calib = auto if auto.exists() else None
    if calib is not None:
        cfg = apply_calibration(cfg, load_calibration(calib))
        log.info("using calibration %s (n0=%g)", calib, cfg.n0)
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_map(args) -> int:
    cfg = _load_scene(args)
    if args.pt is not None:
        cfg = cfg.with_(p_t=args.pt)
    if not 0 < args.theta < 90:
        raise GeometryError("--theta must lie in (0, 90) degrees")
    pct, smap = coverage(cfg, args.height, math.radians(args.theta))
    path = _out_dir(args) / f"sinr_map_h{args.height:g}_theta{args.theta:g}.csv"
    write_sinr_csv(smap, path)
    print(f"coverage={pct:.4f}")
    return 0


def _metadata(cfg, args, **extra) -> dict:
    doc = {
        "version": version_string(),
        "seed": args.seed,
        "n0": cfg.n0,
        "beam_width_scale": cfg.beam_width_scale,
        "sinr_domain": cfg.sinr_domain,
        "config": cfg.to_file_dict(),
    }
    doc.update(extra)
    return doc


def cmd_train(args) -> int:
    cfg = _load_scene(args)
    env = VCSELEnv(cfg, seed=args.seed)
    schedule = ExplorationSchedule(args.eps_max, args.eps_min, args.lam)
    q = QTable.zeros(env.n_states, env.n_actions, args.alpha, args.gamma)
    policy, trainlog = train(env, q, schedule, args.episodes, rng_seed=args.seed,
                             early_stop=args.early_stop)
    out = _out_dir(args)
    policy.to_csv(out / "policy_rl.csv")
    trainlog.to_csv(out / "trainlog.csv")
    hyper = {"alpha": args.alpha, "gamma": args.gamma, "episodes": args.episodes,
             "episodes_run": len(trainlog), "eps_max": args.eps_max,
             "eps_min": args.eps_min, "lambda": args.lam, "early_stop": args.early_stop}
    meta = _metadata(cfg, args, hyperparameters=hyper, coverage_evaluations=env.evaluations)
    (out / "run_metadata.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"final_ma50={trainlog.ma50[-1]:.4f}")
    for h, t, c in zip(policy.heights, policy.thetas, policy.coverage):
        print(f"h={h:g} theta={math.degrees(t):g} coverage={c:.4f}")
    return 0


def cmd_baseline(args) -> int:
    cfg = _load_scene(args)
    env = VCSELEnv(cfg)
    result = exhaustive_policy(env)
    out = _out_dir(args)
    result.policy.to_csv(out / "policy_es.csv")
    meta = _metadata(cfg, args, coverage_evaluations=result.evaluations)
    (out / "baseline_metadata.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"evaluations={result.evaluations}")
    for h, t, c in zip(result.policy.heights, result.policy.thetas, result.policy.coverage):
        print(f"h={h:g} theta={math.degrees(t):g} coverage={c:.4f}")
    return 0


def cmd_calibrate(args) -> int:
    # an existing calibration must not bias a fresh one
    cfg = load_config(args.config)
    if args.target_table is None:
        targets = list(REFERENCE_ES_ROWS)
    else:
        try:
            targets = Policy.read_rows(args.target_table)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot read target table: {exc}") from exc
    if not targets:
        raise ConfigError("target table is empty")
    n0_grid = default_n0_grid(args.n0_min, args.n0_max, args.per_decade)
    widths = default_width_grid() if args.fit_width else None
    try:
        result = calibrate_n0(cfg, targets, n0_grid, widths)
        status = 0
    except CalibrationError as exc:
        result, status = exc.result, EXIT_CALIBRATION
        print(f"error: {exc}", file=sys.stderr)
    for (h, t, want), got in zip(targets, result.fitted):
        print(f"h={h:g} theta={t:g} target={want:.2f} model={got:.2f}")
    print(f"n0={result.n0:.10g} beam_width_scale={result.beam_width_scale:g} rms_pp={result.rms_pp:.4f}")
    if status == 0:
        path = _out_dir(args) / CALIBRATION_FILE
        result.to_json(path, targets)
        print(f"wrote {path}")
    return status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="flat YAML config (angles in degrees)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--calibration", default=argparse.SUPPRESS,
                        help=f"calibration JSON (default: <out>/{CALIBRATION_FILE} if present)")

    p = argparse.ArgumentParser(prog="vcsel-cov", description=__doc__.splitlines()[0])
    p.add_argument("--config", default=None)
    p.add_argument("--out", default="out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--calibration", default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("map", parents=[common], help="SINR map at one height and divergence")
    m.add_argument("--height", type=float, required=True, help="receiver height, m")
    m.add_argument("--theta", type=float, required=True, help="divergence, degrees")
    m.add_argument("--pt", type=float, default=None, help="override power per emitter, W")
    m.set_defaults(func=cmd_map)

    t = sub.add_parser("train", parents=[common], help="Q-learning divergence policy")
    t.add_argument("--episodes", type=int, default=2000)
    t.add_argument("--alpha", type=float, default=0.1)
    t.add_argument("--gamma", type=float, default=0.9)
    t.add_argument("--eps-max", type=float, default=1.0)
    t.add_argument("--eps-min", type=float, default=0.01)
    t.add_argument("--lam", type=float, default=0.005, help="epsilon decay rate")
    t.add_argument("--early-stop", action="store_true",
                   help="stop once max|dQ| < 1e-6 for 100 consecutive episodes")
    t.set_defaults(func=cmd_train)

    b = sub.add_parser("baseline", parents=[common], help="exhaustive-search policy")
    b.set_defaults(func=cmd_baseline)

    c = sub.add_parser("calibrate-n0", parents=[common], help="fit n0 to a coverage table")
    c.add_argument("--target-table", default=None,
                   help="CSV with height_m,theta_deg,coverage_pct (default: reference ES rows)")
    c.add_argument("--fit-width", action="store_true", help="also sweep beam_width_scale")
    c.add_argument("--n0-min", type=float, default=1e-12)
    c.add_argument("--n0-max", type=float, default=1e-4)
    c.add_argument("--per-decade", type=int, default=9)
    c.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
