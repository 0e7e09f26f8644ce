"""Command-line front end.

Subcommands: ``gen`` (synthetic cloud files), ``decide`` (cloud to
transformation decision), ``simulate track|magnet|jump`` (closed-loop
traces), ``batch`` (decide over a directory).  ``decide`` exits 0 for
Mobile and 10 for InchWorm so shell automation can branch on the mode
without parsing JSON; all commands exit 2 on any error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Optional

from .actuate import (
    CANONICAL_JUMP_SEQUENCE,
    JumpEvent,
    initial_jump_state,
    jump_trace_to_jsonl,
    magnet_trace_to_csv,
    plan_jump_trajectory,
    run_jump_sequence,
    simulate_magnet,
    trajectory_to_csv,
)
from .cloud import RigidTransform, load_cloud, save_cloud
from .config import RunConfig, load_config
from .drive import simulate_track, trace_to_csv
from .errors import NavError
from .switching import Transformation, decide, decision_to_json
from .synth import CloudShape, SyntheticCloudSpec, generate_cloud

EXIT_MOBILE = 0
EXIT_OK = 0
EXIT_ERROR = 2
EXIT_INCH_WORM = 10


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steelnav",
        description="Steel-surface navigation decisions and locomotion simulators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic cloud file")
    gen.add_argument("--shape", choices=[s.value for s in CloudShape], default="rectangle")
    gen.add_argument("--size-x", type=float, default=0.30, help="extent along x, meters (circle diameter)")
    gen.add_argument("--size-y", type=float, default=0.30, help="extent along y, meters")
    gen.add_argument("--pitch", type=float, default=0.01, help="grid spacing, meters")
    gen.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma, meters")
    gen.add_argument("--outlier-frac", type=float, default=0.0, help="outlier fraction of total points")
    gen.add_argument("--hole-size", type=float, default=0.10, help="hole edge for rectangle_with_hole, meters")
    gen.add_argument("--tx", type=float, default=0.0, help="pose translation x, meters")
    gen.add_argument("--ty", type=float, default=0.0, help="pose translation y, meters")
    gen.add_argument("--tz", type=float, default=0.0, help="pose translation z, meters")
    gen.add_argument("--rot-yaw", type=float, default=0.0, help="pose yaw, radians")
    gen.add_argument("--rot-pitch", type=float, default=0.0, help="pose pitch, radians")
    gen.add_argument("--rot-roll", type=float, default=0.0, help="pose roll, radians")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output cloud file path")

    dec = sub.add_parser("decide", help="run the cloud-to-transformation decision")
    dec.add_argument("cloud", help="input cloud file (ascii PCD subset)")
    dec.add_argument("--config", default=None, help="INI config file")
    dec.add_argument("--alpha-s", type=float, default=None, help="boundary slice width, meters")
    dec.add_argument("--foot-w", type=float, default=None, help="foot width, meters")
    dec.add_argument("--foot-l", type=float, default=None, help="foot length, meters")
    dec.add_argument("--tol-t", type=float, default=None, help="interior-test relative tolerance")
    dec.add_argument("--n", type=int, default=None, help="candidate anchors to try")
    dec.add_argument("--m", type=int, default=None, help="boundary neighbors per probe")
    dec.add_argument("--min-inliers", type=int, default=None, help="minimum plane inlier count")
    dec.add_argument("--voxel-leaf", type=float, default=None, help="voxel edge, meters")
    dec.add_argument("--base-height", type=float, default=None, help="robot base height, meters")
    dec.add_argument("--height-tol", type=float, default=None, help="height equality tolerance, meters")
    dec.add_argument("--seed", type=int, default=None)
    dec.add_argument("--out", default=None, help="also write the decision JSON here")

    sim = sub.add_parser("simulate", help="run a closed-loop simulator")
    sim_sub = sim.add_subparsers(dest="simulator", required=True)
    for name, help_text in (
        ("track", "path-tracking drive loop"),
        ("magnet", "magnet gap control loop"),
        ("jump", "inch-worm jump state machine and trajectory"),
    ):
        s = sim_sub.add_parser(name, help=help_text)
        s.add_argument("--config", default=None, help="INI config file")
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--out", default=None, help="output directory for trace files")

    bat = sub.add_parser("batch", help="decide over every cloud file in a directory")
    bat.add_argument("indir", help="directory of .pcd cloud files")
    bat.add_argument("--config", default=None, help="INI config file")
    bat.add_argument("--seed", type=int, default=None)
    bat.add_argument("--out", required=True, help="output directory for per-file decision JSON")
    return parser


def _apply_decide_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    filter_cfg = cfg.filter
    if args.min_inliers is not None:
        filter_cfg = dataclasses.replace(filter_cfg, min_inlier_count=args.min_inliers)
    if args.voxel_leaf is not None:
        filter_cfg = dataclasses.replace(filter_cfg, voxel_leaf=args.voxel_leaf)

    foot = cfg.foot
    for attr, value in (
        ("width", args.foot_w), ("length", args.foot_l), ("tolerance", args.tol_t),
        ("candidate_count", args.n), ("neighbor_count", args.m),
    ):
        if value is not None:
            foot = dataclasses.replace(foot, **{attr: value})

    height = cfg.height
    if args.base_height is not None:
        height = dataclasses.replace(height, base_height=args.base_height)
    if args.height_tol is not None:
        height = dataclasses.replace(height, tolerance=args.height_tol)

    return dataclasses.replace(
        cfg,
        filter=filter_cfg,
        foot=foot,
        height=height,
        slice_width=args.alpha_s if args.alpha_s is not None else cfg.slice_width,
        seed=args.seed if args.seed is not None else cfg.seed,
    )


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = SyntheticCloudSpec(
        shape=CloudShape(args.shape),
        size_x=args.size_x,
        size_y=args.size_y,
        pitch=args.pitch,
        noise_sigma=args.noise,
        outlier_fraction=args.outlier_frac,
        hole_size=args.hole_size,
        pose=RigidTransform.from_euler_zyx(
            yaw=args.rot_yaw, pitch=args.rot_pitch, roll=args.rot_roll,
            translation=(args.tx, args.ty, args.tz),
        ),
    )
    cloud = generate_cloud(spec, seed=args.seed)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    save_cloud(out, cloud)
    print(f"wrote {out} points={len(cloud)}")
    return EXIT_OK


def _cmd_decide(args: argparse.Namespace) -> int:
    cfg = _apply_decide_overrides(load_config(args.config), args)
    cloud = load_cloud(args.cloud)
    decision = decide(
        cloud,
        filter_cfg=cfg.filter,
        slice_width=cfg.slice_width,
        foot=cfg.foot,
        height_cfg=cfg.height,
        seed=cfg.seed,
    )
    text = decision_to_json(decision)
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return EXIT_MOBILE if decision.transformation is Transformation.MOBILE else EXIT_INCH_WORM


def _out_dir(arg: Optional[str]) -> Path:
    out = Path(arg) if arg is not None else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    out = _out_dir(args.out)

    if args.simulator == "track":
        d = cfg.drive
        result = simulate_track(
            d.waypoints, start=d.start, gains=d.gains, dt=d.dt, v_ref=d.v_ref,
            horizon=d.horizon, accept_radius=d.accept_radius,
            noise_sigma=d.noise_sigma, noise_seed=cfg.seed,
        )
        (out / "track_trace.csv").write_text(trace_to_csv(result), encoding="ascii")
        final_err = result.rows[-1].error.distance if result.rows else 0.0
        print(
            f"converged={str(result.converged).lower()} "
            f"waypoints={result.waypoints_reached}/{len(d.waypoints)} "
            f"steps={len(result.rows)} final_error={final_err:.9g}"
        )
        return EXIT_OK

    if args.simulator == "magnet":
        mg = cfg.magnet
        trace = simulate_magnet(
            mg.initial_left, mg.initial_right, mg.setpoint,
            gains=mg.gains, plant=mg.plant, dt=mg.dt, duration=mg.duration,
            trim_gain=mg.trim_gain,
        )
        (out / "magnet_trace.csv").write_text(magnet_trace_to_csv(trace), encoding="ascii")
        final = trace.final_state
        final_err = max(abs(final.gap_left - mg.setpoint), abs(final.gap_right - mg.setpoint))
        settle = f"{trace.settle_time:.9g}" if trace.settle_time is not None else "never"
        print(
            f"settled={str(trace.settled).lower()} settle_time={settle} "
            f"steps={len(trace.rows)} final_error_mm={final_err:.9g}"
        )
        return EXIT_OK

    jp = cfg.jump
    if jp.events is None:
        events = list(CANONICAL_JUMP_SEQUENCE)
    else:
        try:
            events = [JumpEvent(name) for name in jp.events]
        except ValueError as exc:
            raise NavError(f"unknown jump event in config: {exc}")
    state, rows = run_jump_sequence(initial_jump_state(), events)
    (out / "jump_trace.jsonl").write_text(jump_trace_to_jsonl(rows), encoding="ascii")
    path = plan_jump_trajectory(jp.start_joints, None, jp.plan, jp.steps)
    (out / "jump_trajectory.csv").write_text(trajectory_to_csv(path), encoding="ascii")
    accepted = sum(1 for r in rows if r["accepted"])
    print(
        f"final_phase={state.phase.value} accepted={accepted}/{len(rows)} "
        f"trajectory_rows={len(path)}"
    )
    return EXIT_OK


def _cmd_batch(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    indir = Path(args.indir)
    if not indir.is_dir():
        raise NavError(f"not a directory: {indir}")
    out = _out_dir(args.out)
    cloud_paths = sorted(indir.glob("*.pcd"))
    if not cloud_paths:
        raise NavError(f"no .pcd files in {indir}")
    for path in cloud_paths:
        decision = decide(
            load_cloud(path),
            filter_cfg=cfg.filter, slice_width=cfg.slice_width,
            foot=cfg.foot, height_cfg=cfg.height, seed=cfg.seed,
        )
        (out / f"{path.stem}.json").write_text(decision_to_json(decision) + "\n", encoding="utf-8")
        print(f"{path.name} {decision.transformation.value}")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep its code
        return int(exc.code or 0)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "decide":
            return _cmd_decide(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "batch":
            return _cmd_batch(args)
        raise NavError(f"unknown command {args.command!r}")
    except NavError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
