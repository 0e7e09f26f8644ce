"""INI configuration for the pipeline and the simulators.

One flat, human-editable file in configparser syntax; every key optional
with the package defaults filled in, unknown sections or keys rejected so
typos fail loudly.  Command-line flags override file values.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .actuate import DEFAULT_MAGNET_GAINS, JumpPlanConfig, MagnetPlant
from .cloud import FilterConfig, RigidTransform
from .drive import DriveGains, Pose2D
from .errors import ConfigError
from .footprint import FootGeometry
from .pid import PIDGains
from .switching import HeightConfig


@dataclass(frozen=True)
class DriveSimConfig:
    """Path-tracking simulation setup."""

    gains: DriveGains = DriveGains()
    dt: float = 0.02
    v_ref: float = 0.2
    horizon: float = 60.0
    accept_radius: float = 0.03
    noise_sigma: float = 0.0
    start: Pose2D = Pose2D(0.0, 0.0, 0.0)
    waypoints: tuple[Pose2D, ...] = (Pose2D(2.0, 0.0, 0.0),)


@dataclass(frozen=True)
class MagnetSimConfig:
    """Magnet gap-control simulation setup."""

    gains: PIDGains = DEFAULT_MAGNET_GAINS
    plant: MagnetPlant = MagnetPlant()
    trim_gain: float = 0.5
    dt: float = 0.005
    duration: float = 2.0
    setpoint: float = 1.0
    initial_left: float = 3.0
    initial_right: float = 3.0


def _default_jump_plan() -> JumpPlanConfig:
    return JumpPlanConfig(
        convenient_joints=np.array([0.0, -0.6, 1.0, 0.0, 0.5, 0.0]),
        target_joints=np.array([0.3, -0.4, 0.8, 0.0, 0.7, 0.3]),
        joint_limits=np.array([[-math.pi, math.pi]] * 6),
    )


@dataclass(frozen=True)
class JumpSimConfig:
    """Inch-worm jump simulation setup."""

    plan: JumpPlanConfig = field(default_factory=_default_jump_plan)
    start_joints: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    steps: int = 10
    events: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, bundled."""

    filter: FilterConfig = FilterConfig()
    slice_width: float = 0.02
    foot: FootGeometry = FootGeometry()
    height: HeightConfig = HeightConfig()
    drive: DriveSimConfig = DriveSimConfig()
    magnet: MagnetSimConfig = MagnetSimConfig()
    jump: JumpSimConfig = JumpSimConfig()
    seed: int = 0


_KNOWN_KEYS = {
    "filter": {
        "x_min", "x_max", "y_min", "y_max", "z_min", "z_max",
        "voxel_leaf", "ransac_threshold", "ransac_iterations", "min_inliers",
    },
    "boundary": {"slice_width"},
    "foot": {"width", "length", "tolerance", "candidates", "neighbors"},
    "height": {
        "base_height", "tolerance",
        "camera_x", "camera_y", "camera_z", "camera_yaw", "camera_pitch", "camera_roll",
    },
    "drive": {
        "kp_pos", "ki_pos", "kd_pos", "v_max", "int_pos",
        "kp_head", "ki_head", "kd_head", "omega_max", "int_head",
        "dt", "v_ref", "horizon", "accept_radius", "noise_sigma",
        "start", "waypoints",
    },
    "magnet": {
        "kp", "ki", "kd", "out_limit", "int_limit",
        "time_constant", "speed_gain", "disturbance", "trim_gain",
        "dt", "duration", "setpoint", "initial_left", "initial_right",
    },
    "jump": {"convenient", "target", "limits_low", "limits_high", "start", "steps", "events"},
    "run": {"seed"},
}


class _Section:
    """One config section with typed, error-reporting accessors."""

    def __init__(self, name: str, raw: dict[str, str]):
        self.name = name
        self.raw = raw

    def number(self, key: str, default: float) -> float:
        if key not in self.raw:
            return default
        try:
            return float(self.raw[key])
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: not a number: {self.raw[key]!r}")

    def integer(self, key: str, default: int) -> int:
        if key not in self.raw:
            return default
        try:
            return int(self.raw[key])
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: not an integer: {self.raw[key]!r}")

    def vector(self, key: str, default: Sequence[float], length: int) -> tuple[float, ...]:
        if key not in self.raw:
            return tuple(default)
        parts = [p for p in self.raw[key].replace(",", " ").split() if p]
        if len(parts) != length:
            raise ConfigError(f"[{self.name}] {key}: expected {length} numbers, got {len(parts)}")
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: not numbers: {self.raw[key]!r}")

    def poses(self, key: str, default: Sequence[Pose2D]) -> tuple[Pose2D, ...]:
        """Semicolon-separated planar poses, each `x y [phi]`."""
        if key not in self.raw:
            return tuple(default)
        out = []
        for chunk in self.raw[key].split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = [p for p in chunk.replace(",", " ").split() if p]
            if len(parts) not in (2, 3):
                raise ConfigError(f"[{self.name}] {key}: pose needs `x y [phi]`, got {chunk!r}")
            try:
                values = [float(p) for p in parts]
            except ValueError:
                raise ConfigError(f"[{self.name}] {key}: not numbers: {chunk!r}")
            out.append(Pose2D(values[0], values[1], values[2] if len(values) == 3 else 0.0))
        if not out:
            raise ConfigError(f"[{self.name}] {key}: no poses given")
        return tuple(out)

    def words(self, key: str) -> Optional[tuple[str, ...]]:
        if key not in self.raw:
            return None
        parts = [p for p in self.raw[key].replace(",", " ").split() if p]
        return tuple(parts)


def load_config(path: Optional[Union[str, Path]]) -> RunConfig:
    """Load a RunConfig from an INI file; None gives all defaults."""
    if path is None:
        return RunConfig()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}")

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    def sect(name: str) -> _Section:
        return _Section(name, dict(parser[name]) if parser.has_section(name) else {})

    f = sect("filter")
    dflt = FilterConfig()
    filter_cfg = FilterConfig(
        x_range=(f.number("x_min", dflt.x_range[0]), f.number("x_max", dflt.x_range[1])),
        y_range=(f.number("y_min", dflt.y_range[0]), f.number("y_max", dflt.y_range[1])),
        z_range=(f.number("z_min", dflt.z_range[0]), f.number("z_max", dflt.z_range[1])),
        voxel_leaf=f.number("voxel_leaf", dflt.voxel_leaf),
        ransac_threshold=f.number("ransac_threshold", dflt.ransac_threshold),
        ransac_iterations=f.integer("ransac_iterations", dflt.ransac_iterations),
        min_inlier_count=f.integer("min_inliers", dflt.min_inlier_count),
    )

    b = sect("boundary")
    slice_width = b.number("slice_width", 0.02)

    ft = sect("foot")
    foot_dflt = FootGeometry()
    foot = FootGeometry(
        width=ft.number("width", foot_dflt.width),
        length=ft.number("length", foot_dflt.length),
        tolerance=ft.number("tolerance", foot_dflt.tolerance),
        candidate_count=ft.integer("candidates", foot_dflt.candidate_count),
        neighbor_count=ft.integer("neighbors", foot_dflt.neighbor_count),
    )

    h = sect("height")
    height = HeightConfig(
        base_height=h.number("base_height", 0.0),
        tolerance=h.number("tolerance", 0.01),
        camera_to_base=RigidTransform.from_euler_zyx(
            yaw=h.number("camera_yaw", 0.0),
            pitch=h.number("camera_pitch", 0.0),
            roll=h.number("camera_roll", 0.0),
            translation=(h.number("camera_x", 0.0), h.number("camera_y", 0.0), h.number("camera_z", 0.0)),
        ),
    )

    d = sect("drive")
    drive_dflt = DriveSimConfig()
    start_vec = d.vector("start", (drive_dflt.start.x, drive_dflt.start.y, drive_dflt.start.phi), 3)
    drive = DriveSimConfig(
        gains=DriveGains(
            position=PIDGains(
                kp=d.number("kp_pos", 0.8), ki=d.number("ki_pos", 0.05), kd=d.number("kd_pos", 0.1),
                out_limit=d.number("v_max", 0.2), int_limit=d.number("int_pos", 0.5),
            ),
            heading=PIDGains(
                kp=d.number("kp_head", 2.0), ki=d.number("ki_head", 0.0), kd=d.number("kd_head", 0.2),
                out_limit=d.number("omega_max", 1.0), int_limit=d.number("int_head", 0.5),
            ),
        ),
        dt=d.number("dt", drive_dflt.dt),
        v_ref=d.number("v_ref", drive_dflt.v_ref),
        horizon=d.number("horizon", drive_dflt.horizon),
        accept_radius=d.number("accept_radius", drive_dflt.accept_radius),
        noise_sigma=d.number("noise_sigma", drive_dflt.noise_sigma),
        start=Pose2D(*start_vec),
        waypoints=d.poses("waypoints", drive_dflt.waypoints),
    )

    m = sect("magnet")
    mag_dflt = MagnetSimConfig()
    magnet = MagnetSimConfig(
        gains=PIDGains(
            kp=m.number("kp", DEFAULT_MAGNET_GAINS.kp),
            ki=m.number("ki", DEFAULT_MAGNET_GAINS.ki),
            kd=m.number("kd", DEFAULT_MAGNET_GAINS.kd),
            out_limit=m.number("out_limit", DEFAULT_MAGNET_GAINS.out_limit),
            int_limit=m.number("int_limit", DEFAULT_MAGNET_GAINS.int_limit),
        ),
        plant=MagnetPlant(
            time_constant=m.number("time_constant", 0.1),
            speed_gain=m.number("speed_gain", 5.0),
            disturbance=m.number("disturbance", 0.0),
        ),
        trim_gain=m.number("trim_gain", mag_dflt.trim_gain),
        dt=m.number("dt", mag_dflt.dt),
        duration=m.number("duration", mag_dflt.duration),
        setpoint=m.number("setpoint", mag_dflt.setpoint),
        initial_left=m.number("initial_left", mag_dflt.initial_left),
        initial_right=m.number("initial_right", mag_dflt.initial_right),
    )

    j = sect("jump")
    jump_dflt = JumpSimConfig()
    plan_dflt = _default_jump_plan()
    limits_low = j.vector("limits_low", plan_dflt.joint_limits[:, 0], 6)
    limits_high = j.vector("limits_high", plan_dflt.joint_limits[:, 1], 6)
    jump = JumpSimConfig(
        plan=JumpPlanConfig(
            convenient_joints=np.array(j.vector("convenient", plan_dflt.convenient_joints, 6)),
            target_joints=np.array(j.vector("target", plan_dflt.target_joints, 6)),
            joint_limits=np.column_stack([limits_low, limits_high]),
        ),
        start_joints=j.vector("start", jump_dflt.start_joints, 6),
        steps=j.integer("steps", jump_dflt.steps),
        events=j.words("events"),
    )

    r = sect("run")
    return RunConfig(
        filter=filter_cfg, slice_width=slice_width, foot=foot, height=height,
        drive=drive, magnet=magnet, jump=jump, seed=r.integer("seed", 0),
    )
