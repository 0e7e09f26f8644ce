"""Mobile-transformation driving: body-frame tracking error, a two-loop PID
path controller, and a kinematic closed-loop simulator.

The controller splits into a position loop (distance to the active waypoint
drives linear speed) and a heading loop (bearing-to-waypoint error drives
turn rate); a mixer saturates both into one drive command.  The simulator
integrates unicycle kinematics with explicit Euler and produces a step-by-
step trace for convergence checks and CSV export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError
from .pid import PIDGains, PIDState, pid_step

TAU = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, TAU)
    if wrapped <= -math.pi:
        wrapped += TAU
    return wrapped


@dataclass(frozen=True)
class Pose2D:
    """Planar pose: position in meters, heading in radians.

    The heading is wrapped into (-pi, pi] on construction.
    """

    x: float
    y: float
    phi: float

    def __post_init__(self):
        for v in (self.x, self.y, self.phi):
            if not math.isfinite(v):
                raise DomainError("pose components must be finite")
        object.__setattr__(self, "phi", wrap_angle(self.phi))


@dataclass(frozen=True)
class TrackingError:
    """Body-frame tracking error: forward, lateral, heading."""

    e1: float
    e2: float
    e3: float

    def __post_init__(self):
        for v in (self.e1, self.e2, self.e3):
            if not math.isfinite(v):
                raise DomainError("tracking error components must be finite")

    @property
    def distance(self) -> float:
        """Euclidean position error."""
        return math.hypot(self.e1, self.e2)


@dataclass(frozen=True)
class DriveGains:
    """Per-loop PID gains of the path controller.

    The position loop's output saturation is the linear speed limit, the
    heading loop's is the turn-rate limit.
    """

    position: PIDGains = PIDGains(kp=0.8, ki=0.05, kd=0.1, out_limit=0.2, int_limit=0.5)
    heading: PIDGains = PIDGains(kp=2.0, ki=0.0, kd=0.2, out_limit=1.0, int_limit=0.5)


@dataclass(frozen=True)
class DriveState:
    """Controller memory for both loops."""

    position: PIDState = field(default_factory=PIDState)
    heading: PIDState = field(default_factory=PIDState)


@dataclass(frozen=True)
class DriveCommand:
    """Saturated drive command: linear speed and turn rate."""

    v: float
    omega: float


def tracking_error(current: Pose2D, target: Pose2D) -> TrackingError:
    """World-frame pose difference rotated into the robot body frame.

    Forward/lateral components come from rotating (dx, dy) by the current
    heading; the heading component is the wrapped heading difference.
    """
    dx = target.x - current.x
    dy = target.y - current.y
    c, s = math.cos(current.phi), math.sin(current.phi)
    return TrackingError(
        e1=c * dx + s * dy,
        e2=-s * dx + c * dy,
        e3=wrap_angle(target.phi - current.phi),
    )


def error_rate(e: TrackingError, v_c: float, omega_c: float, v_r: float, omega_r: float) -> TrackingError:
    """Instantaneous rate of change of the body-frame tracking error.

    ``v_c``/``omega_c`` are the robot's current linear and angular speed,
    ``v_r``/``omega_r`` the reference's.  Validation helper for closed-loop
    analysis; the controller itself never consumes it.
    """
    return TrackingError(
        e1=omega_c * e.e2 - v_c + v_r * math.cos(e.e3),
        e2=-omega_c * e.e1 + v_r * math.sin(e.e3),
        e3=omega_r - omega_c,
    )


def mixed_pid_step(
    e: TrackingError,
    heading_error: float,
    gains: DriveGains,
    dt: float,
    state: DriveState,
    v_limit: Optional[float] = None,
) -> tuple[DriveCommand, DriveState]:
    """One step of the two-loop controller.

    The position loop acts on the distance to the waypoint, the heading loop
    on the supplied bearing error; both outputs are saturated by their loop
    limits, and the linear speed additionally by ``v_limit`` when given.
    """
    v, pos_state = pid_step(e.distance, gains.position, dt, state.position)
    omega, head_state = pid_step(heading_error, gains.heading, dt, state.heading)
    if v_limit is not None:
        v = min(v, v_limit)
    return DriveCommand(v=v, omega=omega), DriveState(position=pos_state, heading=head_state)


@dataclass(frozen=True)
class TraceRow:
    """One simulator step: state, error, and command before integration.

    The integrator fields expose controller internals for anti-windup
    checks; they are not part of the CSV schema.
    """

    t: float
    pose: Pose2D
    error: TrackingError
    v: float
    omega: float
    waypoint_index: int
    position_integral: float
    heading_integral: float


@dataclass(frozen=True)
class TrackResult:
    """Full simulation outcome.

    ``converged`` is true when every waypoint was accepted before the time
    horizon ran out.  ``rows`` hold one entry per integration step.
    """

    rows: tuple[TraceRow, ...]
    converged: bool
    final_pose: Pose2D
    waypoints_reached: int
    duration: float


def simulate_track(
    waypoints: Sequence[Pose2D],
    start: Pose2D = Pose2D(0.0, 0.0, 0.0),
    gains: DriveGains = DriveGains(),
    dt: float = 0.02,
    v_ref: float = 0.2,
    horizon: float = 60.0,
    accept_radius: float = 0.03,
    noise_sigma: float = 0.0,
    noise_seed: int = 0,
    inspector: Optional[Callable[[str], None]] = None,
) -> TrackResult:
    """Drive the simulated robot through the waypoints.

    Unicycle kinematics integrated with explicit Euler at step ``dt``; a
    waypoint is accepted when the robot comes within ``accept_radius`` of
    it.  The reference heading of each waypoint is the bearing of its
    approach segment.  ``v_ref`` caps the commanded speed.  ``noise_sigma``
    adds Gaussian position/heading measurement noise (off by default, which
    keeps traces reproducible).  ``inspector`` is invoked once per step with
    a frame tag; the hook exists for piggybacking surface inspection onto
    the drive loop and defaults to doing nothing.  Running out of horizon
    is reported through ``converged``, not an exception.
    """
    if len(waypoints) < 1:
        raise DomainError("at least one waypoint is required")
    if not 0 < dt <= 0.1:
        raise DomainError("dt must lie in (0, 0.1]")
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    if accept_radius <= 0:
        raise DomainError("accept_radius must be positive")
    if v_ref <= 0:
        raise DomainError("v_ref must be positive")

    references = _reference_poses(start, waypoints)
    rng = np.random.default_rng(noise_seed)

    pose = start
    state = DriveState()
    rows: list[TraceRow] = []
    wp_index = 0
    t = 0.0
    max_steps = int(round(horizon / dt))

    for step in range(max_steps):
        while wp_index < len(references) and _distance(pose, references[wp_index]) <= accept_radius:
            wp_index += 1
        if wp_index == len(references):
            break

        target = references[wp_index]
        measured = pose
        if noise_sigma > 0:
            jitter = rng.normal(0.0, noise_sigma, size=3)
            measured = Pose2D(pose.x + jitter[0], pose.y + jitter[1], pose.phi + jitter[2])
        e = tracking_error(measured, target)
        bearing = math.atan2(target.y - measured.y, target.x - measured.x)
        heading_error = wrap_angle(bearing - measured.phi)
        command, state = mixed_pid_step(e, heading_error, gains, dt, state, v_limit=v_ref)

        rows.append(TraceRow(
            t=t, pose=pose, error=e, v=command.v, omega=command.omega,
            waypoint_index=wp_index,
            position_integral=state.position.integral,
            heading_integral=state.heading.integral,
        ))
        if inspector is not None:
            inspector(f"frame_{step:06d}")

        pose = Pose2D(
            x=pose.x + command.v * math.cos(pose.phi) * dt,
            y=pose.y + command.v * math.sin(pose.phi) * dt,
            phi=pose.phi + command.omega * dt,
        )
        t += dt

    converged = wp_index == len(references)
    return TrackResult(
        rows=tuple(rows), converged=converged, final_pose=pose,
        waypoints_reached=wp_index, duration=t,
    )


def _reference_poses(start: Pose2D, waypoints: Sequence[Pose2D]) -> list[Pose2D]:
    """Waypoints with their heading replaced by the approach-segment bearing.

    A degenerate segment (waypoint on top of its predecessor) keeps the
    waypoint's own stated heading.
    """
    refs: list[Pose2D] = []
    prev_x, prev_y = start.x, start.y
    for wp in waypoints:
        dx, dy = wp.x - prev_x, wp.y - prev_y
        if math.hypot(dx, dy) > 1e-12:
            refs.append(Pose2D(wp.x, wp.y, math.atan2(dy, dx)))
        else:
            refs.append(wp)
        prev_x, prev_y = wp.x, wp.y
    return refs


def _distance(pose: Pose2D, target: Pose2D) -> float:
    return math.hypot(target.x - pose.x, target.y - pose.y)


TRACE_HEADER = "t,x,y,phi,e1,e2,e3,v,omega,waypoint_index"


def trace_to_csv(result: TrackResult) -> str:
    """Render a simulation trace as CSV text, 9 significant digits."""
    lines = [TRACE_HEADER]
    for row in result.rows:
        values = (
            row.t, row.pose.x, row.pose.y, row.pose.phi,
            row.error.e1, row.error.e2, row.error.e3,
            row.v, row.omega,
        )
        lines.append(",".join(f"{v:.9g}" for v in values) + f",{row.waypoint_index}")
    return "\n".join(lines) + "\n"


def write_trace_csv(path: Union[str, Path], result: TrackResult) -> None:
    """Write a simulation trace to a CSV file."""
    Path(path).write_text(trace_to_csv(result), encoding="ascii")
