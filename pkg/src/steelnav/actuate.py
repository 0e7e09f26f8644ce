"""Inch-worm actuation: magnet-array gap control, the jump state machine,
and joint-space jump trajectories.

Each foot carries a switchable magnet array observed by two distance
sensors.  A PID loop drives the sensed gap to the mode target (0 mm when
adhering, 1 mm when rolling) through a simulated screw-drive plant.  The
jump itself is sequenced by an event-driven state machine whose transitions
keep at least one foot magnetically attached whenever the robot is not in a
wheeled configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, TransitionError, TrajectoryError
from .footprint import FootPose
from .pid import PIDGains, PIDState, pid_step

TOUCHED_GAP_MM = 0.0
UNTOUCHED_GAP_MM = 1.0
SETTLE_TOLERANCE_MM = 0.05

DEFAULT_MAGNET_GAINS = PIDGains(kp=2.0, ki=0.5, kd=0.05, out_limit=1.0, int_limit=1.0)


class MagnetMode(str, Enum):
    """Commanded magnet-array mode: adhering or rolling clearance."""

    TOUCHED = "Touched"
    UNTOUCHED = "Untouched"


def mode_setpoint(mode: MagnetMode) -> float:
    """Gap target in millimeters for a magnet mode."""
    return TOUCHED_GAP_MM if mode is MagnetMode.TOUCHED else UNTOUCHED_GAP_MM


@dataclass(frozen=True)
class MagnetArrayState:
    """One foot's magnet array: commanded mode, sensed gaps, drive state.

    Gaps are millimeters from the two side-mounted distance sensors;
    ``command`` is the last normalized motor command.  The gap rates and the
    PID memory ride along so a control step is a pure function of this
    state.
    """

    mode: MagnetMode = MagnetMode.UNTOUCHED
    gap_left: float = UNTOUCHED_GAP_MM
    gap_right: float = UNTOUCHED_GAP_MM
    command: float = 0.0
    rate_left: float = 0.0
    rate_right: float = 0.0
    controller: PIDState = field(default_factory=PIDState)

    def __post_init__(self):
        if self.gap_left < 0 or self.gap_right < 0:
            raise DomainError("magnet gaps cannot be negative")
        if not -1.0 <= self.command <= 1.0:
            raise DomainError("motor command must lie in [-1, 1]")

    @property
    def mean_gap(self) -> float:
        return 0.5 * (self.gap_left + self.gap_right)

    def is_settled(self, tolerance: float = SETTLE_TOLERANCE_MM) -> bool:
        """Both gaps within ``tolerance`` of the mode target."""
        target = mode_setpoint(self.mode)
        return abs(self.gap_left - target) < tolerance and abs(self.gap_right - target) < tolerance


@dataclass(frozen=True)
class MagnetPlant:
    """Screw-drive gap dynamics: first-order lag from command to gap rate.

    A unit command asks for ``speed_gain`` mm/s of gap rate, reached with
    time constant ``time_constant``.  ``disturbance`` is a constant gap
    drift in mm/s.  The gap is clamped at mechanical contact (0 mm).
    """

    time_constant: float = 0.1
    speed_gain: float = 5.0
    disturbance: float = 0.0

    def __post_init__(self):
        if self.time_constant <= 0:
            raise DomainError("plant time constant must be positive")
        if self.speed_gain <= 0:
            raise DomainError("plant speed gain must be positive")


def magnet_pid_step(
    state: MagnetArrayState,
    setpoint: float,
    gains: PIDGains,
    plant: MagnetPlant,
    dt: float,
    trim_gain: float = 0.5,
) -> MagnetArrayState:
    """Advance the gap control loop by one step.

    The PID acts on the mean-gap error and issues a symmetric command; a
    proportional trim on the left/right gap difference keeps the two sides
    level.  The plant integrates one explicit-Euler step per side; a side
    reaching contact sticks there with its closing rate absorbed.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    if setpoint < 0:
        raise DomainError("gap setpoint cannot be negative")

    error = setpoint - state.mean_gap
    command, controller = pid_step(error, gains, dt, state.controller)
    trim = trim_gain * (state.gap_left - state.gap_right)

    gap_l, rate_l = _plant_side(state.gap_left, state.rate_left, _clamp_unit(command - trim), plant, dt)
    gap_r, rate_r = _plant_side(state.gap_right, state.rate_right, _clamp_unit(command + trim), plant, dt)

    return replace(
        state,
        gap_left=gap_l, gap_right=gap_r,
        rate_left=rate_l, rate_right=rate_r,
        command=command, controller=controller,
    )


def _clamp_unit(value: float) -> float:
    return max(-1.0, min(1.0, value))


def _plant_side(gap: float, rate: float, command: float, plant: MagnetPlant, dt: float) -> tuple[float, float]:
    target_rate = plant.speed_gain * command
    rate = rate + (dt / plant.time_constant) * (target_rate - rate)
    gap = gap + rate * dt + plant.disturbance * dt
    if gap < 0.0:
        gap = 0.0
        if rate < 0.0:
            rate = 0.0
    return gap, rate


@dataclass(frozen=True)
class MagnetTrace:
    """Closed-loop gap simulation record.

    ``rows`` are (t, gap_left, gap_right, command) per step after the step
    applies.  ``settle_time`` is the earliest time from which both gaps stay
    within the settle tolerance of the setpoint for the rest of the run,
    None when they never do.
    """

    rows: tuple[tuple[float, float, float, float], ...]
    final_state: MagnetArrayState
    setpoint: float
    settle_time: Optional[float]

    @property
    def settled(self) -> bool:
        return self.settle_time is not None


def simulate_magnet(
    initial_left: float,
    initial_right: float,
    setpoint: float,
    gains: PIDGains = DEFAULT_MAGNET_GAINS,
    plant: MagnetPlant = MagnetPlant(),
    dt: float = 0.005,
    duration: float = 2.0,
    trim_gain: float = 0.5,
    tolerance: float = SETTLE_TOLERANCE_MM,
) -> MagnetTrace:
    """Run the gap loop from given initial gaps for ``duration`` seconds."""
    if duration <= 0:
        raise DomainError("duration must be positive")
    mode = MagnetMode.TOUCHED if setpoint == TOUCHED_GAP_MM else MagnetMode.UNTOUCHED
    state = MagnetArrayState(mode=mode, gap_left=initial_left, gap_right=initial_right)
    steps = int(round(duration / dt))
    rows = []
    t = 0.0
    for _ in range(steps):
        state = magnet_pid_step(state, setpoint, gains, plant, dt, trim_gain)
        t += dt
        rows.append((t, state.gap_left, state.gap_right, state.command))

    settle_time: Optional[float] = None
    for row in reversed(rows):
        if abs(row[1] - setpoint) < tolerance and abs(row[2] - setpoint) < tolerance:
            settle_time = row[0]
        else:
            break
    return MagnetTrace(rows=tuple(rows), final_state=state, setpoint=setpoint, settle_time=settle_time)


MAGNET_TRACE_HEADER = "t,gap_left_mm,gap_right_mm,command"


def magnet_trace_to_csv(trace: MagnetTrace) -> str:
    """Render a gap simulation as CSV text, 9 significant digits."""
    lines = [MAGNET_TRACE_HEADER]
    for t, gl, gr, u in trace.rows:
        lines.append(",".join(f"{v:.9g}" for v in (t, gl, gr, u)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Jump state machine
# ---------------------------------------------------------------------------


class InchwormPhase(str, Enum):
    """Phases of one inch-worm jump, in traversal order."""

    MOBILE_CONFIG = "MobileConfig"
    BASE_FOOT_TOUCHED = "BaseFootTouched"
    AT_CONVENIENT_POSE = "AtConvenientPose"
    FOOT1_ON_TARGET = "Foot1OnTarget"
    MAGNETS_SWAPPED = "MagnetsSwapped"
    FOOT2_ON_TARGET = "Foot2OnTarget"
    MOBILE_REFORMED = "MobileReformed"


class JumpEvent(str, Enum):
    """Events that advance the jump state machine."""

    LOWER_BASE_MAGNET = "LowerBaseMagnet"
    REACH_CONVENIENT_POSE = "ReachConvenientPose"
    FOOT1_CONTACT = "Foot1Contact"
    SWAP_MAGNETS = "SwapMagnets"
    FOOT2_CONTACT = "Foot2Contact"
    REFORM = "Reform"


WHEELED_PHASES = frozenset({InchwormPhase.MOBILE_CONFIG, InchwormPhase.MOBILE_REFORMED})

# phase -> (event, next phase, foot-1 mode after, foot-2 mode after);
# None keeps the current mode.
_TRANSITIONS: dict[InchwormPhase, tuple[JumpEvent, InchwormPhase, Optional[MagnetMode], Optional[MagnetMode]]] = {
    InchwormPhase.MOBILE_CONFIG: (
        JumpEvent.LOWER_BASE_MAGNET, InchwormPhase.BASE_FOOT_TOUCHED, None, MagnetMode.TOUCHED),
    InchwormPhase.BASE_FOOT_TOUCHED: (
        JumpEvent.REACH_CONVENIENT_POSE, InchwormPhase.AT_CONVENIENT_POSE, None, None),
    InchwormPhase.AT_CONVENIENT_POSE: (
        JumpEvent.FOOT1_CONTACT, InchwormPhase.FOOT1_ON_TARGET, None, None),
    InchwormPhase.FOOT1_ON_TARGET: (
        JumpEvent.SWAP_MAGNETS, InchwormPhase.MAGNETS_SWAPPED, MagnetMode.TOUCHED, MagnetMode.UNTOUCHED),
    InchwormPhase.MAGNETS_SWAPPED: (
        JumpEvent.FOOT2_CONTACT, InchwormPhase.FOOT2_ON_TARGET, None, MagnetMode.TOUCHED),
    InchwormPhase.FOOT2_ON_TARGET: (
        JumpEvent.REFORM, InchwormPhase.MOBILE_REFORMED, MagnetMode.UNTOUCHED, MagnetMode.UNTOUCHED),
}


@dataclass(frozen=True)
class InchwormState:
    """Jump progress: current phase, both magnet arrays, and the landing pose.

    Constructing a state that has both magnets Untouched outside the two
    wheeled phases is rejected; that configuration has nothing holding the
    robot to the structure.
    """

    phase: InchwormPhase
    magnet1: MagnetArrayState
    magnet2: MagnetArrayState
    target_pose: Optional[FootPose] = None

    def __post_init__(self):
        if self.phase not in WHEELED_PHASES:
            if self.magnet1.mode is not MagnetMode.TOUCHED and self.magnet2.mode is not MagnetMode.TOUCHED:
                raise DomainError(f"phase {self.phase.value} requires at least one Touched magnet")


def initial_jump_state(target_pose: Optional[FootPose] = None) -> InchwormState:
    """Jump start: wheeled configuration, both magnets at rolling clearance."""
    return InchwormState(
        phase=InchwormPhase.MOBILE_CONFIG,
        magnet1=MagnetArrayState(mode=MagnetMode.UNTOUCHED),
        magnet2=MagnetArrayState(mode=MagnetMode.UNTOUCHED),
        target_pose=target_pose,
    )


def inchworm_step(state: InchwormState, event: JumpEvent) -> InchwormState:
    """Apply one event.

    Each phase accepts exactly one event; anything else raises
    :class:`TransitionError` and leaves the state untouched.  The terminal
    phase accepts no events.
    """
    entry = _TRANSITIONS.get(state.phase)
    if entry is None or entry[0] is not event:
        raise TransitionError(f"event {event.value} is not legal in phase {state.phase.value}")
    _, next_phase, mode1, mode2 = entry
    magnet1 = state.magnet1 if mode1 is None else replace(state.magnet1, mode=mode1)
    magnet2 = state.magnet2 if mode2 is None else replace(state.magnet2, mode=mode2)
    return replace(state, phase=next_phase, magnet1=magnet1, magnet2=magnet2)


CANONICAL_JUMP_SEQUENCE = (
    JumpEvent.LOWER_BASE_MAGNET,
    JumpEvent.REACH_CONVENIENT_POSE,
    JumpEvent.FOOT1_CONTACT,
    JumpEvent.SWAP_MAGNETS,
    JumpEvent.FOOT2_CONTACT,
    JumpEvent.REFORM,
)


def run_jump_sequence(state: InchwormState, events: Sequence[JumpEvent]) -> tuple[InchwormState, list[dict]]:
    """Apply an event script, recording one trace row per event.

    A rejected event is recorded with ``accepted`` false and does not change
    the state; the script continues.  Rows carry the phase and magnet modes
    after the event applied.
    """
    rows: list[dict] = []
    for step, event in enumerate(events, start=1):
        accepted = True
        try:
            state = inchworm_step(state, event)
        except TransitionError:
            accepted = False
        rows.append({
            "step": step,
            "phase": state.phase.value,
            "event": event.value,
            "magnet1_mode": state.magnet1.mode.value,
            "magnet2_mode": state.magnet2.mode.value,
            "accepted": accepted,
        })
    return state, rows


def jump_trace_to_jsonl(rows: Sequence[dict]) -> str:
    """Serialize jump trace rows as JSON lines."""
    return "".join(json.dumps(row) + "\n" for row in rows)


# ---------------------------------------------------------------------------
# Jump trajectory
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JumpPlanConfig:
    """Configured arm poses for the jump trajectory.

    The jump always passes through a pre-chosen convenient arm pose before
    heading to the pose-specific target joints; both vectors come from
    configuration, as do the per-joint limits (radians, (6, 2) low/high).
    """

    convenient_joints: np.ndarray
    target_joints: np.ndarray
    joint_limits: np.ndarray

    def __post_init__(self):
        conv = np.asarray(self.convenient_joints, dtype=np.float64).reshape(6)
        targ = np.asarray(self.target_joints, dtype=np.float64).reshape(6)
        lim = np.asarray(self.joint_limits, dtype=np.float64).reshape(6, 2)
        if not (lim[:, 0] < lim[:, 1]).all():
            raise DomainError("joint limits must satisfy low < high per joint")
        for name, arr in (("convenient_joints", conv), ("target_joints", targ), ("joint_limits", lim)):
            a = np.array(arr, copy=True)
            a.flags.writeable = False
            object.__setattr__(self, name, a)


DEFAULT_JOINT_LIMITS = np.array([[-np.pi, np.pi]] * 6)


def plan_jump_trajectory(
    from_joints,
    to_pose: Optional[FootPose],
    plan: JumpPlanConfig,
    steps: int,
) -> np.ndarray:
    """Piecewise-linear joint trajectory: start, convenient pose, target.

    Each leg holds ``steps`` evenly spaced joint vectors with exact
    endpoints; the shared convenient-pose row appears once, so the result
    has ``2 * steps - 1`` rows.  ``to_pose`` names the landing the
    configured target joints realize; the joint values themselves come from
    the plan.  Any row outside the joint limits raises
    :class:`TrajectoryError`.
    """
    if steps < 2:
        raise DomainError("steps must be at least 2")
    start = np.asarray(from_joints, dtype=np.float64).reshape(6)
    if not np.isfinite(start).all():
        raise DomainError("joint angles must be finite")

    leg1 = np.linspace(start, plan.convenient_joints, steps)
    leg2 = np.linspace(plan.convenient_joints, plan.target_joints, steps)
    path = np.vstack([leg1, leg2[1:]])

    low = plan.joint_limits[:, 0] - 1e-12
    high = plan.joint_limits[:, 1] + 1e-12
    bad = np.nonzero((path < low) | (path > high))
    if bad[0].size:
        row, joint = int(bad[0][0]), int(bad[1][0])
        raise TrajectoryError(
            f"trajectory row {row} puts joint {joint} at {path[row, joint]:.6f} rad, "
            f"outside [{plan.joint_limits[joint, 0]:.6f}, {plan.joint_limits[joint, 1]:.6f}]"
        )
    return path


def trajectory_to_csv(path: np.ndarray) -> str:
    """Render a joint trajectory as bare CSV rows of 6 angles."""
    arr = np.asarray(path, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 6:
        raise DomainError("trajectory must be an (N, 6) array")
    return "\n".join(",".join(f"{v:.9g}" for v in row) for row in arr) + "\n"
