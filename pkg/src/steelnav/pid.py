"""Single-loop PID with output saturation and anti-windup.

Used by both the path-tracking controller and the magnet gap controller.
Controller memory is an explicit value passed in and returned, never hidden
state, so closed loops stay reproducible and safe to run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import DomainError


@dataclass(frozen=True)
class PIDGains:
    """Gains for one PID loop.

    ``out_limit`` saturates the output symmetrically; ``int_limit`` clamps the
    error integral (anti-windup).
    """

    kp: float
    ki: float
    kd: float
    out_limit: float
    int_limit: float

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise DomainError("PID gains must be non-negative")
        if self.out_limit <= 0:
            raise DomainError("output saturation limit must be positive")
        if self.int_limit <= 0:
            raise DomainError("integrator clamp must be positive")


@dataclass(frozen=True)
class PIDState:
    """Memory of one PID loop: error integral and previous error."""

    integral: float = 0.0
    prev_error: Optional[float] = None


def pid_step(error: float, gains: PIDGains, dt: float, state: PIDState) -> tuple[float, PIDState]:
    """Advance one PID loop by a step of ``dt`` seconds.

    Returns the saturated output and the updated controller state.  The
    integral is clamped to ``int_limit`` and, additionally, is not advanced
    while the output is saturated in the same direction as the error
    (conditional integration), so a long saturated transient does not wind up
    the integrator.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")

    derivative = 0.0 if state.prev_error is None else (error - state.prev_error) / dt

    integral = state.integral + error * dt
    integral = _clamp(integral, gains.int_limit)

    raw = gains.kp * error + gains.ki * integral + gains.kd * derivative
    out = _clamp(raw, gains.out_limit)

    saturated_same_sign = (raw != out) and (raw * error > 0)
    if saturated_same_sign:
        integral = state.integral

    return out, PIDState(integral=integral, prev_error=error)


def _clamp(value: float, limit: float) -> float:
    if value > limit:
        return limit
    if value < -limit:
        return -limit
    return value
