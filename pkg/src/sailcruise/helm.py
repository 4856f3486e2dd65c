"""PID rudder helm: heading error in, clipped rudder angle out."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .angles import wrap_deg

RUDDER_LIMIT = 40.0  # deg


class BaseMode(enum.Enum):
    LEFT = "left"
    MIDDLE = "middle"
    RIGHT = "right"


class Maneuver(enum.Enum):
    RIGHT_TACK = "right_tack"
    LEFT_TACK = "left_tack"
    NONE = "none"


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.2
    ki: float = 0.1
    kd: float = 0.01
    pid_proportion: float = 1.0
    integral_limit: float = 5.0  # deg*s

    def __post_init__(self):
        for name in ("kp", "ki", "kd", "pid_proportion", "integral_limit"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.integral_limit < 0:
            raise ValueError("integral_limit must be >= 0")


@dataclass(frozen=True)
class RudderBases:
    left_base: float = -30.0
    middle_base: float = 0.0
    right_base: float = 30.0

    def __post_init__(self):
        for name in ("left_base", "middle_base", "right_base"):
            v = getattr(self, name)
            if not (-RUDDER_LIMIT <= v <= RUDDER_LIMIT):
                raise ValueError(f"{name} must lie within [-40, 40] deg")

    def get(self, mode: BaseMode) -> float:
        if mode is BaseMode.LEFT:
            return self.left_base
        if mode is BaseMode.RIGHT:
            return self.right_base
        return self.middle_base


@dataclass
class PidController:
    gains: PidGains = field(default_factory=PidGains)
    bases: RudderBases = field(default_factory=RudderBases)
    integral: float = 0.0
    prev_error: float | None = None
    clip_limit: float = RUDDER_LIMIT

    def __post_init__(self):
        if not self.clip_limit > 0:
            raise ValueError("clip_limit must be positive")


def heading_error(setting: float, heading: float) -> float:
    """Shortest signed turn (deg) from ``heading`` to ``setting``, in (-180, 180]."""
    return wrap_deg(setting - heading)


def pid_step(ctrl: PidController, error: float, dt: float) -> float:
    """Advance the controller by ``dt`` seconds and return the control output u.

    Rectangular integration with the integral clamped to the gains'
    ``integral_limit``; backward-difference derivative, zero on the first call.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    g = ctrl.gains
    lim = g.integral_limit
    ctrl.integral = min(max(ctrl.integral + error * dt, -lim), lim)
    deriv = 0.0 if ctrl.prev_error is None else (error - ctrl.prev_error) / dt
    ctrl.prev_error = error
    return g.kp * error + g.ki * ctrl.integral + g.kd * deriv


def rudder_from_u(ctrl: PidController, u: float, base_mode: BaseMode) -> float:
    """Rudder angle = base - pid_proportion * u, clipped to +/- clip_limit."""
    raw = ctrl.bases.get(base_mode) - ctrl.gains.pid_proportion * u
    return min(max(raw, -ctrl.clip_limit), ctrl.clip_limit)


def select_base(maneuver: Maneuver) -> BaseMode:
    # a right tack steers off the left base and vice versa
    if maneuver is Maneuver.RIGHT_TACK:
        return BaseMode.LEFT
    if maneuver is Maneuver.LEFT_TACK:
        return BaseMode.RIGHT
    return BaseMode.MIDDLE


def reset(ctrl: PidController) -> None:
    ctrl.integral = 0.0
    ctrl.prev_error = None


def steer(ctrl: PidController, setting: float, heading: float, dt: float,
          maneuver: Maneuver = Maneuver.NONE) -> float:
    """One helm update: error -> PID -> rudder angle (deg)."""
    u = pid_step(ctrl, heading_error(setting, heading), dt)
    return rudder_from_u(ctrl, u, select_base(maneuver))
