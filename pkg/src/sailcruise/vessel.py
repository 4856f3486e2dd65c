"""Planar 3-DOF boat plant (surge, yaw, kinematic leeway) in a walled arena.

Heading convention: 0 deg points along +y (into the default wind), positive
clockwise toward +x.  The plant integrates with explicit Euler.
"""

from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_deg
from .sail_aero import SailPlan

log = logging.getLogger(__name__)

MAX_DT = 0.5


@dataclass(frozen=True)
class BoatState:
    x: float
    y: float
    heading: float
    speed: float

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be >= 0")
        object.__setattr__(self, "heading", wrap_deg(self.heading))


@dataclass(frozen=True)
class WindField:
    from_direction: float = 0.0
    mean_speed: float = 1.3
    gust_amplitude: float = 0.1
    heading_noise_sigma: float = 3.0  # deg per sqrt(s)
    seed: int = 0
    gust_period: float = 4.0  # s between gust knots

    def __post_init__(self):
        if not self.mean_speed > 0:
            raise ValueError("mean_speed must be positive")
        if self.gust_amplitude < 0:
            raise ValueError("gust_amplitude must be >= 0")
        if not self.mean_speed - self.gust_amplitude > 0:
            raise ValueError("mean_speed - gust_amplitude must be positive")
        if self.heading_noise_sigma < 0:
            raise ValueError("heading_noise_sigma must be >= 0")
        if not self.gust_period > 0:
            raise ValueError("gust_period must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Arena:
    width: float = 8.0
    height: float = 12.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("arena dimensions must be positive")


@dataclass(frozen=True)
class VesselParams:
    mass: float = 0.601  # kg
    drag_coeff: float = 0.076  # N s^2/m^2
    turn_rate_gain: float = 9.6  # deg/s per (deg rudder * m/s)
    motor_thrust: float = 0.067  # N per motor
    motor_yaw_rate: float = 82.2  # deg/s
    leeway_coeff: float = 0.117
    no_go_half_angle: float = 37.0  # deg

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        for name in ("drag_coeff", "turn_rate_gain", "motor_thrust",
                     "motor_yaw_rate", "leeway_coeff"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0 < self.no_go_half_angle < 90:
            raise ValueError("no_go_half_angle must lie in (0, 90)")


@dataclass(frozen=True)
class ActuatorCommand:
    rudder: float = 0.0  # deg
    sail_phi: float = 0.0  # deg, wind-fixed sail coordinate
    motor_left: bool = False
    motor_right: bool = False

    @property
    def motors_on(self) -> int:
        return int(self.motor_left) + int(self.motor_right)

    @property
    def differential(self) -> int:
        # left motor alone yaws the bow to starboard (clockwise)
        return int(self.motor_left) - int(self.motor_right)


@functools.lru_cache(maxsize=4096)
def _gust_knot(seed: int, k: int) -> float:
    return float(np.random.default_rng([seed, 0, k]).uniform(-1.0, 1.0))


def gust_shape(w: WindField, t: float) -> float:
    """Seeded smooth noise in [-1, 1]: smoothstep between random knots."""
    pos = t / w.gust_period
    k = math.floor(pos)
    a = _gust_knot(w.seed, k)
    b = _gust_knot(w.seed, k + 1)
    f = pos - k
    s = f * f * (3.0 - 2.0 * f)
    return a + (b - a) * s


def wind_sample(w: WindField, t: float) -> float:
    """Wind speed (m/s) at time ``t``; always within mean +/- amplitude."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if w.gust_amplitude == 0:
        return w.mean_speed
    lo, hi = w.mean_speed - w.gust_amplitude, w.mean_speed + w.gust_amplitude
    return min(max(w.mean_speed + w.gust_amplitude * gust_shape(w, t), lo), hi)


def relative_heading(heading: float, wind: WindField) -> float:
    """Heading measured clockwise from the upwind direction, in (-180, 180]."""
    return wrap_deg(heading - wind.from_direction)


def sail_force(state: BoatState, cmd: ActuatorCommand, params: VesselParams,
               wind: WindField, plan: SailPlan, wind_speed: float) -> float:
    """Forward sail force (N); exactly zero inside the no-go cone."""
    rel = relative_heading(state.heading, wind)
    if abs(rel) < params.no_go_half_angle:
        return 0.0
    scale = (wind_speed / wind.mean_speed) ** 2
    return plan.force(rel, cmd.sail_phi) * scale


def step(state: BoatState, cmd: ActuatorCommand, params: VesselParams,
         wind: WindField, plan: SailPlan, dt: float, *, t: float = 0.0,
         noise: float = 0.0, arena: Arena | None = None) -> BoatState:
    """Advance the boat by one explicit-Euler step of ``dt`` seconds.

    ``noise`` is the standard-normal draw for this step's heading disturbance;
    the caller owns the random stream.
    """
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}]")
    arena = arena or Arena()
    w_speed = wind_sample(wind, t)
    v = state.speed
    f_total = sail_force(state, cmd, params, wind, plan, w_speed)
    f_total += params.motor_thrust * cmd.motors_on
    dv = (f_total - params.drag_coeff * v * v) / params.mass

    # rudder sign chosen so a positive heading error (negative rudder) turns clockwise
    yaw_rate = -params.turn_rate_gain * cmd.rudder * v + params.motor_yaw_rate * cmd.differential

    h = math.radians(state.heading)
    down = math.radians(wind.from_direction + 180.0)
    drift = params.leeway_coeff * w_speed
    x = state.x + (v * math.sin(h) + drift * math.sin(down)) * dt
    y = state.y + (v * math.cos(h) + drift * math.cos(down)) * dt
    new_v = max(v + dv * dt, 0.0)
    new_h = state.heading + yaw_rate * dt + wind.heading_noise_sigma * math.sqrt(dt) * noise

    cx = min(max(x, 0.0), arena.width)
    cy = min(max(y, 0.0), arena.height)
    if cx != x or cy != y:
        log.debug("wall contact at (%.3f, %.3f)", x, y)
        new_v = 0.0
    return BoatState(cx, cy, new_h, new_v)


class Bar(enum.Enum):
    LEFT_X = "left_x"
    MIDDLE_X = "middle_x"
    RIGHT_X = "right_x"
    UPPER_Y = "upper_y"
    LOWER_Y = "lower_y"


class Direction(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


def crossed(state: BoatState, bar: Bar, value: float, direction: Direction) -> bool:
    """Whether the boat is at or beyond ``value`` on the bar's axis (inclusive)."""
    coord = state.y if bar in (Bar.UPPER_Y, Bar.LOWER_Y) else state.x
    if direction is Direction.INCREASING:
        return coord >= value
    return coord <= value
