"""Four-bar upwind cruise: tack between the middle and right bars, return
along the left side, and count loops at the start point.

Motor-assisted turns arm whenever a new setting angle leaves more than
``boundary_angle`` of heading error and disarm for good once the error
falls to that angle; inertia and the rudder finish the turn.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .angles import wrap_deg
from .helm import Maneuver, heading_error
from .vessel import Bar, BoatState, Direction, crossed


class Phase(enum.Enum):
    TACK_RIGHT = "TackRight"
    TACK_LEFT = "TackLeft"
    RETURN_TO_LEFT = "ReturnToLeft"
    RETURN_TO_START = "ReturnToStart"
    DONE = "Done"


TACK_PHASES = (Phase.TACK_RIGHT, Phase.TACK_LEFT)


class AssistSide(enum.Enum):
    LEFT_MOTOR = "left"
    RIGHT_MOTOR = "right"
    NONE = "none"


class MotorCommand(enum.Enum):
    OFF = "off"
    LEFT_ON = "left_on"
    RIGHT_ON = "right_on"


@dataclass(frozen=True)
class MissionConfig:
    left_bar_x: float = 1.0
    middle_bar_x: float = 4.0
    right_bar_x: float = 7.0
    lower_bar_y: float = 1.0
    upper_bar_y: float = 10.5
    start_point: tuple[float, float] = (5.5, 1.5)
    start_radius: float = 0.5
    theta_setting: float = 40.0
    boundary_angle: float = 30.0
    loops_target: int = 5
    assist_on_returns: bool = True

    def __post_init__(self):
        object.__setattr__(self, "start_point", tuple(float(v) for v in self.start_point))
        if not self.left_bar_x < self.middle_bar_x < self.right_bar_x:
            raise ValueError("bars must satisfy left_bar_x < middle_bar_x < right_bar_x")
        if not self.lower_bar_y < self.upper_bar_y:
            raise ValueError("lower_bar_y must be below upper_bar_y")
        if len(self.start_point) != 2:
            raise ValueError("start_point must be an (x, y) pair")
        if not self.start_radius > 0:
            raise ValueError("start_radius must be positive")
        if not 0 < self.theta_setting < 90:
            raise ValueError("theta_setting must lie in (0, 90) deg")
        if not self.boundary_angle >= 0:
            raise ValueError("boundary_angle must be >= 0")
        if self.loops_target < 0:
            raise ValueError("loops_target must be >= 0")

    @property
    def left_midpoint(self) -> tuple[float, float]:
        return self.left_bar_x, 0.5 * (self.lower_bar_y + self.upper_bar_y)


@dataclass
class MissionState:
    phase: Phase
    setting_angle: float
    tack_assist_active: bool = False
    assist_side: AssistSide = AssistSide.NONE
    tack_count: int = 0
    loop_count: int = 0
    # the armed assist belongs to a bar-triggered tack (not a return turn)
    assist_for_tack: bool = False


def bearing_to(src: tuple[float, float], dst: tuple[float, float]) -> float:
    """Heading (deg, 0 = +y, clockwise positive) of the vector src -> dst."""
    dx, dy = dst[0] - src[0], dst[1] - src[1]
    if dx == 0 and dy == 0:
        raise ValueError("bearing between coincident points is undefined")
    return wrap_deg(math.degrees(math.atan2(dx, dy)))


def mission_init(cfg: MissionConfig) -> MissionState:
    return MissionState(phase=Phase.TACK_RIGHT, setting_angle=cfg.theta_setting)


def _set(ms: MissionState, boat: BoatState, cfg: MissionConfig, phase: Phase,
         setting: float, *, tack: bool) -> None:
    ms.phase = phase
    ms.setting_angle = setting
    err = heading_error(setting, boat.heading)
    if abs(err) > cfg.boundary_angle and (tack or cfg.assist_on_returns):
        ms.tack_assist_active = True
        ms.assist_side = AssistSide.LEFT_MOTOR if err > 0 else AssistSide.RIGHT_MOTOR
        ms.assist_for_tack = tack
    else:
        _disarm(ms)


def _disarm(ms: MissionState) -> None:
    ms.tack_assist_active = False
    ms.assist_side = AssistSide.NONE
    ms.assist_for_tack = False


def mission_update(ms: MissionState, boat: BoatState,
                   cfg: MissionConfig) -> tuple[MissionState, float]:
    """Apply at most one bar/start transition and return the setting angle.

    ``ms`` is updated in place and returned for convenience.
    """
    if ms.phase is Phase.DONE:
        return ms, ms.setting_angle
    if ms.loop_count >= cfg.loops_target:
        ms.phase = Phase.DONE
        _disarm(ms)
        return ms, ms.setting_angle

    pos = (boat.x, boat.y)
    theta = cfg.theta_setting
    if ms.phase in TACK_PHASES and crossed(boat, Bar.UPPER_Y, cfg.upper_bar_y, Direction.INCREASING):
        _set(ms, boat, cfg, Phase.RETURN_TO_LEFT, bearing_to(pos, cfg.left_midpoint), tack=False)
    elif ms.phase is Phase.TACK_RIGHT and crossed(boat, Bar.RIGHT_X, cfg.right_bar_x, Direction.INCREASING):
        _set(ms, boat, cfg, Phase.TACK_LEFT, -theta, tack=True)
        ms.tack_count += 1
    elif ms.phase is Phase.TACK_LEFT and crossed(boat, Bar.MIDDLE_X, cfg.middle_bar_x, Direction.DECREASING):
        _set(ms, boat, cfg, Phase.TACK_RIGHT, theta, tack=True)
        ms.tack_count += 1
    elif ms.phase is Phase.RETURN_TO_LEFT and crossed(boat, Bar.LEFT_X, cfg.left_bar_x, Direction.DECREASING):
        _set(ms, boat, cfg, Phase.RETURN_TO_START, bearing_to(pos, cfg.start_point), tack=False)
    elif ms.phase is Phase.RETURN_TO_START:
        if math.dist(pos, cfg.start_point) <= cfg.start_radius:
            ms.loop_count += 1
            if ms.loop_count >= cfg.loops_target:
                ms.phase = Phase.DONE
                _disarm(ms)
            else:
                _set(ms, boat, cfg, Phase.TACK_RIGHT, theta, tack=False)
        else:
            # keep homing on the start point so leeway cannot carry the boat past it
            ms.setting_angle = bearing_to(pos, cfg.start_point)
    return ms, ms.setting_angle


def tack_assist(ms: MissionState, boat: BoatState, cfg: MissionConfig | None = None) -> MotorCommand:
    """Motor command for this step; disarms once the error is within the boundary."""
    if not ms.tack_assist_active:
        return MotorCommand.OFF
    boundary = cfg.boundary_angle if cfg is not None else 30.0
    if abs(heading_error(ms.setting_angle, boat.heading)) <= boundary:
        _disarm(ms)
        return MotorCommand.OFF
    if ms.assist_side is AssistSide.LEFT_MOTOR:
        return MotorCommand.LEFT_ON
    return MotorCommand.RIGHT_ON


def maneuver(ms: MissionState) -> Maneuver:
    """Helm maneuver: a tack is in progress while its assist window is armed."""
    if not (ms.tack_assist_active and ms.assist_for_tack):
        return Maneuver.NONE
    return Maneuver.RIGHT_TACK if ms.phase is Phase.TACK_RIGHT else Maneuver.LEFT_TACK
