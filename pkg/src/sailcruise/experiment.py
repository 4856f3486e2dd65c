"""Closed-loop cruises and the heading-angle sweep.

A cruise wires mission -> helm -> sail trim -> plant -> power ledger at a
fixed step until the loop target is met or the simulated timeout expires.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import helm
from .config import RunConfig
from .energy import (EnergyFit, EnergyLedger, fit_energy_line, instant_power,
                     per_loop_energy, tacking_energy)
from .mission import (MotorCommand, Phase, maneuver, mission_init,
                      mission_update, tack_assist)
from .sail_aero import SailPlan, analytic_plan, load_map_csv
from .vessel import ActuatorCommand, Arena, BoatState, relative_heading, step

log = logging.getLogger(__name__)

DEFAULT_THETAS = (35.0, 40.0, 45.0, 50.0, 55.0)


class TrajectoryRow(NamedTuple):
    t: float
    x: float
    y: float
    heading_deg: float
    speed: float
    rudder_deg: float
    sail_phi_deg: float
    motor_left: int
    motor_right: int
    phase: str


class Event(NamedTuple):
    t: float
    event: str
    loop: int
    tack_count: int
    setting_deg: float


@dataclass(frozen=True)
class LoopSummary:
    index: int
    t_start: float
    t_end: float
    energy: float
    tacks: int


@dataclass
class CruiseResult:
    theta: float
    seed: int
    loops_target: int
    trajectory: list
    ledger: EnergyLedger
    events: list
    loops: list
    timed_out: bool
    duration: float

    @property
    def loops_completed(self) -> int:
        return len(self.loops)


def sail_plan(config: RunConfig) -> SailPlan:
    """Analytic maps at the mean wind speed, or CSV maps when configured."""
    s = config.sail
    if s.right_map or s.left_map:
        if not (s.right_map and s.left_map):
            raise ValueError("sail.right_map and sail.left_map must be given together")
        return SailPlan(load_map_csv(s.right_map), load_map_csv(s.left_map))
    return analytic_plan(config.wind.mean_speed, s.theta_step, s.phi_step, s.sail_coeff)


def run_cruise(config: RunConfig, theta: float, loops: int, seed: int,
               plan: SailPlan | None = None) -> CruiseResult:
    """Simulate one cruise of ``loops`` loops at setting angle ``theta``."""
    if not 0 < theta < 90:
        raise ValueError("theta must lie in (0, 90) deg")
    mcfg = dataclasses.replace(config.mission, theta_setting=float(theta), loops_target=int(loops))
    wind = dataclasses.replace(config.wind, seed=int(seed))
    plan = plan or sail_plan(config)
    params, pm, arena = config.vessel, config.power, config.arena
    dt, timeout = config.run.dt, config.run.timeout
    rng = np.random.default_rng([int(seed), 1])

    ctrl = helm.PidController(config.pid.gains, config.rudder, clip_limit=config.pid.clip_limit)
    ms = mission_init(mcfg)
    sx, sy = mcfg.start_point
    boat = BoatState(sx, sy, mcfg.theta_setting + wind.from_direction, config.run.release_speed)
    ledger = EnergyLedger(base_power=pm.base_power)
    traj: list[TrajectoryRow] = []
    events = [Event(0.0, "start", 0, 0, ms.setting_angle)]
    loops_done: list[LoopSummary] = []

    loop_t0, loop_tacks0 = 0.0, 0
    win_start = None
    win_is_tack = False
    k = 0
    timed_out = False
    while True:
        t = k * dt
        prev_phase, prev_tacks, prev_loops = ms.phase, ms.tack_count, ms.loop_count
        ms, setting = mission_update(ms, boat, mcfg)
        if ms.phase is not prev_phase or ms.loop_count != prev_loops:
            helm.reset(ctrl)
            if ms.loop_count != prev_loops:
                ev = "loop"
            elif ms.phase is Phase.RETURN_TO_LEFT:
                ev = "upper_bar"
            elif ms.phase is Phase.RETURN_TO_START:
                ev = "left_bar"
            else:
                ev = "tack"
            events.append(Event(t, ev, ms.loop_count, ms.tack_count, setting))
            if ms.loop_count != prev_loops:
                loops_done.append(LoopSummary(len(loops_done) + 1, loop_t0, t, 0.0,
                                              ms.tack_count - loop_tacks0))
                ledger.loop_marks.append(t)
                loop_t0, loop_tacks0 = t, ms.tack_count

        if ms.phase is Phase.DONE:
            motor = MotorCommand.OFF
            rudder = 0.0
        else:
            motor = tack_assist(ms, boat, mcfg)
            rudder = helm.steer(ctrl, setting, boat.heading, dt, maneuver(ms))
        phi, _ = plan.trim(relative_heading(boat.heading, wind))
        cmd = ActuatorCommand(rudder, phi, motor is MotorCommand.LEFT_ON, motor is MotorCommand.RIGHT_ON)
        n_on = cmd.motors_on
        ledger.record(t, instant_power(pm, n_on), n_on, ms.loop_count)

        # assist windows span from the last motor-off sample to the first one after
        if n_on and win_start is None:
            win_start = ledger.times[-2] if len(ledger.times) > 1 else t
            win_is_tack = ms.assist_for_tack
        elif not n_on and win_start is not None:
            ledger.assist_windows.append((win_start, t))
            if win_is_tack:
                ledger.tack_windows.append((win_start, t))
            win_start = None

        traj.append(TrajectoryRow(t, boat.x, boat.y, boat.heading, boat.speed, rudder, phi,
                                  int(cmd.motor_left), int(cmd.motor_right), ms.phase.value))
        if ms.phase is Phase.DONE:
            break
        if t >= timeout:
            timed_out = True
            events.append(Event(t, "timeout", ms.loop_count, ms.tack_count, setting))
            log.info("cruise theta=%s seed=%s timed out after %d loops", theta, seed, ms.loop_count)
            break
        boat = step(boat, cmd, params, wind, plan, dt, t=t,
                    noise=float(rng.standard_normal()), arena=arena)
        k += 1

    if win_start is not None:
        ledger.assist_windows.append((win_start, ledger.times[-1]))
        if win_is_tack:
            ledger.tack_windows.append((win_start, ledger.times[-1]))
    if ledger.loop_marks:
        loops_done = [dataclasses.replace(lp, energy=e)
                      for lp, e in zip(loops_done, per_loop_energy(ledger))]
    if ms.phase is Phase.DONE and not events[-1].event == "done":
        events.append(Event(ledger.times[-1], "done", ms.loop_count, ms.tack_count, ms.setting_angle))
    return CruiseResult(float(theta), int(seed), int(loops), traj, ledger, events,
                        loops_done, timed_out, ledger.duration)


class StepResponse(NamedTuple):
    t: np.ndarray
    heading: np.ndarray
    speed: np.ndarray


def heading_step(config: RunConfig, heading0: float, setting: float, *, speed: float = 0.7,
                 duration: float = 60.0, noise: bool = False, seed: int = 0) -> StepResponse:
    """Release the boat at ``heading0`` and let the helm alone steer to ``setting``.

    Sails are trimmed, motors stay off and the walls are out of reach.  With
    ``noise`` false the heading disturbance is switched off.
    """
    wind = dataclasses.replace(config.wind, seed=int(seed))
    if not noise:
        wind = dataclasses.replace(wind, heading_noise_sigma=0.0)
    plan = sail_plan(config)
    ctrl = helm.PidController(config.pid.gains, config.rudder, clip_limit=config.pid.clip_limit)
    rng = np.random.default_rng([int(seed), 1])
    # far from every wall for any reachable duration
    arena = Arena(1e7, 1e7)
    dt = config.run.dt
    boat = BoatState(5e6, 5e6, heading0, speed)
    n = int(round(duration / dt))
    ts, hs, vs = np.empty(n + 1), np.empty(n + 1), np.empty(n + 1)
    for k in range(n + 1):
        ts[k], hs[k], vs[k] = k * dt, boat.heading, boat.speed
        if k == n:
            break
        rudder = helm.steer(ctrl, setting, boat.heading, dt)
        phi, _ = plan.trim(relative_heading(boat.heading, wind))
        xi = float(rng.standard_normal()) if noise else 0.0
        boat = step(boat, ActuatorCommand(rudder, phi), config.vessel, wind, plan, dt,
                    t=k * dt, noise=xi, arena=arena)
    return StepResponse(ts, hs, vs)


@dataclass(frozen=True)
class ScenarioSummary:
    """Reduced result of one (theta, seed) cruise."""

    theta: float
    seed: int
    total_j: float
    per_loop_j: tuple
    tack_energy_j: float
    tacks_per_loop: float
    duration_s: float
    fit: EnergyFit | None
    timed_out: bool = False


def summarize_cruise(res: CruiseResult) -> ScenarioSummary:
    led = res.ledger
    per_loop = tuple(lp.energy for lp in res.loops)
    tack_e = tacking_energy(led) if led.tack_windows else math.nan
    tacks = sum(lp.tacks for lp in res.loops)
    tpl = tacks / len(res.loops) if res.loops else math.nan
    fit = fit_energy_line(led) if len(led.times) >= 2 else None
    return ScenarioSummary(res.theta, res.seed, led.total, per_loop, tack_e, tpl,
                           res.duration, fit, res.timed_out)


def cruise_scenario(config: RunConfig, theta: float, loops: int, seed: int) -> ScenarioSummary:
    return summarize_cruise(run_cruise(config, theta, loops, seed))


class BoxStats(NamedTuple):
    mean: float
    variance: float
    min: float
    max: float
    quartiles: tuple


def box_stats(values: Sequence[float]) -> BoxStats:
    """Mean, population variance, range and linear-interpolation quartiles."""
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        raise ValueError("box_stats needs at least one value")
    q = np.percentile(a, [25, 50, 75])
    return BoxStats(float(a.mean()), float(a.var()), float(a.min()), float(a.max()),
                    tuple(float(v) for v in q))


def savings_percent(e_best: float, e_other: float) -> float:
    if not e_best > 0:
        raise ValueError("e_best must be positive")
    return 100.0 * (e_other - e_best) / e_best


@dataclass(frozen=True)
class SweepSpec:
    thetas: tuple = DEFAULT_THETAS
    loops: int = 5
    seeds: tuple = (1, 2, 3, 4, 5)
    config: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.thetas:
            raise ValueError("thetas must not be empty")
        if any(not 0 < t < 90 for t in self.thetas):
            raise ValueError("every theta must lie in (0, 90) deg")
        if self.loops < 1:
            raise ValueError("loops must be >= 1")
        if not self.seeds:
            raise ValueError("seeds must not be empty")


@dataclass(frozen=True)
class ThetaResult:
    theta: float
    total_j: float
    per_loop_j: tuple
    per_loop: BoxStats | None
    tack_energy_j: float
    tack_count: float
    duration_s: float
    fit_slope_w: float
    fit_intercept_j: float
    fit_r2: float
    timed_out: bool
    scenarios: tuple


@dataclass(frozen=True)
class SweepReport:
    rows: tuple  # ThetaResult, ascending theta
    best_theta: float
    savings: dict  # theta -> percent above the best; empty for a single theta

    def row(self, theta: float) -> ThetaResult:
        for r in self.rows:
            if r.theta == float(theta):
                return r
        raise KeyError(theta)


def _nanmean(xs) -> float:
    xs = [x for x in xs if not math.isnan(x)]
    return sum(xs) / len(xs) if xs else math.nan


def aggregate(summaries: Sequence[ScenarioSummary]) -> SweepReport:
    """Seed-mean statistics per theta, the argmin theta and savings vs the best."""
    by_theta: dict[float, list[ScenarioSummary]] = {}
    for s in summaries:
        by_theta.setdefault(s.theta, []).append(s)
    rows = []
    for theta in sorted(by_theta):
        group = sorted(by_theta[theta], key=lambda s: s.seed)
        per_loop = tuple(e for s in group for e in s.per_loop_j)
        fits = [s.fit for s in group if s.fit is not None]
        rows.append(ThetaResult(
            theta=theta,
            total_j=sum(s.total_j for s in group) / len(group),
            per_loop_j=per_loop,
            per_loop=box_stats(per_loop) if per_loop else None,
            tack_energy_j=_nanmean(s.tack_energy_j for s in group),
            tack_count=_nanmean(s.tacks_per_loop for s in group),
            duration_s=sum(s.duration_s for s in group) / len(group),
            fit_slope_w=_nanmean(f.slope for f in fits),
            fit_intercept_j=_nanmean(f.intercept for f in fits),
            fit_r2=_nanmean(f.r2 for f in fits),
            timed_out=any(s.timed_out for s in group),
            scenarios=tuple(group),
        ))
    # ties go to the smaller theta: rows are ascending and min() keeps the first
    best = min(rows, key=lambda r: r.total_j)
    savings = {}
    if len(rows) > 1:
        savings = {r.theta: savings_percent(best.total_j, r.total_j) for r in rows}
    return SweepReport(tuple(rows), best.theta, savings)


Scenario = Callable[[RunConfig, float, int, int], ScenarioSummary]


def run_sweep(spec: SweepSpec, scenario: Scenario = cruise_scenario,
              workers: int | None = None) -> SweepReport:
    """Run every (theta, seed) scenario and aggregate.

    With ``workers`` > 1 scenarios fan out to a process pool; results do not
    depend on execution order.
    """
    jobs = [(spec.config, th, spec.loops, sd) for th in spec.thetas for sd in spec.seeds]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(scenario, *zip(*jobs)))
    else:
        results = [scenario(*j) for j in jobs]
    return aggregate(results)
