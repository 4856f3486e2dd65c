"""Electrical power model, trapezoidal energy ledger and energy-time line fit."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PowerModel:
    base_power: float = 2.5  # W, electronics with motors off
    motor_power: float = 81.0  # W per running motor
    battery_voltage: float = 8.1  # V

    def __post_init__(self):
        if not self.base_power > 0:
            raise ValueError("base_power must be positive")
        if self.motor_power < 0:
            raise ValueError("motor_power must be >= 0")
        if not 7.8 <= self.battery_voltage <= 8.4:
            raise ValueError("battery_voltage must lie in [7.8, 8.4] V")

    def current(self, power: float) -> float:
        return power / self.battery_voltage


def instant_power(pm: PowerModel, motors_on: int) -> float:
    if motors_on not in (0, 1, 2):
        raise ValueError(f"motors_on must be 0, 1 or 2, got {motors_on}")
    return pm.base_power + motors_on * pm.motor_power


@dataclass(frozen=True)
class EnergySample:
    t: float
    power: float
    cumulative: float


@dataclass
class EnergyLedger:
    """Append-only power log with running trapezoidal energy.

    ``tack_windows`` hold the (start, end) support of each tack's motor
    power under linear interpolation between samples.
    """

    base_power: float = 2.5
    times: list = field(default_factory=list)
    powers: list = field(default_factory=list)
    cumulative: list = field(default_factory=list)
    motors: list = field(default_factory=list)
    loop_index: list = field(default_factory=list)
    loop_marks: list = field(default_factory=list)
    tack_windows: list = field(default_factory=list)
    assist_windows: list = field(default_factory=list)

    def record(self, t: float, power: float, motors_on: int = 0, loop: int = 0) -> None:
        if power < 0:
            raise ValueError("power must be >= 0")
        if self.times:
            if t <= self.times[-1]:
                raise ValueError("samples must be strictly increasing in time")
            c = self.cumulative[-1] + 0.5 * (self.powers[-1] + power) * (t - self.times[-1])
        else:
            c = 0.0
        self.times.append(t)
        self.powers.append(power)
        self.cumulative.append(c)
        self.motors.append(motors_on)
        self.loop_index.append(loop)

    @property
    def samples(self) -> list[EnergySample]:
        return [EnergySample(*s) for s in zip(self.times, self.powers, self.cumulative)]

    @property
    def total(self) -> float:
        return self.cumulative[-1] if self.cumulative else 0.0

    @property
    def duration(self) -> float:
        return self.times[-1] - self.times[0] if self.times else 0.0

    def _cum_at(self, t: float) -> float:
        ts = self.times
        k = bisect.bisect_right(ts, t) - 1
        if k >= len(ts) - 1:
            return self.cumulative[-1]
        p0 = self.powers[k]
        p1 = self.powers[k + 1]
        h = t - ts[k]
        pt = p0 + (p1 - p0) * h / (ts[k + 1] - ts[k])
        return self.cumulative[k] + 0.5 * (p0 + pt) * h


def integrate(ledger: EnergyLedger, t0: float, t1: float) -> float:
    """Trapezoidal energy (J) between ``t0`` and ``t1``; power is linear between samples."""
    if not ledger.times:
        raise ValueError("ledger has no samples")
    if t0 > t1:
        raise ValueError("t0 must not exceed t1")
    if t0 < ledger.times[0] or t1 > ledger.times[-1]:
        raise ValueError(
            f"interval [{t0}, {t1}] outside samples "
            f"[{ledger.times[0]}, {ledger.times[-1]}]"
        )
    if t0 == t1:
        return 0.0
    return ledger._cum_at(t1) - ledger._cum_at(t0)


def per_loop_energy(ledger: EnergyLedger) -> list[float]:
    """Energy of each completed loop; the first loop starts at the first sample."""
    if not ledger.loop_marks:
        raise ValueError("ledger has no loop marks")
    edges = [ledger.times[0]] + list(ledger.loop_marks)
    return [integrate(ledger, a, b) for a, b in zip(edges, edges[1:])]


def tacking_energy(ledger: EnergyLedger) -> float:
    """Mean motor energy (J) spent per tack window."""
    if not ledger.tack_windows:
        raise ValueError("ledger has no tack windows")
    e = [integrate(ledger, a, b) - ledger.base_power * (b - a) for a, b in ledger.tack_windows]
    return sum(e) / len(e)


@dataclass(frozen=True)
class EnergyFit:
    slope: float  # W
    intercept: float  # J
    r2: float


def fit_line(t, e) -> EnergyFit:
    """Ordinary least squares of energy on time."""
    t = np.asarray(t, dtype=float)
    e = np.asarray(e, dtype=float)
    if t.size != e.size:
        raise ValueError("t and e must have equal length")
    if t.size < 2:
        raise ValueError("need at least two samples")
    tm, em = t.mean(), e.mean()
    sxx = float(np.sum((t - tm) ** 2))
    if sxx == 0:
        raise ValueError("degenerate fit: all sample times are equal")
    slope = float(np.sum((t - tm) * (e - em))) / sxx
    intercept = float(em - slope * tm)
    ss_tot = float(np.sum((e - em) ** 2))
    ss_res = float(np.sum((e - (slope * t + intercept)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return EnergyFit(slope, intercept, r2)


def fit_energy_line(ledger: EnergyLedger) -> EnergyFit:
    return fit_line(ledger.times, ledger.cumulative)


def predict_energy(fit: EnergyFit, t: float) -> float:
    if t < 0:
        raise ValueError("t must be >= 0")
    return fit.slope * t + fit.intercept

