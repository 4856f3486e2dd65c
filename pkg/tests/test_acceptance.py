"""Acceptance criteria 1-9, one test each.

A PASS/FAIL line per criterion is printed at the end of the pytest run
(see ``conftest.py``).  Run this file directly for just that report::

    python tests/test_acceptance.py
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from sailcruise import records
from sailcruise.config import RunConfig
from sailcruise.energy import (EnergyLedger, fit_energy_line, integrate,
                               predict_energy)
from sailcruise.experiment import (DEFAULT_THETAS, ScenarioSummary, SweepSpec,
                                   heading_step, run_cruise, run_sweep,
                                   savings_percent)
from sailcruise.helm import PidController, PidGains, pid_step
from sailcruise.mission import Phase
from sailcruise.sail_aero import SensorForce, forward_force
from sailcruise.vessel import wind_sample

acceptance = pytest.mark.acceptance

PUBLISHED_TOTALS = (1275.0, 1172.0, 1344.0, 1376.0, 1446.0)
PUBLISHED_PER_LOOP = (255.0, 234.0, 269.0, 275.0, 289.0)


@pytest.fixture(scope="module")
def default_sweep():
    t0 = time.perf_counter()
    rep = run_sweep(SweepSpec(thetas=DEFAULT_THETAS, loops=5, seeds=(1, 2, 3, 4, 5)))
    return rep, time.perf_counter() - t0


@acceptance(1, "published totals arithmetic")
def test_ac1_published_totals():
    totals = dict(zip(DEFAULT_THETAS, PUBLISHED_TOTALS))
    fake = [ScenarioSummary(th, 1, e, (e / 5,) * 5, 0.0, 4.0, 100.0, None) for th, e in totals.items()]
    rep = run_sweep(SweepSpec(seeds=(1,)), scenario=lambda c, th, n, s: fake[DEFAULT_THETAS.index(th)])
    for row, want in zip(rep.rows, PUBLISHED_PER_LOOP):
        assert abs(row.per_loop.mean - want) <= 0.5
    assert rep.best_theta == 40.0
    assert savings_percent(1172, 1275) == pytest.approx(8.79, abs=0.05)
    assert savings_percent(1172, 1446) == pytest.approx(23.38, abs=0.05)
    assert min(rep.savings.values()) == 0.0
    assert max(rep.savings.values()) == pytest.approx(23.38, abs=0.05)


@acceptance(2, "optimal heading angle at 40 deg")
def test_ac2_optimal_theta(default_sweep):
    rep, secs = default_sweep
    e = {r.theta: r.total_j for r in rep.rows}
    assert not any(r.timed_out for r in rep.rows)
    assert rep.best_theta == 40.0, e
    assert e[35.0] > e[40.0], e
    assert e[40.0] < e[45.0] < e[50.0] < e[55.0], e
    assert secs < 60.0


@acceptance(3, "tacking energy non-decreasing in theta")
def test_ac3_tack_energy_monotone(default_sweep):
    rep, _ = default_sweep
    tk = [r.tack_energy_j for r in rep.rows]
    assert all(a <= b for a, b in zip(tk, tk[1:])), tk


@acceptance(4, "fewer tacks per loop at 35/40 than at 45/50/55")
def test_ac4_tack_counts(default_sweep):
    rep, _ = default_sweep
    n = {r.theta: r.tack_count for r in rep.rows}
    assert max(n[35.0], n[40.0]) < min(n[45.0], n[50.0], n[55.0]), n


@acceptance(5, "PID closed-loop step response")
@pytest.mark.parametrize("heading0", [0.0, 180.0])
def test_ac5_pid_step(heading0):
    cfg = RunConfig()
    assert (cfg.pid.kp, cfg.pid.ki, cfg.pid.kd) == (0.2, 0.1, 0.01)
    setting = 90.0
    r = heading_step(cfg, heading0, setting, speed=0.7, duration=30.0)
    err = np.array([(setting - h + 180.0) % 360.0 - 180.0 for h in r.heading])
    assert abs(err[0]) == 90.0
    t10 = r.t[np.argmax(np.abs(err) <= 10.0)]
    assert np.any(np.abs(err) <= 10.0) and t10 <= 5.0
    # overshoot: how far the heading goes past the setting
    overshoot = max(0.0, float(np.max(-np.sign(err[0]) * err)))
    assert overshoot <= 5.0
    assert np.all(np.abs(err[r.t >= 10.0]) <= 2.0)


@acceptance(6, "formula oracles")
def test_ac6_formula_oracles():
    rng = np.random.default_rng(2024)
    for th, ph, fx, fy in rng.uniform([-7, -7, -5, -5], [7, 7, 5, 5], size=(10_000, 4)):
        rot = np.array([[math.cos(ph), math.sin(ph)], [-math.sin(ph), math.cos(ph)]])
        want = float((rot @ np.array([fx, fy])) @ np.array([math.cos(th), math.sin(th)]))
        assert abs(forward_force(th, ph, SensorForce(fx, fy)) - want) <= 1e-12

    c = PidController(PidGains(0.2, 0.1, 0.01, integral_limit=1e3))
    errs = rng.uniform(-20, 20, size=200)
    dt = 0.05
    for k, e in enumerate(errs):
        u = pid_step(c, float(e), dt)
        d = 0.0 if k == 0 else (e - errs[k - 1]) / dt
        want = 0.2 * e + 0.1 * dt * float(np.sum(errs[:k + 1])) + 0.01 * d
        assert abs(u - want) <= 1e-9

    led = EnergyLedger()
    for k in range(401):
        led.record(k * 0.25, 7.0)
    assert integrate(led, 0.0, 100.0) == 700.0
    assert integrate(led, 12.5, 40.25) == 7.0 * 27.75

    knots_t, knots_p = [0.0, 10.0, 25.0, 60.0], [2.5, 18.5, 2.5, 10.5]
    led = EnergyLedger()
    for t in np.arange(0.0, 60.0 + 1e-9, 0.05):
        led.record(float(t), float(np.interp(t, knots_t, knots_p)))
    exact = sum(0.5 * (p0 + p1) * (t1 - t0)
                for t0, t1, p0, p1 in zip(knots_t, knots_t[1:], knots_p, knots_p[1:]))
    assert integrate(led, 0.0, 60.0) == pytest.approx(exact, rel=1e-9)


@acceptance(7, "energy line predicts a run twice as long")
def test_ac7_energy_prediction():
    cfg = RunConfig()
    short = run_cruise(cfg, 40.0, 5, 1)
    assert not short.timed_out
    fit = fit_energy_line(short.ledger)
    horizon = 2.0 * short.duration
    long = run_cruise(cfg.replace("run", timeout=4.0 * horizon), 40.0, 40, 1)
    assert long.ledger.times[-1] >= horizon
    actual = integrate(long.ledger, 0.0, horizon)
    assert abs(predict_energy(fit, horizon) - actual) / actual <= 0.05


@acceptance(8, "byte-identical logs for identical config and seed")
def test_ac8_determinism(tmp_path):
    for tag in ("a", "b"):
        res = run_cruise(RunConfig(), 45.0, 2, 11)
        records.write_trajectory(tmp_path / f"traj_{tag}.csv", res)
        records.write_energy(tmp_path / f"energy_{tag}.csv", res.ledger)
    for name in ("traj", "energy"):
        a = (tmp_path / f"{name}_a.csv").read_bytes()
        assert a == (tmp_path / f"{name}_b.csv").read_bytes()
        assert len(a) > 1000


LEGAL_NEXT = {
    Phase.TACK_RIGHT.value: {Phase.TACK_LEFT.value, Phase.RETURN_TO_LEFT.value},
    Phase.TACK_LEFT.value: {Phase.TACK_RIGHT.value, Phase.RETURN_TO_LEFT.value},
    Phase.RETURN_TO_LEFT.value: {Phase.RETURN_TO_START.value},
    Phase.RETURN_TO_START.value: {Phase.TACK_RIGHT.value, Phase.DONE.value},
}


@acceptance(9, "invariants over 1e5 randomized steps")
def test_ac9_invariants():
    rng = np.random.default_rng(99)
    base = RunConfig()
    lim = base.pid.integral_limit
    steps = violations = 0
    while steps < 100_000:
        seed = int(rng.integers(0, 2**32))
        theta = float(rng.uniform(38.0, 60.0))
        cfg = base.replace("wind", gust_amplitude=float(rng.uniform(0.0, 0.3)))
        res = run_cruise(cfg, theta, int(rng.integers(1, 4)), seed)
        w = dataclasses.replace(cfg.wind, seed=seed)
        lo, hi = w.mean_speed - w.gust_amplitude, w.mean_speed + w.gust_amplitude
        prev = res.trajectory[0].phase
        for row in res.trajectory:
            violations += abs(row.rudder_deg) > cfg.pid.clip_limit
            violations += not lo <= wind_sample(w, row.t) <= hi
            if row.phase != prev:
                violations += row.phase not in LEGAL_NEXT[prev]
                prev = row.phase
        violations += bool(np.any(np.diff(res.ledger.cumulative) < 0))
        steps += len(res.trajectory)

    # the controller's integral under arbitrary error sequences
    c = PidController(PidGains(integral_limit=lim))
    for e, dt in zip(rng.normal(0, 200, 100_000), rng.uniform(0.01, 0.5, 100_000)):
        pid_step(c, float(e), float(dt))
        violations += abs(c.integral) > lim
    assert violations == 0


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
