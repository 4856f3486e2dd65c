import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sailcruise.sail_aero import analytic_plan
from sailcruise.vessel import (ActuatorCommand, Arena, Bar, BoatState,
                               Direction, VesselParams, WindField, crossed,
                               relative_heading, sail_force, step, wind_sample)

PLAN = analytic_plan(1.3)
CALM = WindField(gust_amplitude=0.0, heading_noise_sigma=0.0)
STILL = VesselParams(leeway_coeff=0.0)


class TestWind:
    def test_no_gusts_is_constant(self):
        w = WindField(gust_amplitude=0.0)
        assert {wind_sample(w, t) for t in np.linspace(0, 100, 57)} == {1.3}

    def test_repeatable(self):
        w = WindField(seed=42)
        a = [wind_sample(w, t) for t in np.arange(0, 50, 0.37)]
        b = [wind_sample(WindField(seed=42), t) for t in np.arange(0, 50, 0.37)]
        assert a == b

    def test_seeds_differ(self):
        assert wind_sample(WindField(seed=1), 3.3) != wind_sample(WindField(seed=2), 3.3)

    def test_band_exhaustive(self):
        w = WindField(mean_speed=1.3, gust_amplitude=0.1, seed=9)
        s = np.array([wind_sample(w, t) for t in np.arange(100_000) * 0.05])
        assert s.min() >= 1.2 and s.max() <= 1.4
        assert s.max() - s.min() > 0.1  # the gusts actually move

    def test_smooth(self):
        w = WindField(seed=3)
        s = np.array([wind_sample(w, t) for t in np.arange(0, 40, 0.01)])
        assert np.max(np.abs(np.diff(s))) < 0.01

    def test_negative_time(self):
        with pytest.raises(ValueError):
            wind_sample(WindField(), -1.0)

    @pytest.mark.parametrize("kw", [dict(mean_speed=0.0), dict(gust_amplitude=-0.1),
                                    dict(mean_speed=0.5, gust_amplitude=0.5),
                                    dict(heading_noise_sigma=-1.0)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            WindField(**kw)


class TestStep:
    def test_fixed_point(self):
        s = BoatState(3.0, 4.0, 0.0, 0.0)
        assert step(s, ActuatorCommand(), STILL, CALM, PLAN, 0.05) == s

    def test_stall_freezes_position(self):
        s = BoatState(3.0, 4.0, 20.0, 0.0)
        for k in range(200):
            s = step(s, ActuatorCommand(sail_phi=150.0), STILL, CALM, PLAN, 0.05, t=k * 0.05)
        assert (s.x, s.y, s.speed) == (3.0, 4.0, 0.0)

    def test_no_sail_force_in_no_go(self):
        for h in (-36.9, -10.0, 0.0, 25.0, 36.9):
            for phi in range(0, 360, 15):
                s = BoatState(4, 6, h, 0.5)
                assert sail_force(s, ActuatorCommand(sail_phi=phi), STILL, CALM, PLAN, 1.3) == 0.0

    def test_free_acceleration_first_order(self):
        # motors only, no drag, heading inside the no-go cone so the sail is silent
        p = VesselParams(drag_coeff=0.0, leeway_coeff=0.0, motor_yaw_rate=0.0)
        cmd = ActuatorCommand(motor_left=True, motor_right=True)
        a = 2 * p.motor_thrust / p.mass

        def err(dt):
            s = BoatState(4.0, 0.0, 0.0, 0.1)
            n = round(1.0 / dt)
            for k in range(n):
                s = step(s, cmd, p, CALM, PLAN, dt, t=k * dt, arena=Arena(8, 1e6))
            # Euler is exact for velocity here; position lags by a*t*dt/2
            assert s.speed == pytest.approx(0.1 + a, abs=1e-12)
            return abs(s.y - (0.1 + 0.5 * a))

        e1, e2 = err(0.02), err(0.01)
        assert e2 / e1 == pytest.approx(0.5, rel=1e-6)

    def test_coasting_decays(self):
        p = VesselParams(leeway_coeff=0.0)
        s = BoatState(4.0, 0.0, 0.0, 1.0)
        speeds = []
        for k in range(300):
            s = step(s, ActuatorCommand(), p, CALM, PLAN, 0.05, arena=Arena(8, 1e6))
            speeds.append(s.speed)
        assert all(b < a for a, b in zip(speeds, speeds[1:]))

    def test_negative_rudder_turns_clockwise(self):
        s = BoatState(4, 6, 90.0, 0.7)
        out = step(s, ActuatorCommand(rudder=-10.0, sail_phi=305.0), STILL, CALM, PLAN, 0.05)
        assert out.heading > 90.0

    def test_left_motor_turns_clockwise(self):
        s = BoatState(4, 6, 90.0, 0.0)
        out = step(s, ActuatorCommand(motor_left=True), STILL, CALM, PLAN, 0.05)
        assert out.heading == pytest.approx(90.0 + STILL.motor_yaw_rate * 0.05)

    def test_leeway_drifts_downwind(self):
        p = VesselParams(leeway_coeff=0.1)
        s = step(BoatState(4, 6, 0.0, 0.0), ActuatorCommand(), p, CALM, PLAN, 0.1)
        assert s.y == pytest.approx(6 - 0.1 * 1.3 * 0.1)
        assert s.x == pytest.approx(4.0)

    def test_wall_clamps_and_stops(self):
        s = BoatState(7.99, 6.0, 90.0, 1.0)
        out = step(s, ActuatorCommand(), STILL, CALM, PLAN, 0.1)
        assert out.x == 8.0 and out.speed == 0.0

    @pytest.mark.parametrize("dt", [0.0, -0.1, 0.51])
    def test_dt_range(self, dt):
        with pytest.raises(ValueError):
            step(BoatState(1, 1, 0, 0), ActuatorCommand(), STILL, CALM, PLAN, dt)

    def test_deterministic(self):
        def run():
            rng = np.random.default_rng([5, 1])
            s = BoatState(5.5, 1.5, 40.0, 0.7)
            w = WindField(seed=5)
            out = []
            for k in range(400):
                cmd = ActuatorCommand(rudder=float(rng.uniform(-40, 40)), sail_phi=150.0)
                s = step(s, cmd, VesselParams(), w, PLAN, 0.05, t=k * 0.05, noise=float(rng.standard_normal()))
                out.append(s)
            return out
        assert run() == run()

    @given(st.floats(0, 8), st.floats(0, 12), st.floats(-180, 180), st.floats(0, 3),
           st.floats(-40, 40), st.floats(0, 359), st.booleans(), st.booleans(),
           st.floats(-4, 4))
    def test_state_invariants(self, x, y, h, v, rud, phi, ml, mr, noise):
        s = BoatState(x, y, h, v)
        cmd = ActuatorCommand(rud, phi, ml, mr)
        out = step(s, cmd, VesselParams(), WindField(seed=1), PLAN, 0.05, t=1.0, noise=noise)
        assert out.speed >= 0
        assert 0 <= out.x <= 8 and 0 <= out.y <= 12
        assert -180 < out.heading <= 180


def test_relative_heading():
    assert relative_heading(-170.0, WindField(from_direction=20.0)) == pytest.approx(170.0)


def test_state_validation():
    with pytest.raises(ValueError):
        BoatState(0, 0, 0, -0.1)
    assert BoatState(0, 0, 540.0, 0).heading == 180.0


@pytest.mark.parametrize("kw", [dict(mass=0.0), dict(drag_coeff=-1.0), dict(no_go_half_angle=90.0)])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        VesselParams(**kw)


class TestCrossed:
    def test_beyond(self):
        assert crossed(BoatState(7.9, 3, 0, 0), Bar.RIGHT_X, 7.5, Direction.INCREASING)

    def test_inclusive(self):
        assert crossed(BoatState(1, 10.0, 0, 0), Bar.UPPER_Y, 10.0, Direction.INCREASING)

    @given(st.floats(0, 8), st.floats(0, 12), st.sampled_from(list(Bar)),
           st.floats(-1, 13), st.sampled_from(list(Direction)))
    def test_comparison_oracle(self, x, y, bar, value, direction):
        coord = y if bar in (Bar.UPPER_Y, Bar.LOWER_Y) else x
        expect = coord >= value if direction is Direction.INCREASING else coord <= value
        assert crossed(BoatState(x, y, 0, 0), bar, value, direction) is expect
