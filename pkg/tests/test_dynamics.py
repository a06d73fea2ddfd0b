import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmsim import AgentState, SimulationHalt, integrate, saturate

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
vec3 = st.tuples(finite, finite, finite).map(lambda t: np.array(t))


def test_saturate_in_range_unchanged():
    u = np.array([1.0, 0.0, 0.0])
    out = saturate(u, 2.0)
    assert np.array_equal(out, u)


def test_saturate_zero_vector():
    assert np.array_equal(saturate(np.zeros(3), 0.1), np.zeros(3))


def test_saturate_scales_preserving_direction():
    # |(3,4,0)| = 5, scale by 2.5/5 = 0.5 exactly
    out = saturate(np.array([3.0, 4.0, 0.0]), 2.5)
    assert out.tolist() == [1.5, 2.0, 0.0]


def test_saturate_rejects_bad_vmax():
    with pytest.raises(ValueError):
        saturate(np.ones(3), 0.0)


@settings(max_examples=300, deadline=None)
@given(u=vec3, v_max=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False))
def test_saturate_bound_and_idempotence(u, v_max):
    out = saturate(u, v_max)
    assert float(out @ out) <= v_max * v_max
    again = saturate(out, v_max)
    assert np.array_equal(again, out)


def test_integrate_zero_velocity_fixed_point():
    s = AgentState(0, np.array([1.0, 2.0, 3.0]), np.zeros(3))
    out = integrate(s, np.zeros(3), 0.02)
    assert np.array_equal(out.position, s.position)


def test_integrate_hand_euler_step():
    s = AgentState(0, np.zeros(3), np.zeros(3))
    out = integrate(s, np.array([1.0, 2.0, 0.0]), 0.5)
    assert out.position.tolist() == [0.5, 1.0, 0.0]
    assert out.velocity.tolist() == [1.0, 2.0, 0.0]


def test_integrate_two_half_steps_equal_one_full():
    # binary-exact values so float addition is associative here
    u = np.array([1.0, -2.0, 0.5])
    s = AgentState(0, np.zeros(3), np.zeros(3))
    twice = integrate(integrate(s, u, 0.25), u, 0.25)
    once = integrate(s, u, 0.5)
    assert np.array_equal(twice.position, once.position)


def test_integrate_halts_on_nan():
    s = AgentState(3, np.array([np.nan, 0.0, 0.0]), np.zeros(3))
    with pytest.raises(SimulationHalt) as err:
        integrate(s, np.zeros(3), 0.02)
    assert err.value.agent == 3
    assert err.value.phase == "Integrate"


def test_integrate_rejects_nonpositive_dt():
    s = AgentState(0, np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError):
        integrate(s, np.zeros(3), 0.0)


@settings(max_examples=200, deadline=None)
@given(pos=vec3, u=vec3, v_max=st.floats(min_value=0.1, max_value=10.0),
       dt=st.floats(min_value=1e-3, max_value=0.1))
def test_per_tick_displacement_bounded(pos, u, v_max, dt):
    s = AgentState(0, pos, np.zeros(3))
    out = integrate(s, saturate(u, v_max), dt)
    step = float(np.linalg.norm(out.position - pos))
    # epsilon absorbs float cancellation when |pos| dwarfs the step
    assert step <= v_max * dt + 1e-12 * (1.0 + float(np.linalg.norm(pos)))
