import numpy as np
import pytest

from shellkit import flow, kinematics, sampling


def test_initial_slope_at_reference(chart, rng):
    x = chart.interior_point(rng)
    st = kinematics.strain_state(kinematics.reference_config(chart), chart, x)
    fr = st.frame0
    dE = fr.c @ (st.Ee + fr.a)
    assert np.allclose(dE, fr.c, atol=1e-9)     # c a = c


def test_zero_time_returns_initial(chart, rng):
    st = sampling.random_state(chart, rng, amplitude=0.1)
    traj = flow.integrate_flow(st, 0.0, 16)
    assert np.allclose(traj.Ee[-1], st.Ee, atol=0)
    assert np.allclose(traj.Ke[-1], st.Ke, atol=0)


def test_closed_form_oracle(chart, rng):
    st = sampling.random_state(chart, rng, amplitude=0.2)
    s_end = 1.3
    traj = flow.integrate_flow(st, s_end, 256)
    Ee_ref, Ke_ref = flow.closed_form_flow(st, s_end)
    assert np.allclose(traj.Ee[-1], Ee_ref, atol=1e-9)
    assert np.allclose(traj.Ke[-1], Ke_ref, atol=1e-9)


def test_two_pi_periodicity(chart, rng):
    st = sampling.random_state(chart, rng, amplitude=0.2)
    traj = flow.integrate_flow(st, 2 * np.pi, 256)
    assert np.abs(traj.Ee[-1] - st.Ee).max() < 1e-7
    assert np.abs(traj.Ke[-1] - st.Ke).max() < 1e-7


def test_first_integrals_constant_reference(chart, rng):
    # the reference state is not a fixed point of the flow (its tangential
    # rows still rotate), so the invariants are constant only up to the
    # integrator error; 512 steps put that well below 1e-9
    x = chart.interior_point(rng)
    st = kinematics.strain_state(kinematics.reference_config(chart), chart, x)
    traj = flow.integrate_flow(st, 2 * np.pi, 512)
    for name, d in flow.first_integral_drift(traj).items():
        assert d < 1e-9, name


def test_first_integrals_constant_random(chart, rng):
    st = sampling.random_state(chart, rng, amplitude=0.25)
    traj = flow.integrate_flow(st, 2 * np.pi, 256)
    for name, d in flow.first_integral_drift(traj).items():
        assert d < 1e-7, name


def test_fourth_order_convergence(chart, rng):
    # the trajectory's periodic-return error carries the integrator's phase
    # error and converges at fourth order; the invariant drift is blind to
    # the phase and rides only on the amplitude error, which is one order
    # better (per-step amplification 1 - h^6/144), so its ratio is ~32
    st = sampling.random_state(chart, rng, amplitude=0.25)

    def return_error(steps):
        traj = flow.integrate_flow(st, 2 * np.pi, steps)
        return max(np.abs(traj.Ee[-1] - st.Ee).max(),
                   np.abs(traj.Ke[-1] - st.Ke).max())

    r1, r2 = return_error(96), return_error(192)
    assert 12 < r1 / r2 < 20

    d1 = max(flow.first_integral_drift(
        flow.integrate_flow(st, 2 * np.pi, 96)).values())
    d2 = max(flow.first_integral_drift(
        flow.integrate_flow(st, 2 * np.pi, 192)).values())
    assert d1 / d2 > 12      # at least fourth order (superconvergent here)


def test_planar_row_negative_control(chart, rng):
    # tangential rows rotate with the flow; only the invariant combinations
    # stay fixed
    st = sampling.random_state(chart, rng, amplitude=0.2)
    traj = flow.integrate_flow(st, 2 * np.pi, 128)
    assert flow.planar_row_drift(traj) > 1e-3


def test_planar_kernel_preserved(chart, rng):
    st = sampling.random_state(chart, rng, amplitude=0.2)
    traj = flow.integrate_flow(st, 2 * np.pi, 128)
    n = st.frame0.normal
    assert np.abs(traj.Ee @ n).max() < 1e-9
    assert np.abs(traj.Ke @ n).max() < 1e-9


def test_step_count_validation(chart, rng):
    st = sampling.random_state(chart, rng)
    with pytest.raises(ValueError):
        flow.integrate_flow(st, 1.0, 4)
