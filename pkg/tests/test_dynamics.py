import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shipnn.dynamics import (
    BodyVelocity,
    DivergenceError,
    EarthPose,
    ShipState,
    VesselParams,
    coriolis_matrix,
    derivative,
    rotation,
    step_rk4,
)

P = VesselParams()
speed = st.floats(-5.0, 5.0, allow_nan=False)
rate = st.floats(-6.0, 6.0, allow_nan=False)


def simulate(state, tau, h, n, p=P):
    for _ in range(n):
        state = step_rk4(state, tau, p, h)
    return state


def test_default_params():
    np.testing.assert_array_equal(P.M, np.diag([19.0, 35.2, 20.0]))
    np.testing.assert_array_equal(P.D, np.diag([6.3, 7.0, 2.0]))
    assert P.coriolis_coefficients == (19.0, 35.2)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"M": np.diag([19.0, -1.0, 20.0])},
        {"D": np.diag([6.3, 0.0, 2.0])},
        {"M": np.ones((3, 3))},
        {"D": np.eye(2)},
    ],
)
def test_params_reject_invalid_matrices(kwargs):
    with pytest.raises(ValueError):
        VesselParams(**kwargs)


def test_coriolis_zero_velocity():
    np.testing.assert_array_equal(coriolis_matrix((0.0, 0.0, 0.0), P), np.zeros((3, 3)))


def test_coriolis_hand_values():
    C = coriolis_matrix((1.0, 0.5, 0.1), P)
    assert C[0, 2] == pytest.approx(-17.6)
    assert C[1, 2] == pytest.approx(19.0)
    assert C[2, 0] == pytest.approx(17.6)
    assert C[2, 1] == pytest.approx(-19.0)
    assert np.count_nonzero(C) == 4


def test_coriolis_skew_symmetric_random():
    rng = np.random.default_rng(1)
    for nu in rng.uniform(-5, 5, size=(1000, 3)):
        C = coriolis_matrix(nu, P)
        assert np.all(C + C.T == 0.0)
        # exact rational evaluation of the float entries
        q = [Fraction(float(x)) for x in nu]
        form = sum(q[i] * Fraction(float(C[i, j])) * q[j] for i in range(3) for j in range(3))
        assert form == 0


@given(speed, speed, rate)
def test_coriolis_power_is_zero(u, v, r):
    nu = np.array([u, v, r])
    assert abs(nu @ coriolis_matrix(nu, P) @ nu) <= 1e-12 * (1 + np.abs(nu).max() ** 3)


def test_derivative_equilibrium():
    nu_dot, eta_dot = derivative(ShipState(), (0, 0, 0), P)
    np.testing.assert_array_equal(nu_dot, 0.0)
    np.testing.assert_array_equal(eta_dot, 0.0)


def test_derivative_surge_force():
    nu_dot, _ = derivative(ShipState(), (19.0, 0.0, 0.0), P)
    np.testing.assert_allclose(nu_dot, [1.0, 0.0, 0.0])


def test_derivative_kinematics_at_ninety_degrees():
    s = ShipState(BodyVelocity(1.0, 0.0, 0.0), EarthPose(0.0, 0.0, math.pi / 2))
    _, eta_dot = derivative(s, (0, 0, 0), P)
    np.testing.assert_allclose(eta_dot, [0.0, 1.0, 0.0], atol=1e-15)


@given(speed, speed, rate, st.floats(-10, 10), st.floats(-3, 3), st.floats(-3, 3), st.floats(-1, 1))
def test_derivative_matches_matrix_form(u, v, r, psi, tx, ty, tn):
    s = ShipState(BodyVelocity(u, v, r), EarthPose(0.0, 0.0, psi))
    nu = np.array([u, v, r])
    nu_dot, eta_dot = derivative(s, (tx, ty, tn), P)
    expected = np.linalg.solve(P.M, np.array([tx, ty, tn]) - coriolis_matrix(nu, P) @ nu - P.D @ nu)
    np.testing.assert_allclose(nu_dot, expected, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(eta_dot, rotation(psi) @ nu, rtol=1e-12, atol=1e-12)


@given(st.floats(-100, 100))
def test_rotation_block_orthogonal(psi):
    R = rotation(psi)[:2, :2]
    np.testing.assert_allclose(R.T @ R, np.eye(2), atol=1e-12)


def test_rk4_equilibrium_only_advances_time():
    s = step_rk4(ShipState(), (0, 0, 0), P, 0.37)
    assert s.nu == (0, 0, 0) and s.eta == (0, 0, 0)
    assert s.t == pytest.approx(0.37)


def test_rk4_surge_decay_analytic():
    s = simulate(ShipState(BodyVelocity(1.0, 0.0, 0.0)), (0, 0, 0), 0.01, 100)
    assert s.nu.u == pytest.approx(math.exp(-6.3 / 19), abs=1e-6)
    assert abs(s.nu.u - 0.7177) < 1e-4
    assert s.nu.v == 0.0 and s.nu.r == 0.0


def _order(h, reference):
    s0 = ShipState(BodyVelocity(1.0, 0.0, 0.0))
    e1 = abs(simulate(s0, (0, 0, 0), h, round(1 / h)).nu.u - reference)
    e2 = abs(simulate(s0, (0, 0, 0), h / 2, round(2 / h)).nu.u - reference)
    return math.log2(e1 / e2)


def test_rk4_order_against_closed_form():
    assert 3.7 <= _order(0.01, math.exp(-6.3 / 19)) <= 4.3


def test_rk4_order_against_fine_reference_run():
    # at h = 0.01 the error is ~1e-13, the same size as the fine run's own
    # roundoff, so the fine-reference comparison uses h = 0.1
    ref = simulate(ShipState(BodyVelocity(1.0, 0.0, 0.0)), (0, 0, 0), 1e-5, 100_000).nu.u
    assert 3.7 <= _order(0.1, ref) <= 4.3


def test_energy_strictly_decreases_without_force():
    s = ShipState(BodyVelocity(0.8, -0.3, 0.4))
    e = P.kinetic_energy(s.nu)
    for _ in range(2000):
        s = step_rk4(s, (0, 0, 0), P, 0.01)
        e_new = P.kinetic_energy(s.nu)
        assert e_new < e
        e = e_new


def test_frame_consistency_under_rotation():
    rng = np.random.default_rng(3)
    taus = rng.uniform(-0.5, 0.5, size=(300, 3))
    nu0 = BodyVelocity(0.2, 0.05, 0.01)
    delta = 0.7
    a = ShipState(nu0, EarthPose(0.0, 0.0, 0.3))
    b = ShipState(nu0, EarthPose(0.0, 0.0, 0.3 + delta))
    R = rotation(delta)[:2, :2]
    path = 0.0
    for tau in taus:
        prev = np.array(a.eta[:2])
        a = step_rk4(a, tau, P, 0.01)
        b = step_rk4(b, tau, P, 0.01)
        path += np.hypot(*(np.array(a.eta[:2]) - prev))
        np.testing.assert_allclose(R @ np.array(a.eta[:2]), b.eta[:2], atol=1e-8 * max(path, 1.0))
        assert b.eta.psi - a.eta.psi == pytest.approx(delta, abs=1e-12)


def test_divergence_on_implausible_speed():
    with pytest.raises(DivergenceError):
        step_rk4(ShipState(BodyVelocity(4.99, 0, 0)), (1e4, 0, 0), P, 0.1)


def test_divergence_on_non_finite_force():
    with pytest.raises(DivergenceError):
        step_rk4(ShipState(), (math.nan, 0, 0), P, 0.01)


def test_step_rejects_non_positive_timestep():
    with pytest.raises(ValueError):
        step_rk4(ShipState(), (0, 0, 0), P, 0.0)


def test_state_rejects_negative_time():
    with pytest.raises(ValueError):
        ShipState(t=-1.0)


def test_heading_kept_unwrapped():
    s = ShipState(BodyVelocity(0, 0, 1.0))
    s = simulate(s, (0, 0, 2.0), 0.01, 1000)
    assert s.eta.psi > 2 * math.pi
