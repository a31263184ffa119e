import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frax.constants import FracParams, constants_for
from frax.errors import CollisionError, DomainError, StepSizeError
from frax.vortex import (
    StepperConfig,
    VortexState,
    angular_speed_disk,
    disk_robin,
    disk_robin_gradient_boundary,
    disk_robin_hessian,
    disk_velocity,
    invariants,
    perp,
    rotate,
    run_trajectory,
    single_vortex_in_disk,
    step,
    velocity_field,
)

P = FracParams(0.5, 2)
THREE = VortexState(0.0, [[1.0, 0.0], [-0.5, 0.8], [-0.3, -0.9]], (1.0, 0.7, 1.3))


def numerical_grad_h(state, p, h=1e-6):
    g = np.zeros_like(state.positions)
    for i in range(state.n):
        for k in range(2):
            plus = state.positions.copy()
            minus = state.positions.copy()
            plus[i, k] += h
            minus[i, k] -= h
            g[i, k] = (invariants(state.moved(0, plus), p).H - invariants(state.moved(0, minus), p).H) / (2 * h)
    return g


def test_state_validation_and_immutability():
    st_ = VortexState(0.0, [[0.0, 0.0], [1.0, 0.0]], (1.0, 2.0))
    with pytest.raises(ValueError):
        st_.positions[0, 0] = 3.0
    with pytest.raises(DomainError):
        VortexState(0.0, [[0.0, 0.0]], (1.0, 2.0))
    with pytest.raises(DomainError):
        VortexState(0.0, [[0.0, 0.0]], (0.0,))
    with pytest.raises(DomainError):
        StepperConfig(dt=0.0)
    with pytest.raises(DomainError):
        StepperConfig(method="euler")
    with pytest.raises(DomainError):
        invariants(st_, FracParams(0.5, 1))


def test_single_vortex_is_stationary():
    one = VortexState(0.0, [[0.3, -0.2]], (2.0,))
    assert np.all(velocity_field(one, P) == 0.0)
    nxt = step(one, StepperConfig(), P)
    np.testing.assert_array_equal(nxt.positions, one.positions)
    assert nxt.t == pytest.approx(1e-3)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75])
def test_equal_pair_speed(s):
    p = FracParams(s, 2)
    g, d = 1.7, 0.8
    pair = VortexState(0.0, [[0.0, 0.0], [d, 0.0]], (g, g))
    v = velocity_field(pair, p)
    b = constants_for(p).b_Ns
    speed = abs(g) * b * abs(2 * s - 2) * d ** (2 * s - 3)
    np.testing.assert_allclose(np.hypot(v[:, 0], v[:, 1]), speed, rtol=1e-14)
    np.testing.assert_allclose(v[0], -v[1], rtol=1e-14)
    assert abs(v[0] @ (pair.positions[1] - pair.positions[0])) < 1e-15


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75])
def test_velocity_is_symplectic_gradient(s):
    p = FracParams(s, 2)
    v = velocity_field(THREE, p)
    grad = numerical_grad_h(THREE, p)
    gam = np.asarray(THREE.strengths)[:, None]
    np.testing.assert_allclose(v, perp(grad) / gam, rtol=1e-7, atol=1e-9)
    assert abs(np.sum(gam * np.sum(grad * v, axis=1, keepdims=True))) < 1e-8


@pytest.mark.parametrize("s", [0.3, 0.75])
def test_velocity_homogeneity(s):
    p = FracParams(s, 2)
    lam = 1.7
    scaled = VortexState(0.0, lam * THREE.positions, THREE.strengths)
    np.testing.assert_allclose(velocity_field(scaled, p), lam ** (2 * s - 3) * velocity_field(THREE, p), rtol=1e-13)


def test_literal_flow_differs_by_factor():
    # the literal kernel drops the (2s-2) factor and uses exponent 3 - 2s
    s = 0.3
    p = FracParams(s, 2)
    d = 0.6
    pair = VortexState(0.0, [[0.0, 0.0], [d, 0.0]], (1.0, 1.0))
    ham = velocity_field(pair, p)
    lit = velocity_field(pair, p, flow="literal")
    ratio = np.hypot(*lit[0]) / np.hypot(*ham[0])
    assert ratio == pytest.approx(d / abs(2 * s - 2), rel=1e-13)
    with pytest.raises(DomainError):
        velocity_field(pair, p, flow="other")


def test_equal_pair_keeps_separation():
    pair = VortexState(0.0, [[-0.5, 0.0], [0.5, 0.0]], (1.0, 1.0))
    traj = run_trajectory(pair, StepperConfig(dt=1e-3), P, 10.0)
    seps = [np.hypot(*(st_.positions[1] - st_.positions[0])) for st_ in traj.states]
    assert max(abs(d - 1.0) for d in seps) <= 1e-8
    assert max(traj.drift().values()) <= 1e-6
    np.testing.assert_allclose(traj.final.positions.mean(axis=0), 0.0, atol=1e-12)


def test_dipole_translates_straight():
    dip = VortexState(0.0, [[-0.5, 0.0], [0.5, 0.0]], (1.0, -1.0))
    traj = run_trajectory(dip, StepperConfig(dt=1e-2), P, 5.0)
    steps = np.diff(np.array([st_.positions.mean(axis=0) for st_ in traj.states]), axis=0)
    ang = np.arctan2(steps[:, 1], steps[:, 0])
    assert np.max(np.abs(ang - ang[0])) <= 1e-6
    assert traj.drift()["M"] <= 1e-12


def test_translation_equivariance():
    cfg = StepperConfig(dt=1e-2)
    c = np.array([3.0, -1.5])
    a = run_trajectory(THREE, cfg, P, 2.0)
    b = run_trajectory(VortexState(0.0, THREE.positions + c, THREE.strengths), cfg, P, 2.0)
    np.testing.assert_allclose(b.final.positions - c, a.final.positions, atol=1e-11)


def test_rotation_equivariance():
    cfg = StepperConfig(dt=1e-2)
    th = math.pi / 3
    a = run_trajectory(rotate(THREE, th), cfg, P, 2.0)
    b = rotate(run_trajectory(THREE, cfg, P, 2.0).final, th)
    np.testing.assert_allclose(a.final.positions, b.positions, atol=1e-8)


@pytest.mark.parametrize("s", [0.3, 0.75])
def test_implicit_midpoint_conservation(s):
    traj = run_trajectory(THREE, StepperConfig(method="implicit_midpoint", dt=1e-3), FracParams(s, 2), 2.0)
    assert max(traj.drift().values()) <= 1e-8


def test_midpoint_step_size_error():
    pair = VortexState(0.0, [[-0.01, 0.0], [0.01, 0.0]], (1.0, 1.0))
    with pytest.raises(StepSizeError):
        step(pair, StepperConfig(method="implicit_midpoint", dt=1.0, fp_max_iter=5), P)


def test_time_reversal():
    cfg = StepperConfig(dt=1e-3)
    fwd = run_trajectory(THREE, cfg, P, 2.0)
    back = run_trajectory(VortexState(0.0, fwd.final.positions, tuple(-g for g in THREE.strengths)), cfg, P, 2.0)
    np.testing.assert_allclose(back.final.positions, THREE.positions, atol=1e-6)


def test_horizon_and_termination():
    traj = run_trajectory(THREE, StepperConfig(dt=0.3), P, 1.0)
    assert traj.final.t == pytest.approx(1.0, abs=1e-14)
    assert len(traj.states) == 5
    capped = run_trajectory(THREE, StepperConfig(dt=0.1, max_steps=3), P, 1.0)
    assert capped.termination == "max_steps" and len(capped.states) == 4
    with pytest.raises(DomainError):
        run_trajectory(THREE, StepperConfig(), P, 0.0)


def test_collision_detection():
    close = VortexState(0.0, [[0.0, 0.0], [1e-7, 0.0]], (1.0, 1.0))
    with pytest.raises(CollisionError):
        run_trajectory(close, StepperConfig(), P, 1.0)
    with pytest.raises(CollisionError):
        step(close, StepperConfig(), P)
    same = VortexState(0.0, [[0.0, 0.0], [0.0, 0.0]], (1.0, 1.0))
    with pytest.raises(CollisionError):
        velocity_field(same, P)


def test_trajectory_csv():
    traj = run_trajectory(THREE, StepperConfig(dt=0.1), P, 1.0)
    buf = io.StringIO()
    traj.write_csv(buf, every=3)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,x1,y1,x2,y2,x3,y3,H,Mx,My,I"
    assert len(lines) == 1 + 5  # steps 0, 3, 6, 9 and the final one
    assert float(lines[-1].split(",")[0]) == pytest.approx(1.0)
    again = io.StringIO()
    run_trajectory(THREE, StepperConfig(dt=0.1), P, 1.0).write_csv(again, every=3)
    assert again.getvalue() == buf.getvalue()


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.9), st.floats(0.0, 2 * math.pi))
def test_disk_gradient_matches_boundary_integral(s, r, th):
    p = FracParams(s, 2)
    x = r * np.array([math.cos(th), math.sin(th)])
    grad = -2.0 * perp(disk_velocity(p, x))  # v = grad_perp R / 2, perp(perp(a)) = -a
    n = 512 if r < 0.6 else 4096
    np.testing.assert_allclose(disk_robin_gradient_boundary(p, x, n), grad, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75])
def test_disk_velocity_is_half_perp_gradient_of_robin(s):
    p = FracParams(s, 2)
    x = np.array([0.3, -0.4])
    h = 1e-6
    grad = np.array([(disk_robin(p, x + e) - disk_robin(p, x - e)) / (2 * h) for e in np.eye(2) * h])
    np.testing.assert_allclose(disk_velocity(p, x), 0.5 * perp(grad), rtol=1e-7)


def test_disk_centre_stationary_and_minimum():
    traj = single_vortex_in_disk([0.0, 0.0], StepperConfig(dt=1e-2), P, 1.0)
    np.testing.assert_array_equal(traj.final.positions, [[0.0, 0.0]])
    hess, signs = disk_robin_hessian(P, np.zeros(2))
    assert signs == (1, 1)
    np.testing.assert_allclose(hess, hess[0, 0] * np.eye(2), rtol=1e-6)


def test_disk_orbit_radius_and_speed():
    traj = single_vortex_in_disk([0.5, 0.0], StepperConfig(dt=1e-3), P, 10.0)
    assert np.max(np.abs(traj.extras["radius"] - 0.5)) <= 1e-6
    assert traj.extras["measured_angular_speed"] == pytest.approx(angular_speed_disk(P, 0.5), abs=1e-4)
    assert traj.drift()["H"] <= 1e-10


def test_disk_rejects_outside_start():
    with pytest.raises(DomainError):
        single_vortex_in_disk([1.0, 0.0], StepperConfig(), P, 1.0)
    with pytest.raises(DomainError):
        disk_robin(P, [0.8, 0.8])
