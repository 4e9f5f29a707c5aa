"""Platform model: tilt parameterizations, wrench assembly, DoF packing."""

import dataclasses

import numpy as np
import pytest

from tilthover import (
    ControlInput,
    DualTilt,
    FixedTilt,
    Platform,
    Propeller,
    RadialTilt,
    body_wrench,
    freeze_tilts,
    load_preset,
    thrust_direction,
    thrust_vectors,
)
from tilthover.platform import (
    input_dof_values,
    input_from_dof_values,
    input_within_limits,
    thrust_direction_derivatives,
    tilt_angles_for_direction,
    with_mass,
    with_rates,
    with_u_max,
)


def test_thrust_direction_cardinal_angles():
    z = thrust_direction(0.0, 0.0, 0.0)
    assert np.allclose(z, [0, 0, 1], atol=1e-15)
    # alpha tips the column toward body +y before the gamma twist
    assert np.allclose(thrust_direction(np.pi / 2, 0.0, 0.0), [0, 1, 0], atol=1e-15)
    # beta tips it toward -x
    assert np.allclose(thrust_direction(0.0, np.pi / 2, 0.0), [-1, 0, 0], atol=1e-15)
    # gamma rotates the whole frame about z
    d = thrust_direction(np.pi / 2, 0.0, np.pi / 2)
    assert np.allclose(d, [-1, 0, 0], atol=1e-15)


def test_thrust_direction_is_unit(rng):
    for _ in range(50):
        a, b, g = rng.uniform(-np.pi, np.pi, size=3)
        assert abs(np.linalg.norm(thrust_direction(a, b, g)) - 1.0) < 1e-14


def test_thrust_direction_derivatives_match_fd(rng):
    h = 1e-6
    for _ in range(100):
        a, b, g = rng.uniform(-1.4, 1.4, size=3)
        da, db = thrust_direction_derivatives(a, b, g)
        fa = (thrust_direction(a + h, b, g) - thrust_direction(a - h, b, g)) / (2 * h)
        fb = (thrust_direction(a, b + h, g) - thrust_direction(a, b - h, g)) / (2 * h)
        assert np.allclose(da, fa, atol=5e-10)
        assert np.allclose(db, fb, atol=5e-10)


def test_tilt_angles_for_direction_round_trip(rng):
    for _ in range(50):
        g = rng.uniform(-np.pi, np.pi)
        a, b = rng.uniform(-1.3, 1.3, size=2)
        d = thrust_direction(a, b, g)
        ar, br = tilt_angles_for_direction(d, g)
        assert np.allclose(thrust_direction(ar, br, g), d, atol=1e-12)


def test_gamma_property():
    p = Propeller(position=(0.0, 0.2, 0.0), capability=RadialTilt())
    assert abs(p.gamma - np.pi / 2) < 1e-15
    on_axis = Propeller(position=(0.0, 0.0, 0.3), capability=FixedTilt((0, 0, 1)))
    assert on_axis.gamma == 0.0


def test_moment_map_is_lever_plus_drag(rng):
    p = Propeller(position=(0.2, -0.1, 0.05), capability=DualTilt(), drag_ratio=0.012)
    M = p.moment_map()
    for _ in range(10):
        d = rng.normal(size=3)
        expected = np.cross(p.position, d) + 0.012 * d
        assert np.allclose(M @ d, expected, atol=1e-15)


def test_dof_counting(presets):
    assert presets["quadrotor"].dof == 4
    assert presets["birotor-dualtilt"].dof == 4
    assert presets["trirotor-tail"].dof == 4
    assert presets["trirotor-radial"].dof == 6
    assert presets["dualtilt-trirotor"].dof == 9
    assert presets["dualtilt-trirotor-failed3"].dof == 6


def test_dof_round_trip(presets, rng):
    for platform in presets.values():
        lo_alpha = -1.0
        thrusts = [rng.uniform(0.5, 5.0) if p.functional else 0.0 for p in platform.propellers]
        alphas = [rng.uniform(lo_alpha, 1.0) for _ in platform.propellers]
        betas = [rng.uniform(lo_alpha, 1.0) for _ in platform.propellers]
        control = ControlInput.of(thrusts, alphas, betas)
        h = input_dof_values(platform, control)
        assert h.shape == (platform.dof,)
        back = input_from_dof_values(platform, h)
        h2 = input_dof_values(platform, back)
        assert np.allclose(h, h2, atol=0.0)


def test_failed_propeller_masked(presets):
    platform = presets["dualtilt-trirotor-failed3"]
    assert list(platform.functional_indices()) == [0, 1]
    control = input_from_dof_values(platform, np.arange(platform.dof, dtype=float))
    assert control.thrusts[2] == 0.0


def test_quadrotor_upright_wrench(presets):
    quad = presets["quadrotor"]
    t = quad.mass * quad.gravity / 4.0
    control = ControlInput.of([t] * 4, [0.0] * 4, [0.0] * 4)
    w = body_wrench(quad, control)
    assert np.allclose(w[:3], [0.0, 0.0, quad.weight], atol=1e-12)
    assert np.allclose(w[3:], 0.0, atol=1e-12)  # symmetric layout cancels drag


def test_quadrotor_differential_thrust_moment(presets):
    quad = presets["quadrotor"]
    base = quad.mass * quad.gravity / 4.0
    thrusts = [base + 0.5, base, base - 0.5, base]
    w = body_wrench(quad, ControlInput.of(thrusts, [0.0] * 4, [0.0] * 4))
    assert abs(w[5]) < 1e-12  # balanced drag pairs
    assert np.linalg.norm(w[3:5]) > 0.05


def test_thrust_vectors_shape(presets):
    for platform in presets.values():
        n = platform.n_propellers
        control = ControlInput.of([1.0] * n, [0.1] * n, [0.0] * n)
        v = thrust_vectors(platform, control)
        assert v.shape == (n, 3)


def test_input_within_limits(presets):
    quad = presets["quadrotor"]
    ok = ControlInput.of([3.0] * 4, [0.0] * 4, [0.0] * 4)
    assert input_within_limits(quad, ok, 0.02, 0.02)
    hot = ControlInput.of([5.99] * 4, [0.0] * 4, [0.0] * 4)
    assert not input_within_limits(quad, hot, 0.02, 0.02)


def test_freeze_tilts_keeps_direction(presets):
    platform = presets["dualtilt-trirotor"]
    n = platform.n_propellers
    control = ControlInput.of([2.0] * n, [0.4] * n, [-0.2] * n)
    frozen = freeze_tilts(platform, control)
    for i, prop in enumerate(frozen.propellers):
        assert isinstance(prop.capability, FixedTilt)
        want = platform.propellers[i].direction(control.alphas[i], control.betas[i])
        assert np.allclose(prop.direction(0.0, 0.0), want, atol=1e-12)


def test_scaling_helpers(presets):
    quad = presets["quadrotor"]
    assert with_u_max(quad, 2.5).propellers[0].u_max == 2.5
    assert with_mass(quad, 0.7).mass == 0.7
    fast = with_rates(quad, u_rate_max=200.0, angle_rate_max=9.0)
    assert fast.propellers[0].u_rate_max == 200.0
    assert fast.propellers[0].angle_rate_max == 9.0


@pytest.mark.parametrize(
    "mutation, message",
    [
        (dict(mass=0.0), "mass"),
        (dict(mass=-1.0), "mass"),
        (dict(gravity=-9.81), "gravity"),
        (dict(inertia=((1, 0, 0), (0.5, 1, 0), (0, 0, 1))), "inertia"),
        (dict(inertia=((-1, 0, 0), (0, 1, 0), (0, 0, 1))), "inertia"),
    ],
)
def test_platform_validation(presets, mutation, message):
    quad = presets["quadrotor"]
    with pytest.raises(ValueError, match=message):
        dataclasses.replace(quad, **mutation)


def test_propeller_validation():
    with pytest.raises(ValueError, match="u_max"):
        Propeller(position=(0.2, 0, 0), capability=RadialTilt(), u_max=0.0)
    with pytest.raises(ValueError, match="zero vector|direction"):
        FixedTilt((0.0, 0.0, 0.0))
    with pytest.raises(ValueError, match="interval"):
        RadialTilt(alpha_range=(1.0, -1.0))


def test_all_failed_rejected():
    prop = Propeller(position=(0.2, 0, 0), capability=FixedTilt((0, 0, 1)), functional=False)
    with pytest.raises(ValueError, match="functional"):
        Platform(propellers=(prop,))


def test_zero_gravity_allowed(presets):
    free = dataclasses.replace(presets["quadrotor"], gravity=0.0)
    assert free.weight == 0.0
