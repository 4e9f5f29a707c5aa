"""Hover feasibility, witnesses, and the actuation taxonomy."""

import numpy as np
import pytest

from tilthover import (
    body_wrench,
    with_mass,
    can_statically_hover,
    classify,
    hover_orientation_set,
    is_csh,
    load_preset,
    orientation_from_angles,
    solve_hover,
    with_u_max,
)
from tilthover.hover import rotation_aligning


def test_orientation_from_angles_composition():
    R = orientation_from_angles(np.pi / 2, 0.0)
    # roll 90 deg sends body +z to world -y
    assert np.allclose(R @ [0, 0, 1], [0, -1, 0], atol=1e-15) or np.allclose(
        R @ [0, 0, 1], [0, 1, 0], atol=1e-15
    )
    R2 = orientation_from_angles(0.3, -0.7)
    assert np.allclose(R2, orientation_from_angles(0.3, 0.0) @ orientation_from_angles(0.0, -0.7))
    assert np.allclose(R2 @ R2.T, np.eye(3), atol=1e-14)


def test_rotation_aligning(rng):
    for _ in range(20):
        a = rng.normal(size=3)
        b = rng.normal(size=3)
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        R = rotation_aligning(a, b)
        assert np.allclose(R @ a, b, atol=1e-12)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
    # antipodal case must still work
    R = rotation_aligning(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0]))
    assert np.allclose(R @ [0, 0, 1], [0, 0, -1], atol=1e-12)


def test_quadrotor_upright_witness(presets):
    quad = presets["quadrotor"]
    sol = solve_hover(quad, np.eye(3))
    assert sol.feasible and sol.interior
    assert sol.control is not None
    # symmetric platform, equal split of the weight
    assert np.allclose(sol.control.thrusts, quad.weight / 4.0, atol=1e-8)
    assert sol.residual_force < 1e-8 and sol.residual_moment < 1e-8


def test_hover_wrench_cancels_gravity(presets):
    platform = presets["dualtilt-trirotor"]
    for phi, theta in [(0.0, 0.0), (90.0, 0.0), (130.0, -58.0), (45.0, 30.0)]:
        R = orientation_from_angles(np.deg2rad(phi), np.deg2rad(theta))
        sol = solve_hover(platform, R)
        assert sol.feasible, (phi, theta)
        w = body_wrench(platform, sol.control)
        f_world = R @ w[:3]
        assert np.allclose(f_world, [0, 0, platform.weight], atol=1e-6)
        assert np.linalg.norm(w[3:]) < 1e-6


def test_quadrotor_sideways_infeasible(presets):
    sol = solve_hover(presets["quadrotor"], orientation_from_angles(np.pi / 2, 0.0))
    assert not sol.feasible
    assert sol.message != ""


def test_margin_semantics(presets):
    sol = solve_hover(presets["quadrotor"], np.eye(3))
    t = sol.control.thrusts[0] / 6.0
    assert np.isclose(sol.margin, min(t, 1.0 - t), atol=1e-12)


def test_can_statically_hover_presets(presets):
    for name, platform in presets.items():
        check = can_statically_hover(platform)
        assert check.hoverable, name
        assert check.max_lift > platform.weight
        assert check.witness is not None and check.witness.feasible


def test_cannot_hover_when_too_weak(presets):
    weak = with_u_max(presets["quadrotor"], 0.5)  # 4 x 0.5 N < weight
    check = can_statically_hover(weak)
    assert not check.hoverable
    assert check.max_lift < weak.weight


def test_is_csh(presets):
    assert not is_csh(presets["quadrotor"])
    assert is_csh(presets["birotor-dualtilt"])
    assert is_csh(presets["trirotor-tail"])
    assert is_csh(presets["dualtilt-trirotor"])


def test_classification_categories(presets):
    assert classify(presets["quadrotor"]).category == "UDT"
    assert classify(presets["birotor-dualtilt"]).category == "UDT"
    assert classify(presets["dualtilt-trirotor"]).category == "OD"
    assert classify(presets["trirotor-radial"]).category == "OD"


def test_classification_failed_preset_regimes(presets):
    failed = presets["dualtilt-trirotor-failed3"]
    # the preset's light frame keeps the survivors omnidirectional
    assert classify(failed).category == "OD"
    # weigh it down and the thrust cap bites: fully actuated but not OD
    heavy = with_mass(failed, 1.0)
    cls = classify(heavy)
    assert cls.category == "FA"
    assert cls.odl < heavy.weight


def test_not_hoverable_classification():
    weak = with_u_max(load_preset("quadrotor"), 0.5)
    cls = classify(weak)
    assert cls.category == "NotHoverable"
    assert cls.witness is None


def test_hover_orientation_set_quadrotor(presets):
    hmap = hover_orientation_set(presets["quadrotor"], step_deg=45.0)
    ups = [c for c in hmap.cells if (c.phi_deg, c.theta_deg) == (0.0, 0.0)]
    assert ups and ups[0].solution.feasible
    # a UDT platform only hovers with z_B within the thrust cone
    assert 0.0 < hmap.feasible_fraction() < 0.5


def test_hover_orientation_set_omnidirectional(presets):
    hmap = hover_orientation_set(presets["dualtilt-trirotor"], step_deg=60.0)
    assert hmap.feasible_fraction() == 1.0


def test_solution_orientation_passthrough(presets):
    R = orientation_from_angles(0.4, 0.2)
    sol = solve_hover(presets["dualtilt-trirotor"], R)
    assert np.allclose(sol.orientation, R)


def test_infeasible_margin_zero(presets):
    sol = solve_hover(presets["quadrotor"], orientation_from_angles(np.pi / 2, 0.0))
    assert sol.margin == 0.0
    assert sol.control is None or not sol.interior
