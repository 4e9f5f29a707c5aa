"""Allocation matrices and the wrench Jacobian.

The Jacobian is the one derivative everything else leans on, so it gets a
finite-difference oracle here in addition to the larger randomized sweep in
the acceptance suite.
"""

import numpy as np

from tilthover import (
    ControlInput,
    DualTilt,
    Platform,
    Propeller,
    RadialTilt,
    body_wrench,
    fixed_allocation,
    full_jacobian,
    moment_nullspace,
    numeric_rank,
    reduced_allocation,
    vector_allocation,
)
from tilthover.allocation import nullspace, zero_moment_force_rank
from tilthover.platform import input_dof_values, input_from_dof_values


def test_vector_allocation_shape_and_force_rows(presets):
    quad = presets["quadrotor"]
    A = vector_allocation(quad)
    assert A.matrix.shape == (6, 12)
    # force rows stack per-propeller identity blocks
    for i in range(4):
        block = A.matrix[:3, 3 * i : 3 * i + 3]
        assert np.allclose(block, np.eye(3), atol=1e-15)
    kinds = {c.kind for c in A.columns}
    assert kinds == {"vx", "vy", "vz"}


def test_vector_allocation_moment_rows_are_moment_maps(presets):
    quad = presets["quadrotor"]
    A = vector_allocation(quad)
    for i, prop in enumerate(quad.propellers):
        block = A.matrix[3:, 3 * i : 3 * i + 3]
        assert np.allclose(block, prop.moment_map(), atol=1e-15)


def test_reduced_allocation_column_counts(presets):
    # one column per fixed prop, two per radial, three per dual tilt
    assert reduced_allocation(presets["quadrotor"]).matrix.shape[1] == 4
    assert reduced_allocation(presets["trirotor-radial"]).matrix.shape[1] == 6
    assert reduced_allocation(presets["dualtilt-trirotor"]).matrix.shape[1] == 9
    assert reduced_allocation(presets["trirotor-tail"]).matrix.shape[1] == 4


def test_reduced_allocation_ranks(presets):
    assert numeric_rank(reduced_allocation(presets["quadrotor"]).matrix) == 4
    assert numeric_rank(reduced_allocation(presets["dualtilt-trirotor"]).matrix) == 6
    assert numeric_rank(reduced_allocation(presets["trirotor-radial"]).matrix) == 6
    assert numeric_rank(reduced_allocation(presets["birotor-dualtilt"]).matrix) == 4


def test_fixed_allocation_columns_are_thrust_lines(presets):
    platform = presets["dualtilt-trirotor"]
    n = platform.n_propellers
    control = ControlInput.of([2.0] * n, [0.3] * n, [-0.1] * n)
    A = fixed_allocation(platform, control)
    assert A.matrix.shape == (6, 3)
    for j, i in enumerate(platform.functional_indices()):
        d = platform.propellers[i].direction(control.alphas[i], control.betas[i])
        assert np.allclose(A.matrix[:3, j], d, atol=1e-14)
        assert np.allclose(A.matrix[3:, j], platform.propellers[i].moment_map() @ d, atol=1e-14)


def test_full_jacobian_matches_finite_differences(presets, rng):
    h = 1e-6
    for name in ("quadrotor", "trirotor-tail", "dualtilt-trirotor"):
        platform = presets[name]
        n = platform.n_propellers
        control = ControlInput.of(
            list(rng.uniform(1.0, 4.0, size=n)),
            list(rng.uniform(-0.8, 0.8, size=n)),
            list(rng.uniform(-0.8, 0.8, size=n)),
        )
        J = full_jacobian(platform, control).matrix
        x0 = input_dof_values(platform, control)
        for k in range(platform.dof):
            xp, xm = x0.copy(), x0.copy()
            xp[k] += h
            xm[k] -= h
            wp = body_wrench(platform, input_from_dof_values(platform, xp))
            wm = body_wrench(platform, input_from_dof_values(platform, xm))
            fd = (wp - wm) / (2 * h)
            assert np.allclose(J[:, k], fd, atol=2e-7), (name, k)


def test_full_jacobian_column_order_matches_dof_vector(presets):
    platform = presets["trirotor-tail"]
    n = platform.n_propellers
    control = ControlInput.of([2.0] * n, [0.2] * n, [0.0] * n)
    J = full_jacobian(platform, control)
    kinds = [c.kind for c in J.columns]
    assert kinds == ["u", "u", "u", "alpha"]


def test_nullspace_annihilates(presets, rng):
    A = reduced_allocation(presets["dualtilt-trirotor"]).matrix
    N = nullspace(A)
    assert N.shape == (9, 3)
    assert np.allclose(A @ N, 0.0, atol=1e-12)
    assert np.allclose(N.T @ N, np.eye(3), atol=1e-12)


def test_moment_nullspace_kills_moment_rows(presets):
    platform = presets["dualtilt-trirotor"]
    A = vector_allocation(platform)
    N = moment_nullspace(A)
    assert np.allclose(A.moment_rows @ N, 0.0, atol=1e-12)
    assert N.shape[1] == A.matrix.shape[1] - numeric_rank(A.moment_rows)


def test_zero_moment_force_rank(presets):
    # quadrotor zero-moment forces live on the +z line
    assert zero_moment_force_rank(reduced_allocation(presets["quadrotor"])) == 1
    assert zero_moment_force_rank(reduced_allocation(presets["dualtilt-trirotor"])) == 3
    assert zero_moment_force_rank(reduced_allocation(presets["trirotor-radial"])) == 3


def test_numeric_rank_scale_invariance(rng):
    M = rng.normal(size=(6, 9))
    M[5] = M[0] + M[1]  # force a dependency
    r = numeric_rank(M)
    assert numeric_rank(1e-6 * M) == r
    assert numeric_rank(1e6 * M) == r


def test_frozen_moment_rank_small_platforms(rng):
    # freezing the tilts of a <=3 prop platform leaves moment rank <= 2;
    # randomized mini version of the dedicated acceptance sweep
    from tilthover import can_statically_hover, freeze_tilts

    found = 0
    attempts = 0
    while found < 10 and attempts < 200:
        attempts += 1
        n = int(rng.integers(1, 4))
        props = []
        for _ in range(n):
            pos = rng.uniform(-0.3, 0.3, size=3)
            if np.linalg.norm(pos) < 0.05:
                pos = np.array([0.2, 0.0, 0.0])
            props.append(
                Propeller(
                    position=tuple(pos),
                    capability=DualTilt() if rng.random() < 0.5 else RadialTilt(),
                    drag_ratio=float(rng.uniform(-0.02, 0.02)),
                    u_max=6.0,
                )
            )
        platform = Platform(propellers=tuple(props), mass=float(rng.uniform(0.3, 1.2)))
        check = can_statically_hover(platform, cross_check=False)
        if not check.hoverable or check.witness is None or check.witness.control is None:
            continue
        found += 1
        frozen = freeze_tilts(platform, check.witness.control)
        A = vector_allocation(frozen)
        cols = fixed_allocation(frozen, check.witness.control).matrix
        assert numeric_rank(cols[3:, :]) <= 2
        del A
    assert found == 10
