"""Static-hover feasibility, hover-control solving, and platform taxonomy.

A platform hovers statically at body orientation R_h when some interior
control produces zero body moment and body force R_h^T (m g z_W).  The
solver works in the reduced control polytope (see wrench_sets) with an LP
that maximizes the distance to the actuation limits, then lifts the
per-propeller thrust vectors back to thrusts and tilt angles.

Classification is rank-based: the reachable-input rank of the reduced
allocation together with the dimension of the force span usable at zero
moment separate single-orientation hoverers from fully actuated and
omnidirectional designs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from .allocation import (
    DEFAULT_RANK_TOL,
    moment_nullspace,
    numeric_rank,
    reduced_allocation,
    fixed_allocation,
    zero_moment_force_rank,
)
from .geometry import Mat3, Vec3, normalized, rot_x, rot_y, skew
from .platform import (
    ANGLE_MARGIN,
    THRUST_MARGIN,
    ControlInput,
    DualTilt,
    FixedTilt,
    Platform,
    Propeller,
    RadialTilt,
    body_wrench,
    freeze_tilts,
    input_within_limits,
    thrust_direction,
    tilt_angles_for_direction,
)
from .wrench_sets import (
    ControlPolytope,
    DirectionGrid,
    lift_along,
    odl as compute_odl,
    origin_interior_of_moment_set,
    refine_direction_max,
    support_zero_moment_force,
    symmetrized_sphere,
)

FORCE_TOLERANCE = 1e-6  # N
MOMENT_TOLERANCE = 1e-8  # N.m

Z_WORLD = np.array([0.0, 0.0, 1.0])


def orientation_from_angles(phi: float, theta: float) -> Mat3:
    """Hover orientation from the roll-then-pitch parametrization.

    phi rotates about the body x-axis, theta about the (rotated) body
    y-axis: R_h = R_x(phi) R_y(theta).
    """
    return rot_x(phi) @ rot_y(theta)


def rotation_aligning(a: Vec3, b: Vec3) -> Mat3:
    """Minimal rotation R with R a = b for unit vectors a, b."""
    a = normalized(np.asarray(a, dtype=float))
    b = normalized(np.asarray(b, dtype=float))
    c = float(a @ b)
    v = np.cross(a, b)
    s = float(np.linalg.norm(v))
    if s < 1e-12:
        if c > 0.0:
            return np.eye(3)
        # antiparallel: rotate pi about any axis orthogonal to a
        axis = normalized(np.cross(a, [1.0, 0.0, 0.0] if abs(a[0]) < 0.9 else [0.0, 1.0, 0.0]))
        K = skew(axis)
        return np.eye(3) + 2.0 * (K @ K)
    K = skew(v)
    return np.eye(3) + K + K @ K * ((1.0 - c) / s**2)


@dataclass(frozen=True)
class HoverSolution:
    """Outcome of a hover solve at one orientation."""

    feasible: bool
    interior: bool
    orientation: NDArray[np.float64]
    control: ControlInput | None
    residual_force: float
    residual_moment: float
    margin: float  # min relative distance of thrusts to their limits
    message: str = ""


def _extract_angles(prop: Propeller, v: Vec3) -> tuple[float, float]:
    """Tilt angles realizing thrust vector v for one propeller."""
    cap = prop.capability
    u = float(np.linalg.norm(v))
    if u < 1e-12 or isinstance(cap, FixedTilt):
        return 0.0, 0.0
    d = v / u
    if isinstance(cap, RadialTilt):
        base = thrust_direction(0.0, 0.0, prop.gamma)
        tang = thrust_direction(np.pi / 2.0, 0.0, prop.gamma)
        return float(np.arctan2(float(d @ tang), float(d @ base))), 0.0
    a, b = tilt_angles_for_direction(d, prop.gamma)
    lo_a, hi_a = cap.alpha_range
    lo_b, hi_b = cap.beta_range
    if lo_a <= a <= hi_a and lo_b <= b <= hi_b:
        return a, b
    a2 = float(np.arctan2(np.sin(a + np.pi), np.cos(a + np.pi)))
    b2 = float(np.arctan2(np.sin(np.pi - b), np.cos(np.pi - b)))
    return a2, b2


def _nominal_direction(prop: Propeller) -> Vec3:
    """Mid-range thrust direction; always reachable for the propeller."""
    cap = prop.capability
    if isinstance(cap, FixedTilt):
        return np.asarray(cap.direction, dtype=float)
    if isinstance(cap, RadialTilt):
        return thrust_direction(0.5 * (cap.alpha_range[0] + cap.alpha_range[1]), 0.0, prop.gamma)
    return thrust_direction(
        0.5 * (cap.alpha_range[0] + cap.alpha_range[1]),
        0.5 * (cap.beta_range[0] + cap.beta_range[1]),
        prop.gamma,
    )


def _control_from_vectors(platform: Platform, vectors: list[Vec3]) -> ControlInput:
    n = platform.n_propellers
    u = [0.0] * n
    a = [0.0] * n
    b = [0.0] * n
    for pos, i in enumerate(platform.functional_indices()):
        v = vectors[pos]
        prop = platform.propellers[i]
        u[i] = float(np.linalg.norm(v))
        a[i], b[i] = _extract_angles(prop, v)
    return ControlInput(tuple(u), tuple(a), tuple(b))


def _hover_lp(
    poly: ControlPolytope,
    f_des: Vec3,
    aim_dirs: list[Vec3] | None,
    fixed_margin: float | None = None,
) -> tuple[list[Vec3], float] | None:
    """Hover LP over the control polytope; returns (thrust vectors, margin).

    Variables are the polytope weights plus one margin slack s: per
    propeller sum(lambda_i) + s <= 1 bounds thrusts from above, and (when
    aim directions are given) aim_i . v_i >= s u_max_i bounds them away
    from zero.  With fixed_margin=None the objective maximizes s; with a
    pinned s the objective minimizes total weight (the minimum-effort
    witness among solutions at that margin, which keeps the thrusts small
    and aligned instead of large and mutually canceling).
    """
    F, M, A_cap, b_cap = poly.assembled(probe=normalized(f_des) if np.linalg.norm(f_des) > 0 else None)
    nvar = F.shape[1]
    props = [poly.platform.propellers[i] for i in poly.prop_indices]
    spans = []  # contiguous column span of each propeller
    ofs = 0
    for row in range(len(props)):
        k = int(np.sum(A_cap[row] > 0.5))
        spans.append((ofs, ofs + k))
        ofs += k
    # slack column: sum(lambda_i) + s <= 1 per propeller
    A_ub = [np.hstack([A_cap, np.ones((A_cap.shape[0], 1))])]
    b_ub = [b_cap]
    if aim_dirs is not None:
        rows = np.zeros((len(props), nvar + 1))
        for row, (prop, (lo, hi)) in enumerate(zip(props, spans)):
            rows[row, lo:hi] = -(aim_dirs[row] @ F[:, lo:hi])
            rows[row, nvar] = prop.u_max
        A_ub.append(rows)
        b_ub.append(np.zeros(len(props)))
    A_eq = np.hstack([np.vstack([M, F]), np.zeros((6, 1))])
    b_eq = np.concatenate([np.zeros(3), f_des])
    c = np.zeros(nvar + 1)
    if fixed_margin is None:
        c[nvar] = -1.0  # maximize s
        s_bounds = (0.0, 0.5)
    else:
        c[:nvar] = 1.0  # minimize total weight at the pinned margin
        s_bounds = (fixed_margin, fixed_margin)
    bounds = [(0.0, None)] * nvar + [s_bounds]
    res = linprog(c, A_ub=np.vstack(A_ub), b_ub=np.concatenate(b_ub), A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    x = res.x
    vectors = [F[:, lo:hi] @ x[lo:hi] for lo, hi in spans]
    return vectors, float(x[nvar])


def solve_hover(platform: Platform, orientation: NDArray[np.float64]) -> HoverSolution:
    """Find an interior control with zero moment and weight-canceling force.

    The body-frame force target is R_h^T (m g z_W).  Three LP passes: the
    first finds any margined solution, the second re-solves with
    per-propeller aim directions so thrusts are also pushed away from zero,
    and the third minimizes total effort at a pinned safe margin so the
    witness uses small aligned thrusts rather than large canceling ones.
    Falls back to an unmargined feasibility solve to distinguish
    boundary-only hover from outright infeasibility.
    """
    R = np.asarray(orientation, dtype=float)
    f_des = R.T @ (platform.weight * Z_WORLD)
    poly = ControlPolytope(platform, angle_pad=ANGLE_MARGIN, cap=1.0)
    first = _hover_lp(poly, f_des, aim_dirs=None)
    control = None
    if first is not None:
        vectors, _ = first
        aims = []
        for pos, v in enumerate(vectors):
            nv = float(np.linalg.norm(v))
            prop = platform.propellers[platform.functional_indices()[pos]]
            aims.append(v / nv if nv > 1e-9 else _nominal_direction(prop))
        # second pass also pushes thrusts away from zero along the aims;
        # its slack is a two-sided margin, so prefer it whenever it solves
        second = _hover_lp(poly, f_des, aim_dirs=aims)
        if second is not None:
            vectors, s_two = second
            lean = _hover_lp(poly, f_des, aim_dirs=aims, fixed_margin=min(s_two, THRUST_MARGIN))
            if lean is not None:
                vectors = lean[0]
        control = _control_from_vectors(platform, vectors)
    if control is None:
        # boundary probe: plain feasibility over the untrimmed polytope
        loose = ControlPolytope(platform, angle_pad=0.0, cap=1.0)
        probe = _hover_lp(loose, f_des, aim_dirs=None)
        if probe is None:
            return HoverSolution(False, False, R, None, np.inf, np.inf, 0.0, "no zero-moment control reaches the required force")
        control = _control_from_vectors(platform, probe[0])
    w = body_wrench(platform, control)
    res_f = float(np.linalg.norm(w[:3] - f_des))
    res_m = float(np.linalg.norm(w[3:]))
    interior = input_within_limits(platform, control, THRUST_MARGIN, ANGLE_MARGIN)
    margins = []
    for i in platform.functional_indices():
        prop = platform.propellers[i]
        rel = control.thrusts[i] / prop.u_max
        margins.append(min(rel, 1.0 - rel))
    margin = float(min(margins)) if margins else 0.0
    feasible = res_f <= FORCE_TOLERANCE and res_m <= MOMENT_TOLERANCE
    msg = "" if interior else "solution touches actuation limits"
    return HoverSolution(feasible, interior and feasible, R, control, res_f, res_m, margin, msg)


@dataclass(frozen=True)
class HoverCheck:
    """can_statically_hover outcome with diagnostics."""

    hoverable: bool
    witness: HoverSolution | None
    rank_Am: int
    max_lift: float
    lift_direction: tuple[float, float, float]
    moment_origin_interior: bool | None


def _lift_span(platform: Platform, rank_tol: float) -> NDArray[np.float64]:
    """Orthonormal basis (columns) of the zero-moment force span."""
    reduced = reduced_allocation(platform)
    B = moment_nullspace(reduced, rank_tol)
    if B.shape[1] == 0:
        return np.zeros((3, 0))
    S = reduced.force_rows @ B
    U, sv, _ = np.linalg.svd(S)
    r = 0
    if sv.size and sv[0] > 0.0:
        r = int(np.count_nonzero(sv > rank_tol * sv[0]))
    return U[:, :r]


def can_statically_hover(
    platform: Platform,
    cross_check: bool = True,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> HoverCheck:
    """Static hovering test: full moment rank plus interior weight-lifting control.

    Candidate lift directions are confined to the exact span of forces
    reachable at zero moment (a hover force off that span is unreachable no
    matter how small the misalignment, so generic sweep directions would
    always fail on platforms with a line- or plane-shaped force set).  Each
    candidate is scored by the direction-pinned lift LP; candidates clearing
    the weight go to the margined hover solve.  Optionally cross-checks that
    zero moment is interior to the moment set at hover.
    """
    reduced = reduced_allocation(platform)
    rank_Am = numeric_rank(reduced.moment_rows, rank_tol)
    if rank_Am != 3:
        return HoverCheck(False, None, rank_Am, 0.0, (0.0, 0.0, 1.0), None)
    span = _lift_span(platform, rank_tol)
    r = span.shape[1]
    if r == 0:
        return HoverCheck(False, None, rank_Am, 0.0, (0.0, 0.0, 1.0), None)
    poly = ControlPolytope(platform, angle_pad=ANGLE_MARGIN, cap=1.0 - THRUST_MARGIN)
    if r == 1:
        cands = [span[:, 0], -span[:, 0]]
    elif r == 2:
        t1, t2 = span[:, 0], span[:, 1]
        thetas = 2.0 * np.pi * np.arange(48) / 48
        cands = [np.cos(t) * t1 + np.sin(t) * t2 for t in thetas]
    else:
        cands = list(symmetrized_sphere(26))
    scored = sorted(((lift_along(poly, L), L) for L in cands), key=lambda t: -t[0])
    mg = platform.weight
    # local ascent around the best few candidates (catches lift maxima
    # between grid directions; matters when mg is close to the peak lift)
    refined = []
    for v0, L0 in scored[:4]:
        if r == 3:
            refined.append(refine_direction_max(lambda d: lift_along(poly, d), L0, radius=0.35))
        elif r == 2:
            refined.append(_refine_in_plane(poly, t1, t2, L0))
    trial = sorted(refined + scored, key=lambda t: -t[0])
    best_val, best_dir = trial[0]
    witness: HoverSolution | None = None
    # a high-lift direction can demand thrusts below the interior margin
    # (thin force sets), so keep trying weaker candidates after a failure
    for v, L in trial[:30]:
        if v < mg * (1.0 - 1e-9):
            break
        sol = solve_hover(platform, rotation_aligning(L, Z_WORLD))
        if sol.interior:
            witness = sol
            break
    hoverable = witness is not None
    interior_check = None
    if cross_check and hoverable:
        interior_check = origin_interior_of_moment_set(platform, resolution=26)
    return HoverCheck(
        hoverable,
        witness,
        rank_Am,
        float(best_val),
        tuple(float(x) for x in np.asarray(best_dir)),
        interior_check,
    )


def _refine_in_plane(
    poly: ControlPolytope,
    t1: Vec3,
    t2: Vec3,
    d0: Vec3,
    iters: int = 20,
) -> tuple[float, Vec3]:
    """Golden-section ascent of the pinned-direction lift within a plane."""
    th0 = float(np.arctan2(float(d0 @ t2), float(d0 @ t1)))
    width = 2.0 * np.pi / 48
    lift = lambda th: lift_along(poly, np.cos(th) * t1 + np.sin(th) * t2)
    a, b = th0 - width, th0 + width
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    best, best_th = lift(th0), th0
    for _ in range(iters):
        m1 = b - phi * (b - a)
        m2 = a + phi * (b - a)
        v1, v2 = lift(m1), lift(m2)
        if v1 >= v2:
            b = m2
            if v1 > best:
                best, best_th = v1, m1
        else:
            a = m1
            if v2 > best:
                best, best_th = v2, m2
    return best, normalized(np.cos(best_th) * t1 + np.sin(best_th) * t2)


@dataclass(frozen=True)
class OrientationCell:
    phi_deg: float
    theta_deg: float
    solution: HoverSolution


@dataclass(frozen=True)
class HoverMap:
    cells: tuple[OrientationCell, ...]

    def feasible_fraction(self) -> float:
        ok = sum(1 for c in self.cells if c.solution.interior)
        return ok / len(self.cells) if self.cells else 0.0


def hover_orientation_set(
    platform: Platform,
    step_deg: float = 5.0,
    phi_range: tuple[float, float] = (-180.0, 180.0),
    theta_range: tuple[float, float] = (-180.0, 180.0),
) -> HoverMap:
    """Hover feasibility swept over the roll/pitch orientation grid.

    The grid covers [lo, hi) in both angles at the given step, matching the
    convention of orientation_from_angles.
    """
    phis = np.arange(phi_range[0], phi_range[1], step_deg)
    thetas = np.arange(theta_range[0], theta_range[1], step_deg)
    cells = []
    for phi in phis:
        for theta in thetas:
            R = orientation_from_angles(np.deg2rad(phi), np.deg2rad(theta))
            sol = solve_hover(platform, R)
            cells.append(OrientationCell(float(phi), float(theta), sol))
    return HoverMap(tuple(cells))


def frozen_sustain_check(platform: Platform, control: ControlInput, rank_tol: float = DEFAULT_RANK_TOL) -> bool:
    """Can the platform keep hovering with tilt angles locked at this control?

    True requires the frozen thrust-magnitude moment map to have full rank
    and the zero moment to stay interior to the frozen moment set at hover.
    """
    frozen = freeze_tilts(platform, control)
    Ff = fixed_allocation(frozen, ControlInput.zero(frozen.n_propellers))
    if numeric_rank(Ff.moment_rows, rank_tol) < 3:
        return False
    return origin_interior_of_moment_set(frozen, resolution=26)


def is_csh(platform: Platform, probe_step_deg: float = 45.0) -> bool:
    """Critically statically hoverable: hovers, but never with frozen tilts.

    Every tested hover witness (the canonical one plus each feasible cell of
    a coarse orientation sweep) must fail the frozen-tilt sustain check.
    """
    check = can_statically_hover(platform, cross_check=False)
    if not check.hoverable:
        return False
    assert check.witness is not None and check.witness.control is not None
    if frozen_sustain_check(platform, check.witness.control):
        return False
    sweep = hover_orientation_set(platform, step_deg=probe_step_deg)
    for cell in sweep.cells:
        sol = cell.solution
        if sol.interior and sol.control is not None:
            if frozen_sustain_check(platform, sol.control):
                return False
    return True


@dataclass(frozen=True)
class Classification:
    category: str  # UDT | MDT | FA | OD | NotHoverable | NotClassified
    rank_Af: int  # force rank usable at zero moment
    rank_A: int  # rank of the reduced allocation
    odl: float
    csh: bool
    witness: HoverSolution | None


def classify(
    platform: Platform,
    rank_tol: float = DEFAULT_RANK_TOL,
    odl_resolution: int = 2048,
) -> Classification:
    """Rank-based taxonomy of hover capability.

    Categories: single-orientation (UDT), several-orientation (MDT), fully
    actuated (FA), omnidirectional (OD = FA whose zero-moment force ball
    exceeds the weight), plus NotHoverable and NotClassified for rank pairs
    outside the taxonomy.
    """
    reduced = reduced_allocation(platform)
    rank_A = numeric_rank(reduced.matrix, rank_tol)
    rank_Af = zero_moment_force_rank(reduced, rank_tol)
    check = can_statically_hover(platform)
    odl_value = compute_odl(platform, odl_resolution).odl if rank_Af >= 3 else 0.0
    csh = is_csh(platform) if check.hoverable else False
    witness = check.witness
    if not check.hoverable:
        return Classification("NotHoverable", rank_Af, rank_A, odl_value, csh, witness)
    if rank_Af == 3 and rank_A == 6:
        category = "OD" if odl_value >= platform.weight else "FA"
    elif 2 <= rank_Af <= 3 and 5 <= rank_A <= 6:
        category = "MDT"
    elif rank_Af == 1 and rank_A == 4:
        category = "UDT"
    else:
        category = "NotClassified"
    return Classification(category, rank_Af, rank_A, odl_value, csh, witness)
