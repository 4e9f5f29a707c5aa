"""Feasible wrench-set geometry via linear programming.

The per-propeller feasible thrust-vector set (a ball, disc sector, or
segment, depending on tilt capability) is inner-approximated by the convex
hull of finitely many extreme directions.  Support queries over the joint
control set under linear wrench constraints then become small dense LPs:

  maximize    c . (sum_i v_i-image)
  subject to  moment(v) = 0            (and/or other wrench rows)
              v_i = u_max_i * D_i lambda_i,   lambda_i >= 0,
              sum_k lambda_ik <= cap

Everything downstream (zero-moment force set, its inscribed-ball radius,
planar slices, moment sets under a lift floor) reduces to these LPs.  Each
query direction gets a few extra polytope vertices aligned with it so the
inner approximation is tight where it is being probed; all vertices stay on
the exactly reachable arc/patch, so results remain conservative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from .geometry import (
    circle_directions,
    icosphere_directions,
    normalized,
    orthonormal_tangent_basis,
    symmetrized_sphere,
)
from .platform import (
    ANGLE_MARGIN,
    FULL_TURN,
    ControlInput,
    DualTilt,
    FixedTilt,
    Platform,
    Propeller,
    RadialTilt,
    thrust_direction,
    tilt_angles_for_direction,
)

DEFAULT_RESOLUTION = 2048
RADIAL_CHORDS = 64
_DUAL_BASE_DIRECTIONS = icosphere_directions(1)  # 80 face centers
_RING_OFFSETS = np.array([0.15])  # radians, local ring around a probe direction


class CannotLiftWeightError(RuntimeError):
    """The platform cannot produce a zero-excess force of magnitude mg."""


@dataclass(frozen=True)
class DirectionGrid:
    """Antipodally closed, near-uniform set of unit probe directions."""

    directions: NDArray[np.float64]

    def __post_init__(self) -> None:
        d = np.asarray(self.directions, dtype=float)
        if d.ndim != 2 or d.shape[1] != 3 or d.shape[0] == 0:
            raise ValueError("directions must be a nonempty (n, 3) array")

    @staticmethod
    def fibonacci(n: int = DEFAULT_RESOLUTION) -> "DirectionGrid":
        return DirectionGrid(symmetrized_sphere(n))

    @property
    def n(self) -> int:
        return self.directions.shape[0]


@dataclass(frozen=True)
class SampledConvexSet:
    """Convex set represented by a point cloud (support = max dot product)."""

    points: NDArray[np.float64]
    semantic: str = "force"  # "force" [N] or "moment" [N.m]

    def __post_init__(self) -> None:
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3 or p.shape[0] == 0:
            raise ValueError("a sampled set needs at least one 3-D point")

    def support(self, d: NDArray[np.float64]) -> float:
        return float(np.max(self.points @ np.asarray(d, dtype=float)))

    def min_support(self, grid: DirectionGrid) -> float:
        return float(np.min(np.max(grid.directions @ self.points.T, axis=1)))


def _wrap_pi(a: float) -> float:
    return float(np.arctan2(np.sin(a), np.cos(a)))


def _angle_in_range(val: float, rng: tuple[float, float], pad: float) -> bool:
    lo, hi = rng
    if hi - lo >= FULL_TURN - 1e-12:
        return True
    return lo + pad - 1e-12 <= val <= hi - pad + 1e-12


def _dual_patch_contains(cap: DualTilt, d: NDArray[np.float64], gamma: float, pad: float) -> bool:
    """Is unit direction d reachable by the dual tilt within padded limits?

    Both (alpha, beta) pre-images of a direction are checked.
    """
    a, b = tilt_angles_for_direction(d, gamma)
    if _angle_in_range(a, cap.alpha_range, pad) and _angle_in_range(b, cap.beta_range, pad):
        return True
    a2, b2 = _wrap_pi(a + np.pi), _wrap_pi(np.pi - b)
    return _angle_in_range(a2, cap.alpha_range, pad) and _angle_in_range(b2, cap.beta_range, pad)


def propeller_vertex_directions(prop: Propeller, angle_pad: float = 0.0) -> NDArray[np.float64]:
    """Base extreme directions of one propeller's reachable thrust set.

    angle_pad > 0 trims restricted tilt ranges (interior-margin queries);
    full-turn ranges are never trimmed.
    """
    cap = prop.capability
    if isinstance(cap, FixedTilt):
        return np.asarray(cap.direction, dtype=float).reshape(1, 3)
    if isinstance(cap, RadialTilt):
        lo, hi = cap.alpha_range
        if hi - lo >= FULL_TURN - 1e-12:
            angles = lo + (hi - lo) * np.arange(RADIAL_CHORDS) / RADIAL_CHORDS
        else:
            lo, hi = lo + angle_pad, hi - angle_pad
            angles = np.linspace(lo, hi, RADIAL_CHORDS)
        return np.array([thrust_direction(a, 0.0, prop.gamma) for a in angles])
    keep = [d for d in _DUAL_BASE_DIRECTIONS if _dual_patch_contains(cap, d, prop.gamma, angle_pad)]
    if not keep:
        raise ValueError("dual tilt range too narrow for the direction mesh")
    return np.array(keep)


def _radial_aim(prop: Propeller, d: NDArray[np.float64], angle_pad: float) -> list[NDArray[np.float64]]:
    """Reachable radial-tilt direction closest to d (exact chord point)."""
    cap = prop.capability
    assert isinstance(cap, RadialTilt)
    base = thrust_direction(0.0, 0.0, prop.gamma)
    tangent = thrust_direction(np.pi / 2.0, 0.0, prop.gamma)
    x, y = float(d @ base), float(d @ tangent)
    if np.hypot(x, y) < 1e-12:
        return []
    alpha = float(np.arctan2(y, x))
    lo, hi = cap.alpha_range
    if hi - lo < FULL_TURN - 1e-12:
        alpha = float(np.clip(alpha, lo + angle_pad, hi - angle_pad))
    return [thrust_direction(alpha, 0.0, prop.gamma)]


def _dual_aim(prop: Propeller, d: NDArray[np.float64], angle_pad: float) -> list[NDArray[np.float64]]:
    """Reachable dual-tilt directions at and around d (exact + local ring)."""
    cap = prop.capability
    assert isinstance(cap, DualTilt)
    out = []
    if _dual_patch_contains(cap, d, prop.gamma, angle_pad):
        out.append(np.asarray(d, dtype=float))
    t1, t2 = orthonormal_tangent_basis(d)
    for rho in _RING_OFFSETS:
        c, s = np.cos(rho), np.sin(rho)
        for k in range(6):
            ang = np.pi * k / 3.0
            cand = c * d + s * (np.cos(ang) * t1 + np.sin(ang) * t2)
            cand = normalized(cand)
            if _dual_patch_contains(cap, cand, prop.gamma, angle_pad):
                out.append(cand)
    return out


def directional_extras(
    prop: Propeller, d: NDArray[np.float64], angle_pad: float = 0.0
) -> list[NDArray[np.float64]]:
    """Extra exactly-reachable vertices aligned with probe direction d."""
    cap = prop.capability
    if isinstance(cap, FixedTilt):
        return []
    if isinstance(cap, RadialTilt):
        return _radial_aim(prop, d, angle_pad)
    return _dual_aim(prop, d, angle_pad)


@dataclass
class ControlPolytope:
    """Vertex model of the joint feasible control set of one platform.

    Per functional propeller i: force block F_i = u_max_i * D_i^T (3 x K_i)
    and moment block M_i F_i.  A point of the set picks lambda >= 0 with
    sum_k lambda_ik <= cap per propeller.
    """

    platform: Platform
    angle_pad: float = 0.0
    cap: float = 1.0
    prop_indices: list[int] = field(init=False)
    force_blocks: list[NDArray[np.float64]] = field(init=False)
    moment_blocks: list[NDArray[np.float64]] = field(init=False)

    def __post_init__(self) -> None:
        self.prop_indices = self.platform.functional_indices()
        self.force_blocks = []
        self.moment_blocks = []
        for i in self.prop_indices:
            prop = self.platform.propellers[i]
            D = propeller_vertex_directions(prop, self.angle_pad)
            F = prop.u_max * D.T
            self.force_blocks.append(F)
            self.moment_blocks.append(prop.moment_map() @ F)

    def assembled(
        self, probe: NDArray[np.float64] | None = None
    ) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        """(F, M, A_cap, b_cap): force/moment maps and per-propeller caps.

        probe, when given, appends probe-aligned vertices to each block.
        """
        fblocks, mblocks, sizes = [], [], []
        for pos, i in enumerate(self.prop_indices):
            prop = self.platform.propellers[i]
            F = self.force_blocks[pos]
            M = self.moment_blocks[pos]
            if probe is not None:
                extra = directional_extras(prop, probe, self.angle_pad)
                if extra:
                    E = prop.u_max * np.array(extra).T
                    F = np.hstack([F, E])
                    M = np.hstack([M, prop.moment_map() @ E])
            fblocks.append(F)
            mblocks.append(M)
            sizes.append(F.shape[1])
        Fall = np.hstack(fblocks)
        Mall = np.hstack(mblocks)
        total = Fall.shape[1]
        A_cap = np.zeros((len(sizes), total))
        ofs = 0
        for row, k in enumerate(sizes):
            A_cap[row, ofs : ofs + k] = 1.0
            ofs += k
        b_cap = np.full(len(sizes), self.cap)
        return Fall, Mall, A_cap, b_cap


def _solve(c, A_ub, b_ub, A_eq, b_eq, n_extra: int = 0):
    """maximize c.x over the polytope; returns (value, x) or (None, None).

    n_extra trailing variables are free-bounded [0, inf) slacks already
    wired into the constraint rows by the caller.
    """
    res = linprog(
        -np.asarray(c, dtype=float),
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=(0.0, None),
        method="highs",
    )
    if res.status != 0:
        return None, None
    return -res.fun, res.x


def support_zero_moment_force(
    poly: ControlPolytope, d: NDArray[np.float64]
) -> tuple[float, NDArray[np.float64]] | tuple[None, None]:
    """max d.force subject to zero total moment; returns (value, force point)."""
    d = np.asarray(d, dtype=float)
    F, M, A_cap, b_cap = poly.assembled(probe=d)
    val, x = _solve(d @ F, A_cap, b_cap, M, np.zeros(3))
    if val is None:
        return None, None
    return val, F @ x


def lift_along(poly: ControlPolytope, d: NDArray[np.float64]) -> float:
    """max t with force = t d (d unit) and zero total moment.

    Unlike the support function this pins the force direction, so it is the
    exact reachable lift along d; for thin force sets the support can be
    positive along directions with zero actual lift.
    """
    d = normalized(np.asarray(d, dtype=float))
    F, M, A_cap, b_cap = poly.assembled(probe=d)
    nvar = F.shape[1]
    # trailing variable t: force rows read F lambda - t d = 0
    A_eq = np.vstack([
        np.hstack([M, np.zeros((3, 1))]),
        np.hstack([F, -d.reshape(3, 1)]),
    ])
    A_ub = np.hstack([A_cap, np.zeros((A_cap.shape[0], 1))])
    c = np.zeros(nvar + 1)
    c[nvar] = 1.0
    val, _ = _solve(c, A_ub, b_cap, A_eq, np.zeros(6))
    return 0.0 if val is None else float(val)


def support_slice_force(
    poly: ControlPolytope, d: NDArray[np.float64], plane_normal: NDArray[np.float64]
) -> float | None:
    """max d.force with zero moment and force confined to the given plane."""
    d = np.asarray(d, dtype=float)
    F, M, A_cap, b_cap = poly.assembled(probe=d)
    A_eq = np.vstack([M, (np.asarray(plane_normal, dtype=float) @ F).reshape(1, -1)])
    val, _ = _solve(d @ F, A_cap, b_cap, A_eq, np.zeros(4))
    return val


def support_moment_with_lift(
    poly: ControlPolytope,
    d: NDArray[np.float64],
    lift_direction: NDArray[np.float64],
    lift_floor: float,
) -> tuple[float, NDArray[np.float64]] | tuple[None, None]:
    """max d.moment subject to lift_direction.force >= lift_floor."""
    d = np.asarray(d, dtype=float)
    F, M, A_cap, b_cap = poly.assembled(probe=np.asarray(lift_direction, dtype=float))
    A_ub = np.vstack([A_cap, -(np.asarray(lift_direction, dtype=float) @ F).reshape(1, -1)])
    b_ub = np.concatenate([b_cap, [-float(lift_floor)]])
    val, x = _solve(d @ M, A_ub, b_ub, None, None)
    if val is None:
        return None, None
    return val, M @ x


def _ring(d: NDArray[np.float64], radius: float, count: int = 8) -> NDArray[np.float64]:
    t1, t2 = orthonormal_tangent_basis(d)
    c, s = np.cos(radius), np.sin(radius)
    ang = 2.0 * np.pi * np.arange(count) / count
    pts = c * d + s * (np.outer(np.cos(ang), t1) + np.outer(np.sin(ang), t2))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def refine_direction_min(fun, d0: NDArray[np.float64], radius: float = 0.1, iters: int = 14):
    """Deterministic ring descent minimizing fun(direction) near d0.

    Returns (best value, best direction).  fun may return None (infeasible);
    such probes are skipped.
    """
    best_d = normalized(np.asarray(d0, dtype=float))
    best = fun(best_d)
    r = radius
    for _ in range(iters):
        moved = False
        for cand in _ring(best_d, r):
            v = fun(cand)
            if v is not None and (best is None or v < best - 1e-15):
                best, best_d, moved = v, cand, True
        if not moved:
            r *= 0.55
    return best, best_d


def refine_direction_max(fun, d0: NDArray[np.float64], radius: float = 0.2, iters: int = 12):
    neg = lambda d: (None if (v := fun(d)) is None else -v)
    val, d = refine_direction_min(neg, d0, radius, iters)
    return (None if val is None else -val), d


def force_set_at_hover(
    platform: Platform, resolution: int = DEFAULT_RESOLUTION
) -> SampledConvexSet:
    """Zero-moment force set: all body forces achievable with zero body moment.

    Returns the cloud of per-direction support maximizers; its support
    function matches the LP optima on the probing grid.
    """
    poly = ControlPolytope(platform)
    grid = DirectionGrid.fibonacci(resolution)
    pts = []
    for d in grid.directions:
        _, p = support_zero_moment_force(poly, d)
        if p is not None:
            pts.append(p)
    if not pts:
        pts = [np.zeros(3)]
    return SampledConvexSet(np.array(pts), "force")


@dataclass(frozen=True)
class OdlResult:
    odl: float
    min_direction: tuple[float, float, float]
    resolution: int
    degenerate: bool  # True when the zero-moment force span is not 3-D


def odl(platform: Platform, resolution: int = DEFAULT_RESOLUTION) -> OdlResult:
    """Radius of the largest origin-centered ball inside the zero-moment force set.

    Grid minimum of the support function plus deterministic local descent
    around the most promising basins (a pure grid minimum can badly
    overestimate thin sets).
    """
    from .allocation import reduced_allocation, zero_moment_force_rank

    if zero_moment_force_rank(reduced_allocation(platform)) < 3:
        return OdlResult(0.0, (0.0, 0.0, 1.0), resolution, True)
    poly = ControlPolytope(platform)
    grid = DirectionGrid.fibonacci(resolution)
    values = np.empty(grid.n)
    for j, d in enumerate(grid.directions):
        val, _ = support_zero_moment_force(poly, d)
        values[j] = np.inf if val is None else val
    order = np.argsort(values, kind="stable")
    spacing = 2.0 * np.sqrt(np.pi / grid.n)  # ~ grid angular spacing [rad]
    best = float(values[order[0]])
    best_d = grid.directions[order[0]]
    seeds = [grid.directions[order[0]]]
    for idx in order[1:]:
        if len(seeds) >= 3:
            break
        d = grid.directions[idx]
        if all(abs(float(d @ s)) < np.cos(3.0 * spacing) for s in seeds):
            seeds.append(d)
    fun = lambda d: support_zero_moment_force(poly, d)[0]
    for seed in seeds:
        v, dm = refine_direction_min(fun, seed, radius=1.5 * spacing)
        if v is not None and v < best:
            best, best_d = float(v), dm
    return OdlResult(max(best, 0.0), tuple(float(x) for x in best_d), resolution, False)


def max_lift(
    platform: Platform,
    angle_pad: float = 0.0,
    cap: float = 1.0,
    coarse: int = 26,
) -> tuple[float, NDArray[np.float64]]:
    """Largest zero-moment force magnitude over all directions, with argmax.

    Coarse directional sweep plus local ascent; the returned direction is
    the lift direction achieving the maximum.
    """
    poly = ControlPolytope(platform, angle_pad=angle_pad, cap=cap)
    best, best_d = -np.inf, np.array([0.0, 0.0, 1.0])
    fun = lambda d: support_zero_moment_force(poly, d)[0]
    cands = []
    for d in symmetrized_sphere(coarse):
        v = fun(d)
        if v is not None:
            cands.append((float(v), d))
    cands.sort(key=lambda t: -t[0])
    for v0, d0 in cands[:3]:
        v, d = refine_direction_max(fun, d0, radius=0.35)
        if v is not None and v > best:
            best, best_d = float(v), d
    if not np.isfinite(best):
        return 0.0, best_d
    return best, best_d


def moment_set_at_hover(
    platform: Platform,
    resolution: int = 162,
    lift_directions: int = 26,
) -> SampledConvexSet:
    """Moments achievable while producing at least weight-canceling force.

    The force-magnitude floor is nonconvex; it is under-approximated by a
    union over coarse lift directions of the convex restrictions
    lift_dir . force >= m g, which keeps every returned point feasible.
    """
    poly = ControlPolytope(platform)
    mg = platform.weight
    usable = []
    for L in symmetrized_sphere(lift_directions):
        val, _ = support_moment_with_lift(poly, np.array([0.0, 0.0, 1.0]), L, mg)
        if val is not None:
            usable.append(L)
    if not usable:
        raise CannotLiftWeightError(
            f"platform cannot produce force {mg:.6g} N in any direction"
        )
    pts = []
    grid = DirectionGrid.fibonacci(resolution)
    for L in usable:
        for d in grid.directions:
            val, m = support_moment_with_lift(poly, d, L, mg)
            if m is not None:
                pts.append(m)
    return SampledConvexSet(np.array(pts), "moment")


def origin_interior_of_moment_set(
    platform: Platform, resolution: int = 62, rel_tol: float = 1e-6
) -> bool:
    """Is the zero moment strictly inside the moment set at hover?"""
    try:
        cloud = moment_set_at_hover(platform, resolution=resolution, lift_directions=14)
    except CannotLiftWeightError:
        return False
    grid = DirectionGrid.fibonacci(resolution)
    sup = np.max(grid.directions @ cloud.points.T, axis=1)
    hi = float(np.max(sup))
    if hi <= 0.0:
        return False
    return bool(np.min(sup) > rel_tol * hi)


def planar_lift(
    platform: Platform,
    plane_normal: NDArray[np.float64],
    resolution: int = 64,
) -> float:
    """Radius of the largest origin-centered disc of zero-moment forces
    in the plane orthogonal to plane_normal.

    Every in-plane direction must be reachable at that magnitude with zero
    total moment, so this is the inscribed-disc radius of the planar slice.
    """
    n = normalized(np.asarray(plane_normal, dtype=float))
    poly = ControlPolytope(platform)
    t1, t2 = orthonormal_tangent_basis(n)
    angles = 2.0 * np.pi * np.arange(resolution) / resolution

    def slice_support(theta: float) -> float | None:
        d = np.cos(theta) * t1 + np.sin(theta) * t2
        return support_slice_force(poly, d, n)

    vals = []
    for th in angles:
        v = slice_support(th)
        if v is None:
            return 0.0
        vals.append(v)
    vals = np.array(vals)
    j = int(np.argmin(vals))
    best = float(vals[j])
    # golden-section descent around the grid minimum
    lo = angles[j] - 2.0 * np.pi / resolution
    hi = angles[j] + 2.0 * np.pi / resolution
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    for _ in range(24):
        m1 = b - phi * (b - a)
        m2 = a + phi * (b - a)
        v1, v2 = slice_support(m1), slice_support(m2)
        if v1 is None or v2 is None:
            return 0.0
        if v1 <= v2:
            b = m2
        else:
            a = m1
        best = min(best, float(v1), float(v2))
    return max(best, 0.0)


def best_plane(
    platform: Platform,
    coarse_normals: int = 122,
    resolution: int = 64,
) -> tuple[float, NDArray[np.float64]]:
    """Plane normal maximizing planar_lift, found by coarse ranking + refinement.

    Candidate planes are ranked cheaply on the projected zero-moment force
    cloud, then the top candidates are scored exactly.
    """
    cloud = force_set_at_hover(platform, resolution=512)
    pts = cloud.points
    normals = symmetrized_sphere(coarse_normals)
    half = normals[: normals.shape[0] // 2]  # antipodal pairs give the same plane

    def projected_radius(n: NDArray[np.float64]) -> float:
        t1, t2 = orthonormal_tangent_basis(n)
        dirs2 = circle_directions(48)
        dirs3 = np.outer(dirs2[:, 0], t1) + np.outer(dirs2[:, 1], t2)
        return float(np.min(np.max(dirs3 @ pts.T, axis=1)))

    ranked = sorted(half, key=projected_radius, reverse=True)
    best_val, best_n = -1.0, half[0]
    for n in ranked[:6]:
        v, nn = refine_direction_max(
            lambda d: planar_lift(platform, d, resolution=24), n, radius=0.3, iters=8
        )
        if v is not None and v > best_val:
            best_val, best_n = v, nn
    exact = planar_lift(platform, best_n, resolution=resolution)
    return exact, best_n
