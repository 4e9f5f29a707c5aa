"""Hover sustainability on short timescales: rate-limited local moment sets.

At a hover point the wrench responds to input rates through the full
Jacobian, so with per-actuator rate bounds the instantaneously reachable
wrench rates form a zonotope (image of the rate box).  Countering a
disturbance moment without drifting requires the force balance to stay
put, which restricts the usable input rates to the force rows' kernel:
the reachable moment rates then form a slice of that zonotope.  The
origin-centered inscribed-ball radius of the slice is the local
hoverability index: how fast a moment in the worst direction can be
produced while still hovering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
from numpy.typing import NDArray

from .allocation import (
    DEFAULT_RANK_TOL,
    AllocationMatrix,
    full_jacobian,
    numeric_rank,
    nullspace,
    reduced_allocation,
)
from .hover import HoverSolution, frozen_sustain_check, orientation_from_angles, solve_hover
from .platform import ControlInput, Platform
from .wrench_sets import DirectionGrid, refine_direction_min

LHI_RESOLUTION = 2048


@dataclass(frozen=True)
class RateBox:
    """Symmetric per-input rate bounds ordered like the Jacobian's columns."""

    bounds: NDArray[np.float64]

    def __post_init__(self) -> None:
        b = np.asarray(self.bounds, dtype=float)
        if b.ndim != 1 or np.any(b < 0.0) or not np.isfinite(b).all():
            raise ValueError("rate bounds must be finite and nonnegative")

    @staticmethod
    def of(platform: Platform, jac: AllocationMatrix) -> "RateBox":
        vals = []
        for label in jac.columns:
            prop = platform.propellers[label.propeller]
            vals.append(prop.u_rate_max if label.kind == "u" else prop.angle_rate_max)
        return RateBox(np.array(vals))


@dataclass(frozen=True)
class MomentZonotope:
    """Zero-centered zonotope of reachable moment rates, one generator per input."""

    generators: NDArray[np.float64]  # shape (3, k)

    def __post_init__(self) -> None:
        g = np.asarray(self.generators, dtype=float)
        if g.ndim != 2 or g.shape[0] != 3:
            raise ValueError("generators must be a (3, k) array")

    def support(self, d: NDArray[np.float64]) -> float:
        return float(np.sum(np.abs(np.asarray(d, dtype=float) @ self.generators)))

    def support_many(self, dirs: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.sum(np.abs(dirs @ self.generators), axis=1)

    def facet_normals(self) -> NDArray[np.float64]:
        """Unit normals of all generator-pair facets (exact inradius probes)."""
        g = self.generators
        k = g.shape[1]
        out = []
        for i in range(k):
            for j in range(i + 1, k):
                n = np.cross(g[:, i], g[:, j])
                s = np.linalg.norm(n)
                if s > 1e-14:
                    out.append(n / s)
        return np.array(out) if out else np.zeros((0, 3))

    def inscribed_radius(self, grid: DirectionGrid | None = None) -> float:
        """Origin-centered inscribed-ball radius (0 for flat zonotopes).

        The support minimum over the sphere is attained at a facet normal,
        so probing all generator-pair normals gives the exact radius; a
        direction grid, when supplied, is probed as well.
        """
        if numeric_rank(self.generators) < 3:
            return 0.0
        vals = []
        normals = self.facet_normals()
        if normals.shape[0]:
            vals.append(float(np.min(self.support_many(normals))))
        if grid is not None:
            vals.append(float(np.min(self.support_many(grid.directions))))
        return min(vals) if vals else 0.0


@dataclass(frozen=True)
class LocalMomentSet:
    """Moment rates reachable while the hover force balance stays fixed.

    Input rates live in a unit box after column scaling; forcing the force
    rows to zero and mapping through the moment rows gives a slice of the
    wrench-rate zonotope: centrally symmetric and convex, but generally
    not a zonotope itself, so supports come from a small LP solved in
    closed form through its dual (see support_many).
    """

    moment_gens: NDArray[np.float64]  # (3, k), rate-scaled moment columns
    force_gens: NDArray[np.float64]  # (3, k), rate-scaled force columns

    def __post_init__(self) -> None:
        m = np.asarray(self.moment_gens, dtype=float)
        f = np.asarray(self.force_gens, dtype=float)
        if m.ndim != 2 or m.shape[0] != 3 or f.shape != m.shape:
            raise ValueError("moment and force generators must both be (3, k)")

    @cached_property
    def _dual_bases(self):
        """Invertible row subsets of the reduced dual system, precomputed.

        Support along d is max d.(Gm r) over the box slice; its LP dual is
        an unconstrained L1 fit min_z sum_i |(Gm^T d)_i - (T z)_i| with
        T = Gf^T U_r spanning the force rows' row space.  The minimum sits
        at a basic point where rank(Gf) residuals vanish, so enumerating
        invertible row subsets of T solves every direction at once.
        """
        Gf = self.force_gens
        k = Gf.shape[1]
        r = numeric_rank(Gf) if k else 0
        if r == 0:
            return None
        U, _, _ = np.linalg.svd(Gf)
        T = Gf.T @ U[:, :r]  # (k, r)
        scale = float(np.max(np.abs(T))) or 1.0
        invs, subs = [], []
        for S in combinations(range(k), r):
            M = T[list(S)]
            if abs(np.linalg.det(M)) <= 1e-12 * scale**r:
                continue
            invs.append(np.linalg.inv(M))
            subs.append(S)
        return T, np.array(invs), np.array(subs)

    def support_many(self, dirs: NDArray[np.float64]) -> NDArray[np.float64]:
        """Exact support values for a batch of directions (rows of dirs)."""
        c = np.atleast_2d(np.asarray(dirs, dtype=float)) @ self.moment_gens  # (n, k)
        if self._dual_bases is None:
            return np.sum(np.abs(c), axis=1)
        T, invs, subs = self._dual_bases
        best = np.full(c.shape[0], np.inf)
        for inv, sub in zip(invs, subs):
            z = c[:, sub] @ inv.T  # (n, r)
            np.minimum(best, np.sum(np.abs(c - z @ T.T), axis=1), out=best)
        return best

    def support(self, d: NDArray[np.float64]) -> float:
        return float(self.support_many(np.asarray(d, dtype=float)[np.newaxis, :])[0])

    @cached_property
    def rank(self) -> int:
        """Dimension of the slice: moment image of the force rows' kernel."""
        kernel = nullspace(self.force_gens)
        if kernel.shape[1] == 0:
            return 0
        return numeric_rank(self.moment_gens @ kernel)

    def inscribed_radius(self, grid: DirectionGrid | None = None) -> float:
        """Origin-centered inscribed-ball radius (0 for flat slices).

        Support minimum over a direction grid with deterministic ring
        descent from the three best seeds; unlike the zonotope there is no
        cheap exact facet list, so this mirrors the grid+refine pattern
        used for the other inscribed radii.
        """
        if self.rank < 3:
            return 0.0
        grid = grid or DirectionGrid.fibonacci(LHI_RESOLUTION)
        dirs = grid.directions
        vals = self.support_many(dirs)
        order = np.argsort(vals)[:3]
        spacing = 2.0 / np.sqrt(len(dirs))
        best = float(vals[order[0]])
        for idx in order:
            v, _ = refine_direction_min(self.support, dirs[idx], radius=1.5 * spacing)
            if v is not None and v < best:
                best = float(v)
        return best

    def support_points(self, dirs: NDArray[np.float64]) -> NDArray[np.float64]:
        """Boundary points attaining the support in each direction (LP solve).

        Used for point-cloud exports; the closed-form dual gives values but
        not maximizers, so this goes through the primal LP.
        """
        from scipy.optimize import linprog

        k = self.moment_gens.shape[1]
        pts = []
        for d in np.atleast_2d(np.asarray(dirs, dtype=float)):
            res = linprog(
                -(d @ self.moment_gens),
                A_eq=self.force_gens,
                b_eq=np.zeros(3),
                bounds=[(-1.0, 1.0)] * k,
                method="highs",
            )
            if res.status == 0:
                pts.append(self.moment_gens @ res.x)
        return np.array(pts) if pts else np.zeros((0, 3))


def local_moment_zonotope(platform: Platform, control: ControlInput) -> MomentZonotope:
    """Zonotope of moment rates reachable within the actuator rate limits."""
    jac = full_jacobian(platform, control)
    rates = RateBox.of(platform, jac)
    return MomentZonotope(jac.moment_rows * rates.bounds[np.newaxis, :])


def local_moment_set(platform: Platform, control: ControlInput) -> LocalMomentSet:
    """Force-balance-preserving moment-rate set at a hover control."""
    jac = full_jacobian(platform, control)
    rates = RateBox.of(platform, jac)
    return LocalMomentSet(
        jac.moment_rows * rates.bounds[np.newaxis, :],
        jac.force_rows * rates.bounds[np.newaxis, :],
    )


def lhi(
    platform: Platform,
    control: ControlInput,
    grid: DirectionGrid | None = None,
) -> float:
    """Local hoverability index at a hover control [N.m/s]."""
    return local_moment_set(platform, control).inscribed_radius(grid)


LHI_INFEASIBLE = float("nan")


@dataclass(frozen=True)
class LhiCell:
    phi_deg: float
    theta_deg: float
    lhi: float  # NaN when hovering is infeasible at this orientation
    feasible: bool
    solution: HoverSolution | None


@dataclass(frozen=True)
class LhiMap:
    cells: tuple[LhiCell, ...]

    def max_lhi(self) -> float:
        vals = [c.lhi for c in self.cells if c.feasible]
        return max(vals) if vals else 0.0

    def min_lhi(self) -> float:
        vals = [c.lhi for c in self.cells if c.feasible]
        return min(vals) if vals else 0.0


def lhi_at_orientation(
    platform: Platform,
    phi_deg: float,
    theta_deg: float,
    grid: DirectionGrid | None = None,
) -> LhiCell:
    """Solve hover at (phi, theta) and evaluate the LHI at the witness."""
    R = orientation_from_angles(np.deg2rad(phi_deg), np.deg2rad(theta_deg))
    sol = solve_hover(platform, R)
    if not sol.interior or sol.control is None:
        return LhiCell(phi_deg, theta_deg, LHI_INFEASIBLE, False, sol)
    return LhiCell(phi_deg, theta_deg, lhi(platform, sol.control, grid), True, sol)


def lhi_map(
    platform: Platform,
    step_deg: float = 5.0,
    grid: DirectionGrid | None = None,
    phi_range: tuple[float, float] = (-180.0, 180.0),
    theta_range: tuple[float, float] = (-180.0, 180.0),
) -> LhiMap:
    """LHI swept over the hover-orientation grid; infeasible cells carry NaN."""
    phis = np.arange(phi_range[0], phi_range[1], step_deg)
    thetas = np.arange(theta_range[0], theta_range[1], step_deg)
    cells = []
    for phi in phis:
        for theta in thetas:
            cells.append(lhi_at_orientation(platform, float(phi), float(theta), grid))
    return LhiMap(tuple(cells))


def rank_equivalence_check(platform: Platform, control: ControlInput, rank_tol: float = DEFAULT_RANK_TOL) -> bool:
    """Does the Jacobian at this (interior) control span what the reduced map spans?"""
    return numeric_rank(full_jacobian(platform, control).matrix, rank_tol) == numeric_rank(
        reduced_allocation(platform).matrix, rank_tol
    )


def fixed_orientation_sustain_check(platform: Platform, control: ControlInput) -> bool:
    """Frozen-tilt sustain test at a hover control (see hover.frozen_sustain_check)."""
    return frozen_sustain_check(platform, control)


@dataclass(frozen=True)
class LhiCalibration:
    """One-point fit of the reporting time constant for LHI values.

    Raw LHI values are moment rates over unit time; published maps fold in
    a control-tick time constant that cancels out of every relative
    comparison.  Fitting that single scale at the primary orientation
    turns every other cell of the map into a prediction.
    """

    platform: Platform
    time_constant: float  # [s]
    raw_primary: float
    raw_secondary: float
    target_primary: float

    @property
    def lhi_primary(self) -> float:
        return self.raw_primary * self.time_constant

    @property
    def lhi_secondary(self) -> float:
        return self.raw_secondary * self.time_constant

    @property
    def ratio(self) -> float:
        """Secondary/primary LHI ratio; independent of the fitted scale."""
        return self.raw_secondary / self.raw_primary


def calibrate_lhi(
    platform: Platform,
    primary: tuple[float, float],
    secondary: tuple[float, float],
    target_primary: float,
    grid: DirectionGrid | None = None,
) -> LhiCalibration:
    """Fit the reporting time constant so the primary-orientation LHI hits
    target_primary; the secondary orientation then becomes a prediction.

    primary/secondary are (phi_deg, theta_deg) orientation pairs.
    """
    a = lhi_at_orientation(platform, primary[0], primary[1], grid)
    b = lhi_at_orientation(platform, secondary[0], secondary[1], grid)
    if not (a.feasible and b.feasible):
        raise RuntimeError("calibration orientations must be hover-feasible")
    if a.lhi <= 0.0:
        raise RuntimeError("primary-orientation LHI is zero; nothing to calibrate")
    return LhiCalibration(platform, target_primary / a.lhi, a.lhi, b.lhi, target_primary)
