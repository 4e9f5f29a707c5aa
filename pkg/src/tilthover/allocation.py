"""Allocation maps from control inputs to body wrench, plus rank utilities.

Four related linear maps are built here, all 6-row (force rows on top,
moment rows below) with per-column bookkeeping:

  vector_allocation    stacked per-propeller thrust vectors -> wrench
  reduced_allocation   same map restricted to each propeller's reachable span
  fixed_allocation     thrust magnitudes -> wrench at frozen tilt angles
  full_jacobian        d(wrench)/d(thrusts, tilt angles) at an operating point

Only functional propellers contribute columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .geometry import rot_z
from .platform import (
    ControlInput,
    DualTilt,
    FixedTilt,
    Platform,
    RadialTilt,
    thrust_direction,
    thrust_direction_derivatives,
)

DEFAULT_RANK_TOL = 1e-9


@dataclass(frozen=True)
class ColumnLabel:
    """Which propeller and which input a matrix column belongs to."""

    propeller: int
    kind: str  # "vx"/"vy"/"vz" (vector components), "u", "w0"/"w1" (span basis), "alpha", "beta"


@dataclass(frozen=True)
class AllocationMatrix:
    """Dense 6xk wrench map with row semantics and column bookkeeping."""

    matrix: NDArray[np.float64]
    columns: tuple[ColumnLabel, ...]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != 6 or m.shape[1] != len(self.columns):
            raise ValueError("allocation matrix must be 6 x len(columns)")

    @property
    def force_rows(self) -> NDArray[np.float64]:
        return self.matrix[:3, :]

    @property
    def moment_rows(self) -> NDArray[np.float64]:
        return self.matrix[3:, :]

    @property
    def n_columns(self) -> int:
        return self.matrix.shape[1]


def _prop_blocks(platform: Platform) -> list[tuple[int, NDArray[np.float64]]]:
    """(index, 6x3 block [I; skew(p)+r I]) for each functional propeller."""
    blocks = []
    for i in platform.functional_indices():
        prop = platform.propellers[i]
        B = np.vstack([np.eye(3), prop.moment_map()])
        blocks.append((i, B))
    return blocks


def vector_allocation(platform: Platform) -> AllocationMatrix:
    """Map from stacked per-propeller thrust vectors to the body wrench."""
    cols: list[NDArray[np.float64]] = []
    labels: list[ColumnLabel] = []
    for i, B in _prop_blocks(platform):
        cols.append(B)
        labels += [ColumnLabel(i, k) for k in ("vx", "vy", "vz")]
    return AllocationMatrix(np.hstack(cols), tuple(labels))


def radial_span_basis(gamma: float) -> NDArray[np.float64]:
    """3x2 basis of the plane swept by a radial tilt at mount yaw gamma.

    Columns: the direction at zero tilt and its derivative with respect to
    the tilt angle, i.e. the circle's tangent at zero.
    """
    base = thrust_direction(0.0, 0.0, gamma)
    tangent = rot_z(gamma) @ np.array([0.0, 1.0, 0.0])
    return np.column_stack([base, tangent])


def reduced_allocation(platform: Platform) -> AllocationMatrix:
    """Allocation restricted to each propeller's reachable thrust span.

    Fixed propellers contribute one column (their direction through the
    wrench block), radial tilts two (the swept plane), dual tilts the full
    3-column block.  For an all-fixed platform this coincides column for
    column with fixed_allocation at the frozen angles.
    """
    cols: list[NDArray[np.float64]] = []
    labels: list[ColumnLabel] = []
    for i, B in _prop_blocks(platform):
        prop = platform.propellers[i]
        cap = prop.capability
        if isinstance(cap, FixedTilt):
            cols.append(B @ np.asarray(cap.direction, dtype=float).reshape(3, 1))
            labels.append(ColumnLabel(i, "u"))
        elif isinstance(cap, RadialTilt):
            cols.append(B @ radial_span_basis(prop.gamma))
            labels += [ColumnLabel(i, "w0"), ColumnLabel(i, "w1")]
        else:
            cols.append(B)
            labels += [ColumnLabel(i, k) for k in ("vx", "vy", "vz")]
    return AllocationMatrix(np.hstack(cols), tuple(labels))


def fixed_allocation(platform: Platform, inp: ControlInput) -> AllocationMatrix:
    """Thrust-magnitude wrench map with tilt angles frozen at inp's angles."""
    cols: list[NDArray[np.float64]] = []
    labels: list[ColumnLabel] = []
    for i, B in _prop_blocks(platform):
        prop = platform.propellers[i]
        d = prop.direction(inp.alphas[i], inp.betas[i])
        cols.append(B @ d.reshape(3, 1))
        labels.append(ColumnLabel(i, "u"))
    return AllocationMatrix(np.hstack(cols), tuple(labels))


def full_jacobian(platform: Platform, inp: ControlInput) -> AllocationMatrix:
    """Jacobian of the wrench with respect to (thrusts, tilt angles) at inp.

    Thrust columns equal the fixed_allocation columns; angle columns are the
    closed-form direction derivatives scaled by the current thrust, so they
    vanish at zero thrust.  Column order: all thrusts, then per-propeller
    angles, functional propellers only, matching input_dof_values.
    """
    thrust_cols: list[NDArray[np.float64]] = []
    angle_cols: list[NDArray[np.float64]] = []
    thrust_labels: list[ColumnLabel] = []
    angle_labels: list[ColumnLabel] = []
    for i, B in _prop_blocks(platform):
        prop = platform.propellers[i]
        u = inp.thrusts[i]
        a, b = inp.alphas[i], inp.betas[i]
        d = prop.direction(a, b)
        thrust_cols.append(B @ d.reshape(3, 1))
        thrust_labels.append(ColumnLabel(i, "u"))
        cap = prop.capability
        if isinstance(cap, (RadialTilt, DualTilt)):
            beta_eff = b if isinstance(cap, DualTilt) else 0.0
            d_alpha, d_beta = thrust_direction_derivatives(a, beta_eff, prop.gamma)
            angle_cols.append(u * (B @ d_alpha.reshape(3, 1)))
            angle_labels.append(ColumnLabel(i, "alpha"))
            if isinstance(cap, DualTilt):
                angle_cols.append(u * (B @ d_beta.reshape(3, 1)))
                angle_labels.append(ColumnLabel(i, "beta"))
    return AllocationMatrix(
        np.hstack(thrust_cols + angle_cols), tuple(thrust_labels + angle_labels)
    )


def numeric_rank(M: NDArray[np.float64], tol_rel: float = DEFAULT_RANK_TOL) -> int:
    """Singular values above tol_rel * largest; 0 for an all-zero matrix."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol_rel * s[0]))


def nullspace(M: NDArray[np.float64], tol_rel: float = DEFAULT_RANK_TOL) -> NDArray[np.float64]:
    """Orthonormal basis of ker(M) as columns (possibly zero columns)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, s, Vt = np.linalg.svd(M)
    rank = 0
    if s.size and s[0] > 0.0:
        rank = int(np.count_nonzero(s > tol_rel * s[0]))
    return Vt[rank:].T.conj()


def moment_nullspace(reduced: AllocationMatrix, tol_rel: float = DEFAULT_RANK_TOL) -> NDArray[np.float64]:
    """Basis of the zero-moment input subspace of a reduced allocation."""
    return nullspace(reduced.moment_rows, tol_rel)


def zero_moment_force_rank(reduced: AllocationMatrix, tol_rel: float = DEFAULT_RANK_TOL) -> int:
    """Dimension of the force span reachable with exactly zero moment.

    This is the force map restricted to the zero-moment input subspace; it
    is what the hover taxonomy's force rank refers to (the unrestricted
    force rows can have higher rank that is unusable at hover).
    """
    B = moment_nullspace(reduced, tol_rel)
    if B.shape[1] == 0:
        return 0
    return numeric_rank(reduced.force_rows @ B, tol_rel)
