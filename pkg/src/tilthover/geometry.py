"""Rotation helpers and unit-direction grids used across the package.

Everything here is plain numpy: no simulation or platform state, just the
SO(3) utilities (elementary rotations, exponential map and its inverse
trivialized differential) and the deterministic sphere/circle samplings
that the set-based analyses build on.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

Vec3 = NDArray[np.float64]
Mat3 = NDArray[np.float64]


def skew(v: Vec3) -> Mat3:
    """Cross-product matrix: skew(v) @ w == cross(v, w)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rot_x(a: float) -> Mat3:
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> Mat3:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> Mat3:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def so3_exp(u: Vec3) -> Mat3:
    """Matrix exponential of skew(u) via Rodrigues' formula."""
    theta = float(np.linalg.norm(u))
    S = skew(u)
    if theta < 1e-10:
        # second-order series; adequate below the switch point
        return np.eye(3) + S + 0.5 * (S @ S)
    return (
        np.eye(3)
        + (np.sin(theta) / theta) * S
        + ((1.0 - np.cos(theta)) / theta**2) * (S @ S)
    )


def so3_log(R: Mat3) -> Vec3:
    """Rotation vector of R. Inverse of so3_exp away from angle pi."""
    cos_theta = 0.5 * (np.trace(R) - 1.0)
    cos_theta = float(np.clip(cos_theta, -1.0, 1.0))
    theta = np.arccos(cos_theta)
    w = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if theta < 1e-8:
        return w  # first order: log(R) ~ vee(R - R^T)/2
    if theta > np.pi - 1e-6:
        # near pi the vee part degenerates; recover axis from R + I
        A = R + np.eye(3)
        k = int(np.argmax(np.diag(A)))
        axis = A[:, k] / np.linalg.norm(A[:, k])
        return theta * axis * np.sign(axis @ w) if w @ axis != 0.0 else theta * axis
    return theta / np.sin(theta) * w


def dexpinv(u: Vec3, w: Vec3) -> Vec3:
    """Inverse trivialized differential of so3_exp at u applied to w.

    Used by the Lie-group integrator: if R(t) = R0 exp(u(t)) and omega is
    the body angular velocity (R' = R skew(omega)), then u' = dexpinv(-u, omega).
    """
    theta = float(np.linalg.norm(u))
    cross1 = np.cross(u, w)
    if theta < 1e-6:
        return w - 0.5 * cross1 + np.cross(u, cross1) / 12.0
    coeff = 1.0 / theta**2 - (1.0 + np.cos(theta)) / (2.0 * theta * np.sin(theta))
    return w - 0.5 * cross1 + coeff * np.cross(u, cross1)


def normalized(v: NDArray[np.float64]) -> NDArray[np.float64]:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def fibonacci_sphere(n: int) -> NDArray[np.float64]:
    """n near-uniform unit vectors on S^2 (golden-angle lattice), shape (n, 3)."""
    if n < 1:
        raise ValueError("need at least one direction")
    i = np.arange(n, dtype=float)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def symmetrized_sphere(n: int) -> NDArray[np.float64]:
    """Antipodally closed direction grid with at least n points.

    Symmetric grids keep min/max support queries honest for centrally
    symmetric sets and cost nothing extra for general ones.
    """
    half = fibonacci_sphere((n + 1) // 2)
    return np.vstack([half, -half])


def icosphere_directions(subdivisions: int = 1) -> NDArray[np.float64]:
    """Face-center directions of a subdivided icosahedron, shape (20*4**s, 3).

    Face centers (not vertices) give a covering where every unit vector is
    within the face circumradius of a sample, which is the property the
    inner polytope approximations rely on.
    """
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    tri = [tuple(verts[i] for i in f) for f in faces]
    for _ in range(subdivisions):
        finer = []
        for a, b, c in tri:
            ab = normalized(a + b)
            bc = normalized(b + c)
            ca = normalized(c + a)
            finer += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        tri = finer
    centers = np.array([normalized(a + b + c) for a, b, c in tri])
    return centers


def circle_directions(n: int) -> NDArray[np.float64]:
    """n evenly spaced unit vectors in the plane, shape (n, 2)."""
    ang = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang)])


def orthonormal_tangent_basis(d: Vec3) -> tuple[Vec3, Vec3]:
    """Two unit vectors spanning the plane orthogonal to unit vector d."""
    pick = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    t1 = normalized(np.cross(d, pick))
    return t1, np.cross(d, t1)
