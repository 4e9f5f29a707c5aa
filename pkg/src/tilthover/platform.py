"""Vehicle model: propellers with tilt capabilities, inputs, and the wrench map.

A platform is a rigid body carrying N thrust generators.  Each generator
produces a thrust vector along a body-frame direction that is either fixed,
tiltable about one mount axis (radial tilt), or tiltable about two
(dual tilt).  Reaction drag torque is folded in through a signed
drag-to-thrust ratio, so the body wrench of generator i is

    force  contribution:  v_i
    moment contribution:  p_i x v_i + drag_ratio_i * v_i

with v_i = thrust_i * direction_i.  The tilt frame of a propeller is not a
free parameter: its yaw gamma_i is the polar angle of the propeller's
position in the body x-y plane (zero for on-axis mounts).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from .geometry import Mat3, Vec3, normalized, rot_z, skew

FULL_TURN = 2.0 * np.pi

# Interior margins shared by hover feasibility and witness validation:
# thrusts stay within [THRUST_MARGIN, 1 - THRUST_MARGIN] * u_max and tilt
# angles keep ANGLE_MARGIN away from range ends (except full-turn ranges).
THRUST_MARGIN = 0.02
ANGLE_MARGIN = np.deg2rad(2.0)


@dataclass(frozen=True)
class FixedTilt:
    """Thrust direction is a constant body-frame unit vector."""

    direction: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self) -> None:
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (3,) or not np.isfinite(d).all():
            raise ValueError("fixed tilt needs a finite 3-vector direction")
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            object.__setattr__(self, "direction", tuple(normalized(d)))


@dataclass(frozen=True)
class RadialTilt:
    """One tilt angle about the mount axis; the thrust sweeps a body-frame arc."""

    alpha_range: tuple[float, float] = (-np.pi, np.pi)

    def __post_init__(self) -> None:
        _check_range("alpha_range", self.alpha_range)


@dataclass(frozen=True)
class DualTilt:
    """Two tilt angles; the thrust direction covers a patch of the sphere."""

    alpha_range: tuple[float, float] = (-np.pi, np.pi)
    beta_range: tuple[float, float] = (-np.pi, np.pi)

    def __post_init__(self) -> None:
        _check_range("alpha_range", self.alpha_range)
        _check_range("beta_range", self.beta_range)


def _check_range(name: str, rng: tuple[float, float]) -> None:
    lo, hi = rng
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"{name} must be a finite interval with lo < hi")
    if lo < -np.pi - 1e-12 or hi > np.pi + 1e-12:
        raise ValueError(f"{name} must lie within [-pi, pi]")


TiltCapability = FixedTilt | RadialTilt | DualTilt


def tilt_dof(cap: TiltCapability) -> int:
    if isinstance(cap, FixedTilt):
        return 0
    if isinstance(cap, RadialTilt):
        return 1
    return 2


def thrust_direction(alpha: float, beta: float, gamma: float) -> Vec3:
    """Body-frame thrust direction for tilt angles (alpha, beta) at mount yaw gamma.

    alpha swings the thrust away from body z within the mount's tangential
    plane, beta tips it radially; gamma orients the mount about body z.
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    return rot_z(gamma) @ np.array([-sb, sa * cb, ca * cb])


def thrust_direction_derivatives(alpha: float, beta: float, gamma: float) -> tuple[Vec3, Vec3]:
    """(d direction/d alpha, d direction/d beta) at the given angles."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    Rz = rot_z(gamma)
    d_alpha = Rz @ np.array([0.0, ca * cb, -sa * cb])
    d_beta = Rz @ np.array([-cb, -sa * sb, -ca * sb])
    return d_alpha, d_beta


def tilt_angles_for_direction(direction: Vec3, gamma: float) -> tuple[float, float]:
    """Invert thrust_direction: angles (alpha, beta) that realize a unit direction.

    At beta = +-pi/2 every alpha yields the same direction; the convention
    here returns alpha = 0 there.
    """
    w = rot_z(-gamma) @ normalized(np.asarray(direction, dtype=float))
    planar = float(np.hypot(w[1], w[2]))
    beta = float(np.arctan2(-w[0], planar))
    alpha = float(np.arctan2(w[1], w[2])) if planar > 1e-12 else 0.0
    return alpha, beta


@dataclass(frozen=True)
class Propeller:
    """One thrust generator: placement, tilt capability, actuation limits."""

    position: tuple[float, float, float]
    capability: TiltCapability = field(default_factory=FixedTilt)
    drag_ratio: float = 0.0  # signed drag-to-thrust ratio [m], sign = spin handedness
    u_max: float = 6.0
    u_rate_max: float = 50.0
    angle_rate_max: float = 4.1
    functional: bool = True

    def __post_init__(self) -> None:
        p = np.asarray(self.position, dtype=float)
        if p.shape != (3,) or not np.isfinite(p).all():
            raise ValueError("propeller position must be a finite 3-vector")
        object.__setattr__(self, "position", tuple(float(x) for x in p))
        if not (np.isfinite(self.u_max) and self.u_max > 0.0):
            raise ValueError("u_max must be positive")
        if self.u_rate_max < 0.0 or self.angle_rate_max < 0.0:
            raise ValueError("rate limits must be nonnegative")

    @property
    def position_vec(self) -> Vec3:
        return np.asarray(self.position, dtype=float)

    @property
    def gamma(self) -> float:
        """Mount yaw: polar angle of the position's x-y projection, 0 on-axis."""
        x, y = self.position[0], self.position[1]
        if np.hypot(x, y) < 1e-12:
            return 0.0
        return float(np.arctan2(y, x))

    def moment_map(self) -> Mat3:
        """Matrix taking this propeller's thrust vector to its body moment."""
        return skew(self.position_vec) + self.drag_ratio * np.eye(3)

    def direction(self, alpha: float = 0.0, beta: float = 0.0) -> Vec3:
        """Thrust direction for the given tilt angles, honoring the capability."""
        cap = self.capability
        if isinstance(cap, FixedTilt):
            return np.asarray(cap.direction, dtype=float)
        if isinstance(cap, RadialTilt):
            return thrust_direction(alpha, 0.0, self.gamma)
        return thrust_direction(alpha, beta, self.gamma)

    def angle_ranges(self) -> list[tuple[str, tuple[float, float]]]:
        """Active tilt angles as (name, (lo, hi)) pairs, in input order."""
        cap = self.capability
        if isinstance(cap, RadialTilt):
            return [("alpha", cap.alpha_range)]
        if isinstance(cap, DualTilt):
            return [("alpha", cap.alpha_range), ("beta", cap.beta_range)]
        return []


@dataclass(frozen=True)
class Platform:
    """Rigid multi-rotor body with tiltable thrust generators."""

    propellers: tuple[Propeller, ...]
    mass: float = 1.0
    gravity: float = 9.81
    inertia: tuple[tuple[float, float, float], ...] = (
        (0.01, 0.0, 0.0),
        (0.0, 0.01, 0.0),
        (0.0, 0.0, 0.02),
    )
    name: str = "platform"

    def __post_init__(self) -> None:
        if not any(p.functional for p in self.propellers):
            raise ValueError("a platform needs at least one functional propeller")
        if not (np.isfinite(self.mass) and self.mass > 0.0):
            raise ValueError("mass must be positive")
        if not (np.isfinite(self.gravity) and self.gravity >= 0.0):
            raise ValueError("gravity must be nonnegative")
        J = np.asarray(self.inertia, dtype=float)
        if J.shape != (3, 3) or not np.allclose(J, J.T, atol=1e-12):
            raise ValueError("inertia must be a symmetric 3x3 matrix")
        if np.any(np.linalg.eigvalsh(J) <= 0.0):
            raise ValueError("inertia must be positive definite")
        object.__setattr__(self, "inertia", tuple(tuple(float(x) for x in row) for row in J))

    @property
    def n_propellers(self) -> int:
        return len(self.propellers)

    @property
    def inertia_matrix(self) -> Mat3:
        return np.asarray(self.inertia, dtype=float)

    @property
    def weight(self) -> float:
        return self.mass * self.gravity

    def functional_indices(self) -> list[int]:
        return [i for i, p in enumerate(self.propellers) if p.functional]

    @property
    def dof(self) -> int:
        """Thrust inputs plus active tilt angles, functional propellers only."""
        return sum(1 + tilt_dof(p.capability) for p in self.propellers if p.functional)


@dataclass(frozen=True)
class ControlInput:
    """Thrust magnitudes plus tilt angles, one entry per propeller.

    alphas/betas carry a value for every propeller; entries for degrees of
    freedom a propeller does not have are kept at zero and ignored.
    Non-functional propellers contribute nothing regardless of their entry.
    """

    thrusts: tuple[float, ...]
    alphas: tuple[float, ...]
    betas: tuple[float, ...]

    @staticmethod
    def zero(n: int) -> "ControlInput":
        return ControlInput((0.0,) * n, (0.0,) * n, (0.0,) * n)

    @staticmethod
    def of(thrusts, alphas=None, betas=None) -> "ControlInput":
        t = tuple(float(x) for x in thrusts)
        n = len(t)
        a = (0.0,) * n if alphas is None else tuple(float(x) for x in alphas)
        b = (0.0,) * n if betas is None else tuple(float(x) for x in betas)
        if len(a) != n or len(b) != n:
            raise ValueError("thrusts, alphas, betas must have equal length")
        return ControlInput(t, a, b)

    @property
    def thrust_vec(self) -> NDArray[np.float64]:
        return np.asarray(self.thrusts, dtype=float)

    @property
    def alpha_vec(self) -> NDArray[np.float64]:
        return np.asarray(self.alphas, dtype=float)

    @property
    def beta_vec(self) -> NDArray[np.float64]:
        return np.asarray(self.betas, dtype=float)


def input_dof_values(platform: Platform, inp: ControlInput) -> NDArray[np.float64]:
    """Flatten an input to the platform's DoF vector (thrusts, then angles)."""
    vals: list[float] = []
    for i in platform.functional_indices():
        vals.append(inp.thrusts[i])
    for i in platform.functional_indices():
        prop = platform.propellers[i]
        for name, _ in prop.angle_ranges():
            vals.append(inp.alphas[i] if name == "alpha" else inp.betas[i])
    return np.array(vals)


def input_from_dof_values(platform: Platform, values: NDArray[np.float64]) -> ControlInput:
    """Inverse of input_dof_values; failed propellers get zeros."""
    values = np.asarray(values, dtype=float)
    if values.shape != (platform.dof,):
        raise ValueError("DoF vector length mismatch")
    n = platform.n_propellers
    u = [0.0] * n
    a = [0.0] * n
    b = [0.0] * n
    idx = 0
    for i in platform.functional_indices():
        u[i] = float(values[idx])
        idx += 1
    for i in platform.functional_indices():
        for name, _ in platform.propellers[i].angle_ranges():
            if name == "alpha":
                a[i] = float(values[idx])
            else:
                b[i] = float(values[idx])
            idx += 1
    return ControlInput(tuple(u), tuple(a), tuple(b))


def thrust_vectors(platform: Platform, inp: ControlInput) -> NDArray[np.float64]:
    """Per-propeller thrust vectors in the body frame, shape (N, 3).

    Rows for non-functional propellers are zero.
    """
    if len(inp.thrusts) != platform.n_propellers:
        raise ValueError("input size does not match propeller count")
    rows = []
    for prop, u, a, b in zip(platform.propellers, inp.thrusts, inp.alphas, inp.betas):
        rows.append(u * prop.direction(a, b) if prop.functional else np.zeros(3))
    return np.array(rows)


def body_wrench(platform: Platform, inp: ControlInput) -> NDArray[np.float64]:
    """Total body wrench [force; moment], shape (6,)."""
    V = thrust_vectors(platform, inp)
    force = V.sum(axis=0)
    moment = np.zeros(3)
    for prop, v in zip(platform.propellers, V):
        moment += prop.moment_map() @ v
    return np.concatenate([force, moment])


def input_within_limits(
    platform: Platform,
    inp: ControlInput,
    thrust_margin: float = 0.0,
    angle_margin: float = 0.0,
) -> bool:
    """Check thrust and tilt-angle box constraints, with optional interior margins.

    thrust_margin shrinks the thrust interval to [m, 1-m]*u_max (relative);
    angle_margin [rad] keeps angles away from range ends, except for ranges
    spanning a full turn, which wrap and lose no interior.
    """
    for i, prop in enumerate(platform.propellers):
        if not prop.functional:
            continue
        u = inp.thrusts[i]
        if not thrust_margin * prop.u_max - 1e-9 <= u <= (1.0 - thrust_margin) * prop.u_max + 1e-9:
            return False
        for name, (lo, hi) in prop.angle_ranges():
            val = inp.alphas[i] if name == "alpha" else inp.betas[i]
            pad = 0.0 if hi - lo >= FULL_TURN - 1e-12 else angle_margin
            if not lo + pad - 1e-9 <= val <= hi - pad + 1e-9:
                return False
    return True


def freeze_tilts(platform: Platform, inp: ControlInput) -> Platform:
    """Platform with every functional propeller pinned to its current direction.

    The frozen platform keeps only thrust magnitudes as inputs: this is the
    capability available on timescales faster than any tilt servo.
    """
    frozen = []
    for prop, a, b in zip(platform.propellers, inp.alphas, inp.betas):
        if prop.functional:
            d = prop.direction(a, b)
            frozen.append(replace(prop, capability=FixedTilt(tuple(d))))
        else:
            frozen.append(prop)
    return replace(platform, propellers=tuple(frozen), name=platform.name + "-frozen")


def with_u_max(platform: Platform, u_max: float) -> Platform:
    """Copy of the platform with a uniform thrust ceiling on every propeller."""
    props = tuple(replace(p, u_max=float(u_max)) for p in platform.propellers)
    return replace(platform, propellers=props)


def with_mass(platform: Platform, mass: float) -> Platform:
    return replace(platform, mass=float(mass))


def with_rates(
    platform: Platform,
    u_rate_max: float | None = None,
    angle_rate_max: float | None = None,
) -> Platform:
    """Copy with uniform actuator rate limits (None keeps a limit unchanged)."""
    props = []
    for p in platform.propellers:
        kw = {}
        if u_rate_max is not None:
            kw["u_rate_max"] = float(u_rate_max)
        if angle_rate_max is not None:
            kw["angle_rate_max"] = float(angle_rate_max)
        props.append(replace(p, **kw) if kw else p)
    return replace(platform, propellers=tuple(props))
