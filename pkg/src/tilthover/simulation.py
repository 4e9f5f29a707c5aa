"""Newton-Euler rigid body simulation with rate-limited actuators.

The plant is a single rigid body driven by the propeller wrench: thrusts
and tilt angles integrate with explicit Euler under per-input rate
saturation and position clamping, while the body states integrate with a
fixed-step RK4 whose rotation component lives on the rotation group (a
local exponential chart per step, so orthonormality never degrades).

On top of the plant sits a deliberately simple wrench-rate allocator: the
damped pseudo-inverse of the full Jacobian maps a proportional wrench
error to input rates.  There is no attitude feedback anywhere; the two
canned experiments command a fixed body-frame wrench and watch how fast
the actuators can realize it, which isolates actuation dynamics from
controller tuning.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .allocation import full_jacobian
from .geometry import dexpinv, normalized, rot_x, so3_exp, so3_log
from .hover import solve_hover
from .platform import (
    ControlInput,
    Platform,
    body_wrench,
    input_dof_values,
    input_from_dof_values,
)

Vec3 = NDArray[np.float64]
Mat3 = NDArray[np.float64]

Z_WORLD = np.array([0.0, 0.0, 1.0])

DEFAULT_DT = 1e-3
EARLY_WINDOW = 0.050  # s, head-of-response integration window
SETTLE_ANGLE = np.radians(0.5)


class SimulationDivergedError(RuntimeError):
    """A state component became non-finite during integration."""


class HoverInfeasibleError(RuntimeError):
    """An experiment requires a hover witness that does not exist."""


@dataclass(frozen=True)
class ControllerGains:
    """Wrench-rate allocator tuning."""

    wrench_gain: float = 50.0  # 1/s, proportional rate on the wrench error
    damping: float = 1e-3  # pseudo-inverse regularization

    def __post_init__(self) -> None:
        if self.wrench_gain <= 0.0 or self.damping < 0.0:
            raise ValueError("wrench_gain must be positive and damping nonnegative")


@dataclass(frozen=True)
class RigidBodyState:
    """Body pose and twist plus the actuator state, at one instant."""

    position: Vec3  # world [m]
    velocity: Vec3  # world [m/s]
    rotation: Mat3  # body to world
    omega: Vec3  # body [rad/s]
    control: ControlInput
    time: float = 0.0


def rest_state(platform: Platform, orientation: Mat3, control: ControlInput) -> RigidBodyState:
    """State at the origin with zero twist, given orientation and actuators."""
    del platform
    return RigidBodyState(
        position=np.zeros(3),
        velocity=np.zeros(3),
        rotation=np.asarray(orientation, dtype=float),
        omega=np.zeros(3),
        control=control,
        time=0.0,
    )


def hover_state(platform: Platform, orientation: Mat3) -> RigidBodyState:
    """Rest state at a hover witness, or HoverInfeasibleError."""
    sol = solve_hover(platform, orientation)
    if not sol.feasible or sol.control is None:
        raise HoverInfeasibleError(
            f"platform cannot hover at the requested orientation: {sol.message or 'infeasible'}"
        )
    return rest_state(platform, orientation, sol.control)


def rate_bounds(platform: Platform) -> NDArray[np.float64]:
    """Per-input rate limits ordered like input_dof_values."""
    vals = [platform.propellers[i].u_rate_max for i in platform.functional_indices()]
    for i in platform.functional_indices():
        prop = platform.propellers[i]
        vals.extend(prop.angle_rate_max for _ in prop.angle_ranges())
    return np.array(vals)


def input_bounds(platform: Platform) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Position limits (lo, hi) per input, ordered like input_dof_values."""
    lo = [0.0 for _ in platform.functional_indices()]
    hi = [platform.propellers[i].u_max for i in platform.functional_indices()]
    for i in platform.functional_indices():
        for _, rng in platform.propellers[i].angle_ranges():
            lo.append(rng[0])
            hi.append(rng[1])
    return np.array(lo), np.array(hi)


def saturate_rates(platform: Platform, rates: NDArray[np.float64]) -> NDArray[np.float64]:
    bounds = rate_bounds(platform)
    return np.clip(np.asarray(rates, dtype=float), -bounds, bounds)


def _accelerations(
    platform: Platform, rotation: Mat3, omega: Vec3, wrench: NDArray[np.float64]
) -> tuple[Vec3, Vec3]:
    """Linear (world) and angular (body) accelerations under one body wrench."""
    J = platform.inertia_matrix
    force, moment = wrench[:3], wrench[3:]
    accel = -platform.gravity * Z_WORLD + (rotation @ force) / platform.mass
    omega_dot = np.linalg.solve(J, moment - np.cross(omega, J @ omega))
    return accel, omega_dot


def step(
    platform: Platform,
    state: RigidBodyState,
    control_rates: NDArray[np.float64],
    dt: float,
) -> RigidBodyState:
    """Advance one time step.

    Actuators move first (explicit Euler of the saturated rates, clamped to
    their position ranges); the rigid body then integrates under the wrench
    of the updated actuators, held constant across the step.  The rotation
    advances through a local exponential chart: sigma parametrizes
    R = R0 exp(skew(sigma)) and integrates alongside the vector states, so
    the RK4 stages stay on the group to fourth order.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    rates = saturate_rates(platform, control_rates)
    if not np.isfinite(rates).all():
        raise SimulationDivergedError("non-finite control rates")

    h = input_dof_values(platform, state.control)
    lo, hi = input_bounds(platform)
    h_new = np.clip(h + rates * dt, lo, hi)
    control = input_from_dof_values(platform, h_new)

    wrench = body_wrench(platform, control)
    R0 = state.rotation

    def deriv(y: NDArray[np.float64]) -> NDArray[np.float64]:
        sigma, omega = y[6:9], y[9:12]
        rotation = R0 @ so3_exp(sigma)
        accel, omega_dot = _accelerations(platform, rotation, omega, wrench)
        return np.concatenate([y[3:6], accel, dexpinv(-sigma, omega), omega_dot])

    y0 = np.concatenate([state.position, state.velocity, np.zeros(3), state.omega])
    k1 = deriv(y0)
    k2 = deriv(y0 + 0.5 * dt * k1)
    k3 = deriv(y0 + 0.5 * dt * k2)
    k4 = deriv(y0 + dt * k3)
    y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    if not np.isfinite(y1).all():
        raise SimulationDivergedError(f"state diverged at t={state.time + dt:.6f}")

    rotation = R0 @ so3_exp(y1[6:9])
    # polar projection keeps orthonormality at machine precision
    U, _, Vt = np.linalg.svd(rotation)
    rotation = U @ Vt

    return RigidBodyState(
        position=y1[0:3],
        velocity=y1[3:6],
        rotation=rotation,
        omega=y1[9:12],
        control=control,
        time=state.time + dt,
    )


def wrench_rate_controller(
    platform: Platform,
    state: RigidBodyState,
    desired_wrench: NDArray[np.float64],
    gains: ControllerGains = ControllerGains(),
) -> NDArray[np.float64]:
    """Input rates tracking a desired body wrench, saturated to the rate box.

    The damped pseudo-inverse of the full Jacobian maps the proportional
    wrench error to rates; damping keeps the map bounded at singular
    operating points (e.g. zero thrust, where angle columns vanish).
    """
    jac = full_jacobian(platform, state.control)
    error = np.asarray(desired_wrench, dtype=float) - body_wrench(platform, state.control)
    F = jac.matrix
    gram = F @ F.T + gains.damping**2 * np.eye(6)
    rates = F.T @ np.linalg.solve(gram, gains.wrench_gain * error)
    return saturate_rates(platform, rates)


@dataclass(frozen=True)
class ExperimentResult:
    """Uniformly sampled run log plus the summary scalars of one experiment.

    Arrays share the leading sample axis. rates[k] is the saturated
    controller output computed at sample k (applied over [t_k, t_k+dt)).
    """

    times: NDArray[np.float64]  # (n,)
    positions: NDArray[np.float64]  # (n, 3)
    velocities: NDArray[np.float64]  # (n, 3)
    rotations: NDArray[np.float64]  # (n, 3, 3)
    omegas: NDArray[np.float64]  # (n, 3)
    controls: NDArray[np.float64]  # (n, dof) input_dof_values layout
    rates: NDArray[np.float64]  # (n, dof)
    commanded: NDArray[np.float64]  # (n, 6)
    applied: NDArray[np.float64]  # (n, 6) = body_wrench(control)
    rise_time: float | None = None  # s, to 90% of a stepped moment
    early_moment: float | None = None  # N*m*s over the first 50 ms
    settle_time: float | None = None  # s, force direction within 0.5 deg

    @property
    def samples(self) -> int:
        return len(self.times)


def _run(
    platform: Platform,
    state: RigidBodyState,
    desired_wrench: NDArray[np.float64],
    duration: float,
    dt: float,
    gains: ControllerGains,
) -> tuple[list[RigidBodyState], NDArray[np.float64]]:
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    n_steps = int(round(duration / dt))
    states = [state]
    rates_log = np.zeros((n_steps + 1, platform.dof))
    for k in range(n_steps):
        rates = wrench_rate_controller(platform, states[-1], desired_wrench, gains)
        rates_log[k] = rates
        states.append(step(platform, states[-1], rates, dt))
    rates_log[n_steps] = wrench_rate_controller(platform, states[-1], desired_wrench, gains)
    return states, rates_log


def _log(
    platform: Platform,
    states: list[RigidBodyState],
    rates_log: NDArray[np.float64],
    desired_wrench: NDArray[np.float64],
) -> ExperimentResult:
    n = len(states)
    return ExperimentResult(
        times=np.array([s.time for s in states]),
        positions=np.array([s.position for s in states]),
        velocities=np.array([s.velocity for s in states]),
        rotations=np.array([s.rotation for s in states]),
        omegas=np.array([s.omega for s in states]),
        controls=np.array([input_dof_values(platform, s.control) for s in states]),
        rates=rates_log,
        commanded=np.tile(desired_wrench, (n, 1)),
        applied=np.array([body_wrench(platform, s.control) for s in states]),
    )


def _axis_vector(axis: str | NDArray[np.float64]) -> Vec3:
    if isinstance(axis, str):
        try:
            return np.eye(3)["xyz".index(axis.lower())]
        except ValueError:
            raise ValueError(f"axis must be one of x, y, z or a vector, got {axis!r}") from None
    return normalized(np.asarray(axis, dtype=float))


def moment_step_experiment(
    platform: Platform,
    orientation: Mat3,
    axis: str | NDArray[np.float64] = "x",
    magnitude: float = 1.5,
    duration: float = 2.0,
    dt: float = DEFAULT_DT,
    gains: ControllerGains = ControllerGains(),
) -> ExperimentResult:
    """Step a body-frame moment on top of the hover force and track it open loop.

    The commanded wrench is the hover witness force plus magnitude times the
    body axis, constant for the whole run.  Summary scalars: time for the
    applied moment component along the axis to first reach 90% of the step,
    and the integral of its magnitude over the first 50 ms.
    """
    state = hover_state(platform, orientation)
    hover_force = body_wrench(platform, state.control)[:3]
    direction = _axis_vector(axis)
    desired = np.concatenate([hover_force, magnitude * direction])

    states, rates_log = _run(platform, state, desired, duration, dt, gains)
    log = _log(platform, states, rates_log, desired)

    along = log.applied[:, 3:] @ direction
    reached = np.nonzero(along >= 0.9 * magnitude)[0]
    rise = float(log.times[reached[0]]) if reached.size else None
    head = log.times <= EARLY_WINDOW + 1e-12
    early = float(np.trapezoid(np.abs(along[head]), log.times[head]))
    return replace(log, rise_time=rise, early_moment=early)


def force_orientation_experiment(
    platform: Platform,
    orientation: Mat3,
    rotation_angle: float = np.radians(5.0),
    duration: float = 2.0,
    dt: float = DEFAULT_DT,
    gains: ControllerGains = ControllerGains(),
) -> ExperimentResult:
    """Rotate the commanded hover-force direction about body x and track it.

    The commanded wrench keeps the hover force magnitude and zero moment but
    tilts the direction by rotation_angle.  The summary scalar is the
    settling time: the first sample from which the angle between applied
    and commanded force directions stays within 0.5 degrees.
    """
    state = hover_state(platform, orientation)
    hover_force = body_wrench(platform, state.control)[:3]
    target_dir = rot_x(rotation_angle) @ normalized(hover_force)
    desired = np.concatenate([float(np.linalg.norm(hover_force)) * target_dir, np.zeros(3)])

    states, rates_log = _run(platform, state, desired, duration, dt, gains)
    log = _log(platform, states, rates_log, desired)

    errors = force_direction_errors(log, target_dir)
    beyond = np.nonzero(errors > SETTLE_ANGLE)[0]
    if beyond.size == 0:
        settle = 0.0
    elif beyond[-1] + 1 < log.samples:
        settle = float(log.times[beyond[-1] + 1])
    else:
        settle = None
    return replace(log, settle_time=settle)


def force_direction_errors(log: ExperimentResult, target_dir: Vec3) -> NDArray[np.float64]:
    """Angle [rad] between the applied force and a target direction, per sample."""
    forces = log.applied[:, :3]
    norms = np.linalg.norm(forces, axis=1)
    safe = np.where(norms > 1e-12, norms, 1.0)
    cosines = np.clip((forces @ target_dir) / safe, -1.0, 1.0)
    out = np.arccos(cosines)
    out[norms <= 1e-12] = np.pi
    return out


def attitude_drift(result: ExperimentResult) -> float:
    """Largest rotation angle [rad] between any logged attitude and the first."""
    R0 = result.rotations[0]
    worst = 0.0
    for R in result.rotations:
        worst = max(worst, float(np.linalg.norm(so3_log(R0.T @ R))))
    return worst


def hold_experiment(
    platform: Platform,
    orientation: Mat3,
    duration: float = 1.0,
    dt: float = DEFAULT_DT,
) -> ExperimentResult:
    """Simulate the hover witness with zero commanded rates (drift check)."""
    state = hover_state(platform, orientation)
    n_steps = int(round(duration / dt))
    states = [state]
    for _ in range(n_steps):
        states.append(step(platform, states[-1], np.zeros(platform.dof), dt))
    desired = body_wrench(platform, state.control)
    return _log(platform, states, np.zeros((n_steps + 1, platform.dof)), desired)
