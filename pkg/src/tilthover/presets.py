"""Built-in reference platforms.

Six designs spanning the hover taxonomy, all with arm length 0.2 m and
drag-to-thrust ratio magnitude 0.012 m where applicable:

  quadrotor                  classical coplanar colinear X quad (no tilts)
  birotor-dualtilt           two radially tilting propellers on a raised axle
  trirotor-tail              two fixed fronts plus a radially tilting tail
  trirotor-radial            three radially tilting propellers, full range
  dualtilt-trirotor          three dual-tilt propellers, full range
  dualtilt-trirotor-failed3  the same with propeller 3 non-functional

The failed variant keeps a small default mass so that it remains
hover-capable out of the box; its zero-moment force ball is tiny.
"""

from __future__ import annotations

import numpy as np

from .platform import DualTilt, FixedTilt, Platform, Propeller, RadialTilt

ARM_LENGTH = 0.2
DRAG_RATIO = 0.012
DEFAULT_U_MAX = 6.0
DEFAULT_U_RATE = 50.0
DEFAULT_ANGLE_RATE = 4.1


def _ring_position(angle_deg: float, arm: float = ARM_LENGTH, z: float = 0.0):
    a = np.deg2rad(angle_deg)
    return (arm * float(np.cos(a)), arm * float(np.sin(a)), z)


def _prop(position, capability, drag, u_max=DEFAULT_U_MAX):
    return Propeller(
        position=position,
        capability=capability,
        drag_ratio=drag,
        u_max=u_max,
        u_rate_max=DEFAULT_U_RATE,
        angle_rate_max=DEFAULT_ANGLE_RATE,
    )


def quadrotor() -> Platform:
    """Coplanar colinear X quadrotor; spin handedness alternates around the ring."""
    props = tuple(
        _prop(_ring_position(angle), FixedTilt(), drag)
        for angle, drag in [(45.0, DRAG_RATIO), (135.0, -DRAG_RATIO), (225.0, DRAG_RATIO), (315.0, -DRAG_RATIO)]
    )
    return Platform(propellers=props, name="quadrotor")


def birotor_dualtilt() -> Platform:
    """Two counter-spinning radial-tilt propellers with both tilt axes along body y.

    The mounts sit above the body plane; the vertical offset is what gives
    the pair a full-rank moment map, letting the platform hover (at exactly
    one orientation) by tilting.
    """
    props = (
        _prop((0.0, ARM_LENGTH, 0.05), RadialTilt(), DRAG_RATIO),
        _prop((0.0, -ARM_LENGTH, 0.05), RadialTilt(), -DRAG_RATIO),
    )
    return Platform(propellers=props, name="birotor-dualtilt")


def trirotor_tail() -> Platform:
    """Conventional tricopter: fixed counter-spinning fronts, yawing tail rotor."""
    props = (
        _prop(_ring_position(60.0), FixedTilt(), DRAG_RATIO),
        _prop(_ring_position(-60.0), FixedTilt(), -DRAG_RATIO),
        _prop((-0.3, 0.0, 0.0), RadialTilt(), DRAG_RATIO),
    )
    return Platform(propellers=props, name="trirotor-tail")


def trirotor_radial() -> Platform:
    """Three radially tilting propellers, 120 degrees apart, unlimited tilt.

    Mass sits safely below the zero-moment force ball: the inscribed radius
    is 1.4985 u_max (support dips toward the tangent directions), not the
    sqrt(3) u_max the bisector directions alone would suggest.
    """
    props = (
        _prop(_ring_position(0.0), RadialTilt(), DRAG_RATIO),
        _prop(_ring_position(120.0), RadialTilt(), -DRAG_RATIO),
        _prop(_ring_position(240.0), RadialTilt(), DRAG_RATIO),
    )
    return Platform(propellers=props, mass=0.8, name="trirotor-radial")


def dualtilt_trirotor() -> Platform:
    """Three dual-tilt propellers, 120 degrees apart, unlimited tilt ranges."""
    props = (
        _prop(_ring_position(0.0), DualTilt(), DRAG_RATIO),
        _prop(_ring_position(120.0), DualTilt(), -DRAG_RATIO),
        _prop(_ring_position(240.0), DualTilt(), DRAG_RATIO),
    )
    return Platform(propellers=props, name="dualtilt-trirotor")


def dualtilt_trirotor_failed3() -> Platform:
    """Dual-tilt trirotor with propeller 3 failed; mass sized to stay hoverable."""
    base = dualtilt_trirotor()
    props = list(base.propellers)
    props[2] = Propeller(
        position=props[2].position,
        capability=props[2].capability,
        drag_ratio=props[2].drag_ratio,
        u_max=props[2].u_max,
        u_rate_max=props[2].u_rate_max,
        angle_rate_max=props[2].angle_rate_max,
        functional=False,
    )
    return Platform(
        propellers=tuple(props),
        mass=0.01,
        name="dualtilt-trirotor-failed3",
    )


PRESETS = {
    "quadrotor": quadrotor,
    "birotor-dualtilt": birotor_dualtilt,
    "trirotor-tail": trirotor_tail,
    "trirotor-radial": trirotor_radial,
    "dualtilt-trirotor": dualtilt_trirotor,
    "dualtilt-trirotor-failed3": dualtilt_trirotor_failed3,
}


def preset_names() -> list[str]:
    return list(PRESETS.keys())


def load_preset(name: str) -> Platform:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
