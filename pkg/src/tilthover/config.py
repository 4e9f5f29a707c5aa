"""Declarative platform configuration: YAML in, validated Platform out.

One document per platform.  Angles are radians; any angle-valued key may
instead carry a `_deg` suffix to supply degrees.  Unknown keys are
rejected so typos fail loudly instead of silently falling back to
defaults.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
import yaml

from .platform import DualTilt, FixedTilt, Platform, Propeller, RadialTilt, TiltCapability

DEG = math.pi / 180.0

_PLATFORM_KEYS = {"name", "mass", "gravity", "inertia", "propellers"}
_PROPELLER_KEYS = {
    "position",
    "drag_ratio",
    "tilt",
    "direction",
    "alpha_range",
    "alpha_range_deg",
    "beta_range",
    "beta_range_deg",
    "gamma",
    "gamma_deg",
    "u_max",
    "u_rate_max",
    "angle_rate_max",
    "functional",
}


class ConfigError(ValueError):
    """Malformed or invalid platform configuration; message names the field."""


def _fail(path: str, why: str) -> ConfigError:
    return ConfigError(f"{path}: {why}")


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(path, f"expected a number, got {type(value).__name__}")
    out = float(value)
    if not math.isfinite(out):
        raise _fail(path, "must be finite")
    return out


def _vector(value: Any, path: str, length: int) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise _fail(path, f"expected a list of {length} numbers")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _angle_pair(
    item: dict[str, Any], key: str, path: str, default: tuple[float, float]
) -> tuple[float, float]:
    # radians key and _deg key are mutually exclusive
    if key in item and f"{key}_deg" in item:
        raise _fail(f"{path}.{key}", f"give either {key} or {key}_deg, not both")
    if key in item:
        return _vector(item[key], f"{path}.{key}", 2)  # type: ignore[return-value]
    if f"{key}_deg" in item:
        lo, hi = _vector(item[f"{key}_deg"], f"{path}.{key}_deg", 2)
        return (lo * DEG, hi * DEG)
    return default


def _check_keys(mapping: dict[str, Any], allowed: set[str], path: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise _fail(path, f"unknown keys {unknown}; allowed: {sorted(allowed)}")


def _tilt(item: dict[str, Any], path: str) -> TiltCapability:
    kind = item.get("tilt", "fixed")
    if kind == "fixed":
        for key in ("alpha_range", "alpha_range_deg", "beta_range", "beta_range_deg"):
            if key in item:
                raise _fail(f"{path}.{key}", "angle ranges apply only to radial or dual tilt")
        if "direction" in item:
            return FixedTilt(_vector(item["direction"], f"{path}.direction", 3))
        return FixedTilt()
    if "direction" in item:
        raise _fail(f"{path}.direction", "direction applies only to fixed tilt")
    full = (-math.pi, math.pi)
    alpha = _angle_pair(item, "alpha_range", path, full)
    if kind == "radial":
        for key in ("beta_range", "beta_range_deg"):
            if key in item:
                raise _fail(f"{path}.{key}", "radial tilt has no beta angle")
        return RadialTilt(alpha)
    if kind == "dual":
        return DualTilt(alpha, _angle_pair(item, "beta_range", path, full))
    raise _fail(f"{path}.tilt", f"must be one of fixed, radial, dual; got {kind!r}")


def _propeller(item: Any, path: str) -> Propeller:
    if not isinstance(item, dict):
        raise _fail(path, "expected a mapping")
    _check_keys(item, _PROPELLER_KEYS, path)
    if "position" not in item:
        raise _fail(f"{path}.position", "required")
    position = _vector(item["position"], f"{path}.position", 3)
    try:
        prop = Propeller(
            position=position,
            capability=_tilt(item, path),
            drag_ratio=_number(item.get("drag_ratio", 0.0), f"{path}.drag_ratio"),
            u_max=_number(item.get("u_max", 6.0), f"{path}.u_max"),
            u_rate_max=_number(item.get("u_rate_max", 50.0), f"{path}.u_rate_max"),
            angle_rate_max=_number(item.get("angle_rate_max", 4.1), f"{path}.angle_rate_max"),
            functional=bool(item.get("functional", True)),
        )
    except ValueError as exc:  # invariant violations from the domain types
        raise _fail(path, str(exc)) from exc

    if "gamma" in item or "gamma_deg" in item:
        stated = (
            _number(item["gamma"], f"{path}.gamma")
            if "gamma" in item
            else _number(item["gamma_deg"], f"{path}.gamma_deg") * DEG
        )
        derived = prop.gamma
        if abs(math.remainder(stated - derived, 2.0 * math.pi)) > 1e-9:
            raise _fail(
                f"{path}.gamma",
                f"inconsistent with position: stated {stated!r}, derived {derived!r}",
            )
    return prop


def _inertia(value: Any, path: str) -> tuple[tuple[float, float, float], ...]:
    if isinstance(value, (list, tuple)) and len(value) == 9:
        flat = [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
        return tuple(tuple(flat[3 * r : 3 * r + 3]) for r in range(3))  # type: ignore[return-value]
    if isinstance(value, (list, tuple)) and len(value) == 3:
        return tuple(_vector(row, f"{path}[{r}]", 3) for r, row in enumerate(value))  # type: ignore[return-value]
    raise _fail(path, "expected a 3x3 matrix (nested rows or 9 row-major numbers)")


def load_platform(text: str) -> Platform:
    """Parse and validate one platform config document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"config parse error{where}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    _check_keys(doc, _PLATFORM_KEYS, "config")
    if "mass" not in doc:
        raise _fail("config.mass", "required")
    if "propellers" not in doc or not isinstance(doc["propellers"], list) or not doc["propellers"]:
        raise _fail("config.propellers", "required nonempty list")

    props = tuple(
        _propeller(item, f"propellers[{i}]") for i, item in enumerate(doc["propellers"])
    )
    kwargs: dict[str, Any] = {
        "propellers": props,
        "mass": _number(doc["mass"], "config.mass"),
        "gravity": _number(doc.get("gravity", 9.81), "config.gravity"),
    }
    if "inertia" in doc:
        kwargs["inertia"] = _inertia(doc["inertia"], "config.inertia")
    if "name" in doc:
        if not isinstance(doc["name"], str):
            raise _fail("config.name", "must be a string")
        kwargs["name"] = doc["name"]
    try:
        return Platform(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"config: {exc}") from exc


def _tilt_fields(cap: TiltCapability) -> dict[str, Any]:
    if isinstance(cap, FixedTilt):
        return {"tilt": "fixed", "direction": list(cap.direction)}
    if isinstance(cap, RadialTilt):
        return {"tilt": "radial", "alpha_range": list(cap.alpha_range)}
    return {
        "tilt": "dual",
        "alpha_range": list(cap.alpha_range),
        "beta_range": list(cap.beta_range),
    }


def platform_dict(platform: Platform) -> dict[str, Any]:
    """Plain-data form of a platform, loadable by load_platform."""
    return {
        "name": platform.name,
        "mass": platform.mass,
        "gravity": platform.gravity,
        "inertia": [list(row) for row in platform.inertia],
        "propellers": [
            {
                "position": list(p.position),
                "drag_ratio": p.drag_ratio,
                **_tilt_fields(p.capability),
                "u_max": p.u_max,
                "u_rate_max": p.u_rate_max,
                "angle_rate_max": p.angle_rate_max,
                "functional": p.functional,
            }
            for p in platform.propellers
        ],
    }


class _ReprDumper(yaml.SafeDumper):
    """SafeDumper emitting floats at full round-trip precision."""


_ReprDumper.add_representer(
    float,
    lambda dumper, value: dumper.represent_scalar("tag:yaml.org,2002:float", repr(value)),
)


def serialize(platform: Platform) -> str:
    """Config text such that load_platform(serialize(p)) equals p."""
    return yaml.dump(platform_dict(platform), Dumper=_ReprDumper, sort_keys=False)


def to_platform(source: str | Platform) -> Platform:
    """Coerce config text to a Platform; pass a Platform through unchanged."""
    if isinstance(source, Platform):
        return source
    return load_platform(source)
