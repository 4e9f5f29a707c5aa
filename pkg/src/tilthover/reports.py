"""Operation layer shared by the CLI and the HTTP service.

Every public function here runs one analysis and returns plain data
(dicts, lists, numbers) ready for canonical JSON emission or pydantic
wrapping.  Orientations enter and leave as degrees; control angles stay
radians like everywhere else in the library.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Iterable

import numpy as np

from . import __version__
from .allocation import (
    DEFAULT_RANK_TOL,
    AllocationMatrix,
    fixed_allocation,
    full_jacobian,
    numeric_rank,
    reduced_allocation,
    vector_allocation,
)
from .hover import HoverSolution, can_statically_hover, classify, is_csh, orientation_from_angles, solve_hover
from .local_hover import LhiCell, lhi_at_orientation, local_moment_set, local_moment_zonotope
from .platform import ControlInput, Platform, input_dof_values
from .simulation import (
    ControllerGains,
    ExperimentResult,
    HoverInfeasibleError,
    force_orientation_experiment,
    moment_step_experiment,
)
from .wrench_sets import DirectionGrid, force_set_at_hover, odl

DEFAULT_MAP_STEP_DEG = 30.0
DEFAULT_RESOLUTION = 2048


class DomainInfeasibleError(RuntimeError):
    """The requested analysis needs a capability the platform lacks."""


def platform_block(platform: Platform) -> dict[str, Any]:
    return {
        "name": platform.name,
        "mass": platform.mass,
        "gravity": platform.gravity,
        "n_propellers": platform.n_propellers,
        "n_functional": len(platform.functional_indices()),
        "dof": platform.dof,
    }


def control_block(control: ControlInput | None) -> dict[str, Any] | None:
    if control is None:
        return None
    return {
        "thrusts": list(control.thrusts),
        "alphas": list(control.alphas),
        "betas": list(control.betas),
    }


def _solution_block(sol: HoverSolution) -> dict[str, Any]:
    return {
        "feasible": sol.feasible,
        "interior": sol.interior,
        "orientation": [list(row) for row in np.asarray(sol.orientation)],
        "control": control_block(sol.control),
        "residual_force": sol.residual_force,
        "residual_moment": sol.residual_moment,
        "margin": sol.margin,
        "message": sol.message,
    }


def analyze_report(
    platform: Platform,
    rank_tol: float = DEFAULT_RANK_TOL,
    resolution: int = DEFAULT_RESOLUTION,
) -> dict[str, Any]:
    cls = classify(platform, rank_tol=rank_tol, odl_resolution=resolution)
    check = can_statically_hover(platform, rank_tol=rank_tol)
    return {
        "platform": platform_block(platform),
        "classification": {
            "category": cls.category,
            "csh": cls.csh,
            "rank_reduced_allocation": cls.rank_A,
            "rank_zero_moment_force": cls.rank_Af,
            "odl": cls.odl,
        },
        "hover": {
            "hoverable": check.hoverable,
            "rank_moment_rows": check.rank_Am,
            "max_lift": check.max_lift,
            "lift_direction": list(check.lift_direction),
            "moment_origin_interior": check.moment_origin_interior,
            "witness": _solution_block(check.witness) if check.witness else None,
        },
    }


def hover_solve_report(platform: Platform, phi_deg: float, theta_deg: float) -> dict[str, Any]:
    """Never raises on infeasibility; the report carries feasible=false instead."""
    R = orientation_from_angles(np.deg2rad(phi_deg), np.deg2rad(theta_deg))
    sol = solve_hover(platform, R)
    return {
        "platform": platform_block(platform),
        "phi_deg": phi_deg,
        "theta_deg": theta_deg,
        **_solution_block(sol),
    }


def _angle_grid(step_deg: float) -> list[tuple[float, float]]:
    phis = np.arange(-180.0, 180.0, step_deg)
    thetas = np.arange(-180.0, 180.0, step_deg)
    return [(float(p), float(t)) for p in phis for t in thetas]


def _pooled(fn, items: list, threads: int) -> list:
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def hover_map_report(
    platform: Platform, step_deg: float = DEFAULT_MAP_STEP_DEG, threads: int = 1
) -> dict[str, Any]:
    pairs = _angle_grid(step_deg)

    def cell(pair: tuple[float, float]) -> dict[str, Any]:
        phi, theta = pair
        sol = solve_hover(platform, orientation_from_angles(np.deg2rad(phi), np.deg2rad(theta)))
        return {
            "phi_deg": phi,
            "theta_deg": theta,
            "feasible": sol.feasible,
            "interior": sol.interior,
            "margin": sol.margin if sol.feasible else float("nan"),
        }

    cells = _pooled(cell, pairs, threads)
    interior = sum(1 for c in cells if c["interior"])
    return {
        "platform": platform_block(platform),
        "step_deg": step_deg,
        "cells": cells,
        "interior_fraction": interior / len(cells) if cells else 0.0,
    }


def hover_map_rows(report: dict[str, Any]) -> tuple[list[str], list[list[Any]]]:
    header = ["phi_deg", "theta_deg", "feasible", "interior", "margin"]
    rows = [[c[k] for k in header] for c in report["cells"]]
    return header, rows


def odl_report(platform: Platform, resolution: int = DEFAULT_RESOLUTION) -> dict[str, Any]:
    result = odl(platform, resolution=resolution)
    report = {
        "platform": platform_block(platform),
        "odl": result.odl,
        "min_direction": list(result.min_direction),
        "resolution": result.resolution,
        "degenerate": result.degenerate,
    }
    if result.degenerate:
        report["warning"] = "zero-moment force set spans fewer than 3 dimensions; odl is 0"
    return report


def force_set_report(platform: Platform, resolution: int = DEFAULT_RESOLUTION) -> dict[str, Any]:
    cloud = force_set_at_hover(platform, resolution=resolution)
    pts = np.asarray(cloud.points)
    norms = np.linalg.norm(pts, axis=1)
    return {
        "platform": platform_block(platform),
        "resolution": resolution,
        "max_magnitude": float(norms.max()),
        "min_magnitude": float(norms.min()),
        "points": [list(p) for p in pts],
    }


def force_set_rows(report: dict[str, Any]) -> tuple[list[str], list[list[Any]]]:
    return ["fx", "fy", "fz"], [list(p) for p in report["points"]]


def _lhi_cell_dict(cell: LhiCell) -> dict[str, Any]:
    return {
        "phi_deg": cell.phi_deg,
        "theta_deg": cell.theta_deg,
        "feasible": cell.feasible,
        "lhi": cell.lhi,
    }


def lhi_report(
    platform: Platform, phi_deg: float, theta_deg: float, resolution: int = DEFAULT_RESOLUTION
) -> dict[str, Any]:
    cell = lhi_at_orientation(platform, phi_deg, theta_deg, DirectionGrid.fibonacci(resolution))
    if not cell.feasible:
        raise DomainInfeasibleError(
            f"no interior hover at phi={phi_deg} deg, theta={theta_deg} deg; lhi undefined"
        )
    assert cell.solution is not None
    return {
        "platform": platform_block(platform),
        **_lhi_cell_dict(cell),
        "resolution": resolution,
        "witness": _solution_block(cell.solution),
    }


def lhi_map_report(
    platform: Platform,
    step_deg: float = DEFAULT_MAP_STEP_DEG,
    resolution: int = DEFAULT_RESOLUTION,
    threads: int = 1,
) -> dict[str, Any]:
    grid = DirectionGrid.fibonacci(resolution)
    pairs = _angle_grid(step_deg)
    cells = _pooled(
        lambda pair: _lhi_cell_dict(lhi_at_orientation(platform, pair[0], pair[1], grid)),
        pairs,
        threads,
    )
    finite = [c["lhi"] for c in cells if c["feasible"]]
    return {
        "platform": platform_block(platform),
        "step_deg": step_deg,
        "resolution": resolution,
        "cells": cells,
        "max_lhi": max(finite) if finite else float("nan"),
        "min_lhi": min(finite) if finite else float("nan"),
    }


def lhi_map_rows(report: dict[str, Any]) -> tuple[list[str], list[list[Any]]]:
    header = ["phi_deg", "theta_deg", "feasible", "lhi"]
    return header, [[c[k] for k in header] for c in report["cells"]]


def moment_sets_report(
    platform: Platform, phi_deg: float, theta_deg: float, resolution: int = 512
) -> dict[str, Any]:
    R = orientation_from_angles(np.deg2rad(phi_deg), np.deg2rad(theta_deg))
    sol = solve_hover(platform, R)
    if not sol.interior or sol.control is None:
        raise DomainInfeasibleError(
            f"no interior hover at phi={phi_deg} deg, theta={theta_deg} deg"
        )
    slice_set = local_moment_set(platform, sol.control)
    zono = local_moment_zonotope(platform, sol.control)
    dirs = DirectionGrid.fibonacci(resolution).directions
    slice_support = slice_set.support_many(dirs)
    zono_support = zono.support_many(dirs)
    points = slice_set.support_points(dirs)
    return {
        "platform": platform_block(platform),
        "phi_deg": phi_deg,
        "theta_deg": theta_deg,
        "resolution": resolution,
        "witness_control": control_block(sol.control),
        "slice_inscribed_radius": slice_set.inscribed_radius(),
        "zonotope_inscribed_radius": zono.inscribed_radius(),
        "zonotope_generators": [list(g) for g in np.asarray(zono.generators).T],
        "directions": [list(d) for d in dirs],
        "slice_support": list(slice_support),
        "zonotope_support": list(zono_support),
        "slice_boundary_points": [list(p) for p in points],
    }


def moment_sets_rows(report: dict[str, Any]) -> tuple[list[str], list[list[Any]]]:
    header = ["dx", "dy", "dz", "slice_support", "zonotope_support", "bx", "by", "bz"]
    rows = [
        [*d, s, z, *b]
        for d, s, z, b in zip(
            report["directions"],
            report["slice_support"],
            report["zonotope_support"],
            report["slice_boundary_points"],
        )
    ]
    return header, rows


def input_labels(platform: Platform) -> list[str]:
    """Column names for the DoF vector, matching input_dof_values order."""
    labels = [f"u{i}" for i in platform.functional_indices()]
    for i in platform.functional_indices():
        for name, _ in platform.propellers[i].angle_ranges():
            labels.append(f"{name}{i}")
    return labels


def _matrix_block(alloc: AllocationMatrix, rank_tol: float) -> dict[str, Any]:
    return {
        "columns": [f"p{lbl.propeller}:{lbl.kind}" for lbl in alloc.columns],
        "rank": numeric_rank(alloc.matrix, rank_tol),
        "matrix": [list(row) for row in alloc.matrix],
    }


def allocation_report(
    platform: Platform,
    phi_deg: float | None = None,
    theta_deg: float | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> dict[str, Any]:
    if (phi_deg is None) != (theta_deg is None):
        raise ValueError("phi and theta must be given together")
    if phi_deg is not None and theta_deg is not None:
        R = orientation_from_angles(np.deg2rad(phi_deg), np.deg2rad(theta_deg))
        sol = solve_hover(platform, R)
        if not sol.feasible or sol.control is None:
            raise DomainInfeasibleError(
                f"no hover at phi={phi_deg} deg, theta={theta_deg} deg"
            )
        control = sol.control
        operating_point = {"kind": "hover-witness", "phi_deg": phi_deg, "theta_deg": theta_deg}
    else:
        n = platform.n_propellers
        thrusts = [
            p.u_max / 2.0 if p.functional else 0.0 for p in platform.propellers
        ]
        control = ControlInput.of(thrusts, [0.0] * n, [0.0] * n)
        operating_point = {"kind": "midrange", "phi_deg": None, "theta_deg": None}
    return {
        "platform": platform_block(platform),
        "operating_point": {**operating_point, "control": control_block(control)},
        "vector_allocation": _matrix_block(vector_allocation(platform), rank_tol),
        "reduced_allocation": _matrix_block(reduced_allocation(platform), rank_tol),
        "fixed_allocation": _matrix_block(fixed_allocation(platform, control), rank_tol),
        "full_jacobian": _matrix_block(full_jacobian(platform, control), rank_tol),
    }


_PRESET_NOTES = {
    "quadrotor": "four fixed coplanar propellers, alternating drag signs",
    "birotor-dualtilt": "two radially tilting propellers on one axis",
    "trirotor-tail": "two fixed propellers plus one radially tilting tail rotor",
    "trirotor-radial": "three radially tilting propellers on a ring",
    "dualtilt-trirotor": "three dual-axis tilting propellers on a ring",
    "dualtilt-trirotor-failed3": "dual-tilt trirotor with propeller 3 non-functional",
}


def presets_report() -> dict[str, Any]:
    from .presets import load_preset, preset_names

    entries = []
    for name in preset_names():
        p = load_preset(name)
        entries.append(
            {
                **platform_block(p),
                "note": _PRESET_NOTES.get(name, ""),
            }
        )
    return {"presets": entries}


def simulate_report(
    platform: Platform,
    experiment: str,
    phi_deg: float,
    theta_deg: float,
    axis: str = "x",
    magnitude: float = 1.5,
    rotation_deg: float = 5.0,
    duration: float = 2.0,
    dt: float = 1e-3,
    wrench_gain: float = 50.0,
) -> tuple[dict[str, Any], ExperimentResult]:
    R = orientation_from_angles(np.deg2rad(phi_deg), np.deg2rad(theta_deg))
    gains = ControllerGains(wrench_gain=wrench_gain)
    try:
        if experiment == "moment-step":
            result = moment_step_experiment(
                platform, R, axis=axis, magnitude=magnitude, duration=duration, dt=dt, gains=gains
            )
        elif experiment == "force-track":
            result = force_orientation_experiment(
                platform, R, np.deg2rad(rotation_deg), duration=duration, dt=dt, gains=gains
            )
        else:
            raise ValueError(f"unknown experiment {experiment!r}")
    except HoverInfeasibleError as exc:
        raise DomainInfeasibleError(str(exc)) from exc

    summary: dict[str, Any] = {
        "platform": platform_block(platform),
        "experiment": experiment,
        "phi_deg": phi_deg,
        "theta_deg": theta_deg,
        "duration": duration,
        "dt": dt,
        "wrench_gain": wrench_gain,
        "samples": result.samples,
    }
    if experiment == "moment-step":
        summary["axis"] = axis
        summary["magnitude"] = magnitude
        summary["rise_time_90"] = result.rise_time
        summary["moment_integral_50ms"] = result.early_moment
    else:
        summary["rotation_deg"] = rotation_deg
        summary["settle_time"] = result.settle_time
    return summary, result


def simulate_rows(
    platform: Platform, result: ExperimentResult
) -> tuple[list[str], list[list[Any]]]:
    from .geometry import so3_log

    labels = input_labels(platform)
    header = (
        ["t", "px", "py", "pz", "vx", "vy", "vz", "rx", "ry", "rz", "wx", "wy", "wz"]
        + [f"cmd_{c}" for c in ("fx", "fy", "fz", "mx", "my", "mz")]
        + [f"app_{c}" for c in ("fx", "fy", "fz", "mx", "my", "mz")]
        + labels
        + [f"rate_{l}" for l in labels]
    )
    rows = []
    for k in range(result.samples):
        rotvec = so3_log(result.rotations[k])
        rows.append(
            [result.times[k]]
            + list(result.positions[k])
            + list(result.velocities[k])
            + list(rotvec)
            + list(result.omegas[k])
            + list(result.commanded[k])
            + list(result.applied[k])
            + list(result.controls[k])
            + list(result.rates[k])
        )
    return header, rows


def tool_version() -> str:
    return __version__
