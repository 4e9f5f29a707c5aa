"""HTTP service exposing the analysis operations.

Thin wrapper over the report layer: requests name a platform (preset or
inline YAML config, plus overrides), responses are typed models mirroring
the report dictionaries.  Domain infeasibility maps to 409, invalid input
to 422.  NaN values (infeasible map cells) become nulls on the wire.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Any, Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, reports
from .config import ConfigError, load_platform
from .platform import Platform
from .presets import load_preset, preset_names
from .reports import DomainInfeasibleError
from .wrench_sets import CannotLiftWeightError


class PlatformRequest(BaseModel):
    """Platform selection shared by all analysis endpoints."""

    preset: str | None = Field(default=None, description="built-in platform name")
    config: str | None = Field(default=None, description="platform config document (YAML)")
    mass: float | None = Field(default=None, gt=0.0, description="override mass [kg]")
    umax: float | dict[int, float] | None = Field(
        default=None, description="override max thrust [N], uniform or per propeller index"
    )
    u_rate: float | dict[int, float] | None = Field(
        default=None, description="override thrust rate [N/s]"
    )
    angle_rate: float | dict[int, float] | None = Field(
        default=None, description="override tilt rate [rad/s]"
    )

    def build(self) -> Platform:
        if (self.preset is None) == (self.config is None):
            raise ConfigError("exactly one of preset or config is required")
        if self.preset is not None:
            try:
                platform = load_preset(self.preset)
            except KeyError:
                raise ConfigError(
                    f"unknown preset {self.preset!r}; available: {', '.join(preset_names())}"
                ) from None
        else:
            assert self.config is not None
            platform = load_platform(self.config)
        if self.mass is not None:
            platform = dataclasses.replace(platform, mass=self.mass)
        for field, value in (
            ("u_max", self.umax),
            ("u_rate_max", self.u_rate),
            ("angle_rate_max", self.angle_rate),
        ):
            if value is None:
                continue
            props = list(platform.propellers)
            targets = range(len(props)) if isinstance(value, float) else value.keys()
            for i in targets:
                if not 0 <= i < len(props):
                    raise ConfigError(f"{field} index {i} out of range")
                v = value if isinstance(value, float) else value[i]
                props[i] = dataclasses.replace(props[i], **{field: v})
            platform = dataclasses.replace(platform, propellers=tuple(props))
        return platform


class OrientationRequest(PlatformRequest):
    phi_deg: float = Field(description="roll about body x [deg]")
    theta_deg: float = Field(description="pitch about body y [deg]")


class MapRequest(PlatformRequest):
    step_deg: float = Field(default=30.0, gt=0.0)
    threads: int = Field(default=1, ge=1, le=64)


class ResolutionRequest(PlatformRequest):
    resolution: int = Field(default=2048, ge=8, le=100000)


class LhiRequest(OrientationRequest):
    resolution: int = Field(default=2048, ge=8, le=100000)


class LhiMapRequest(MapRequest):
    resolution: int = Field(default=2048, ge=8, le=100000)


class MomentSetsRequest(OrientationRequest):
    resolution: int = Field(default=512, ge=8, le=8192)


class AllocationRequest(PlatformRequest):
    phi_deg: float | None = None
    theta_deg: float | None = None


class SimulateRequest(OrientationRequest):
    experiment: Literal["moment-step", "force-track"]
    axis: Literal["x", "y", "z"] = "x"
    magnitude: float = 1.5
    rotation_deg: float = 5.0
    duration: float = Field(default=2.0, gt=0.0, le=60.0)
    dt: float = Field(default=1e-3, gt=0.0, le=0.1)
    wrench_gain: float = Field(default=50.0, gt=0.0)
    include_series: bool = Field(
        default=False, description="attach the sampled time series to the response"
    )


class PlatformInfo(BaseModel):
    name: str
    mass: float
    gravity: float
    n_propellers: int
    n_functional: int
    dof: int


class ControlVector(BaseModel):
    thrusts: list[float]
    alphas: list[float]
    betas: list[float]


class HoverWitness(BaseModel):
    feasible: bool
    interior: bool
    orientation: list[list[float]]
    control: ControlVector | None
    # residuals are null when no candidate control exists at all
    residual_force: float | None
    residual_moment: float | None
    margin: float
    message: str


class ClassificationInfo(BaseModel):
    category: str
    csh: bool
    rank_reduced_allocation: int
    rank_zero_moment_force: int
    odl: float


class HoverInfo(BaseModel):
    hoverable: bool
    rank_moment_rows: int
    max_lift: float
    lift_direction: list[float]
    moment_origin_interior: bool | None
    witness: HoverWitness | None


class AnalyzeResponse(BaseModel):
    platform: PlatformInfo
    classification: ClassificationInfo
    hover: HoverInfo


class HoverSolveResponse(HoverWitness):
    platform: PlatformInfo
    phi_deg: float
    theta_deg: float


class HoverMapCell(BaseModel):
    phi_deg: float
    theta_deg: float
    feasible: bool
    interior: bool
    margin: float | None


class HoverMapResponse(BaseModel):
    platform: PlatformInfo
    step_deg: float
    cells: list[HoverMapCell]
    interior_fraction: float


class OdlResponse(BaseModel):
    platform: PlatformInfo
    odl: float
    min_direction: list[float]
    resolution: int
    degenerate: bool
    warning: str | None = None


class ForceSetResponse(BaseModel):
    platform: PlatformInfo
    resolution: int
    max_magnitude: float
    min_magnitude: float
    points: list[list[float]]


class LhiResponse(BaseModel):
    platform: PlatformInfo
    phi_deg: float
    theta_deg: float
    feasible: bool
    lhi: float
    resolution: int
    witness: HoverWitness


class LhiMapCell(BaseModel):
    phi_deg: float
    theta_deg: float
    feasible: bool
    lhi: float | None


class LhiMapResponse(BaseModel):
    platform: PlatformInfo
    step_deg: float
    resolution: int
    cells: list[LhiMapCell]
    max_lhi: float | None
    min_lhi: float | None


class MomentSetsResponse(BaseModel):
    platform: PlatformInfo
    phi_deg: float
    theta_deg: float
    resolution: int
    witness_control: ControlVector
    slice_inscribed_radius: float
    zonotope_inscribed_radius: float
    zonotope_generators: list[list[float]]
    directions: list[list[float]]
    slice_support: list[float]
    zonotope_support: list[float]
    slice_boundary_points: list[list[float]]


class MatrixInfo(BaseModel):
    columns: list[str]
    rank: int
    matrix: list[list[float]]


class OperatingPoint(BaseModel):
    kind: str
    phi_deg: float | None
    theta_deg: float | None
    control: ControlVector


class AllocationResponse(BaseModel):
    platform: PlatformInfo
    operating_point: OperatingPoint
    vector_allocation: MatrixInfo
    reduced_allocation: MatrixInfo
    fixed_allocation: MatrixInfo
    full_jacobian: MatrixInfo


class SimulateSeries(BaseModel):
    columns: list[str]
    rows: list[list[float]]


class SimulateResponse(BaseModel):
    platform: PlatformInfo
    experiment: str
    phi_deg: float
    theta_deg: float
    duration: float
    dt: float
    wrench_gain: float
    samples: int
    axis: str | None = None
    magnitude: float | None = None
    rise_time_90: float | None = None
    moment_integral_50ms: float | None = None
    rotation_deg: float | None = None
    settle_time: float | None = None
    series: SimulateSeries | None = None


class PresetEntry(PlatformInfo):
    note: str


class PresetsResponse(BaseModel):
    presets: list[PresetEntry]


class HealthResponse(BaseModel):
    status: str
    version: str


def _denan(obj: Any) -> Any:
    """NaN/inf have no JSON form; replace them with null recursively."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _denan(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_denan(v) for v in obj]
    return obj


app = FastAPI(
    title="tilthover",
    version=__version__,
    description="Static hover analysis for multi-rotor vehicles with tiltable propellers",
)


def _platform(req: PlatformRequest) -> Platform:
    try:
        return req.build()
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _guard(fn, *args: Any, **kwargs: Any) -> Any:
    try:
        return fn(*args, **kwargs)
    except (DomainInfeasibleError, CannotLiftWeightError) as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/presets", response_model=PresetsResponse)
def presets() -> PresetsResponse:
    return PresetsResponse(**reports.presets_report())


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: PlatformRequest) -> AnalyzeResponse:
    return AnalyzeResponse(**_denan(_guard(reports.analyze_report, _platform(req))))


@app.post("/hover/solve", response_model=HoverSolveResponse)
def hover_solve(req: OrientationRequest) -> HoverSolveResponse:
    report = _guard(reports.hover_solve_report, _platform(req), req.phi_deg, req.theta_deg)
    return HoverSolveResponse(**_denan(report))


@app.post("/hover/map", response_model=HoverMapResponse)
def hover_map(req: MapRequest) -> HoverMapResponse:
    report = _guard(
        reports.hover_map_report, _platform(req), step_deg=req.step_deg, threads=req.threads
    )
    return HoverMapResponse(**_denan(report))


@app.post("/odl", response_model=OdlResponse)
def odl_endpoint(req: ResolutionRequest) -> OdlResponse:
    return OdlResponse(**_denan(_guard(reports.odl_report, _platform(req), resolution=req.resolution)))


@app.post("/force-set", response_model=ForceSetResponse)
def force_set(req: ResolutionRequest) -> ForceSetResponse:
    report = _guard(reports.force_set_report, _platform(req), resolution=req.resolution)
    return ForceSetResponse(**_denan(report))


@app.post("/lhi", response_model=LhiResponse)
def lhi_endpoint(req: LhiRequest) -> LhiResponse:
    report = _guard(
        reports.lhi_report, _platform(req), req.phi_deg, req.theta_deg, resolution=req.resolution
    )
    return LhiResponse(**_denan(report))


@app.post("/lhi/map", response_model=LhiMapResponse)
def lhi_map_endpoint(req: LhiMapRequest) -> LhiMapResponse:
    report = _guard(
        reports.lhi_map_report,
        _platform(req),
        step_deg=req.step_deg,
        resolution=req.resolution,
        threads=req.threads,
    )
    return LhiMapResponse(**_denan(report))


@app.post("/moment-sets", response_model=MomentSetsResponse)
def moment_sets(req: MomentSetsRequest) -> MomentSetsResponse:
    report = _guard(
        reports.moment_sets_report,
        _platform(req),
        req.phi_deg,
        req.theta_deg,
        resolution=req.resolution,
    )
    return MomentSetsResponse(**_denan(report))


@app.post("/allocation", response_model=AllocationResponse)
def allocation(req: AllocationRequest) -> AllocationResponse:
    report = _guard(reports.allocation_report, _platform(req), req.phi_deg, req.theta_deg)
    return AllocationResponse(**_denan(report))


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    platform = _platform(req)
    summary, result = _guard(
        reports.simulate_report,
        platform,
        req.experiment,
        req.phi_deg,
        req.theta_deg,
        axis=req.axis,
        magnitude=req.magnitude,
        rotation_deg=req.rotation_deg,
        duration=req.duration,
        dt=req.dt,
        wrench_gain=req.wrench_gain,
    )
    response = SimulateResponse(**_denan(summary))
    if req.include_series:
        columns, rows = reports.simulate_rows(platform, result)
        response.series = SimulateSeries(
            columns=columns, rows=[[float(v) for v in row] for row in rows]
        )
    return response
