"""HTTP service exposing the toolkit: exact correlations, shot simulation,
sweeps, boundary tables, region sampling and inference.

Every response embeds the package version and the full request config so that
any output can be reproduced from the file alone.  Error contract: 422 for
malformed documents, 400 for well-formed but unphysical input, 424 when a
required artifact (a boundary table) is missing.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .bounds import boundary_table, random_mixture_deltas
from .channels import MixedUnitaryChannel, Unitary2, haar_random_unitaries, unitary_channel
from .inference import report as inference_report
from .rng import derive_rng
from .sampling import bootstrap_delta, estimate_correlation, run_experiment
from .scenarios import CausalScenario, CommonCause, DirectCause, Mixture, exact_correlation
from .serialize import (
    SchemaError,
    boundary_table_from_json,
    boundary_table_to_json,
    experiment_from_json,
    experiment_to_json,
    scenario_from_json,
)
from .states import UnphysicalStateError, depolarize, random_state, werner_state

WERNER_OMEGA_MIN = -1.0 / 3.0

app = FastAPI(
    title="causaldet",
    version=__version__,
    description="Causal-structure discrimination for qubit pairs via the "
    "determinant of the Pauli correlation matrix.",
)


def _parse_scenario(obj: dict) -> CausalScenario:
    try:
        return scenario_from_json(obj, path="$.scenario")
    except SchemaError as exc:
        raise HTTPException(
            status_code=422, detail={"error": "schema", "path": exc.path, "message": str(exc)}
        ) from None
    except UnphysicalStateError as exc:
        raise HTTPException(
            status_code=400, detail={"error": "unphysical", "message": str(exc)}
        ) from None


class HealthResponse(BaseModel):
    status: str
    version: str


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


class ExactRequest(BaseModel):
    scenario: dict


class ExactResponse(BaseModel):
    version: str
    config: dict
    scenario: dict
    correlation: list[list[float]]
    delta: float


@app.post("/exact", response_model=ExactResponse)
def exact(req: ExactRequest) -> ExactResponse:
    sc = _parse_scenario(req.scenario)
    corr = exact_correlation(sc)
    return ExactResponse(
        version=__version__,
        config=req.model_dump(),
        scenario=req.scenario,
        correlation=corr.c.tolist(),
        delta=corr.delta,
    )


class SimulateRequest(BaseModel):
    scenario: dict
    shots: int = Field(default=100_000, ge=1, description="shots per setting")
    seed: int = Field(default=0, ge=0)
    bootstrap: int = Field(default=1000, ge=100)


class SettingRecord(BaseModel):
    j: int
    k: int
    npp: int
    npm: int
    nmp: int
    nmm: int


class SimulateResponse(BaseModel):
    version: str
    config: dict
    scenario: dict
    shots: int
    seed: int
    records: list[SettingRecord]
    c_hat: list[list[float]]
    se: list[list[float]]
    delta_hat: float
    ci: list[float]


def _simulate_payload(sc: CausalScenario, scenario_doc: dict, shots: int, seed: int, resamples: int) -> dict:
    data = run_experiment(sc, shots, seed, descriptor=scenario_doc)
    est, se = estimate_correlation(data)
    delta_hat, ci = bootstrap_delta(data, resamples=resamples, seed=seed)
    doc = experiment_to_json(data)
    doc.update(
        {
            "c_hat": est.c.tolist(),
            "se": se.tolist(),
            "delta_hat": delta_hat,
            "ci": list(ci),
        }
    )
    return doc


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    sc = _parse_scenario(req.scenario)
    payload = _simulate_payload(sc, req.scenario, req.shots, req.seed, req.bootstrap)
    return SimulateResponse(version=__version__, config=req.model_dump(), **payload)


class WernerSweepRequest(BaseModel):
    omega_min: float = WERNER_OMEGA_MIN
    omega_max: float = 1.0
    steps: int = Field(default=50, ge=1)
    shots: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
    depolarize: float = Field(default=0.0, ge=0.0, le=1.0)
    bootstrap: int = Field(default=1000, ge=100)


class WernerRow(BaseModel):
    omega: float
    delta_exact: float
    delta_hat: Optional[float] = None
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None


class WernerSweepResponse(BaseModel):
    version: str
    config: dict
    rows: list[WernerRow]
    rejected: list[dict]


@app.post("/sweep/werner", response_model=WernerSweepResponse)
def sweep_werner(req: WernerSweepRequest) -> WernerSweepResponse:
    if req.steps == 1:
        omegas = [req.omega_min]
    else:
        omegas = np.linspace(req.omega_min, req.omega_max, req.steps).tolist()
    rows: list[WernerRow] = []
    rejected: list[dict] = []
    for i, omega in enumerate(omegas):
        if not WERNER_OMEGA_MIN - 1e-12 <= omega <= 1.0 + 1e-12:
            rejected.append(
                {"omega": omega, "reason": f"outside physical range [{WERNER_OMEGA_MIN}, 1]"}
            )
            continue
        state = werner_state(omega)
        if req.depolarize > 0.0:
            state = depolarize(state, req.depolarize)
        sc = CommonCause(state)
        row = WernerRow(omega=omega, delta_exact=exact_correlation(sc).delta)
        if req.shots is not None:
            data = run_experiment(sc, req.shots, req.seed + i)
            delta_hat, ci = bootstrap_delta(data, resamples=req.bootstrap, seed=req.seed + i)
            row = row.model_copy(
                update={"delta_hat": delta_hat, "ci_lo": ci[0], "ci_hi": ci[1]}
            )
        rows.append(row)
    if not rows:
        raise HTTPException(
            status_code=400,
            detail={"error": "unphysical", "message": "no grid point is physical"},
        )
    return WernerSweepResponse(
        version=__version__, config=req.model_dump(), rows=rows, rejected=rejected
    )


class HaarSweepRequest(BaseModel):
    count: int = Field(ge=1)
    shots: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
    bootstrap: int = Field(default=1000, ge=100)


class HaarRow(BaseModel):
    index: int
    delta_exact: float
    delta_hat: Optional[float] = None
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None


class HaarSweepResponse(BaseModel):
    version: str
    config: dict
    rows: list[HaarRow]


@app.post("/sweep/haar", response_model=HaarSweepResponse)
def sweep_haar(req: HaarSweepRequest) -> HaarSweepResponse:
    rows: list[HaarRow] = []
    for i in range(req.count):
        u = haar_random_unitaries(1, derive_rng(req.seed, i))[0]
        sc = DirectCause(unitary_channel(u))
        row = HaarRow(index=i, delta_exact=exact_correlation(sc).delta)
        if req.shots is not None:
            data = run_experiment(sc, req.shots, req.seed + i)
            delta_hat, ci = bootstrap_delta(data, resamples=req.bootstrap, seed=req.seed + i)
            row = row.model_copy(
                update={"delta_hat": delta_hat, "ci_lo": ci[0], "ci_hi": ci[1]}
            )
        rows.append(row)
    return HaarSweepResponse(version=__version__, config=req.model_dump(), rows=rows)


class BoundsRequest(BaseModel):
    ndc: int = Field(ge=1, le=3, description="channel class; 3 means three or more")
    p_steps: int = Field(default=101, ge=2)
    restarts: int = Field(default=64, ge=1)
    seed: int = Field(default=0, ge=0)


class BoundsResponse(BaseModel):
    version: str
    config: dict
    ndc_class: int
    p_grid: list[float]
    lower: list[float]
    upper: list[float]
    restarts: int
    tolerance: float
    seed: int


@app.post("/bounds", response_model=BoundsResponse)
def bounds(req: BoundsRequest) -> BoundsResponse:
    grid = np.linspace(0.0, 1.0, req.p_steps)
    table = boundary_table(req.ndc, p_grid=grid, restarts=req.restarts, seed=req.seed)
    return BoundsResponse(
        version=__version__, config=req.model_dump(), **boundary_table_to_json(table)
    )


class InferRequest(BaseModel):
    delta: Optional[float] = None
    ci: Optional[list[float]] = None
    data: Optional[dict] = None
    bootstrap: int = Field(default=1000, ge=100)
    ndc: Optional[int] = Field(default=None, ge=1, le=3)
    bounds: Optional[dict] = None


class InferResponse(BaseModel):
    version: str
    config: dict
    delta: float
    delta_raw: Optional[float] = None
    ci: Optional[list[float]] = None
    direct_cause_present: str
    common_cause_present: str
    ndc_min_pure_dc: int | str
    p_feasible: Optional[dict] = None
    resolution: Optional[float] = None
    thresholds: dict


@app.post("/infer", response_model=InferResponse)
def infer(req: InferRequest) -> InferResponse:
    if (req.delta is None) == (req.data is None):
        raise HTTPException(
            status_code=422,
            detail={"error": "schema", "message": "provide exactly one of delta or data"},
        )
    delta_raw: Optional[float] = None
    if req.data is not None:
        try:
            data = experiment_from_json(req.data, path="$.data")
        except SchemaError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "schema", "path": exc.path, "message": str(exc)},
            ) from None
        delta_raw, ci_raw = bootstrap_delta(data, resamples=req.bootstrap, seed=data.seed)
        # finite-shot estimates can stray past the physical range; claims are
        # made on the clamped value
        delta = float(np.clip(delta_raw, -1.0, 1.0))
        ci = (
            float(np.clip(ci_raw[0], -1.0, 1.0)),
            float(np.clip(ci_raw[1], -1.0, 1.0)),
        )
        ci = (min(ci[0], delta), max(ci[1], delta))
    else:
        delta = req.delta
        ci = None
        if req.ci is not None:
            if len(req.ci) != 2:
                raise HTTPException(
                    status_code=422,
                    detail={"error": "schema", "message": "ci must be [lo, hi]"},
                )
            ci = (float(req.ci[0]), float(req.ci[1]))
    tables = None
    if req.ndc is not None:
        if req.bounds is None:
            raise HTTPException(
                status_code=424,
                detail={
                    "error": "missing-bounds",
                    "message": "a bounds table is required to invert the mixing probability",
                },
            )
        try:
            table = boundary_table_from_json(req.bounds, path="$.bounds")
        except SchemaError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "schema", "path": exc.path, "message": str(exc)},
            ) from None
        if table.ndc_class != req.ndc:
            raise HTTPException(
                status_code=422,
                detail={
                    "error": "schema",
                    "message": f"bounds table is for class {table.ndc_class}, not {req.ndc}",
                },
            )
        tables = {req.ndc: table}
    try:
        rep = inference_report(delta, ci, tables)
    except ValueError as exc:
        raise HTTPException(
            status_code=422, detail={"error": "schema", "message": str(exc)}
        ) from None
    doc = rep.to_json()
    return InferResponse(
        version=__version__, config=req.model_dump(), delta_raw=delta_raw, **doc
    )


class FillRegionsRequest(BaseModel):
    ndc: int = Field(ge=1, le=3)
    samples: int = Field(ge=1)
    p_steps: int = Field(default=11, ge=2)
    shots: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
    bootstrap: int = Field(default=1000, ge=100)


class FillRow(BaseModel):
    p: float
    delta: float
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None


class FillRegionsResponse(BaseModel):
    version: str
    config: dict
    rows: list[FillRow]


def _random_channel(ndc: int, rng: np.random.Generator) -> MixedUnitaryChannel:
    us = haar_random_unitaries(ndc, rng)
    weights = rng.dirichlet(np.ones(ndc))
    return MixedUnitaryChannel(weights, tuple(Unitary2(u) for u in us))


@app.post("/fill-regions", response_model=FillRegionsResponse)
def fill_regions(req: FillRegionsRequest) -> FillRegionsResponse:
    grid = np.linspace(0.0, 1.0, req.p_steps)
    rows: list[FillRow] = []
    for i, p in enumerate(grid):
        rng = derive_rng(req.seed, i)
        if req.shots is None:
            deltas = random_mixture_deltas(req.ndc, float(p), req.samples, rng)
            rows.extend(FillRow(p=float(p), delta=float(d)) for d in deltas)
        else:
            for s in range(req.samples):
                channel = _random_channel(req.ndc, rng)
                state = random_state(rng)
                sc = Mixture(float(p), channel, state)
                data = run_experiment(sc, req.shots, req.seed + i * req.samples + s)
                delta_hat, ci = bootstrap_delta(
                    data, resamples=req.bootstrap, seed=req.seed + i * req.samples + s
                )
                rows.append(
                    FillRow(p=float(p), delta=delta_hat, ci_lo=ci[0], ci_hi=ci[1])
                )
    return FillRegionsResponse(version=__version__, config=req.model_dump(), rows=rows)
