"""HTTP service exposing the scenario registry.

Endpoints:
  GET  /health                     liveness probe
  GET  /scenarios                  registry listing with parameter defaults
  POST /scenarios/{id}/run         run checks, return a verification report
  POST /scenarios/{id}/samples     per-sample dump as delimiter-separated text
"""

from __future__ import annotations

from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import scenarios
from .errors import InvalidParameter, ParameterConstraintViolated, UnknownScenario
from .geometry import FDConfig

app = FastAPI(
    title="einwarp",
    description="Warped-product Einstein metrics, immersions, and verification checks.",
    version="0.1.0",
)


class ScenarioSummary(BaseModel):
    id: str
    description: str
    parameters: dict[str, Union[int, float]]


class RunRequest(BaseModel):
    overrides: dict[str, float] = Field(default_factory=dict)
    samples: int = Field(default=64, ge=1, le=4096)
    fd_step: float = Field(default=1e-3, ge=1e-6, le=1e-1)
    fd_order: int = Field(default=4)
    tol: Optional[float] = Field(default=None, gt=0.0)
    seed: int = Field(default=0, ge=0)
    relax: bool = False


class CheckModel(BaseModel):
    check_id: str
    max_residual: float
    mean_residual: float
    estimated_constant: Optional[float]
    tolerance: float
    passed: bool
    samples_used: int


class ReportModel(BaseModel):
    scenario_id: str
    parameters: dict[str, Union[int, float]]
    checks: list[CheckModel]
    overall_passed: bool
    timestamp: str
    engine_config: dict


def _engine(req: RunRequest) -> scenarios.EngineConfig:
    try:
        fd = FDConfig(step=req.fd_step, order=req.fd_order)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return scenarios.EngineConfig(fd=fd, seed=req.seed, samples=req.samples, tol=req.tol)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/scenarios", response_model=list[ScenarioSummary])
def list_scenarios():
    return scenarios.list_scenarios()


@app.post("/scenarios/{scenario_id}/run", response_model=ReportModel)
def run_scenario(scenario_id: str, req: RunRequest):
    try:
        report = scenarios.run_scenario(
            scenario_id, req.overrides, engine=_engine(req), relax=req.relax
        )
    except UnknownScenario as exc:
        raise HTTPException(status_code=404, detail=str(exc))
    except (InvalidParameter, ParameterConstraintViolated) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return report.to_dict()


@app.post("/scenarios/{scenario_id}/samples", response_class=PlainTextResponse)
def dump_samples(scenario_id: str, req: RunRequest) -> str:
    try:
        header, rows = scenarios.dump_samples(
            scenario_id, req.overrides, engine=_engine(req), relax=req.relax
        )
    except UnknownScenario as exc:
        raise HTTPException(status_code=404, detail=str(exc))
    except (InvalidParameter, ParameterConstraintViolated) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return scenarios.dump_text(header, rows)
