"""Request/response bodies for the HTTP service.

JSON has no representation for infinities, so response models carry
``None`` where a log-weight would be non-finite; the CSV artifacts written
server-side keep the exact values.
"""

from __future__ import annotations

import math
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

__all__ = [
    "HealthResponse",
    "CatalogResponse",
    "ExperimentRequest",
    "ExperimentResponse",
    "SummaryRequest",
    "SummaryResponse",
    "FigureRequest",
    "FigureResponse",
    "SearchRequest",
    "EstimatePoint",
    "SearchResponse",
    "finite_or_none",
]


def finite_or_none(x: float) -> Optional[float]:
    return float(x) if math.isfinite(x) else None


class HealthResponse(BaseModel):
    status: str
    version: str


class CatalogResponse(BaseModel):
    models: List[str]
    algorithms: List[str]
    schedules: List[str]


class ExperimentRequest(BaseModel):
    model: str
    algorithm: str
    iterations: int = Field(ge=1)
    runs: int = Field(default=1, ge=1)
    seed: int = 0
    schedule: Optional[str] = None
    rate: Optional[float] = None
    out: Optional[str] = None
    jobs: int = Field(default=1, ge=1)


class ExperimentResponse(BaseModel):
    model: str
    algorithm: str
    runs: int
    iterations: int
    records: int
    best_log_weight: Optional[float]
    out: Optional[str] = None
    normalized_out: Optional[str] = None


class SummaryRequest(BaseModel):
    records: str  # path to a records CSV
    quantiles: List[float] = [0.25, 0.5, 0.75]
    out: Optional[str] = None


class SummaryResponse(BaseModel):
    iterations: int
    series: Dict[str, List[Optional[float]]]
    final: Dict[str, Optional[float]]
    out: Optional[str] = None


class FigureRequest(BaseModel):
    records: str  # path to a records CSV
    figure: Literal["quantiles", "run"] = "quantiles"
    quantiles: List[float] = [0.25, 0.5, 0.75]
    run_id: int = 0
    window: int = Field(default=101, ge=1)
    out: str
    svg: Optional[str] = None
    title: str = ""


class FigureResponse(BaseModel):
    figure: str
    rows: int
    out: str
    svg: Optional[str] = None


class SearchRequest(BaseModel):
    model: str
    algorithm: str
    iterations: int = Field(ge=1)
    seed: int = 0
    schedule: Optional[str] = None
    rate: Optional[float] = None


class EstimatePoint(BaseModel):
    iteration: int
    log_weight: float


class SearchResponse(BaseModel):
    model: str
    algorithm: str
    iterations: int
    best_log_weight: Optional[float]
    best_iteration: Optional[int]
    estimates: List[EstimatePoint]
    aborted: Optional[str] = None
