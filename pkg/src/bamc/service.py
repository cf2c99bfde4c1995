"""HTTP facade over the search engines and the experiment harness.

Endpoints operate on server-local file paths for CSV artifacts: requests
name where to read records and write outputs.  The bundled CLI runs the
app in-process by default, so "server-local" is simply the local
filesystem; a remote deployment shares artifacts through whatever storage
the paths point at.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from . import __version__
from .baselines import SCHEDULE_KINDS
from .bench import (
    ALGORITHM_IDS,
    MODELS,
    ConfigError,
    DataError,
    ExperimentConfig,
    normalized_csv_path,
    quantile_summary,
    read_records,
    run_experiment,
    run_search,
)
from .figures import (
    quantile_figure_rows,
    render_svg,
    single_run_figure_rows,
    write_figure_csv,
)
from .schemas import (
    CatalogResponse,
    EstimatePoint,
    ExperimentRequest,
    ExperimentResponse,
    FigureRequest,
    FigureResponse,
    HealthResponse,
    SearchRequest,
    SearchResponse,
    SummaryRequest,
    SummaryResponse,
    finite_or_none,
)

__all__ = ["app", "create_app"]


def create_app() -> FastAPI:
    app = FastAPI(title="bamc", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request, exc):  # noqa: ANN001
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(DataError)
    async def _data_error(request, exc):  # noqa: ANN001
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/catalog", response_model=CatalogResponse)
    def catalog() -> CatalogResponse:
        return CatalogResponse(
            models=sorted(MODELS),
            algorithms=list(ALGORITHM_IDS),
            schedules=list(SCHEDULE_KINDS),
        )

    @app.post("/experiments", response_model=ExperimentResponse)
    def experiments(req: ExperimentRequest) -> ExperimentResponse:
        config = _config(req)
        try:
            records = run_experiment(config, jobs=req.jobs)
        except OSError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        best = max((r.best_log_weight_so_far for r in records), default=float("-inf"))
        return ExperimentResponse(
            model=req.model,
            algorithm=req.algorithm,
            runs=req.runs,
            iterations=req.iterations,
            records=len(records),
            best_log_weight=finite_or_none(best),
            out=req.out,
            normalized_out=str(normalized_csv_path(req.out)) if req.out else None,
        )

    @app.post("/summaries", response_model=SummaryResponse)
    def summaries(req: SummaryRequest) -> SummaryResponse:
        records = _load_records(req.records)
        try:
            summary = quantile_summary(records, req.quantiles)
        except DataError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        series = {}
        final = {}
        for q in summary.quantiles:
            name = f"q{q:g}"
            vals = summary.series(q)
            series[name] = [finite_or_none(v) for v in vals]
            final[name] = finite_or_none(vals[-1])
        if req.out is not None:
            _write_summary_csv(summary, req.out)
        return SummaryResponse(
            iterations=len(summary.iterations), series=series, final=final, out=req.out
        )

    @app.post("/figures", response_model=FigureResponse)
    def figures(req: FigureRequest) -> FigureResponse:
        records = _load_records(req.records)
        try:
            if req.figure == "quantiles":
                rows = quantile_figure_rows(quantile_summary(records, req.quantiles))
                meta = {"figure": "quantiles",
                        "quantiles": " ".join(f"{q:g}" for q in req.quantiles)}
            else:
                rows = single_run_figure_rows(records, req.run_id, req.window)
                meta = {"figure": "run", "run_id": req.run_id, "window": req.window}
            write_figure_csv(rows, req.out, meta=meta)
            if req.svg is not None:
                render_svg(rows, req.svg, title=req.title)
        except (DataError, ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return FigureResponse(figure=req.figure, rows=len(rows), out=req.out, svg=req.svg)

    @app.post("/searches", response_model=SearchResponse)
    def searches(req: SearchRequest) -> SearchResponse:
        config = _config(req, runs=1)
        report = run_search(config, np.random.default_rng(req.seed))
        best = report.best
        return SearchResponse(
            model=req.model,
            algorithm=req.algorithm,
            iterations=len(report.records),
            best_log_weight=finite_or_none(best.log_weight) if best else None,
            best_iteration=best.iteration if best else None,
            estimates=[
                EstimatePoint(iteration=e.iteration, log_weight=e.log_weight)
                for e in report.estimates
            ],
            aborted=report.aborted,
        )

    return app


def _config(req, runs: int = None) -> ExperimentConfig:  # noqa: ANN001
    try:
        return ExperimentConfig(
            model=req.model,
            algorithm=req.algorithm,
            iterations=req.iterations,
            n_runs=runs if runs is not None else req.runs,
            base_seed=req.seed,
            schedule=req.schedule,
            rate=req.rate,
            out=getattr(req, "out", None),
        )
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _load_records(path: str):
    if not Path(path).is_file():
        raise HTTPException(status_code=400, detail=f"records file not found: {path}")
    try:
        return read_records(path)
    except (DataError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _write_summary_csv(summary, path) -> None:
    names = [f"q{q:g}" for q in summary.quantiles]
    lines = ["iteration," + ",".join(names)]
    for i, it in enumerate(summary.iterations):
        vals = ",".join(f"{summary.values[qi][i]:.17g}" for qi in range(len(names)))
        lines.append(f"{int(it)},{vals}")
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


app = create_app()
