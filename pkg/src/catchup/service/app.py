"""FastAPI service exposing the catch-up library.

Run with: uvicorn catchup.service:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import CatchupError
from ..evaluation import ErrorReport, run_hybrid_eval, run_regression_eval
from ..grades import CohortFilter
from ..hybrid import DistanceKind
from ..ingestion import build_cohort, format_records, parse_records, scan_rescuable
from ..rescue import (
    RescueDecision,
    RescueOutcome,
    engine_from_name,
    predict_case,
    rescue_all,
)
from ..sampling import SplitConfig
from ..synthetic import GenConfig, generate
from . import schemas

app = FastAPI(title="catchup", version=__version__)


@app.exception_handler(CatchupError)
async def catchup_error_handler(request: Request, exc: CatchupError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


def _split_config(opts: schemas.SplitOptions) -> SplitConfig:
    return SplitConfig(paper_mode=opts.paper_mode, train_fraction=opts.train_fraction)


def _distance_kind(name: str) -> DistanceKind:
    try:
        return DistanceKind(name)
    except ValueError:
        raise HTTPException(
            status_code=400,
            detail=f"unknown distance {name!r}; choose from "
            f"{sorted(k.value for k in DistanceKind)}",
        ) from None


def _engine(name: str):
    try:
        return engine_from_name(name)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def _report_model(r: ErrorReport) -> schemas.ErrorReportModel:
    return schemas.ErrorReportModel(
        model=r.model,
        mpf=r.mpf,
        mfp=r.mfp,
        n_pass=r.n_pass,
        n_fail=r.n_fail,
        reps=r.reps,
        exclusions={"mpf": r.mpf_excluded, "mfp": r.mfp_excluded},
        mean_adjusted_r2=r.mean_adjusted_r2,
        degenerate_reps=r.degenerate_reps,
        group_relative_mpf=r.group_relative_mpf,
        group_relative_mfp=r.group_relative_mfp,
        empty_classes=r.empty_classes,
    )


def _decision_model(outcome: RescueOutcome) -> schemas.DecisionModel:
    if isinstance(outcome, RescueDecision):
        return schemas.DecisionModel(
            case_id=outcome.case.case_id,
            year=outcome.case.year,
            region=outcome.case.region,
            engine=outcome.engine.value,
            verdict=outcome.verdict.value,
            grade4p=outcome.grade4p,
            pass_votes=outcome.pass_votes,
            reps=outcome.reps,
            mean_estimate=outcome.mean_estimate,
            modal_estimate=outcome.modal_estimate,
        )
    return schemas.DecisionModel(
        case_id=outcome.case.case_id,
        year=outcome.case.year,
        region=outcome.case.region,
        engine=outcome.engine.value,
        verdict="Undecidable",
        reason=outcome.reason,
    )


@app.get("/v1/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


@app.post("/v1/generate", response_model=schemas.GenerateResponse)
def generate_records(req: schemas.GenerateRequest) -> schemas.GenerateResponse:
    config = GenConfig(
        n_records=req.n_records,
        years=tuple(req.years),
        regions=tuple(req.regions),
        gender_split=req.gender_split,
        ability_center=req.ability_center,
        ability_spread=req.ability_spread,
        noise_spread=req.noise_spread,
        missing_rate=req.missing_rate,
        target_index_for_missing=req.target_index_for_missing,
        seed=req.seed,
    )
    try:
        records = generate(config)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return schemas.GenerateResponse(
        n_records=len(records), records_csv=format_records(records)
    )


@app.post("/v1/scan", response_model=schemas.ScanResponse)
def scan(req: schemas.ScanRequest) -> schemas.ScanResponse:
    records = parse_records(req.records_csv)
    if req.year is not None or req.region is not None:
        filt = CohortFilter(year=req.year, region=req.region)
        records = [r for r in records if filt.matches(r)]
    cases = scan_rescuable(records, req.target_index)
    return schemas.ScanResponse(
        n_records=len(records),
        cases=[
            schemas.RescuableCaseModel(
                case_id=c.case_id,
                year=c.year,
                region=c.region,
                gender=c.gender,
                observed=list(c.observed),
                missing_index=c.missing_index,
                valid=c.valid,
            )
            for c in cases
        ],
    )


@app.post("/v1/eval/regression", response_model=schemas.RegressionEvalResponse)
def eval_regression(req: schemas.RegressionEvalRequest) -> schemas.RegressionEvalResponse:
    records = parse_records(req.records_csv)
    filt = CohortFilter(year=req.year, region=req.region, gender=req.gender)
    cohort = build_cohort(records, filt, req.target_index)
    report = run_regression_eval(cohort, req.reps, req.seed, _split_config(req.split))
    return schemas.RegressionEvalResponse(
        report=_report_model(report),
        per_rep_adjusted_r2=list(report.per_rep_adjusted_r2 or ()),
    )


@app.post("/v1/eval/hybrid", response_model=schemas.HybridEvalResponse)
def eval_hybrid(req: schemas.HybridEvalRequest) -> schemas.HybridEvalResponse:
    if req.rule is not None and req.rule not in ("avg", "mode"):
        raise HTTPException(
            status_code=400, detail=f"unknown rule {req.rule!r}; choose avg or mode"
        )
    records = parse_records(req.records_csv)
    filt = CohortFilter(year=req.year, region=req.region, gender=req.gender)
    cohort = build_cohort(records, filt, req.target_index)
    reports = run_hybrid_eval(
        cohort,
        req.reps,
        req.seed,
        req.k,
        _split_config(req.split),
        distance_kind=_distance_kind(req.distance),
        epsilon=req.epsilon,
        band_features=req.band_features,
        paper_normalization=req.paper_normalization,
    )
    keep = list(reports)
    if req.rule == "avg":
        keep = [m for m in keep if m.endswith("average")]
    elif req.rule == "mode":
        keep = [m for m in keep if m.endswith("most_frequent")]
    return schemas.HybridEvalResponse(reports=[_report_model(reports[m]) for m in keep])


@app.post("/v1/predict", response_model=schemas.PredictResponse)
def predict_one(req: schemas.PredictRequest) -> schemas.PredictResponse:
    engine = _engine(req.engine)
    records = parse_records(req.records_csv)
    case = next(
        (
            c
            for c in scan_rescuable(records, req.target_index)
            if c.case_id == req.case_id
        ),
        None,
    )
    if case is None:
        raise HTTPException(
            status_code=400,
            detail=f"case {req.case_id} is not rescuable at position {req.target_index}",
        )
    filt = CohortFilter(
        year=case.year,
        region=case.region,
        gender=case.gender if req.restrict_gender else None,
    )
    cohort = build_cohort(records, filt, req.target_index)
    decision = predict_case(
        case,
        cohort,
        engine,
        req.reps,
        req.seed,
        k=req.k,
        split_config=_split_config(req.split),
    )
    return schemas.PredictResponse(
        decision=_decision_model(decision),
        per_rep_estimates=list(decision.per_rep_estimates),
    )


@app.post("/v1/rescue-all", response_model=schemas.RescueAllResponse)
def rescue_all_cases(req: schemas.RescueAllRequest) -> schemas.RescueAllResponse:
    engine = _engine(req.engine)
    records = parse_records(req.records_csv)
    outcomes = rescue_all(
        records,
        req.target_index,
        engine,
        req.reps,
        req.seed,
        k=req.k,
        split_config=_split_config(req.split),
        restrict_gender=req.restrict_gender,
    )
    return schemas.RescueAllResponse(outcomes=[_decision_model(o) for o in outcomes])
