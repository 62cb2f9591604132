"""Pydantic request/response models for the HTTP service.

Record data travels as the record-file text (``records_csv``) so that a
request is self-contained; the service never touches the client filesystem.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class SplitOptions(BaseModel):
    paper_mode: bool = False
    train_fraction: float = Field(0.75, gt=0.0, lt=1.0)


class RecordModel(BaseModel):
    case_id: int
    year: int
    gender: int
    region: int
    grades: list[int]


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateRequest(BaseModel):
    n_records: int = Field(ge=1)
    years: list[int] = [2015, 2017]
    regions: list[int] = [1, 2, 3]
    gender_split: float = Field(0.5, ge=0.0, le=1.0)
    ability_center: float = 5.0
    ability_spread: float = Field(2.0, ge=0.0)
    noise_spread: float = Field(0.75, ge=0.0)
    missing_rate: float = Field(0.0, ge=0.0, lt=1.0)
    target_index_for_missing: int = Field(4, ge=1, le=4)
    seed: int = 0


class GenerateResponse(BaseModel):
    n_records: int
    records_csv: str


class ScanRequest(BaseModel):
    records_csv: str
    target_index: int = Field(4, ge=1, le=4)
    year: Optional[int] = None
    region: Optional[int] = Field(None, ge=1, le=6)


class RescuableCaseModel(BaseModel):
    case_id: int
    year: int
    region: int
    gender: int
    observed: list[int]
    missing_index: int
    valid: bool


class ScanResponse(BaseModel):
    n_records: int
    cases: list[RescuableCaseModel]


class RegressionEvalRequest(BaseModel):
    records_csv: str
    target_index: int = Field(4, ge=1, le=4)
    year: Optional[int] = None
    region: Optional[int] = Field(None, ge=1, le=6)
    gender: Optional[int] = Field(None, ge=1, le=2)
    reps: int = Field(100, ge=1)
    seed: int = 0
    split: SplitOptions = SplitOptions()


class HybridEvalRequest(RegressionEvalRequest):
    k: int = Field(100, ge=1)
    distance: str = "euclid2"  # euclid2 | chebyshev
    rule: Optional[str] = None  # avg | mode; None reports both
    epsilon: Optional[float] = Field(None, ge=0.0)
    band_features: bool = False
    paper_normalization: bool = False


class ErrorReportModel(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: str
    mpf: Optional[float]
    mfp: Optional[float]
    n_pass: int
    n_fail: int
    reps: int
    exclusions: dict[str, int]
    mean_adjusted_r2: Optional[float] = None
    degenerate_reps: int = 0
    group_relative_mpf: Optional[float] = None
    group_relative_mfp: Optional[float] = None
    empty_classes: int = 0


class RegressionEvalResponse(BaseModel):
    report: ErrorReportModel
    per_rep_adjusted_r2: list[float]


class HybridEvalResponse(BaseModel):
    reports: list[ErrorReportModel]


class PredictRequest(BaseModel):
    records_csv: str
    case_id: int
    target_index: int = Field(4, ge=1, le=4)
    engine: str = "reg"  # reg | hybrid | hybrid-avg | hybrid-mode
    reps: int = Field(100, ge=1)
    seed: int = 0
    k: int = Field(100, ge=1)
    restrict_gender: bool = False
    split: SplitOptions = SplitOptions()


class DecisionModel(BaseModel):
    case_id: int
    year: int
    region: int
    engine: str
    verdict: str  # PassGranted | Fail | Undecidable
    grade4p: Optional[float] = None
    pass_votes: Optional[int] = None
    reps: Optional[int] = None
    mean_estimate: Optional[float] = None
    modal_estimate: Optional[int] = None
    reason: Optional[str] = None


class PredictResponse(BaseModel):
    decision: DecisionModel
    per_rep_estimates: list[float]


class RescueAllRequest(BaseModel):
    records_csv: str
    target_index: int = Field(4, ge=1, le=4)
    engine: str = "reg"
    reps: int = Field(100, ge=1)
    seed: int = 0
    k: int = Field(100, ge=1)
    restrict_gender: bool = False
    split: SplitOptions = SplitOptions()


class RescueAllResponse(BaseModel):
    outcomes: list[DecisionModel]
