"""Monte Carlo misclassification rates for the two imputers.

Per repetition the cohort's complete view is split, the imputer is built on
the train side, and the test side is scored with two conditional rates:

* mpf: declared failing although the case passed (actual < 9, estimate > 8)
* mfp: declared passing although the case failed (actual = 9, estimate <= 8)

Rates with an empty denominator are undefined (``None``), never 0/0; such
repetitions are excluded from the average and counted. The hybrid evaluation
routes each test case to the similar (+1) or completed (-1) group and scores
both decision rules within each group; fidelity mode additionally reports
rates normalized by group size instead of by the group's pass/fail counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import EvalError, FitError
from .grades import Cohort, PASS_CUT, band_codes, predictor_positions
from .hybrid import ClassMode, DEFAULT_K, DistanceKind, build_class, estimate
from .regression import fit, predict_many
from .sampling import SplitConfig, split

MODEL_SIMILAR_AVERAGE = "similar_average"
MODEL_SIMILAR_MOST_FREQUENT = "similar_most_frequent"
MODEL_COMPLETED_AVERAGE = "completed_average"
MODEL_COMPLETED_MOST_FREQUENT = "completed_most_frequent"
MODEL_BALL_AVERAGE = "ball_average"
MODEL_BALL_MOST_FREQUENT = "ball_most_frequent"

HYBRID_MODELS = (
    MODEL_SIMILAR_AVERAGE,
    MODEL_SIMILAR_MOST_FREQUENT,
    MODEL_COMPLETED_AVERAGE,
    MODEL_COMPLETED_MOST_FREQUENT,
)
BALL_MODELS = (MODEL_BALL_AVERAGE, MODEL_BALL_MOST_FREQUENT)


@dataclass(frozen=True)
class ConfusionResult:
    """One actual-vs-estimate comparison; rates are None when undefined."""

    mpf: Optional[float]
    mfp: Optional[float]
    n_pass: int
    n_fail: int
    mpf_count: int
    mfp_count: int


@dataclass(frozen=True)
class ErrorReport:
    """Misclassification rates averaged over the repetitions where defined."""

    model: str
    mpf: Optional[float]
    mfp: Optional[float]
    n_pass: int  # total pass denominators across repetitions
    n_fail: int
    reps: int
    mpf_excluded: int  # repetitions with an undefined rate
    mfp_excluded: int
    mean_adjusted_r2: Optional[float] = None
    per_rep_adjusted_r2: Optional[tuple[float, ...]] = None
    degenerate_reps: int = 0
    group_relative_mpf: Optional[float] = None  # fidelity normalization (by group size)
    group_relative_mfp: Optional[float] = None
    empty_classes: int = 0  # epsilon mode: test cases with no neighbors


def confusion(actual, predicted) -> ConfusionResult:
    """Count the two misclassifications of real-valued estimates.

    ``actual`` are observed integer grades; ``predicted`` are unrounded
    estimates compared against the pass cut directly.
    """
    a = np.asarray(actual)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {p.shape}")
    if a.size == 0:
        raise ValueError("empty input")
    if np.any((a < 1) | (a > 9)):
        raise ValueError("actual grades must be observed values 1..9")
    if not np.all(np.isfinite(p)):
        raise ValueError("estimates must be finite")

    passed = a < 9
    failed = a == 9
    n_pass = int(passed.sum())
    n_fail = int(failed.sum())
    mpf_count = int(np.sum(passed & (p > PASS_CUT)))
    mfp_count = int(np.sum(failed & (p <= PASS_CUT)))
    return ConfusionResult(
        mpf=mpf_count / n_pass if n_pass else None,
        mfp=mfp_count / n_fail if n_fail else None,
        n_pass=n_pass,
        n_fail=n_fail,
        mpf_count=mpf_count,
        mfp_count=mfp_count,
    )


def _mean_defined(values: list[Optional[float]]) -> tuple[Optional[float], int]:
    """(mean over defined entries, count of undefined ones)."""
    defined = [v for v in values if v is not None]
    if not defined:
        return None, len(values)
    return sum(defined) / len(defined), len(values) - len(defined)


def _aggregate(model: str, per_rep: list[ConfusionResult], reps: int) -> ErrorReport:
    mpf, mpf_excluded = _mean_defined([c.mpf for c in per_rep])
    mfp, mfp_excluded = _mean_defined([c.mfp for c in per_rep])
    return ErrorReport(
        model=model,
        mpf=mpf,
        mfp=mfp,
        n_pass=sum(c.n_pass for c in per_rep),
        n_fail=sum(c.n_fail for c in per_rep),
        reps=reps,
        mpf_excluded=mpf_excluded,
        mfp_excluded=mfp_excluded,
    )


def run_regression_eval(
    cohort: Cohort,
    reps: int,
    seed: int,
    split_config: SplitConfig = SplitConfig(),
) -> ErrorReport:
    """Average regression misclassification rates over ``reps`` resampled splits."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    complete = cohort.complete_matrix()
    n = complete.shape[0]
    if n < 2:
        raise EvalError(f"complete view has {n} rows; cannot split")

    cols = predictor_positions(cohort.target_index)
    per_rep: list[ConfusionResult] = []
    adj_r2: list[float] = []
    degenerate_reps = 0
    for b in range(1, reps + 1):
        sp = split(n, (seed, b), split_config)
        train = complete[list(sp.train)]
        test = complete[list(sp.test)]
        try:
            model = fit(train, cohort.target_index)
        except FitError as exc:
            raise EvalError(f"repetition {b}: {exc}") from exc
        if model.degenerate:
            degenerate_reps += 1
        preds = predict_many(model, test[:, cols])
        per_rep.append(confusion(test[:, cohort.target_index - 1], preds))
        adj_r2.append(model.adjusted_r_squared)

    report = _aggregate("regression", per_rep, reps)
    return replace(
        report,
        mean_adjusted_r2=sum(adj_r2) / len(adj_r2),
        per_rep_adjusted_r2=tuple(adj_r2),
        degenerate_reps=degenerate_reps,
    )


def run_hybrid_eval(
    cohort: Cohort,
    reps: int,
    seed: int,
    k: int = DEFAULT_K,
    split_config: SplitConfig = SplitConfig(),
    *,
    distance_kind: DistanceKind = DistanceKind.EUCLID2,
    epsilon: Optional[float] = None,
    band_features: bool = False,
    paper_normalization: bool = False,
) -> dict[str, ErrorReport]:
    """Score the hybrid estimator over ``reps`` resampled splits.

    Returns one report per model: within the similar and completed groups,
    one for the average rule and one for the most-frequent rule (or the two
    ball_* models when ``epsilon`` is given).
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    complete = cohort.complete_matrix()
    n = complete.shape[0]
    if n < 2:
        raise EvalError(f"complete view has {n} rows; cannot split")

    cols = predictor_positions(cohort.target_index)
    tcol = cohort.target_index - 1

    model_names = BALL_MODELS if epsilon is not None else HYBRID_MODELS
    per_rep: dict[str, list[ConfusionResult]] = {m: [] for m in model_names}
    empty_classes = 0

    for b in range(1, reps + 1):
        sp = split(n, (seed, b), split_config)
        train = complete[list(sp.train)]
        test = complete[list(sp.test)]
        train_triples = train[:, cols]
        test_triples = test[:, cols]
        if band_features:
            train_triples = band_codes(train_triples)
            test_triples = band_codes(test_triples)
        train_targets = train[:, tcol]

        # Per test case: estimation class, then both rules.
        groups: dict[str, list[tuple[int, float]]] = {m: [] for m in model_names}
        for i in range(test.shape[0]):
            nc = build_class(
                test_triples[i],
                train_triples,
                k,
                epsilon=epsilon,
                distance_kind=distance_kind,
            )
            if not nc.members:
                empty_classes += 1  # epsilon ball with no neighbors
                continue
            est = estimate(nc, train_targets)
            actual = int(test[i, tcol])
            if epsilon is not None:
                avg_model, mf_model = MODEL_BALL_AVERAGE, MODEL_BALL_MOST_FREQUENT
            elif nc.mode is ClassMode.SIMILAR:
                avg_model, mf_model = MODEL_SIMILAR_AVERAGE, MODEL_SIMILAR_MOST_FREQUENT
            else:
                avg_model, mf_model = MODEL_COMPLETED_AVERAGE, MODEL_COMPLETED_MOST_FREQUENT
            groups[avg_model].append((actual, est.mean_grade))
            groups[mf_model].append((actual, float(est.modal_grade)))

        for m in model_names:
            pairs = groups[m]
            if not pairs:
                per_rep[m].append(ConfusionResult(None, None, 0, 0, 0, 0))
                continue
            actuals = [a for a, _ in pairs]
            preds = [p for _, p in pairs]
            per_rep[m].append(confusion(actuals, preds))

    reports = {}
    for m in model_names:
        report = _aggregate(m, per_rep[m], reps)
        if paper_normalization:
            nsg = [c.n_pass + c.n_fail for c in per_rep[m]]
            rel_mpf = [c.mpf_count / s if s else None for c, s in zip(per_rep[m], nsg)]
            rel_mfp = [c.mfp_count / s if s else None for c, s in zip(per_rep[m], nsg)]
            report = replace(
                report,
                group_relative_mpf=_mean_defined(rel_mpf)[0],
                group_relative_mfp=_mean_defined(rel_mfp)[0],
            )
        if epsilon is not None:
            report = replace(report, empty_classes=empty_classes)
        reports[m] = report
    return reports
