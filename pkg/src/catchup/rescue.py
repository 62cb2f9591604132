"""Majority-vote pass/fail rescue for individual cases with a missing grade.

For one rescuable case: over B repetitions the matching cohort's complete
view is resampled, the chosen engine is built on the train side, and the
missing grade is estimated from the case's three observed grades. The case
is granted a pass iff the fraction of passing estimates (grade4P) strictly
exceeds 50%, so a tie with even B fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import CatchupError, CohortTooSmallError, FitError
from .grades import Cohort, CohortFilter, is_passing, predictor_positions
from .hybrid import ClassMode, DEFAULT_K, build_class, estimate
from .ingestion import RescuableCase, build_cohort, scan_rescuable
from .regression import MIN_TRAIN_ROWS, fit, predict
from .sampling import SplitConfig, split


class Engine(Enum):
    REGRESSION = "regression"
    # per-repetition recommended rule: most frequent in a similar class,
    # average in a completed class
    HYBRID_RECOMMENDED = "hybrid"
    HYBRID_AVERAGE = "hybrid-avg"
    HYBRID_MOST_FREQUENT = "hybrid-mode"


#: Accepted spellings on the CLI and the service wire.
ENGINE_NAMES = {
    "reg": Engine.REGRESSION,
    "regression": Engine.REGRESSION,
    "hybrid": Engine.HYBRID_RECOMMENDED,
    "hybrid-avg": Engine.HYBRID_AVERAGE,
    "hybrid-mode": Engine.HYBRID_MOST_FREQUENT,
}


def engine_from_name(name: str) -> Engine:
    try:
        return ENGINE_NAMES[name]
    except KeyError:
        raise ValueError(f"unknown engine {name!r}; choose from {sorted(ENGINE_NAMES)}") from None


class Verdict(Enum):
    PASS_GRANTED = "PassGranted"
    FAIL = "Fail"


@dataclass(frozen=True)
class RescueDecision:
    case: RescuableCase
    engine: Engine
    grade4p: float  # fraction of repetitions whose estimate passes
    pass_votes: int
    reps: int
    verdict: Verdict
    per_rep_estimates: tuple[float, ...]
    # hybrid engines: average of per-repetition class means, and the most
    # frequent of the per-repetition modal grades (larger grade on ties)
    mean_estimate: Optional[float] = None
    modal_estimate: Optional[int] = None


@dataclass(frozen=True)
class UndecidableCase:
    """A rescuable case whose cohort cannot support the engine."""

    case: RescuableCase
    engine: Engine
    reason: str


RescueOutcome = Union[RescueDecision, UndecidableCase]


def predict_case(
    case: RescuableCase,
    cohort: Cohort,
    engine: Engine,
    reps: int,
    seed: int,
    *,
    k: int = DEFAULT_K,
    split_config: SplitConfig = SplitConfig(),
) -> RescueDecision:
    """Majority-vote decision for one valid rescuable case.

    ``cohort`` should already match the case (same year/region slice) and
    carry the case's missing position as target_index.
    """
    if not case.valid:
        raise CatchupError(
            f"case {case.case_id} is not a valid rescue candidate "
            f"(observed grades {case.observed} include a fail)"
        )
    if case.missing_index != cohort.target_index:
        raise CatchupError(
            f"case {case.case_id} misses grade {case.missing_index}, "
            f"but the cohort imputes position {cohort.target_index}"
        )
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")

    complete = cohort.complete_matrix()
    n = complete.shape[0]
    if n < 2:
        raise CohortTooSmallError(
            f"insufficient cohort: {n} complete records for case {case.case_id}"
        )
    cols = predictor_positions(cohort.target_index)
    tcol = cohort.target_index - 1
    triple = np.asarray(case.observed, dtype=float)

    estimates: list[float] = []
    mean_estimates: list[float] = []
    modal_counts = np.zeros(10, dtype=int)
    pass_votes = 0
    for b in range(1, reps + 1):
        sp = split(n, (seed, b), split_config)
        train = complete[list(sp.train)]
        if engine is Engine.REGRESSION:
            if train.shape[0] < MIN_TRAIN_ROWS:
                raise CohortTooSmallError(
                    f"insufficient cohort: repetition {b} drew {train.shape[0]} "
                    f"training rows, need {MIN_TRAIN_ROWS}"
                )
            model = fit(train, cohort.target_index)
            est = predict(model, *triple)
        else:
            nc = build_class(triple, train[:, cols], k)
            he = estimate(nc, train[:, tcol])
            mean_estimates.append(he.mean_grade)
            modal_counts[he.modal_grade] += 1
            if engine is Engine.HYBRID_AVERAGE:
                est = he.mean_grade
            elif engine is Engine.HYBRID_MOST_FREQUENT:
                est = float(he.modal_grade)
            else:  # recommended rule per class mode
                est = (
                    float(he.modal_grade)
                    if nc.mode is ClassMode.SIMILAR
                    else he.mean_grade
                )
        estimates.append(float(est))
        if is_passing(est):
            pass_votes += 1

    mean_estimate = sum(mean_estimates) / len(mean_estimates) if mean_estimates else None
    modal_estimate = (
        int(np.flatnonzero(modal_counts == modal_counts.max()).max())
        if modal_counts.any()
        else None
    )
    return RescueDecision(
        case=case,
        engine=engine,
        grade4p=pass_votes / reps,
        pass_votes=pass_votes,
        reps=reps,
        verdict=Verdict.PASS_GRANTED if 2 * pass_votes > reps else Verdict.FAIL,
        per_rep_estimates=tuple(estimates),
        mean_estimate=mean_estimate,
        modal_estimate=modal_estimate,
    )


def rescue_all(
    records,
    target_index: int,
    engine: Engine,
    reps: int,
    seed: int,
    *,
    k: int = DEFAULT_K,
    split_config: SplitConfig = SplitConfig(),
    restrict_gender: bool = False,
) -> list[RescueOutcome]:
    """Decide every valid rescuable case against its own (year, region) cohort.

    Cases whose cohort cannot support the engine come back as
    ``UndecidableCase`` instead of aborting the batch.
    """
    outcomes: list[RescueOutcome] = []
    for case in scan_rescuable(records, target_index):
        if not case.valid:
            continue
        filt = CohortFilter(
            year=case.year,
            region=case.region,
            gender=case.gender if restrict_gender else None,
        )
        cohort = build_cohort(records, filt, target_index)
        try:
            outcomes.append(
                predict_case(
                    case, cohort, engine, reps, seed, k=k, split_config=split_config
                )
            )
        except (CohortTooSmallError, FitError) as exc:
            outcomes.append(UndecidableCase(case=case, engine=engine, reason=str(exc)))
    return outcomes
