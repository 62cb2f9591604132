"""Pass/fail rescue decisions for students with one missing core exam grade.

The library imputes the missing grade from the three observed ones, either
by least-squares regression or by a similar-case / nearest-neighbor
estimator, measures both with Monte Carlo misclassification rates, and
applies a majority-vote rule to grant or deny a pass. A FastAPI service
(``catchup.service``) and a thin CLI client (``catchup.cli``) wrap it.
"""

__version__ = "0.1.0"

from .errors import (
    CatchupError,
    CohortTooSmallError,
    DataFormatError,
    EvalError,
    FitError,
    GradeError,
    NoNeighborsError,
)
from .grades import (
    MISSING,
    Cohort,
    CohortFilter,
    GradeBand,
    StudentRecord,
    band_of,
    is_passing,
)
from .ingestion import (
    RescuableCase,
    build_cohort,
    load_records,
    parse_records,
    scan_rescuable,
    write_records,
)
from .sampling import SplitConfig, SplitIndices, presence_test, split
from .regression import RegressionModel, fit, gate, predict
from .hybrid import (
    DecisionRule,
    DistanceKind,
    HybridEstimate,
    NeighborClass,
    build_class,
    decide,
    estimate,
)
from .evaluation import ErrorReport, confusion, run_hybrid_eval, run_regression_eval
from .rescue import (
    Engine,
    RescueDecision,
    UndecidableCase,
    Verdict,
    predict_case,
    rescue_all,
)
from .synthetic import GenConfig, embed_cases, generate
