"""Least-squares imputation of one grade from the other three.

Fits grade_target ~ C + a1*g_i + a2*g_j + a3*g_k on complete training
quadruples and predicts real-valued (unrounded) grade estimates. Each
predictor carries its own slope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError
from .grades import predictor_positions

#: Fewest training rows accepted; below this the normal equations are junk.
MIN_TRAIN_ROWS = 5

#: Default adjusted-R^2 acceptance gate.
DEFAULT_GATE_THRESHOLD = 0.70

N_PREDICTORS = 3


@dataclass(frozen=True)
class RegressionModel:
    intercept: float
    slopes: tuple[float, float, float]
    r_squared: float
    adjusted_r_squared: float
    n_train: int
    target_index: int
    degenerate: bool = False  # rank-deficient design; minimum-norm coefficients


def fit(train, target_index: int) -> RegressionModel:
    """Ordinary-least-squares fit on an (n, 4) array of complete quadruples.

    The grade at ``target_index`` (1..4) is the response; the other three, in
    position order, are the predictors. A rank-deficient design falls back to
    the minimum-norm solution and flags the model as degenerate.
    """
    arr = np.asarray(train, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise FitError(f"training data must be (n, 4) quadruples, got shape {arr.shape}")
    n = arr.shape[0]
    if n < MIN_TRAIN_ROWS:
        raise FitError(f"need at least {MIN_TRAIN_ROWS} training rows, got {n}")

    cols = predictor_positions(target_index)
    X = np.column_stack([np.ones(n), arr[:, cols]])
    y = arr[:, target_index - 1]

    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    degenerate = rank < X.shape[1]

    fitted = X @ beta
    rss = float(np.sum((y - fitted) ** 2))
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss > 0.0:
        r2 = 1.0 - rss / tss
    else:
        # Constant response: the intercept reproduces it exactly.
        r2 = 1.0 if rss <= 1e-12 * n else 0.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - N_PREDICTORS - 1)

    return RegressionModel(
        intercept=float(beta[0]),
        slopes=tuple(float(b) for b in beta[1:]),
        r_squared=r2,
        adjusted_r_squared=adj,
        n_train=n,
        target_index=target_index,
        degenerate=degenerate,
    )


def predict(model: RegressionModel, t1: float, t2: float, t3: float) -> float:
    """Grade estimate for one predictor triple (position order)."""
    a1, a2, a3 = model.slopes
    return model.intercept + a1 * t1 + a2 * t2 + a3 * t3


def predict_many(model: RegressionModel, triples) -> np.ndarray:
    """Vectorized ``predict`` over an (m, 3) array of predictor triples."""
    arr = np.asarray(triples, dtype=float)
    return model.intercept + arr @ np.asarray(model.slopes)


def gate(model: RegressionModel, threshold: float = DEFAULT_GATE_THRESHOLD) -> bool:
    """Accept the model iff its adjusted R^2 reaches ``threshold``."""
    return model.adjusted_r_squared >= threshold
