"""Independent brute-force oracles the library implementations are checked against.

Everything here is deliberately naive pure Python (no numpy.linalg, no shared
code paths with the package) so that an agreement between oracle and library
actually means something.
"""

from __future__ import annotations

from catchup.sampling import SplitConfig, split


def ols_fit_oracle(quadruples, target_index):
    """Least-squares coefficients by explicit normal equations + elimination.

    Returns (intercept, (a1, a2, a3)). Raises ZeroDivisionError on a singular
    system (callers regenerate such fixtures).
    """
    cols = [i for i in range(4) if i != target_index - 1]
    rows = [[1.0] + [float(q[c]) for c in cols] for q in quadruples]
    y = [float(q[target_index - 1]) for q in quadruples]
    p = 4

    # normal equations: (X'X) beta = X'y
    xtx = [[sum(r[i] * r[j] for r in rows) for j in range(p)] for i in range(p)]
    xty = [sum(r[i] * yi for r, yi in zip(rows, y)) for i in range(p)]

    # Gaussian elimination with partial pivoting
    a = [xtx[i] + [xty[i]] for i in range(p)]
    for col in range(p):
        pivot = max(range(col, p), key=lambda r: abs(a[r][col]))
        if abs(a[pivot][col]) < 1e-12:
            raise ZeroDivisionError("singular normal equations")
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(col + 1, p):
            f = a[r][col] / a[col][col]
            for c in range(col, p + 1):
                a[r][c] -= f * a[col][c]
    beta = [0.0] * p
    for i in reversed(range(p)):
        beta[i] = (a[i][p] - sum(a[i][j] * beta[j] for j in range(i + 1, p))) / a[i][i]
    return beta[0], tuple(beta[1:])


def squared_dist_oracle(p, c):
    return sum((a - b) ** 2 for a, b in zip(p, c))


def knn_class_oracle(query, train_triples, k):
    """(mode, members) by full sort: 'similar' when the zero-distance set
    exceeds k, else the first k of the (distance, index)-sorted positions."""
    dists = [squared_dist_oracle(query, t) for t in train_triples]
    zero = [i for i, d in enumerate(dists) if d == 0]
    if len(zero) > k:
        return "similar", zero
    order = sorted(range(len(train_triples)), key=lambda i: (dists[i], i))
    return "completed", order[: min(k, len(train_triples))]


def mean_and_modal_oracle(targets):
    """(mean, most frequent grade); modal ties go to the larger grade."""
    targets = list(targets)
    mean = sum(targets) / len(targets)
    counts = {}
    for t in targets:
        counts[t] = counts.get(t, 0) + 1
    best = max(counts.values())
    modal = max(g for g, c in counts.items() if c == best)
    return mean, modal


def confusion_oracle(actual, predicted):
    """(mpf, mfp, n_pass, n_fail) by direct counting; None on 0 denominators."""
    n_pass = n_fail = mpf_n = mfp_n = 0
    for a, p in zip(actual, predicted):
        if a < 9:
            n_pass += 1
            if p > 8:
                mpf_n += 1
        else:
            n_fail += 1
            if p <= 8:
                mfp_n += 1
    return (
        mpf_n / n_pass if n_pass else None,
        mfp_n / n_fail if n_fail else None,
        n_pass,
        n_fail,
    )


def regression_eval_oracle(matrix, target_index, reps, seed, config=SplitConfig()):
    """Naive re-run of the Monte Carlo regression loop.

    Shares only the split sequence with the library (same derived seeds);
    fitting, prediction, confusion counting, and averaging are re-done here.
    """
    cols = [i for i in range(4) if i != target_index - 1]
    mpfs, mfps = [], []
    for b in range(1, reps + 1):
        sp = split(len(matrix), (seed, b), config)
        train = [matrix[i] for i in sp.train]
        test = [matrix[i] for i in sp.test]
        c, slopes = ols_fit_oracle(train, target_index)
        preds = [c + sum(s * row[j] for s, j in zip(slopes, cols)) for row in test]
        actual = [row[target_index - 1] for row in test]
        mpf, mfp, _, _ = confusion_oracle(actual, preds)
        mpfs.append(mpf)
        mfps.append(mfp)
    mean = lambda vs: (sum(v for v in vs if v is not None) / len([v for v in vs if v is not None])
                       if any(v is not None for v in vs) else None)
    return mean(mpfs), mean(mfps)
