"""Independent reference implementations used only by the test suite.

Everything here is written from the textbook definition with plain loops,
deliberately ignoring how the package computes the same quantity.
"""

import math
from itertools import combinations


def silhouette_oracle(points, labels):
    """Definitional O(n^2) silhouette mean; points is a list of vectors."""
    n = len(points)

    def dist(a, b):
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))

    clusters = sorted(set(labels))
    members = {c: [i for i in range(n) if labels[i] == c] for c in clusters}
    total = 0.0
    for i in range(n):
        own = labels[i]
        if len(members[own]) == 1:
            continue  # s(i) = 0
        a = sum(dist(points[i], points[j]) for j in members[own] if j != i) / (
            len(members[own]) - 1
        )
        b = min(
            sum(dist(points[i], points[j]) for j in members[c]) / len(members[c])
            for c in clusters
            if c != own
        )
        m = max(a, b)
        total += 0.0 if m == 0 else (b - a) / m
    return total / n


def k2_exhaustive_inertia(points):
    """Minimum k=2 inertia over all 2^(n-1)-1 bipartitions."""

    def part_ss(idx):
        if not idx:
            return 0.0
        d = len(points[0])
        mean = [sum(points[i][j] for i in idx) / len(idx) for j in range(d)]
        return sum(
            sum((points[i][j] - mean[j]) ** 2 for j in range(d)) for i in idx
        )

    n = len(points)
    best = math.inf
    everyone = set(range(n))
    # point 0 always in part A: enumerates each unordered bipartition once
    for size in range(0, n):
        for rest in combinations(range(1, n), size):
            a = {0, *rest}
            b = everyone - a
            if not b:
                continue
            best = min(best, part_ss(a) + part_ss(b))
    return best


def t_cdf_oracle(t, df, dps=30):
    """Student-t CDF by direct numerical integration of the density (mpmath)."""
    import mpmath

    with mpmath.workdps(dps):
        df_ = mpmath.mpf(df)
        c = mpmath.gamma((df_ + 1) / 2) / (
            mpmath.sqrt(df_ * mpmath.pi) * mpmath.gamma(df_ / 2)
        )

        def pdf(x):
            return c * (1 + x * x / df_) ** (-(df_ + 1) / 2)

        if t >= 0:
            val = mpmath.mpf("0.5") + mpmath.quad(pdf, [0, t])
        else:
            val = mpmath.mpf("0.5") - mpmath.quad(pdf, [t, 0])
        return float(val)


def ols_oracle(x, y):
    """Simple-regression estimates from the summation formulas."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((xi - mx) ** 2 for xi in x)
    sxy = sum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = [yi - intercept - slope * xi for xi, yi in zip(x, y)]
    ssr = sum(e * e for e in resid)
    sst = sum((yi - my) ** 2 for yi in y)
    sigma2 = ssr / (n - 2)
    se_slope = math.sqrt(sigma2 / sxx)
    se_intercept = math.sqrt(sigma2 * (1 / n + mx * mx / sxx))
    r2 = 1 - ssr / sst if sst > 0 else float("nan")
    return {
        "slope": slope,
        "intercept": intercept,
        "se_slope": se_slope,
        "se_intercept": se_intercept,
        "ssr": ssr,
        "r2": r2,
        "resid": resid,
    }
