"""Least squares with a full diagnostic block, self-contained p-values.

The regression itself is closed-form; the only nontrivial numerics live in
the regularized incomplete beta function, evaluated with the continued
fraction (modified Lentz), which supplies both Student-t and F tail
probabilities. Confidence bounds invert the t CDF by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllZeroResiduals, ConstantRegressor, TooFewObservations

_EPS = 3e-16
_FPMIN = 1e-300
_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    return h  # converged to working precision in practice long before this


def _stirling_series(z: float) -> float:
    """Correction S(z) in lgamma(z) = (z-1/2)ln z - z + ln(2*pi)/2 + S(z)."""
    z2 = z * z
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z


def _ln_beta(a: float, b: float) -> float:
    """ln B(a, b), stable when one argument dwarfs the other.

    For a lopsided pair, lgamma(hi) - lgamma(hi + lo) cancels to a small
    number whose naive evaluation keeps only ~6 digits at hi ~ 5e5; the
    Stirling form removes the cancellation.
    """
    lo, hi = (a, b) if a <= b else (b, a)
    if hi >= 1e4 and lo <= 100.0:
        diff = (
            -(hi - 0.5) * math.log1p(lo / hi)
            - lo * math.log(hi + lo)
            + lo
            + _stirling_series(hi)
            - _stirling_series(hi + lo)
        )
        return math.lgamma(lo) + diff
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betai(a: float, b: float, x: float, xc: float) -> float:
    """Regularized incomplete beta I_x(a, b); xc = 1 - x passed exactly.

    Carrying the complement avoids cancellation when x is close to 1 (large
    df), where computing 1 - x would lose all precision; logs are taken via
    log1p on whichever side is the small one.
    """
    if x <= 0.0:
        return 0.0
    if xc <= 0.0:
        return 1.0
    ln_x = math.log1p(-xc) if x > 0.5 else math.log(x)
    ln_xc = math.log1p(-x) if xc > 0.5 else math.log(xc)
    bt = math.exp(a * ln_x + b * ln_xc - _ln_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, xc) / b


def t_cdf(t: float, df: float) -> float:
    """Student-t cumulative distribution function.

    Uses I_x(df/2, 1/2) with x = df / (df + t^2); exact 0.5 at t = 0.
    """
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0.0:
        return 0.5
    t2 = t * t
    x = df / (df + t2)
    xc = t2 / (df + t2)
    tail = 0.5 * _betai(df / 2.0, 0.5, x, xc)
    return 1.0 - tail if t > 0 else tail


def f_sf(f: float, df1: float, df2: float) -> float:
    """F-distribution survival function P(F' > f)."""
    if df1 <= 0 or df2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if f <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    xc = df1 * f / (df2 + df1 * f)
    return _betai(df2 / 2.0, df1 / 2.0, x, xc)


def t_ppf(q: float, df: float) -> float:
    """Inverse t CDF by bisection (only upper-half quantiles are needed)."""
    if not 0.5 <= q < 1.0:
        raise ValueError("q must be in [0.5, 1)")
    if q == 0.5:
        return 0.0
    lo, hi = 0.0, 1.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
        if hi > 1e15:
            break
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if mid == lo or mid == hi:
            break
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def durbin_watson(residuals) -> float:
    """DW = sum of squared successive differences over sum of squares."""
    e = np.asarray(residuals, dtype=np.float64)
    if e.size < 2:
        raise TooFewObservations(e.size, 2)
    denom = float((e * e).sum())
    if denom == 0.0:
        raise AllZeroResiduals("all residuals are zero")
    num = float((np.diff(e) ** 2).sum())
    return num / denom


@dataclass
class CoefficientReport:
    name: str
    estimate: float
    std_error: float
    t_value: float
    p_value: float
    ci_low: float
    ci_high: float


@dataclass
class RegressionReport:
    coefficients: list[CoefficientReport]
    r_squared: float
    adj_r_squared: float
    f_statistic: float
    f_p_value: float
    aic: float
    bic: float
    durbin_watson: float
    n_obs: int
    df_resid: int
    exact_fit: bool
    residuals: np.ndarray


def ols_fit(x, y, x_name: str = "x") -> RegressionReport:
    """Simple linear regression with intercept and the full diagnostic block.

    Closed-form normal equations; sigma^2 = SSR / (n - 2); two-sided
    p-values from the t distribution with n - 2 df; 95% intervals from the
    numerically inverted t quantile; Gaussian-MLE log-likelihood feeds AIC
    and BIC with k = 2. Numerically exact fits (SSR ~ 0 at working
    precision) are flagged and reported with zero standard errors, infinite
    t and undefined Durbin-Watson instead of overflowing garbage.

    Raises TooFewObservations (n < 3) or ConstantRegressor.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    if n < 3:
        raise TooFewObservations(n, 3)
    if y.size != n:
        raise ValueError("x and y must have the same length")
    if np.ptp(x) == 0.0:
        raise ConstantRegressor(f"regressor {x_name!r} is constant")

    design = np.column_stack([np.ones(n), x])
    gram = design.T @ design
    beta = np.linalg.solve(gram, design.T @ y)
    residuals = y - design @ beta
    ssr = float(residuals @ residuals)
    sst = float(((y - y.mean()) ** 2).sum())
    df_resid = n - 2
    k_params = 2

    # scale-aware test for a numerically perfect fit (incl. constant y)
    scale = max(sst, float((y * y).sum()), 1e-300)
    exact_fit = ssr <= 1e-14 * scale
    sst_zero = sst <= 1e-14 * max(float((y * y).sum()), 1e-300)

    names = ["Constant", x_name]
    coefficients: list[CoefficientReport] = []
    if exact_fit:
        r_squared = 0.0 if sst_zero else 1.0
        adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) / df_resid
        f_statistic = math.nan if sst_zero else math.inf
        f_p_value = math.nan if sst_zero else 0.0
        aic = -math.inf
        bic = -math.inf
        dw = math.nan
        for name, est in zip(names, beta):
            t_val = math.nan if est == 0.0 else math.copysign(math.inf, est)
            coefficients.append(
                CoefficientReport(
                    name=name,
                    estimate=float(est),
                    std_error=0.0,
                    t_value=t_val,
                    p_value=math.nan if math.isnan(t_val) else 0.0,
                    ci_low=float(est),
                    ci_high=float(est),
                )
            )
    else:
        sigma2 = ssr / df_resid
        cov = sigma2 * np.linalg.inv(gram)
        std_errors = np.sqrt(np.diag(cov))
        t_crit = t_ppf(0.975, df_resid)
        for name, est, se in zip(names, beta, std_errors):
            t_val = est / se
            p_val = 2.0 * (1.0 - t_cdf(abs(t_val), df_resid))
            coefficients.append(
                CoefficientReport(
                    name=name,
                    estimate=float(est),
                    std_error=float(se),
                    t_value=float(t_val),
                    p_value=float(min(max(p_val, 0.0), 1.0)),
                    ci_low=float(est - t_crit * se),
                    ci_high=float(est + t_crit * se),
                )
            )
        r_squared = 0.0 if sst_zero else 1.0 - ssr / sst
        r_squared = min(max(r_squared, 0.0), 1.0)
        adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) / df_resid
        sse = max(sst - ssr, 0.0)
        f_statistic = (sse / 1.0) / sigma2
        f_p_value = f_sf(f_statistic, 1.0, float(df_resid))
        llf = -n / 2.0 * (math.log(2.0 * math.pi) + math.log(ssr / n) + 1.0)
        aic = -2.0 * llf + 2.0 * k_params
        bic = -2.0 * llf + k_params * math.log(n)
        dw = durbin_watson(residuals)

    return RegressionReport(
        coefficients=coefficients,
        r_squared=float(r_squared),
        adj_r_squared=float(adj_r_squared),
        f_statistic=f_statistic,
        f_p_value=f_p_value,
        aic=aic,
        bic=bic,
        durbin_watson=dw,
        n_obs=int(n),
        df_resid=int(df_resid),
        exact_fit=exact_fit,
        residuals=residuals,
    )


def _sentinel(v: float):
    """JSON-safe value: non-finite floats become their string names."""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    return v


def report_to_dict(report: RegressionReport) -> dict:
    """Plain-JSON form of the report; inf and nan appear as strings."""
    return {
        "n_obs": report.n_obs,
        "df_resid": report.df_resid,
        "exact_fit": report.exact_fit,
        "r_squared": _sentinel(report.r_squared),
        "adj_r_squared": _sentinel(report.adj_r_squared),
        "f_statistic": _sentinel(report.f_statistic),
        "f_p_value": _sentinel(report.f_p_value),
        "aic": _sentinel(report.aic),
        "bic": _sentinel(report.bic),
        "durbin_watson": _sentinel(report.durbin_watson),
        "coefficients": [
            {
                "name": c.name,
                "estimate": _sentinel(c.estimate),
                "std_error": _sentinel(c.std_error),
                "t_value": _sentinel(c.t_value),
                "p_value": _sentinel(c.p_value),
                "ci_low": _sentinel(c.ci_low),
                "ci_high": _sentinel(c.ci_high),
            }
            for c in report.coefficients
        ],
    }


def _fmt(v: float, width: int = 12, nd: int = 4) -> str:
    if isinstance(v, float) and not math.isfinite(v):
        return f"{_sentinel(v):>{width}}"
    return f"{v:>{width}.{nd}f}"


def render_report_text(report: RegressionReport) -> str:
    """Human-readable regression table plus the diagnostic note lines."""
    lines = []
    lines.append("OLS Regression Results")
    lines.append("=" * 86)
    lines.append(
        f"{'Variable':<14}{'Coefficient':>12}{'Std. Error':>12}{'t-Value':>12}"
        f"{'P>|t|':>12}{'[0.025':>12}{'0.975]':>12}"
    )
    lines.append("-" * 86)
    for c in report.coefficients:
        lines.append(
            f"{c.name:<14}"
            + _fmt(c.estimate)
            + _fmt(c.std_error)
            + _fmt(c.t_value, nd=3)
            + _fmt(c.p_value)
            + _fmt(c.ci_low)
            + _fmt(c.ci_high)
        )
    lines.append("-" * 86)
    lines.append(
        f"R-squared: {_fmt(report.r_squared, 0, 4).strip()}    "
        f"Adj. R-squared: {_fmt(report.adj_r_squared, 0, 4).strip()}    "
        f"No. Observations: {report.n_obs}    Df Residuals: {report.df_resid}"
    )
    f_p = report.f_p_value
    f_p_text = _sentinel(f_p) if isinstance(f_p, float) and not math.isfinite(f_p) else f"{f_p:.3g}"
    lines.append(
        f"F-statistic: {_fmt(report.f_statistic, 0, 1).strip()}    "
        f"Prob (F-statistic): {f_p_text}"
    )
    lines.append(
        f"AIC: {_fmt(report.aic, 0, 1).strip()}    BIC: {_fmt(report.bic, 0, 1).strip()}    "
        f"Durbin-Watson: {_fmt(report.durbin_watson, 0, 3).strip()}"
    )
    if report.exact_fit:
        lines.append("Note: numerically exact fit; inferential statistics degenerate.")
    return "\n".join(lines) + "\n"
