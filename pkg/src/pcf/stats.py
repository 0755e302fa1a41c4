"""Descriptive statistics, OLS with diagnostics, and cubic B-spline regression.

OLS solves via QR (never normal equations); t tail probabilities use the
regularized incomplete beta for residual df <= 1e5 and the normal
approximation above.  B-spline bases come from the de Boor-Cox recursion
with interior knots at equally spaced sample quantiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import betainc, stdtrit

from .errors import (
    DegenerateResponse,
    DegenerateX,
    DimensionMismatch,
    EmptyInput,
    InsufficientData,
    RankDeficient,
    SchemaError,
)

#: Normal quantile used for the 99% confidence interval (large-n convention).
Z_99 = 2.5758293
#: Residual df above which Student-t tails switch to the normal approximation.
T_NORMAL_DF = 10 ** 5
_Z_975 = 1.959963984540054


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    median: float
    min: float
    max: float
    sample_std: float
    ci99: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "median": self.median,
            "min": self.min,
            "max": self.max,
            "sample_std": self.sample_std,
            "ci99": list(self.ci99),
        }


@dataclass(frozen=True)
class RegressionFit:
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    ci95: np.ndarray  # shape (p, 2)
    r_squared: float
    adj_r_squared: float
    f_statistic: float
    log_likelihood: float
    aic: float
    bic: float
    residuals: np.ndarray
    n_obs: int
    df_resid: int
    names: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        names = self.names or tuple(f"x{i}" for i in range(len(self.coefficients)))
        return {
            "coefficients": {n: float(c) for n, c in zip(names, self.coefficients)},
            "std_errors": {n: float(s) for n, s in zip(names, self.std_errors)},
            "t_stats": {n: float(t) for n, t in zip(names, self.t_stats)},
            "p_values": {n: float(p) for n, p in zip(names, self.p_values)},
            "ci95": {n: [float(lo), float(hi)] for n, (lo, hi) in zip(names, self.ci95)},
            "r_squared": self.r_squared,
            "adj_r_squared": self.adj_r_squared,
            "f_statistic": self.f_statistic,
            "log_likelihood": self.log_likelihood,
            "aic": self.aic,
            "bic": self.bic,
            "n_obs": self.n_obs,
            "df_resid": self.df_resid,
        }


@dataclass(frozen=True)
class Diagnostics:
    skew: float
    kurtosis: float  # non-excess
    jarque_bera: float
    jb_p: float
    durbin_watson: float

    def to_dict(self) -> dict:
        return {
            "skew": self.skew,
            "kurtosis": self.kurtosis,
            "jarque_bera": self.jarque_bera,
            "jb_p": self.jb_p,
            "durbin_watson": self.durbin_watson,
        }


@dataclass(frozen=True)
class BasisMatrix:
    """Cubic B-spline design columns for one predictor.

    ``full`` holds all df+1 de Boor basis functions (each row sums to 1);
    ``values`` drops the first column, the convention for models that carry
    their own intercept.
    """

    values: np.ndarray  # (n, df)
    full: np.ndarray  # (n, df + 1)
    knots: np.ndarray  # interior knots
    boundary: tuple[float, float]
    degree: int
    df: int


def descriptive(values: Sequence[float]) -> DescriptiveStats:
    """Mean, median, extremes, n-1 std, and the z-based 99% CI of the mean."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        x = x.ravel()
    n = len(x)
    if n == 0:
        raise EmptyInput("descriptive statistics need at least one value")
    mean = float(np.mean(x))
    std = float(np.std(x, ddof=1)) if n > 1 else 0.0
    half = Z_99 * std / math.sqrt(n)
    return DescriptiveStats(
        n=n,
        mean=mean,
        median=float(np.median(x)),
        min=float(np.min(x)),
        max=float(np.max(x)),
        sample_std=std,
        ci99=(mean - half, mean + half),
    )


def _t_sf_two_sided(t: np.ndarray, df: int) -> np.ndarray:
    """Two-sided Student-t tail probability."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    if df > T_NORMAL_DF:
        return np.array([math.erfc(v / math.sqrt(2.0)) for v in np.atleast_1d(t)])
    x = df / (df + t * t)
    return betainc(df / 2.0, 0.5, x)


def _t_quantile_975(df: int) -> float:
    if df > T_NORMAL_DF:
        return _Z_975
    return float(stdtrit(df, 0.975))


def ols(design, y, names: Optional[Sequence[str]] = None) -> RegressionFit:
    """Least squares of y on a design matrix whose first column is the intercept.

    Coefficients come from a QR factorisation; standard errors from
    sigma2 * (X'X)^-1 with sigma2 = SSR / (n - p).
    """
    X = np.asarray(design, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2:
        raise DimensionMismatch("design must be a 2-D matrix")
    n, p = X.shape
    if len(y) != n:
        raise DimensionMismatch(f"design has {n} rows but y has {len(y)}")
    if n < p:
        raise DimensionMismatch(f"need at least as many rows ({n}) as columns ({p})")

    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if np.min(diag) <= max(n, p) * np.finfo(np.float64).eps * np.max(diag):
        raise RankDeficient("design matrix is rank deficient")
    beta = np.linalg.solve(R, Q.T @ y)

    resid = y - X @ beta
    ssr = float(resid @ resid)
    sst = float(np.sum((y - np.mean(y)) ** 2))
    if sst == 0.0:
        raise DegenerateResponse("response is constant; R-squared undefined")
    df_resid = n - p
    if df_resid <= 0:
        raise DimensionMismatch("no residual degrees of freedom")

    r2 = 1.0 - ssr / sst
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df_resid
    sigma2 = ssr / df_resid

    r_inv = np.linalg.solve(R, np.eye(p))
    xtx_inv = r_inv @ r_inv.T
    se = np.sqrt(sigma2 * np.diag(xtx_inv))
    t_stats = beta / se
    p_values = _t_sf_two_sided(t_stats, df_resid)
    tq = _t_quantile_975(df_resid)
    ci95 = np.column_stack([beta - tq * se, beta + tq * se])

    if p > 1:
        f_stat = ((sst - ssr) / (p - 1)) / sigma2
    else:
        f_stat = float("nan")
    # Gaussian log-likelihood at the MLE variance SSR/n.
    ll = -0.5 * n * (math.log(2.0 * math.pi) + math.log(ssr / n) + 1.0)
    aic = 2.0 * p - 2.0 * ll
    bic = p * math.log(n) - 2.0 * ll

    return RegressionFit(
        coefficients=beta,
        std_errors=se,
        t_stats=t_stats,
        p_values=np.asarray(p_values, dtype=np.float64),
        ci95=ci95,
        r_squared=r2,
        adj_r_squared=adj_r2,
        f_statistic=float(f_stat),
        log_likelihood=ll,
        aic=aic,
        bic=bic,
        residuals=resid,
        n_obs=n,
        df_resid=df_resid,
        names=tuple(names) if names else (),
    )


def diagnostics(residuals) -> Diagnostics:
    """Skew, non-excess kurtosis, Jarque-Bera (chi2, 2 df), Durbin-Watson."""
    e = np.asarray(residuals, dtype=np.float64).ravel()
    n = len(e)
    if n < 8:
        raise InsufficientData(f"diagnostics need at least 8 residuals, got {n}")
    centred = e - np.mean(e)
    m2 = float(np.mean(centred ** 2))
    m3 = float(np.mean(centred ** 3))
    m4 = float(np.mean(centred ** 4))
    if m2 == 0.0:
        raise InsufficientData("residuals are constant")
    skew = m3 / m2 ** 1.5
    kurt = m4 / (m2 * m2)
    jb = n / 6.0 * (skew * skew + (kurt - 3.0) ** 2 / 4.0)
    jb_p = math.exp(-jb / 2.0)  # chi-square survival with 2 df
    dw = float(np.sum(np.diff(e) ** 2) / np.sum(e * e))
    return Diagnostics(skew=skew, kurtosis=kurt, jarque_bera=jb, jb_p=jb_p, durbin_watson=dw)


def _de_boor_design(knot_vector: np.ndarray, degree: int, x: np.ndarray) -> np.ndarray:
    """All B-spline basis functions on the knot vector, by Cox-de Boor recursion."""
    t = knot_vector
    m = len(t) - 1
    # Order-zero: indicator of [t_i, t_{i+1}); points at the right boundary
    # belong to the last non-empty span so unity is preserved there.
    B = ((x[:, None] >= t[None, :-1]) & (x[:, None] < t[None, 1:])).astype(np.float64)
    right = x == t[-1]
    if np.any(right):
        last_span = max(i for i in range(m) if t[i] < t[i + 1])
        B[right, :] = 0.0
        B[right, last_span] = 1.0
    for d in range(1, degree + 1):
        nb = B.shape[1] - 1
        new = np.zeros((len(x), nb))
        for i in range(nb):
            left_den = t[i + d] - t[i]
            right_den = t[i + d + 1] - t[i + 1]
            term = 0.0
            if left_den > 0:
                term = (x - t[i]) / left_den * B[:, i]
            if right_den > 0:
                term = term + (t[i + d + 1] - x) / right_den * B[:, i + 1]
            new[:, i] = term
        B = new
    return B


def bspline_basis(x, degree: int = 3, df: int = 5) -> BasisMatrix:
    """Cubic B-spline basis with df columns (first de Boor column dropped).

    df - degree interior knots sit at equally spaced quantiles of x;
    boundary knots at min/max of x.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if len(x) == 0:
        raise EmptyInput("x is empty")
    if df < degree + 1:
        raise SchemaError(f"df must be >= degree + 1, got df={df}, degree={degree}")
    lo, hi = float(np.min(x)), float(np.max(x))
    if lo == hi:
        raise DegenerateX("all x values are equal")
    n_interior = df - degree
    probs = [j / (n_interior + 1) for j in range(1, n_interior + 1)]
    interior = np.quantile(x, probs) if probs else np.empty(0)
    knot_vector = np.concatenate(
        [np.full(degree + 1, lo), np.asarray(interior, dtype=np.float64), np.full(degree + 1, hi)]
    )
    full = _de_boor_design(knot_vector, degree, x)
    return BasisMatrix(
        values=full[:, 1:],
        full=full,
        knots=np.asarray(interior, dtype=np.float64),
        boundary=(lo, hi),
        degree=degree,
        df=df,
    )


def evaluate_basis(basis: BasisMatrix, x) -> np.ndarray:
    """Evaluate the fitted basis (same knots) at new points; df columns."""
    x = np.asarray(x, dtype=np.float64).ravel()
    lo, hi = basis.boundary
    knot_vector = np.concatenate(
        [np.full(basis.degree + 1, lo), basis.knots, np.full(basis.degree + 1, hi)]
    )
    full = _de_boor_design(knot_vector, basis.degree, np.clip(x, lo, hi))
    return full[:, 1:]


@dataclass(frozen=True)
class SplineModel:
    fit: RegressionFit
    basis: BasisMatrix

    def predict(self, time, star_level) -> np.ndarray:
        cols = evaluate_basis(self.basis, time)
        star = np.broadcast_to(
            np.asarray(star_level, dtype=np.float64), cols.shape[:1]
        )
        X = np.column_stack([np.ones(len(cols)), star, cols])
        return X @ self.fit.coefficients


def spline_fit(time, star_level, satisfaction, df: int = 5) -> SplineModel:
    """satisfaction ~ intercept + star_level + bs(time, degree=3, df)."""
    time = np.asarray(time, dtype=np.float64).ravel()
    star = np.asarray(star_level, dtype=np.float64).ravel()
    y = np.asarray(satisfaction, dtype=np.float64).ravel()
    if not len(time) == len(star) == len(y):
        raise DimensionMismatch("time, star_level, satisfaction must align")
    if len(y) < 8:
        raise InsufficientData("spline fit needs at least 8 observations")
    basis = bspline_basis(time, degree=3, df=df)
    X = np.column_stack([np.ones(len(time)), star, basis.values])
    names = ("intercept", "star_level") + tuple(
        f"bs(total_time_per_meal, degree=3, df={df})[{i}]" for i in range(df)
    )
    return SplineModel(fit=ols(X, y, names=names), basis=basis)
