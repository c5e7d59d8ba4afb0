"""Self-contained least-squares and bootstrap machinery.

Everything here is classical: OLS through a QR decomposition with
homoskedastic standard errors, t-based inference, and a percentile
bootstrap over per-user statistics.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.stats

from ._rng import substream
from .errors import (
    DataError,
    DegenerateColumnError,
    InsufficientDataError,
    SingularDesignError,
)

# singular values below RANK_RTOL * sigma_max count as zero
RANK_RTOL = 1e-10


def standardize(x) -> np.ndarray:
    """Center to mean 0 and scale to sample standard deviation 1 (n-1 denominator)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DataError("standardize expects a 1-d array")
    if arr.size < 2:
        raise InsufficientDataError("standardize needs at least 2 values")
    if np.any(~np.isfinite(arr)):
        raise DataError("standardize got non-finite values")
    sd = arr.std(ddof=1)
    if sd == 0.0:
        raise DegenerateColumnError("cannot standardize a zero-variance column")
    return (arr - arr.mean()) / sd


@dataclass
class DesignMatrix:
    """A named design: columns `names`, matrix `X` (n rows, p columns), response `y`."""

    names: list
    X: np.ndarray
    y: np.ndarray
    row_labels: list | None = None   # optional row identity (e.g. song ids)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2:
            raise DataError("X must be 2-d")
        n, p = self.X.shape
        if len(self.names) != p:
            raise DataError(f"{len(self.names)} names for {p} columns")
        if len(set(self.names)) != p:
            raise DataError("design column names must be unique")
        if self.y.shape != (n,):
            raise DataError(f"y has shape {self.y.shape}, expected ({n},)")
        if np.any(~np.isfinite(self.X)) or np.any(~np.isfinite(self.y)):
            raise DataError("design contains non-finite values")
        if self.row_labels is not None and len(self.row_labels) != n:
            raise DataError("row_labels length must match number of rows")

    @property
    def nobs(self) -> int:
        return self.X.shape[0]


@dataclass
class RegressionResult:
    names: list
    coef: np.ndarray
    se: np.ndarray
    tvalues: np.ndarray
    pvalues: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    ci_level: float
    r2: float
    adj_r2: float
    fstat: float
    f_pvalue: float
    nobs: int
    df_resid: int
    residuals: np.ndarray = field(repr=False)

    def as_rows(self):
        """One (term, coef, se, t, p, ci_low, ci_high) tuple per column."""
        return [
            (self.names[j], self.coef[j], self.se[j], self.tvalues[j],
             self.pvalues[j], self.ci_low[j], self.ci_high[j])
            for j in range(len(self.names))
        ]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["term", "coef", "se", "t", "p", "ci_low", "ci_high"])
            for row in self.as_rows():
                w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])

    def format_table(self) -> str:
        """Aligned plain-text rendering of the fitted model."""
        header = f"{'term':<40} {'coef':>10} {'se':>10} {'t':>9} {'p':>8}"
        lines = [header, "-" * len(header)]
        for name, b, s, t, p, *_ in self.as_rows():
            lines.append(f"{name:<40} {b:>10.4f} {s:>10.4f} {t:>9.2f} {p:>8.3g}")
        lines.append("-" * len(header))
        lines.append(
            f"n={self.nobs}  R2={self.r2:.3f}  adj R2={self.adj_r2:.3f}  "
            f"F={self.fstat:.1f} (p={self.f_pvalue:.3g})")
        return "\n".join(lines)


def _dependent_columns(X: np.ndarray, names: list, svals, vmat) -> list:
    involved = set()
    cutoff = RANK_RTOL * svals[0]
    for k in range(len(svals)):
        if svals[k] <= cutoff:
            vec = np.abs(vmat[k])
            for j in np.flatnonzero(vec > 1e-8 * vec.max()):
                involved.add(names[j])
    return sorted(involved)


def ols(design: DesignMatrix, ci_level: float = 0.95) -> RegressionResult:
    """Fit ordinary least squares with classical (homoskedastic) inference.

    The solve goes through a QR decomposition for numerical stability; rank
    is checked first via singular values with relative tolerance 1e-10, and a
    deficient design is rejected naming the linearly dependent columns.
    R-squared and the F statistic use the centered total sum of squares when
    the ones vector lies in the column span, uncentered otherwise.
    """
    X, y = design.X, design.y
    n, p = X.shape
    if n <= p:
        raise InsufficientDataError(f"need more rows ({n}) than columns ({p})")
    if not 0.0 < ci_level < 1.0:
        raise DataError("ci_level must be in (0, 1)")

    svals_full = np.linalg.svd(X, compute_uv=False)
    if svals_full[-1] <= RANK_RTOL * svals_full[0]:
        _, svals, vmat = np.linalg.svd(X, full_matrices=False)
        bad = _dependent_columns(X, design.names, svals, vmat)
        raise SingularDesignError(f"design is rank-deficient; dependent columns: {bad}")

    q, r = np.linalg.qr(X)
    coef = scipy.linalg.solve_triangular(r, q.T @ y)
    fitted = X @ coef
    resid = y - fitted
    rss = float(resid @ resid)
    df_resid = n - p
    sigma2 = rss / df_resid
    rinv = scipy.linalg.solve_triangular(r, np.eye(p))
    cov = sigma2 * (rinv @ rinv.T)
    se = np.sqrt(np.diag(cov))

    with np.errstate(divide="ignore", invalid="ignore"):
        tvals = np.where(se > 0, coef / se, np.inf * np.sign(coef))
    pvals = 2.0 * scipy.stats.t.sf(np.abs(tvals), df_resid)

    # intercept-in-span test: can the columns reproduce the ones vector?
    ones = np.ones(n)
    span_resid = ones - q @ (q.T @ ones)
    has_intercept = float(np.linalg.norm(span_resid)) <= 1e-8 * np.sqrt(n)

    if has_intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
        df_model = p - 1
    else:
        tss = float(y @ y)
        df_model = p
    if tss <= 0.0:
        raise DegenerateColumnError("response has zero variation; R2 undefined")
    r2 = 1.0 - rss / tss
    if df_model > 0:
        adj_r2 = 1.0 - (1.0 - r2) * (n - (1 if has_intercept else 0)) / df_resid
        with np.errstate(divide="ignore", invalid="ignore"):
            fstat = ((tss - rss) / df_model) / sigma2 if sigma2 > 0 else np.inf
        f_pvalue = float(scipy.stats.f.sf(fstat, df_model, df_resid))
    else:
        adj_r2 = r2
        fstat = np.nan
        f_pvalue = np.nan

    tcrit = scipy.stats.t.ppf(1.0 - (1.0 - ci_level) / 2.0, df_resid)
    return RegressionResult(
        names=list(design.names), coef=coef, se=se, tvalues=tvals, pvalues=pvals,
        ci_low=coef - tcrit * se, ci_high=coef + tcrit * se, ci_level=ci_level,
        r2=r2, adj_r2=adj_r2, fstat=float(fstat), f_pvalue=float(f_pvalue),
        nobs=n, df_resid=df_resid, residuals=resid)


@dataclass(frozen=True)
class BootstrapCI:
    point: float
    low: float
    high: float
    level: float
    n_resamples: int

    @property
    def half_width(self) -> float:
        # for "point +/- half_width" style reporting
        return (self.high - self.low) / 2.0


def user_bootstrap_variance(user_means, n_resamples: int = 2000,
                            level: float = 0.95, seed: int = 0) -> BootstrapCI:
    """Percentile-bootstrap CI for the variance of per-user mean scores.

    Resampling is at the user level: each resample draws n users with
    replacement and recomputes the sample variance (n-1 denominator).
    """
    x = np.asarray(user_means, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InsufficientDataError("need at least 2 user means")
    if np.any(~np.isfinite(x)):
        raise DataError("user means contain non-finite values")
    if not 0.0 < level < 1.0:
        raise DataError("level must be in (0, 1)")
    if n_resamples < 1:
        raise DataError("n_resamples must be >= 1")
    rng = substream(seed, "bootstrap-variance")
    idx = rng.integers(0, x.size, size=(n_resamples, x.size))
    stats = np.var(x[idx], axis=1, ddof=1)
    alpha = (1.0 - level) / 2.0
    low, high = np.percentile(stats, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return BootstrapCI(point=float(np.var(x, ddof=1)), low=float(low),
                       high=float(high), level=level, n_resamples=n_resamples)


def pearson_correlation(x, y) -> float:
    """Plain Pearson correlation with explicit degenerate-input errors."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError("inputs must be 1-d arrays of equal length")
    if a.size < 2:
        raise InsufficientDataError("correlation needs at least 2 points")
    if np.any(~np.isfinite(a)) or np.any(~np.isfinite(b)):
        raise DataError("correlation inputs contain non-finite values")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt(np.sum(da * da) * np.sum(db * db))
    if denom == 0.0:
        raise DegenerateColumnError("correlation undefined for constant input")
    return float(np.sum(da * db) / denom)
