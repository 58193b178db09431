"""Rank and distribution tests: Wilcoxon signed-rank (exact up to n = 25 via
the full sign-flip distribution), Friedman with tie correction, step-up FDR
adjustment valid under arbitrary dependence, a Monte Carlo-calibrated
normality test against the fitted normal, and the paired t test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betainc, gammaincc, ndtr
from scipy.stats import rankdata

from ..errors import DegenerateDataError, InvalidSpecError

WILCOXON_EXACT_LIMIT = 25


@dataclass(frozen=True)
class TestResult:
    method: str
    statistic: float
    p_value: float
    exact: bool
    n: int
    df: float | None = None

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "statistic": self.statistic,
            "p": self.p_value,
            "exact": self.exact,
            "n": self.n,
        }
        if self.df is not None:
            out["df"] = self.df
        return out


def _chi2_sf(x: float, df: float) -> float:
    return float(gammaincc(df / 2.0, x / 2.0))


def _pairs_to_diffs(pairs) -> np.ndarray:
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise InvalidSpecError("pairs must be a non-empty sequence of (a, b)")
    if not np.all(np.isfinite(arr)):
        raise InvalidSpecError("pairs must be finite")
    return arr[:, 0] - arr[:, 1]


def _signed_rank_distribution(doubled_ranks: np.ndarray) -> np.ndarray:
    """Counts of each doubled positive-rank sum over all 2^n sign patterns."""
    total = int(doubled_ranks.sum())
    dist = np.zeros(total + 1, dtype=np.int64)
    dist[0] = 1
    for r in doubled_ranks:
        shifted = np.zeros_like(dist)
        shifted[r:] = dist[: dist.size - r]
        dist = dist + shifted
    return dist


def wilcoxon_signed_rank(pairs) -> TestResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped; ties get average ranks. Exact p by the full
    sign-flip distribution for n <= 25, otherwise a normal approximation with
    continuity and tie corrections.
    """
    d = _pairs_to_diffs(pairs)
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        raise DegenerateDataError("all differences are zero")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())

    if n <= WILCOXON_EXACT_LIMIT:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        dist = _signed_rank_distribution(doubled)
        w2 = int(round(2.0 * w_plus))
        m = float(2**n)
        p_le = float(dist[: w2 + 1].sum()) / m
        p_ge = float(dist[w2:].sum()) / m
        p = min(1.0, 2.0 * min(p_le, p_ge))
        return TestResult("wilcoxon-signed-rank", w_plus, p, exact=True, n=n)

    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    tie_term = float(((tie_counts**3 - tie_counts)).sum()) / 48.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    if w_plus == mean:
        return TestResult("wilcoxon-signed-rank", w_plus, 1.0, exact=False, n=n)
    z = (w_plus - mean - math.copysign(0.5, w_plus - mean)) / math.sqrt(var)
    p = min(1.0, 2.0 * float(ndtr(-abs(z))))
    return TestResult("wilcoxon-signed-rank", w_plus, p, exact=False, n=n)


def friedman_test(data) -> TestResult:
    """Friedman rank test across treatments within blocks, tie-corrected.

    data is a (blocks x treatments) table; p comes from chi-square with
    k - 1 degrees of freedom.
    """
    m = np.asarray(data, dtype=float)
    if m.ndim != 2:
        raise InvalidSpecError("data must be a blocks x treatments table")
    n_blocks, k = m.shape
    if k < 2 or n_blocks < 2:
        raise InvalidSpecError("need at least 2 treatments and 2 blocks")
    if not np.all(np.isfinite(m)):
        raise InvalidSpecError("data must be finite")

    ranks = rankdata(m, axis=1)
    rank_sums = ranks.sum(axis=0)
    chi = 12.0 / (n_blocks * k * (k + 1)) * float((rank_sums**2).sum()) - 3.0 * n_blocks * (
        k + 1
    )
    tie_term = 0.0
    for row in m:
        _, counts = np.unique(row, return_counts=True)
        tie_term += float(((counts**3 - counts)).sum())
    correction = 1.0 - tie_term / (n_blocks * k * (k**2 - 1))
    if correction <= 0:
        raise DegenerateDataError("every block is fully tied; ranks carry no information")
    stat = chi / correction
    p = _chi2_sf(stat, k - 1)
    return TestResult("friedman", stat, p, exact=False, n=n_blocks, df=float(k - 1))


def benjamini_yekutieli_adjust(p_values) -> np.ndarray:
    """Step-up FDR adjustment with the harmonic-sum factor; order-preserving.

    adjusted_(j) = min over l >= j of (m * c(m) / l) * p_(l), clipped to 1,
    where c(m) = sum_{h=1..m} 1/h.
    """
    p = np.asarray(list(p_values), dtype=float)
    if p.size == 0:
        return p
    if np.any(~np.isfinite(p)) or np.any((p < 0) | (p > 1)):
        raise InvalidSpecError("p-values must lie in [0, 1]")
    m = p.size
    c_m = float((1.0 / np.arange(1, m + 1)).sum())
    order = np.argsort(p, kind="stable")
    scaled = p[order] * c_m * m / np.arange(1, m + 1)
    adjusted = np.minimum(np.minimum.accumulate(scaled[::-1])[::-1], 1.0)
    out = np.empty(m)
    out[order] = adjusted
    return out


@lru_cache(maxsize=32)
def _normal_distance_null_table(n: int, n_sims: int, seed: int) -> np.ndarray:
    """Sorted null distribution of the fitted-normal KS distance, simulated."""
    rng = np.random.default_rng(seed)
    out = np.empty(n_sims)
    chunk = max(1, min(n_sims, 2_000_000 // max(n, 1)))
    done = 0
    while done < n_sims:
        rows = min(chunk, n_sims - done)
        x = rng.standard_normal((rows, n))
        x = x - x.mean(axis=1, keepdims=True)
        x = x / x.std(axis=1, ddof=1, keepdims=True)
        x.sort(axis=1)
        out[done : done + rows] = _ks_distance_sorted_rows(x)
        done += rows
    out.sort()
    return out


def _ks_distance_sorted_rows(z: np.ndarray) -> np.ndarray:
    n = z.shape[1]
    cdf = ndtr(z)
    i = np.arange(1, n + 1)
    upper = (i / n - cdf).max(axis=1)
    lower = (cdf - (i - 1) / n).max(axis=1)
    return np.maximum(upper, lower)


def lilliefors_test(sample, n_sims: int = 10_000, seed: int = 0) -> TestResult:
    """Normality test against the normal with estimated mean and SD.

    The statistic is the KS distance to the fitted normal; the p-value comes
    from n_sims seeded simulations of the null distribution (cached per
    (n, n_sims, seed)), so results are deterministic for a given seed.
    """
    x = np.asarray(list(sample), dtype=float)
    if x.size < 4:
        raise InvalidSpecError("need at least 4 observations")
    if not np.all(np.isfinite(x)):
        raise InvalidSpecError("sample must be finite")
    sd = x.std(ddof=1)
    if sd == 0:
        raise DegenerateDataError("sample has zero variance")
    z = np.sort((x - x.mean()) / sd)
    d = float(_ks_distance_sorted_rows(z[None, :])[0])
    null = _normal_distance_null_table(x.size, n_sims, seed)
    n_ge = null.size - int(np.searchsorted(null, d, side="left"))
    p = (1.0 + n_ge) / (n_sims + 1.0)
    return TestResult("lilliefors", d, p, exact=False, n=x.size)


def paired_t_test(pairs) -> TestResult:
    """Two-sided paired t test; p from the t distribution via the regularized
    incomplete beta function."""
    d = _pairs_to_diffs(pairs)
    n = d.size
    if n < 2:
        raise InvalidSpecError("need at least 2 pairs")
    sd = d.std(ddof=1)
    if sd == 0:
        raise DegenerateDataError("differences have zero variance")
    t = float(d.mean() / (sd / math.sqrt(n)))
    df = n - 1
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TestResult("paired-t", t, p, exact=False, n=n, df=float(df))
