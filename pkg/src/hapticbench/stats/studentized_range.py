"""Studentized-range distribution by nested quadrature, and pooled-error
multiple-comparison intervals whose pairwise significance is judged by
interval non-overlap.

The range CDF for k standard normals is k * int phi(z) [Phi(z+u) - Phi(z)]^(k-1) dz;
for finite error df the argument is additionally scaled by S = sqrt(chi2_df / df)
and the result integrated against the density of S. Both integrals use fixed
Gauss-Legendre rules on truncated supports (the integrands decay like normal /
chi tails, so truncation at the 1e-15 quantiles is far below the rule error);
quantiles come from bisection on the CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainccinv, gammaincinv, gammaln, ndtr

from ..errors import InvalidSpecError

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_Z_NODES = 256
_S_NODES = 128
_Z_LIMIT = 12.0  # |z| beyond this contributes < 1e-33 through phi(z)


@lru_cache(maxsize=8)
def _gauss_legendre(n: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _range_cdf_grid(us: np.ndarray, k: int) -> np.ndarray:
    """P(range of k iid standard normals <= u) for an array of u."""
    z, w = _gauss_legendre(_Z_NODES, -_Z_LIMIT, _Z_LIMIT)
    phi = np.exp(-0.5 * z**2) / _SQRT_2PI
    inner = np.clip(ndtr(z[None, :] + us[:, None]) - ndtr(z)[None, :], 0.0, 1.0)
    values = k * ((inner ** (k - 1)) * (phi * w)[None, :]).sum(axis=1)
    return np.clip(values, 0.0, 1.0) * (us > 0)


def range_cdf(u: float, k: int) -> float:
    """P(range of k iid standard normals <= u)."""
    if k < 2:
        raise InvalidSpecError("k must be at least 2")
    if u <= 0:
        return 0.0
    return float(_range_cdf_grid(np.array([u]), k)[0])


def _scale_support(df: float) -> tuple[float, float]:
    """Support of S = sqrt(chi2_df / df) that carries all but ~1e-15 of mass."""
    hi = math.sqrt(2.0 * float(gammainccinv(df / 2.0, 1e-15)) / df)
    lo = math.sqrt(2.0 * float(gammaincinv(df / 2.0, 1e-15)) / df)
    return lo, hi


def studentized_range_cdf(q: float, k: int, df: float | None = None) -> float:
    """CDF of the studentized range for k groups and df error degrees of freedom.

    df=None (or inf) is the known-variance limit, i.e. the plain range CDF.
    """
    if k < 2:
        raise InvalidSpecError("k must be at least 2")
    if q <= 0:
        return 0.0
    if df is None or math.isinf(df):
        return range_cdf(q, k)
    if df < 1:
        raise InvalidSpecError("df must be at least 1")
    lo, hi = _scale_support(df)
    s, w = _gauss_legendre(_S_NODES, lo, hi)
    # density of S: df^(df/2) s^(df-1) exp(-df s^2/2) 2^(1-df/2) / Gamma(df/2)
    log_pdf = (
        (df / 2.0) * math.log(df)
        + (1.0 - df / 2.0) * math.log(2.0)
        - gammaln(df / 2.0)
        + (df - 1.0) * np.log(s)
        - df * s**2 / 2.0
    )
    value = float((np.exp(log_pdf) * w * _range_cdf_grid(q * s, k)).sum())
    return min(value, 1.0)


def studentized_range_quantile(alpha: float, k: int, df: float | None = None) -> float:
    """Upper-alpha quantile q with P(Q <= q) = 1 - alpha, by bisection."""
    if not 0 < alpha < 1:
        raise InvalidSpecError("alpha must lie in (0, 1)")
    target = 1.0 - alpha
    lo, hi = 1e-6, 10.0
    for _ in range(60):
        if studentized_range_cdf(hi, k, df) >= target:
            break
        hi *= 2.0
    else:
        raise InvalidSpecError("quantile bracket expansion failed")
    return float(
        brentq(lambda q: studentized_range_cdf(q, k, df) - target, lo, hi, xtol=1e-8)
    )


@dataclass(frozen=True)
class TukeyHsdResult:
    q: float
    alpha: float
    halfwidth: float
    means: np.ndarray  # input shape preserved
    lo: np.ndarray
    hi: np.ndarray
    significant: np.ndarray  # (k, k) over flattened means

    @property
    def k(self) -> int:
        return self.means.size


def tukey_hsd_ci(
    group_means,
    mse: float,
    df: float,
    n_per_cell: int,
    alpha: float = 0.05,
) -> TukeyHsdResult:
    """Per-mean comparison intervals from a pooled error term.

    halfwidth = q(alpha, k, df) * sqrt(mse / n) / sqrt(2) for every mean, with
    k the total number of means; two means differ significantly exactly when
    their intervals do not overlap.
    """
    means = np.asarray(group_means, dtype=float)
    k = means.size
    if k < 2:
        raise InvalidSpecError("need at least 2 group means")
    if not np.all(np.isfinite(means)):
        raise InvalidSpecError("group means must be finite")
    if not (mse > 0 and math.isfinite(mse)):
        raise InvalidSpecError("mse must be positive and finite")
    if df is not None and not math.isinf(df) and df < 1:
        raise InvalidSpecError("df must be at least 1 (or inf)")
    if n_per_cell < 1:
        raise InvalidSpecError("n_per_cell must be at least 1")

    q = studentized_range_quantile(alpha, k, df)
    halfwidth = q * math.sqrt(mse / n_per_cell) / math.sqrt(2.0)
    flat = means.reshape(-1)
    gap = np.abs(flat[:, None] - flat[None, :])
    significant = gap > 2.0 * halfwidth
    np.fill_diagonal(significant, False)
    return TukeyHsdResult(
        q=q,
        alpha=alpha,
        halfwidth=halfwidth,
        means=means,
        lo=means - halfwidth,
        hi=means + halfwidth,
        significant=significant,
    )
