"""Residual and series diagnostics: ACF, moments, Jarque-Bera, KPSS.

All estimators use the biased (divide-by-n) convention so that the battery
matches the usual time-series reporting: autocovariances divide by n, sample
moments divide by n, skewness is m3/m2^(3/2) and kurtosis m4/m2^2 (normal
reference 3). The Jarque-Bera p-value is the exact chi-square(2) upper tail
exp(-JB/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

#: KPSS level-stationarity critical values (10%, 5%, 1%)
KPSS_CRITICAL_VALUES = {"10%": 0.347, "5%": 0.463, "1%": 0.739}


def _as_array(x, what: str) -> np.ndarray:
    arr = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError(f"{what}: need a non-empty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{what}: non-finite values in input")
    return arr


def acf(x, max_lag: int) -> dict[int, float]:
    """Autocorrelations r(1)..r(max_lag), biased normalization.

    r(k) = sum_t (x_t - xbar)(x_{t+k} - xbar) / sum_t (x_t - xbar)^2
    """
    arr = _as_array(x, "acf")
    n = arr.size
    if max_lag < 1:
        raise DataError(f"acf: max_lag must be >= 1, got {max_lag}")
    if n <= max_lag + 1:
        raise DataError(f"acf: need more than max_lag+1={max_lag + 1} points, got {n}")
    centered = arr - arr.mean()
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise DataError("acf: series has zero variance")
    return {k: float(np.dot(centered[:-k], centered[k:]) / denom)
            for k in range(1, max_lag + 1)}


def central_moments(x) -> tuple[float, float, float]:
    """(variance, skewness, kurtosis) with divide-by-n moments."""
    arr = _as_array(x, "central_moments")
    c = arr - arr.mean()
    m2 = float(np.mean(c ** 2))
    if m2 == 0.0:
        raise DataError("central_moments: series has zero variance")
    m3 = float(np.mean(c ** 3))
    m4 = float(np.mean(c ** 4))
    return m2, m3 / m2 ** 1.5, m4 / m2 ** 2


def jarque_bera_from_moments(n: int, skewness: float, kurtosis: float
                             ) -> tuple[float, float]:
    """JB statistic and exact chi-square(2) p-value from given moments.

    JB = (n/6) * (S^2 + (K-3)^2/4);   p = exp(-JB/2).
    """
    if n < 1:
        raise DataError(f"jarque_bera: n must be positive, got {n}")
    jb = (n / 6.0) * (skewness ** 2 + (kurtosis - 3.0) ** 2 / 4.0)
    return jb, math.exp(-jb / 2.0)


def jarque_bera(x) -> tuple[float, float]:
    """JB normality test of a sample; n is the sample length."""
    arr = _as_array(x, "jarque_bera")
    _, skew, kurt = central_moments(arr)
    return jarque_bera_from_moments(arr.size, skew, kurt)


@dataclass
class KpssResult:
    statistic: float
    bandwidth: int
    critical_values: dict[str, float]
    #: level -> True when level-stationarity is rejected at that level
    reject: dict[str, bool]


def kpss_level(x) -> KpssResult:
    """KPSS test against the null of level stationarity.

    Statistic n^-2 * sum_t S_t^2 / s^2 where S_t are partial sums of the
    demeaned series and s^2 is the Bartlett-kernel long-run variance with
    bandwidth floor(4*(n/100)^(1/4)).
    """
    arr = _as_array(x, "kpss_level")
    n = arr.size
    if n < 2:
        raise DataError(f"kpss_level: need at least 2 observations, got {n}")
    e = arr - arr.mean()
    if float(np.dot(e, e)) == 0.0:
        raise DataError("kpss_level: series has zero variance")
    s_t = np.cumsum(e)
    ell = int(math.floor(4.0 * (n / 100.0) ** 0.25))
    ell = min(ell, n - 1)
    s2 = float(np.dot(e, e)) / n
    for h in range(1, ell + 1):
        gamma = float(np.dot(e[:-h], e[h:])) / n
        s2 += 2.0 * (1.0 - h / (ell + 1.0)) * gamma
    stat = float(np.dot(s_t, s_t)) / (n ** 2 * s2)
    reject = {lvl: stat > cv for lvl, cv in KPSS_CRITICAL_VALUES.items()}
    return KpssResult(stat, ell, dict(KPSS_CRITICAL_VALUES), reject)


@dataclass
class DiagnosticsReport:
    """The residual battery attached to every fit.

    ``r_z`` / ``r_z2`` are autocorrelations of standardized residuals and
    their squares at lags 1..10 (fewer when the sample is short);
    ``flagged_lags`` lists lags with |r| above the 2/sqrt(n) noise band.
    """

    n: int
    r_z: dict[int, float]
    r_z2: dict[int, float]
    skewness: float
    kurtosis: float
    jarque_bera: float
    jb_p_value: float
    acf_flag_threshold: float
    flagged_lags: list[int]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "r_z": {str(k): v for k, v in self.r_z.items()},
            "r_z2": {str(k): v for k, v in self.r_z2.items()},
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "jarque_bera": self.jarque_bera,
            "jb_p_value": self.jb_p_value,
            "acf_flag_threshold": self.acf_flag_threshold,
            "flagged_lags": self.flagged_lags,
        }


def residual_report(standardized, max_lag: int = 10) -> DiagnosticsReport:
    """Build the full battery for a standardized residual series."""
    arr = _as_array(standardized, "residual_report")
    n = arr.size
    lag = min(max_lag, n - 2)
    if lag < 1:
        raise DataError(f"residual_report: too few residuals ({n})")
    r_z = acf(arr, lag)
    r_z2 = acf(arr ** 2, lag)
    _, skew, kurt = central_moments(arr)
    jb, p = jarque_bera_from_moments(n, skew, kurt)
    threshold = 2.0 / math.sqrt(n)
    flagged = sorted(k for k, v in r_z.items() if abs(v) > threshold)
    return DiagnosticsReport(n, r_z, r_z2, skew, kurt, jb, p, threshold, flagged)
