"""
Ortak istatistik yardımcıları: ortalama, oran tahmini (delta yöntemi + jackknife), z-uyumu, izotonik denetim.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats as sp_stats
from scipy.optimize import isotonic_regression


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n: int = 0

    def z(self, target: float) -> float:
        if self.stderr <= 0:
            return 0.0 if self.value == target else math.inf
        return abs(self.value - target) / self.stderr

    def within(self, target: float, k: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.value - target) <= k * self.stderr + slack


@dataclass(frozen=True)
class RatioEstimate(Estimate):
    jackknife_stderr: float = 0.0


def mean_estimate(x: Sequence[float]) -> Estimate:
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("Boş örneklem")
    if x.size == 1:
        return Estimate(float(x[0]), math.inf, 1)
    return Estimate(float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(x.size)), int(x.size))


def _columns(columns) -> np.ndarray:
    cols = np.asarray(columns, dtype=np.float64)
    if cols.ndim == 1:
        cols = cols[:, None]
    if cols.shape[0] < 2:
        raise ValueError("Delta yöntemi için en az 2 örnek gerekli")
    return cols


def delta_method(columns, fn: Callable[..., float]) -> Estimate:
    """fn(ortalama_1, ..., ortalama_k) için delta yöntemi standart hatası"""
    cols = _columns(columns)
    n, k = cols.shape
    means = cols.mean(axis=0)
    value = float(fn(*means))
    grad = np.zeros(k)
    for i in range(k):
        h = 1e-6 * max(1.0, abs(means[i]))
        up, down = means.copy(), means.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (fn(*up) - fn(*down)) / (2 * h)
    cov = np.atleast_2d(np.cov(cols, rowvar=False, ddof=1)) / n
    variance = float(grad @ cov @ grad)
    return Estimate(value, math.sqrt(max(variance, 0.0)), n)


def jackknife(columns, fn: Callable[..., np.ndarray]) -> Estimate:
    """Birini-dışarıda-bırak ortalamalarıyla jackknife; fn numpy dizileri üzerinde çalışmalı"""
    cols = _columns(columns)
    n = cols.shape[0]
    loo = (cols.sum(axis=0) - cols) / (n - 1)
    estimates = np.asarray(fn(*loo.T), dtype=np.float64)
    sigma = math.sqrt((n - 1) * float(np.var(estimates)))
    return Estimate(float(np.mean(estimates)), sigma, n)


def ratio_estimate(num: Sequence[float], den: Sequence[float]) -> RatioEstimate:
    """Σnum / Σden; delta yöntemi hatası ve jackknife çapraz denetimi"""
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    if num.shape != den.shape:
        raise ValueError("Pay ve payda uzunlukları farklı")
    if den.sum() == 0:
        raise ValueError("Payda sıfır")
    cols = np.column_stack([num, den])
    value = float(num.sum() / den.sum())
    if num.size < 2:
        return RatioEstimate(value, math.inf, int(num.size), math.inf)
    delta = delta_method(cols, lambda a, b: a / b)
    jack = jackknife(cols, lambda a, b: a / b)
    return RatioEstimate(value, delta.stderr, int(num.size), jack.stderr)


def combine_independent(value: float, parts: Sequence[tuple]) -> Estimate:
    """Bağımsız bileşenler: parts = [(kısmi türev, stderr), ...]"""
    variance = math.fsum((g * s) ** 2 for g, s in parts)
    return Estimate(float(value), math.sqrt(variance))


def combined_z(a: Estimate, b: Estimate) -> float:
    scale = math.sqrt(a.stderr ** 2 + b.stderr ** 2)
    if scale == 0:
        return 0.0 if a.value == b.value else math.inf
    return abs(a.value - b.value) / scale


def agree(a: Estimate, b: Estimate, k: float = 3.0, slack: float = 0.0) -> bool:
    return abs(a.value - b.value) <= k * math.sqrt(a.stderr ** 2 + b.stderr ** 2) + slack


def effective_sample_size(log_weights: Sequence[float], zero_flags: Optional[Sequence[bool]] = None) -> float:
    """ESS = (Σw)² / Σw², log uzayında kararlı hesap"""
    logw = np.asarray(log_weights, dtype=np.float64)
    mask = np.ones(logw.shape, dtype=bool) if zero_flags is None else ~np.asarray(zero_flags, dtype=bool)
    if not np.any(mask):
        return 0.0
    logw = logw[mask]
    shift = logw.max()
    w = np.exp(logw - shift)
    return float(w.sum() ** 2 / np.sum(w * w))


@dataclass(frozen=True)
class IsotonicCheck:
    fitted: tuple
    chi2: float
    threshold: float
    consistent: bool
    slope_at_zero: Estimate


def isotonic_check(grid: Sequence[float], values: Sequence[float], stderrs: Sequence[float],
                   level: float = 0.99) -> IsotonicCheck:
    """Azalmayan ağırlıklı izotonik uyum; artık ki-kare değeri gürültüyle tutarlı mı"""
    grid = np.asarray(grid, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    se = np.maximum(np.asarray(stderrs, dtype=np.float64), 1e-12)
    fit = isotonic_regression(y, weights=1.0 / se ** 2, increasing=True).x
    chi2 = float(np.sum(((y - fit) / se) ** 2))
    threshold = float(sp_stats.chi2.ppf(level, df=max(1, len(y) - 1)))
    dx = grid[1] - grid[0]
    slope = Estimate(float((y[1] - y[0]) / dx), float(math.sqrt(se[0] ** 2 + se[1] ** 2) / dx))
    return IsotonicCheck(tuple(float(v) for v in fit), chi2, threshold, chi2 <= threshold, slope)
