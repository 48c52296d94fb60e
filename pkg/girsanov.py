"""
Ölçü değişimi ağırlıkları: M_n(β) = dP_β/dP_0 (ilk n adım), türev ağırlıkları N, U ve
eşlenmiş çift türevinin iki terimi.

Ziyaret yüklemleri:
  fresh_exactly(k)  {Y_j ∉_k}: Y_j daha önce tam k-1 kez ziyaret edilmiş  -> weight()
  fewer_than(m)     {Y_j ∉^m}: Y_j daha önce m'den az ziyaret edilmiş     -> derivative_weights(), drift_sum(), coupled_terms()
Özdeş kurabiyelerde iki gösterim aynı çarpanları verir.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from environment import CookieEnvironment, CoupledPair
from stats import effective_sample_size
from walker import Trajectory


class ZeroWeightError(RuntimeError):
    """Tüm önem ağırlıkları sıfır"""


class TruncatedCutTime(ValueError):
    """T pencere içinde bulunamadı; türev ağırlıkları tanımsız"""


@dataclass(frozen=True)
class LogWeight:
    log_value: float
    zero_flag: bool = False

    @property
    def value(self) -> float:
        return 0.0 if self.zero_flag else math.exp(self.log_value)


def fresh_exactly(visit_index: np.ndarray, k) -> np.ndarray:
    return np.asarray(visit_index) == k


def fewer_than(visit_index: np.ndarray, m) -> np.ndarray:
    return np.asarray(visit_index) <= m


def _prefix(traj: Trajectory, n: Optional[int]) -> int:
    n = traj.n if n is None else int(n)
    if not 0 <= n <= traj.n:
        raise ValueError(f"n={n} yörünge uzunluğunu ({traj.n}) aşıyor")
    return n


def step_factors(traj: Trajectory, env: CookieEnvironment, n: Optional[int] = None) -> np.ndarray:
    """1 + E_j β_{k_j}(Y_j) 1{Y_j ∉_{k_j}}; k_j > m için 1"""
    n = _prefix(traj, n)
    vi = traj.visit_index[:n]
    # her j için k ≤ m çarpımında yalnızca k = k_j terimi 1'den farklı; beta_at k > m için 0 döner
    betas = env.beta_at(traj.positions[:n], vi)
    return 1.0 + traj.horiz_increments[:n] * betas


def weight_from_factors(factors: np.ndarray) -> LogWeight:
    factors = np.asarray(factors, dtype=np.float64)
    if np.any(factors < 0):
        raise ValueError("Negatif ağırlık çarpanı (|β| ≤ 1 ihlali)")
    zero = bool(np.any(factors == 0))
    positive = factors[factors > 0]
    return LogWeight(math.fsum(np.log(positive).tolist()), zero)


def weight(traj: Trajectory, env: CookieEnvironment, n: Optional[int] = None) -> LogWeight:
    return weight_from_factors(step_factors(traj, env, n))


@dataclass(frozen=True)
class ReweightedEstimate:
    estimate: float
    stderr: float
    ess: float
    n: int

    @property
    def ess_fraction(self) -> float:
        return self.ess / self.n if self.n else 0.0


def _log_arrays(weights: Sequence[LogWeight]):
    logs = np.array([w.log_value for w in weights], dtype=np.float64)
    zeros = np.array([w.zero_flag for w in weights], dtype=bool)
    return logs, zeros


def weight_values(weights: Sequence[LogWeight]) -> np.ndarray:
    logs, zeros = _log_arrays(weights)
    return np.where(zeros, 0.0, np.exp(np.where(zeros, 0.0, logs)))


def reweighted_expectation(values: Sequence[float], weights: Sequence[LogWeight],
                           ess_threshold: float = 0.1, label: str = "") -> ReweightedEstimate:
    """E_β[f] ≈ ortalama(f_i · M_i); ESS = (ΣM)²/ΣM²"""
    f = np.asarray(values, dtype=np.float64)
    if f.size < 2 or f.size != len(weights):
        raise ValueError("En az 2 örnek ve eşit uzunlukta ağırlık gerekli")
    logs, zeros = _log_arrays(weights)
    if np.all(zeros):
        raise ZeroWeightError("Tüm ağırlıklar sıfır")
    if not np.all(np.isfinite(logs[~zeros])):
        raise ValueError("Sonlu olmayan log-ağırlık")
    products = f * weight_values(weights)
    ess = effective_sample_size(logs, zeros)
    if ess < ess_threshold * f.size:
        print(f"⚠️ Düşük ESS{(' ' + label) if label else ''}: {ess:.1f} / {f.size}")
    return ReweightedEstimate(float(np.mean(products)), float(np.std(products, ddof=1) / math.sqrt(f.size)),
                              ess, int(f.size))


@dataclass(frozen=True)
class DerivativeWeights:
    N: float
    U: float
    M: LogWeight
    T: int


def _checked_T(traj: Trajectory, T: Optional[int]) -> int:
    if T is None:
        raise TruncatedCutTime("T pencere içinde bulunamadı")
    if not 0 < T <= traj.n:
        raise ValueError(f"T={T} yörünge uzunluğuyla ({traj.n}) uyumsuz")
    return int(T)


def derivative_weights(traj: Trajectory, env: CookieEnvironment, T: Optional[int]) -> DerivativeWeights:
    """[0,T) öneki üzerinde N_T^m, U_T^m(β), M_T^m(β)"""
    T = _checked_T(traj, T)
    vi = traj.visit_index[:T]
    eta = traj.move_flags[:T].astype(bool)
    E = traj.horiz_increments[:T].astype(np.float64)
    betas = env.beta_at(traj.positions[:T], vi)
    if betas.size and betas.max() >= 1.0:
        raise ValueError("Türev ağırlıkları β < 1 gerektirir")
    active = fewer_than(vi, env.m) & eta
    N = float(traj.d * np.count_nonzero(active))
    U = math.fsum((E / (1.0 + betas * E))[active].tolist())
    return DerivativeWeights(N, U, weight(traj, env, T), T)


def drift_sum(traj: Trajectory, env: CookieEnvironment, T: Optional[int]) -> float:
    """Σ_{j<T} β_{k_j}(Y_j) 1{Y_j ∉^m} η_j: X_T'nin koşullu beklenen artışlarının toplamı"""
    T = _checked_T(traj, T)
    vi = traj.visit_index[:T]
    active = fewer_than(vi, env.m) & traj.move_flags[:T].astype(bool)
    betas = env.beta_at(traj.positions[:T], vi)
    return math.fsum(betas[active].tolist())


@dataclass(frozen=True)
class CoupledTerms:
    term1: float
    term2_full: float
    term2_before: float
    term2_after: float
    M: LogWeight
    T: int


def coupled_terms(traj: Trajectory, pair: CoupledPair, T: Optional[int]) -> CoupledTerms:
    """∂f/∂t integrandları (M_T ile çarpılmadan önce).

    term1 = Σ_j (β_2-β_1)(Y_j) 1{∉^m} η_j
    term2 = N(t) · Σ_i c_i,  N(t) = Σ_j β_t(Y_j) 1{∉^m} η_j,
            c_i = (β_2-β_1)(Y_i) E_i 1{∉^m} / (1 + β_t(Y_i) E_i)
    term2_before yalnızca i < j çiftlerini, term2_after i ≥ j çiftlerini toplar.
    """
    T = _checked_T(traj, T)
    vi = traj.visit_index[:T]
    sites = traj.positions[:T]
    eta = traj.move_flags[:T].astype(bool)
    E = traj.horiz_increments[:T].astype(np.float64)
    active = (fewer_than(vi, pair.m) & eta).astype(np.float64)
    bt = pair.beta_at(sites, vi)
    diff = pair.difference_at(sites, vi)
    a = bt * active
    c = diff * E * active / (1.0 + bt * E)
    full = float(a.sum() * c.sum())
    before = np.zeros(T)
    if T > 1:
        before[1:] = np.cumsum(c)[:-1]
    lower = float(np.dot(a, before))
    return CoupledTerms(float(np.sum(diff * active)), full, lower, full - lower, weight(traj, pair, T), T)
