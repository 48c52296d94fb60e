"""
Hızın türev tahmincileri: β=0'daki eğim, v(m,β)'nın β-türevi, eşlenmiş çiftte ∂f/∂t ve
monotonluk alt sınırı.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from cut_times import DEFAULT_MAX_ATTEMPTS, DEFAULT_WINDOW, Window
from environment import CoupledPair, Deterministic, interpolate
from girsanov import coupled_terms, derivative_weights
from lattice import STREAM_BLOCK, SeedSpec, as_stream, draw_seed
from stats import Estimate, delta_method, effective_sample_size, mean_estimate

from .palm_batch import DEFAULT_MAX_TRUNCATION, PalmBatch, collect_palm, replicate_seeds
from .speed import DEFAULT_ESS_THRESHOLD

AT_ZERO_BLOCK = 12
V_M_BETA_BLOCK = 13
# ortam çekilişi e, replika i: stream_id = (COUPLED_BLOCK + e)·2^32 + i
COUPLED_BLOCK = 100


@dataclass
class DerivativeEstimate:
    value: float
    stderr: float
    method: str
    d: int
    m: float
    beta: float
    replicates: int
    window: int
    ess: Optional[float] = None
    ess_ok: bool = True
    truncation_rate: float = 0.0

    def as_estimate(self) -> Estimate:
        return Estimate(self.value, self.stderr, self.replicates)


def fresh_horizontal_count(batch: PalmBatch) -> np.ndarray:
    """N_T = d·Σ_{j<T} 1{Y_j ilk kez ziyaret} 1{Z_j = Z_{j+1}}"""
    return np.array([batch.d * float(np.count_nonzero((r.traj.visit_index[: r.T] == 1) & (r.traj.move_flags == 1)))
                     for r in batch.accepted])


def at_zero_from_batch(batch: PalmBatch) -> DerivativeEstimate:
    N = fresh_horizontal_count(batch)
    est = batch.ratio(N / batch.d)
    return DerivativeEstimate(est.value, est.stderr, "at-zero", batch.d, 1, 0.0, len(batch.records),
                              batch.window[1], truncation_rate=batch.truncation_rate)


def derivative_at_zero(d: int, window: Window = DEFAULT_WINDOW, replicates: int = 10 ** 4,
                       seed: SeedSpec = SeedSpec(0), threads: int = 1, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                       max_truncation: float = DEFAULT_MAX_TRUNCATION) -> DerivativeEstimate:
    """lim v(β)/β = E_0[N_T·1_{0∈D}]/d, Palm oranı olarak (1/d)·ΣN/ΣT"""
    batch = collect_palm(d, window, replicate_seeds(seed, AT_ZERO_BLOCK, replicates), threads,
                         max_attempts, label="türev-0")
    batch.check_truncation(max_truncation, "türev-0")
    return at_zero_from_batch(batch)


def v_m_beta_from_batch(batch: PalmBatch, m, beta: float,
                        ess_threshold: float = DEFAULT_ESS_THRESHOLD) -> DerivativeEstimate:
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"β [0,1) aralığında olmalı: {beta}")
    d = batch.d
    env = Deterministic(beta, m)
    rows = []
    logs, zeros = [], []
    for r in batch.accepted:
        w = derivative_weights(r.traj, env, r.T)
        M = w.M.value
        rows.append((w.N * M, w.N * M * w.U, float(w.T)))
        logs.append(w.M.log_value)
        zeros.append(w.M.zero_flag)
    cols = np.asarray(rows, dtype=np.float64)
    est = delta_method(cols, lambda a, b, t: (a + beta * b) / (d * t))
    ess = effective_sample_size(logs, zeros)
    ess_ok = ess >= ess_threshold * len(rows)
    if not ess_ok:
        print(f"⚠️ Düşük ESS ∂v/∂β (m={m}, β={beta}): {ess:.1f} / {len(rows)}")
    return DerivativeEstimate(est.value, est.stderr, "v-m-beta", d, env.m, beta, len(batch.records),
                              batch.window[1], ess, ess_ok, batch.truncation_rate)


def derivative_v_m_beta(d: int, m, beta: float, window: Window = DEFAULT_WINDOW, replicates: int = 10 ** 4,
                        seed: SeedSpec = SeedSpec(0), threads: int = 1, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                        ess_threshold: float = DEFAULT_ESS_THRESHOLD,
                        max_truncation: float = DEFAULT_MAX_TRUNCATION) -> DerivativeEstimate:
    """∂v/∂β(m,β) = (1/d)·Ê[N·M]/Ê[T] + (β/d)·Ê[N·M·U]/Ê[T]"""
    if d < 8:
        print(f"⚠️ ∂v/∂β formülü d ≥ 8 için geçerli (d={d})")
    batch = collect_palm(d, window, replicate_seeds(seed, V_M_BETA_BLOCK, replicates), threads,
                         max_attempts, label="türev")
    batch.check_truncation(max_truncation, "türev")
    return v_m_beta_from_batch(batch, m, beta, ess_threshold)


@dataclass
class CoupledDerivative:
    value: float
    stderr: float
    within_stderr: float
    between_stderr: float
    term1: Estimate
    term2: Estimate
    term2_before: Estimate
    term2_after: Estimate
    term1_bound: float
    t: float
    d: int
    env_draws: int
    replicates: int
    min_ess: float
    truncation_rate: float
    lower_bound: Optional[Estimate] = None
    per_environment: List[Estimate] = field(default_factory=list)

    @property
    def term1_above_bound(self) -> bool:
        return self.term1.value + 3.0 * self.term1.stderr >= self.term1_bound


def _ratio(cols: np.ndarray) -> Estimate:
    return delta_method(cols, lambda a, b: a / b)


def coupled_derivative(pair: CoupledPair, t: float, d: int, window: Window = DEFAULT_WINDOW,
                       replicates: int = 10 ** 3, env_draws: int = 10, seed: SeedSpec = SeedSpec(0),
                       threads: int = 1, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                       ess_threshold: float = DEFAULT_ESS_THRESHOLD,
                       max_truncation: float = DEFAULT_MAX_TRUNCATION) -> CoupledDerivative:
    """∂f/∂t(t): dış döngü ortamı Q'dan çeker, iç döngü P_0 Palm örneklerini β_t ortamına ağırlıklar.

    Terimler M_T ile çarpılıp ΣT'ye bölünür. Ortamlar arası ve ortam içi varyans ayrı raporlanır.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t [0,1] aralığında olmalı: {t}")
    if pair.sigma is not None and pair.sigma >= 1:
        raise ValueError(f"Eşlenmiş çift σ < 1 ile sınırlı olmalı: {pair.sigma}")
    if d < 8:
        print(f"⚠️ ∂f/∂t formülü d ≥ 8 için geçerli (d={d})")
    if env_draws < 1 or replicates < 2:
        raise ValueError(f"Geçersiz parametreler: env_draws={env_draws}, replikalar={replicates}")
    print(f"⏳ Eşlenmiş türev: d={d}, t={t}, {env_draws} ortam × {replicates} Palm örneği")

    seeds = [seed.child(COUPLED_BLOCK + e, i) for e in range(env_draws) for i in range(replicates)]
    batch = collect_palm(d, window, seeds, threads, max_attempts, label="eşlenmiş")
    batch.check_truncation(max_truncation, "eşlenmiş")

    origin = np.zeros((1, d), dtype=np.int64)
    per_env: List[Estimate] = []
    pooled = []
    diff_at_origin = []
    min_ess = math.inf
    for e in range(env_draws):
        env_seed = draw_seed(as_stream(seed.child(COUPLED_BLOCK + e, STREAM_BLOCK - 1)))
        local = interpolate(pair.reseeded(env_seed), t)
        diff_at_origin.append(float(local.difference_at(origin, np.ones(1, dtype=np.int64))[0]))
        rows, logs, zeros = [], [], []
        for r in batch.records[e * replicates:(e + 1) * replicates]:
            if r.T is None:
                continue
            terms = coupled_terms(r.traj, local, r.T)
            M = terms.M.value
            rows.append((terms.term1 * M, terms.term2_full * M, terms.term2_before * M, terms.term2_after * M,
                         float(terms.T)))
            logs.append(terms.M.log_value)
            zeros.append(terms.M.zero_flag)
        cols = np.asarray(rows, dtype=np.float64)
        ess = effective_sample_size(logs, zeros)
        min_ess = min(min_ess, ess / max(1, len(rows)))
        if ess < ess_threshold * len(rows):
            print(f"⚠️ Düşük ESS ortam {e}: {ess:.1f} / {len(rows)}")
        per_env.append(_ratio(np.column_stack([cols[:, 0] + cols[:, 1], cols[:, 4]])))
        pooled.append(cols)

    cols = np.vstack(pooled)
    T = cols[:, 4]
    total = _ratio(np.column_stack([cols[:, 0] + cols[:, 1], T]))
    term1 = _ratio(cols[:, [0, 4]])
    term2 = _ratio(cols[:, [1, 4]])
    before = _ratio(cols[:, [2, 4]])
    after = _ratio(cols[:, [3, 4]])

    values = np.array([p.value for p in per_env])
    within_var = float(np.mean([p.stderr ** 2 for p in per_env])) / env_draws
    if env_draws >= 2:
        spread = float(np.var(values, ddof=1)) / env_draws
        stderr = math.sqrt(spread)
        between = math.sqrt(max(0.0, spread - within_var))
    else:
        stderr = total.stderr
        between = 0.0
    # term1 ≥ (1/d)·Q[(β_2-β_1)(0)] / Ê(T)
    bound = float(np.mean(diff_at_origin)) / (d * float(np.mean(T)))
    lower_bound = None
    if pair.sigma is not None:
        palm_T = [r.T for r in batch.records if r.T is not None]
        lower_bound = monotonicity_bound(d, pair.sigma, palm_T, m_one=pair.m == 1)
    return CoupledDerivative(total.value, stderr, math.sqrt(within_var), between, term1, term2, before, after,
                             bound, float(t), d, env_draws, replicates, float(min_ess), batch.truncation_rate,
                             lower_bound, per_env)


def monotonicity_bound(d: int, sigma: float, palm_T: Sequence[float], m_one: bool = True) -> Estimate:
    """1 - (σ/d)·Ê(g(T)); pozitif değer pozitif ∂f/∂t'yi garanti eder.

    m = 1 için g(T) = (T²+T)/2, genel m için g(T) = (2T+1)T(T+1)/2.
    """
    if not 0.0 <= sigma < 1.0:
        raise ValueError(f"σ [0,1) aralığında olmalı: {sigma}")
    T = np.asarray(palm_T, dtype=np.float64)
    g = (T ** 2 + T) / 2.0 if m_one else (2 * T + 1) * T * (T + 1) / 2.0
    est = mean_estimate(g)
    scale = sigma / d
    return Estimate(1.0 - scale * est.value, scale * est.stderr, est.n)
