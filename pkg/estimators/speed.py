"""
Hız tahmincileri: büyük sayılar yasası, kesim oranı (Palm) ve P_0 üzerinden Girsanov taraması.
"""
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from cut_times import DEFAULT_MAX_ATTEMPTS, DEFAULT_WINDOW, Window, normalize_window
from environment import CookieEnvironment, Deterministic
from girsanov import drift_sum, weight
from lattice import SeedSpec, as_stream, draw_seed
from replicates import run_replicates
from stats import Estimate, effective_sample_size, mean_estimate
from walker import simulate_direct

from .palm_batch import DEFAULT_MAX_TRUNCATION, PalmBatch, collect_palm, replicate_seeds

LLN_BLOCK = 16
CUT_RATIO_BLOCK = 10
SWEEP_BLOCK = 11

DEFAULT_BETA_MAX = 0.8
DEFAULT_ESS_THRESHOLD = 0.1


@dataclass
class SpeedEstimate:
    value: float
    stderr: float
    method: str
    d: int
    m: float
    beta: str
    replicates: int
    horizon: int
    form: str = ""
    ess: Optional[float] = None
    ess_ok: bool = True
    truncation_rate: float = 0.0
    denominator: Optional[float] = None
    jackknife_stderr: Optional[float] = None

    def as_estimate(self) -> Estimate:
        return Estimate(self.value, self.stderr, self.replicates)

    def record(self) -> Dict[str, object]:
        out = asdict(self)
        out["m"] = "inf" if math.isinf(self.m) else int(self.m)
        return out


def _lln_worker(task) -> float:
    env, d, n, master, stream_id = task
    rng = as_stream(SeedSpec(master, stream_id))
    local = env.reseeded(draw_seed(rng))
    traj = simulate_direct(local, d, n, rng)
    return float(traj.X[-1]) / n


def speed_lln(env: CookieEnvironment, d: int, n: int = 10 ** 5, replicates: int = 100,
              seed: SeedSpec = SeedSpec(0), threads: int = 1) -> SpeedEstimate:
    """X_n/n replikalar üzerinde; her replikada ortam Q'dan yeniden çekilir (tavlanmış hız)"""
    if n < 1 or replicates < 2:
        raise ValueError(f"Geçersiz parametreler: n={n}, replikalar={replicates}")
    tasks = [(env, d, n, s.master_seed, s.stream_id) for s in replicate_seeds(seed, LLN_BLOCK, replicates)]
    values = run_replicates(_lln_worker, tasks, threads, "lln")
    est = mean_estimate(values)
    return SpeedEstimate(est.value, est.stderr, "lln", d, env.m, env.describe(), replicates, n)


def speed_cut_ratio(env: CookieEnvironment, d: int, window: Window = DEFAULT_WINDOW, replicates: int = 10 ** 4,
                    seed: SeedSpec = SeedSpec(0), threads: int = 1, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                    max_truncation: float = DEFAULT_MAX_TRUNCATION) -> SpeedEstimate:
    """v = Σ X_T / Σ T Palm örnekleri üzerinde, yatay bileşen P_β altında"""
    if d < 6:
        print(f"⚠️ Kesim oranı tahmincisi d ≥ 6 için tasarlandı (d={d})")
    batch = collect_palm(d, window, replicate_seeds(seed, CUT_RATIO_BLOCK, replicates), threads,
                         max_attempts, env, reseed=True, label="kesim-oranı")
    batch.check_truncation(max_truncation, "kesim-oranı")
    X_T = [float(r.traj.X[-1]) for r in batch.accepted]
    est = batch.ratio(X_T)
    return SpeedEstimate(est.value, est.stderr, "cut-ratio", d, env.m, env.describe(), replicates,
                         normalize_window(window)[1], truncation_rate=batch.truncation_rate,
                         denominator=batch.denominator().value, jackknife_stderr=est.jackknife_stderr)


def sweep_from_batch(batch: PalmBatch, m, betas: Sequence[float], beta_max: float = DEFAULT_BETA_MAX,
                     ess_threshold: float = DEFAULT_ESS_THRESHOLD) -> List[SpeedEstimate]:
    """Tek P_0 kümesi üzerinde her β için iki pay formu (X_T·M_T ve sürüklenme toplamı·M_T)"""
    for beta in betas:
        if not 0.0 <= beta < 1.0:
            raise ValueError(f"β [0,1) aralığında olmalı: {beta}")
        if beta > beta_max:
            raise ValueError(f"β={beta} yapılandırılmış β_max={beta_max} değerini aşıyor")
    accepted = batch.accepted
    denominator = batch.denominator().value
    d = batch.d
    out: List[SpeedEstimate] = []
    for beta in betas:
        env = Deterministic(beta, m)
        weights = [weight(r.traj, env, r.T) for r in accepted]
        M = np.array([w.value for w in weights])
        ess = effective_sample_size([w.log_value for w in weights], [w.zero_flag for w in weights])
        ess_ok = ess >= ess_threshold * len(accepted)
        if not ess_ok:
            print(f"⚠️ Düşük ESS β={beta}: {ess:.1f} / {len(accepted)}")
        X_T = np.array([float(r.traj.X[-1]) for r in accepted])
        drift = np.array([drift_sum(r.traj, env, r.T) for r in accepted])
        for form, numerator in (("xm", X_T * M), ("numv", drift * M)):
            est = batch.ratio(numerator)
            out.append(SpeedEstimate(est.value, est.stderr, "girsanov", d, env.m, repr(float(beta)),
                                     len(batch.records), batch.window[1], form, ess, ess_ok,
                                     batch.truncation_rate, denominator, est.jackknife_stderr))
    return out


def speed_girsanov_sweep(d: int, m, betas: Sequence[float], window: Window = DEFAULT_WINDOW,
                         replicates: int = 10 ** 4, seed: SeedSpec = SeedSpec(0), threads: int = 1,
                         max_attempts: int = DEFAULT_MAX_ATTEMPTS, beta_max: float = DEFAULT_BETA_MAX,
                         ess_threshold: float = DEFAULT_ESS_THRESHOLD,
                         max_truncation: float = DEFAULT_MAX_TRUNCATION) -> List[SpeedEstimate]:
    """v(m,β) tüm β ızgarası için; payda E_0[T·1_{0∈D}] bir kez hesaplanır"""
    if d < 6:
        print(f"⚠️ Girsanov taraması d ≥ 6 için tasarlandı (d={d})")
    print(f"⏳ Girsanov taraması: d={d}, m={m}, β={list(betas)}, {replicates} Palm örneği")
    batch = collect_palm(d, window, replicate_seeds(seed, SWEEP_BLOCK, replicates), threads,
                         max_attempts, None, label="tarama")
    batch.check_truncation(max_truncation, "tarama")
    return sweep_from_batch(batch, m, betas, beta_max, ess_threshold)


def sweep_form(estimates: Sequence[SpeedEstimate], form: str) -> List[SpeedEstimate]:
    return [e for e in estimates if e.form == form]
