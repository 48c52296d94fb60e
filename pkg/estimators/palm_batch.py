"""
Palm örneklem kümeleri: 0 ∈ D koşullu dikey yol + üzerine kurulan yatay bileşen.

Koşul olayı {0 ∈ D} yalnızca dikey yürüyüşe bağlıdır ve yatay paralar dikey yoldan bağımsızdır;
bu yüzden yatay bileşen koşullamadan sonra üretilir. Kesim zamanında geçmiş ile gelecek ayrık
olduğundan [0,T) üzerindeki ziyaret sayıları yalnızca [0,T) önekine bağlıdır.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from cut_times import DEFAULT_MAX_ATTEMPTS, Window, normalize_window, sample_palm
from environment import CookieEnvironment
from lattice import SeedSpec, as_stream, draw_seed
from replicates import run_replicates
from stats import Estimate, RatioEstimate, delta_method, ratio_estimate
from walker import Trajectory, lift_symmetric, lift_vertical_path

DEFAULT_MAX_TRUNCATION = 0.01


class TruncationRateExceeded(RuntimeError):
    """Pencere içinde T bulunamayan örneklerin oranı eşiği aştı"""


@dataclass
class PalmRecord:
    traj: Optional[Trajectory]
    T: Optional[int]
    attempts: int
    stream_id: int


def replicate_seeds(seed: SeedSpec, block: int, replicates: int) -> List[SeedSpec]:
    return [seed.child(block, i) for i in range(replicates)]


def palm_trajectory(d: int, window: Window, seed: SeedSpec, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                    env: Optional[CookieEnvironment] = None, reseed: bool = True) -> PalmRecord:
    """Tek Palm örneği; env None ise P_0, aksi halde (reseed ile ortam Q'dan yeniden çekilerek) P_β"""
    rng = as_stream(seed)
    sample = sample_palm(d, window, rng, max_attempts)
    T = sample.record.T
    if T is None:
        return PalmRecord(None, None, sample.attempts, seed.stream_id)
    vertical = sample.path.future()[: T + 1]
    if env is None:
        traj = lift_symmetric(vertical, rng)
    else:
        local = env.reseeded(draw_seed(rng)) if reseed else env
        traj = lift_vertical_path(local, vertical, rng)
    return PalmRecord(traj, T, sample.attempts, seed.stream_id)


def _palm_batch_worker(task) -> PalmRecord:
    d, window, max_attempts, env, reseed, master, stream_id = task
    return palm_trajectory(d, window, SeedSpec(master, stream_id), max_attempts, env, reseed)


@dataclass
class PalmBatch:
    d: int
    window: tuple
    records: List[PalmRecord]

    @property
    def accepted(self) -> List[PalmRecord]:
        return [r for r in self.records if r.T is not None]

    @property
    def truncation_rate(self) -> float:
        if not self.records:
            return 0.0
        return 1.0 - len(self.accepted) / float(len(self.records))

    @property
    def T(self) -> np.ndarray:
        return np.array([r.T for r in self.accepted], dtype=np.float64)

    @property
    def attempts(self) -> np.ndarray:
        return np.array([r.attempts for r in self.records], dtype=np.float64)

    def denominator(self) -> Estimate:
        """E_0[T·1_{0∈D}] = ΣT / Σdeneme = Ê(T)·P(0∈D); β'dan bağımsız, kimlik gereği 1"""
        T = np.array([0.0 if r.T is None else float(r.T) for r in self.records])
        return delta_method(np.column_stack([T, self.attempts]), lambda a, b: a / b)

    def ratio(self, numerators: Sequence[float]) -> RatioEstimate:
        """Σ num / Σ T kabul edilen örnekler üzerinde"""
        return ratio_estimate(numerators, self.T)

    def check_truncation(self, threshold: float = DEFAULT_MAX_TRUNCATION, label: str = ""):
        rate = self.truncation_rate
        if rate > threshold:
            raise TruncationRateExceeded(
                f"{label} kesilme oranı {rate:.4f} > {threshold} (pencere={self.window})")
        if rate > 0:
            print(f"⚠️ {label} kesilme oranı {rate:.4f}")


def collect_palm(d: int, window: Window, seeds: Sequence[SeedSpec], threads: int = 1,
                 max_attempts: int = DEFAULT_MAX_ATTEMPTS, env: Optional[CookieEnvironment] = None,
                 reseed: bool = True, label: str = "palm") -> PalmBatch:
    w = normalize_window(window)
    tasks = [(d, w, max_attempts, env, reseed, s.master_seed, s.stream_id) for s in seeds]
    records = run_replicates(_palm_batch_worker, tasks, threads, label)
    return PalmBatch(d, w, list(records))
