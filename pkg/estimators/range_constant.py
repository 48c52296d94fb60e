"""
Aralık sabiti R(0) = lim R_n/n: simetrik yürüyüşün ziyaret ettiği farklı site sayısı.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from cut_times import DEFAULT_MAX_ATTEMPTS, Window
from lattice import SeedSpec, as_stream, row_labels, step_vectors
from replicates import run_replicates
from stats import Estimate, RatioEstimate, mean_estimate
from walker import visit_indices

from .palm_batch import collect_palm, replicate_seeds

RANGE_BLOCK = 14
RANGE_PALM_BLOCK = 15
VISITS_BLOCK = 17


def srw_path(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Z^d üzerinde basit simetrik yürüyüş, Y_0..Y_n (d = 1 dahil)"""
    jumps = rng.integers(0, 2 * d, size=n)
    path = np.zeros((n + 1, d), dtype=np.int64)
    path[1:] = np.cumsum(step_vectors(d)[jumps], axis=0)
    return path


def distinct_sites(points: np.ndarray) -> int:
    points = np.asarray(points)
    if len(points) == 0:
        return 0
    if points.ndim == 1 or points.shape[1] == 1:
        flat = points.reshape(-1)
        return int(flat.max() - flat.min() + 1)
    return int(row_labels(points).max() + 1)


def _range_worker(task) -> float:
    d, n, master, stream_id = task
    path = srw_path(d, n, as_stream(SeedSpec(master, stream_id)))
    # R_n: Y_0..Y_{n-1} arasındaki farklı siteler
    return float(distinct_sites(path[:n]))


def _visits_worker(task) -> Tuple[float, float]:
    d, n, master, stream_id = task
    path = srw_path(d, n, as_stream(SeedSpec(master, stream_id)))
    fresh = visit_indices(path[:n]) == 1
    horizontal = np.all(path[1:, 1:] == path[:-1, 1:], axis=1)
    N = d * np.count_nonzero(fresh & horizontal)
    return float(distinct_sites(path[:n])), float(N)


@dataclass
class RangeEstimate:
    d: int
    n: int
    replicates: int
    lln: Estimate
    palm: Optional[RatioEstimate] = None

    @property
    def value(self) -> float:
        return self.lln.value


def range_constant(d: int, n: int = 10 ** 6, replicates: int = 20, seed: SeedSpec = SeedSpec(0),
                   threads: int = 1, window: Window = 10 ** 4, palm_replicates: Optional[int] = None,
                   max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> RangeEstimate:
    """R_n/n ortalaması; d ≥ 6 için ayrıca Palm formu E_0(R_T·1_{0∈D}) = ΣR_T/ΣT"""
    if d < 1 or n < 1 or replicates < 2:
        raise ValueError(f"Geçersiz parametreler: d={d}, n={n}, replikalar={replicates}")
    tasks = [(d, n, s.master_seed, s.stream_id) for s in replicate_seeds(seed, RANGE_BLOCK, replicates)]
    values = run_replicates(_range_worker, tasks, threads, "aralık")
    lln = mean_estimate([r / n for r in values])

    if palm_replicates is None:
        palm_replicates = replicates if d >= 6 else 0
    palm = None
    if palm_replicates > 0:
        batch = collect_palm(d, window, replicate_seeds(seed, RANGE_PALM_BLOCK, palm_replicates), threads,
                             max_attempts, label="aralık-palm")
        R_T = [float(distinct_sites(r.traj.positions[: r.T])) for r in batch.accepted]
        palm = batch.ratio(R_T)
    return RangeEstimate(d, n, replicates, lln, palm)


@dataclass
class VisitIdentity:
    fresh_horizontal: Estimate
    range: Estimate


def visits_identity(d: int, n: int = 1000, replicates: int = 2000, seed: SeedSpec = SeedSpec(0),
                    threads: int = 1) -> VisitIdentity:
    """E_0(N_n) = E_0(R_n): N_n = d·Σ_{j<n} 1{Y_j yeni} 1{yatay adım}"""
    tasks = [(d, n, s.master_seed, s.stream_id) for s in replicate_seeds(seed, VISITS_BLOCK, replicates)]
    values = run_replicates(_visits_worker, tasks, threads, "ziyaret")
    return VisitIdentity(mean_estimate([v for _, v in values]), mean_estimate([r for r, _ in values]))
