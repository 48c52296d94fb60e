"""
Dikey yürüyüşün kesim zamanları, Palm ölçüsü altında örnekleme ve ε-tembel yürüyüş araçları.

Kesim zamanı: Z_{(-∞,n)} ∩ Z_{[n,∞)} = ∅. Sonlu pencerede test [-W_past, W_future] üzerinde yapılır;
pencere yalnızca yanlış pozitif ekleyebilir.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp, roots_legendre

from lattice import ResourceLimitError, SeedSpec, StreamLike, as_stream, row_labels, step_vectors
from replicates import run_replicates
from stats import Estimate, combine_independent, delta_method, mean_estimate

Window = Union[int, Tuple[int, int]]

DEFAULT_WINDOW = 10 ** 4
DEFAULT_MAX_ATTEMPTS = 10 ** 6
QUICK_STAGES = (32, 256)


class RejectionBudgetExhausted(RuntimeError):
    """Palm reddetme örneklemesi deneme sınırını aştı (pencere/boyut uyumsuzluğu)"""


class TooFewSegments(RuntimeError):
    """Uzun yolda yeterli kesim segmenti bulunamadı"""


@dataclass(frozen=True)
class LazyWalkSpec:
    eps: float
    dim: int

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"ε (0,1] aralığında olmalı: {self.eps}")
        if self.dim < 1:
            raise ValueError(f"Geçersiz boyut: {self.dim}")

    @classmethod
    def vertical_of(cls, d: int) -> "LazyWalkSpec":
        """Z^d yürüyüşünün dikey bileşeni: bekleme olasılığı 1/d"""
        return cls((d - 1) / d, d - 1)

    @classmethod
    def jump_chain_of(cls, d: int) -> "LazyWalkSpec":
        return cls(1.0, d - 1)


def normalize_window(window: Window) -> Tuple[int, int]:
    if isinstance(window, (tuple, list)):
        w_past, w_future = int(window[0]), int(window[1])
    else:
        w_past = w_future = int(window)
    if w_past < 0 or w_future < 0 or w_past + w_future == 0:
        raise ValueError(f"Geçersiz pencere: {window}")
    return w_past, w_future


def lazy_walk_path(spec: LazyWalkSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Z^ε_0..Z^ε_n: 1-ε olasılıkla bekler, aksi halde 2·dim yönden birine atlar"""
    moves = rng.random(n) < spec.eps
    jumps = rng.integers(0, 2 * spec.dim, size=n)
    increments = step_vectors(spec.dim)[jumps] * moves[:, None]
    path = np.zeros((n + 1, spec.dim), dtype=np.int64)
    path[1:] = np.cumsum(increments, axis=0)
    return path


@dataclass
class TwoSidedVerticalPath:
    points: np.ndarray
    w_past: int
    w_future: int

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def at(self, n: int) -> np.ndarray:
        return self.points[n + self.w_past]

    def future(self) -> np.ndarray:
        return self.points[self.w_past:]

    def restrict(self, w_past: int, w_future: int) -> "TwoSidedVerticalPath":
        """Aynı rastgele sayılarla iç pencere"""
        if w_past > self.w_past or w_future > self.w_future:
            raise ValueError("İç pencere dış pencereden büyük olamaz")
        start = self.w_past - w_past
        return TwoSidedVerticalPath(self.points[start: self.w_past + w_future + 1], w_past, w_future)


def sample_two_sided(spec: LazyWalkSpec, window: Window, seed: StreamLike) -> TwoSidedVerticalPath:
    """0'da birleştirilmiş iki bağımsız tek yönlü tembel yürüyüş"""
    rng = as_stream(seed)
    w_past, w_future = normalize_window(window)
    future = lazy_walk_path(spec, w_future, rng)
    backward = lazy_walk_path(spec, w_past, rng)
    points = np.vstack([backward[::-1], future[1:]])
    return TwoSidedVerticalPath(points, w_past, w_future)


def window_cut_mask(points: np.ndarray) -> np.ndarray:
    """Son-ziyaret tablosuyla O(L log L): t kesim ⟺ max_{i<t} son(Z_i) < t"""
    labels = row_labels(points)
    length = len(labels)
    last = np.full(labels.max() + 1, -1, dtype=np.int64)
    np.maximum.at(last, labels, np.arange(length))
    reach = last[labels]
    mask = np.ones(length, dtype=bool)
    if length > 1:
        mask[1:] = np.maximum.accumulate(reach)[:-1] < np.arange(1, length)
    return mask


def brute_force_cut_mask(points: np.ndarray) -> np.ndarray:
    """O(L²) ikili ayrıklık testi"""
    rows = [tuple(r) for r in np.asarray(points).tolist()]
    return np.array([set(rows[:t]).isdisjoint(rows[t:]) for t in range(len(rows))], dtype=bool)


def _past_meets_future(points: np.ndarray, split: int) -> bool:
    labels = row_labels(points)
    return np.intersect1d(labels[:split], labels[split:]).size > 0


def zero_is_window_cut(path: TwoSidedVerticalPath) -> bool:
    # küçük pencerede kesişme büyük pencerede de kesişmedir
    for stage in QUICK_STAGES:
        if stage < min(path.w_past, path.w_future):
            inner = path.restrict(stage, stage)
            if _past_meets_future(inner.points, stage):
                return False
    return not _past_meets_future(path.points, path.w_past)


@dataclass
class CutRecord:
    window_cut_times: np.ndarray
    zero_is_cut: bool
    T: Optional[int]
    window: Tuple[int, int]
    truncation_flag: bool

    @property
    def positive_cuts(self) -> np.ndarray:
        return self.window_cut_times[self.window_cut_times > 0]


def detect_window_cuts(path: TwoSidedVerticalPath) -> CutRecord:
    mask = window_cut_mask(path.points)
    times = np.flatnonzero(mask) - path.w_past
    positive = times[times > 0]
    T = int(positive[0]) if positive.size else None
    return CutRecord(times, bool(mask[path.w_past]), T, (path.w_past, path.w_future), T is None)


@dataclass
class PalmSample:
    path: TwoSidedVerticalPath
    record: CutRecord
    attempts: int


def sample_palm(d: int, window: Window = DEFAULT_WINDOW, seed: StreamLike = SeedSpec(0),
                max_attempts: int = DEFAULT_MAX_ATTEMPTS, spec: Optional[LazyWalkSpec] = None) -> PalmSample:
    """0 pencere kesim zamanı olana kadar iki yönlü yol üretir (P̂ = P(·|0∈D))"""
    rng = as_stream(seed)
    spec = spec or LazyWalkSpec.vertical_of(d)
    for attempt in range(1, max_attempts + 1):
        path = sample_two_sided(spec, window, rng)
        if zero_is_window_cut(path):
            return PalmSample(path, detect_window_cuts(path), attempt)
    raise RejectionBudgetExhausted(
        f"{max_attempts} denemede 0 ∈ D olayı gözlenmedi (d={d}, pencere={window})"
    )


def _unconditioned_worker(task) -> Tuple[bool, int]:
    eps, dim, window, master, stream_id = task
    path = sample_two_sided(LazyWalkSpec(eps, dim), window, SeedSpec(master, stream_id))
    record = detect_window_cuts(path)
    return record.zero_is_cut, (-1 if record.T is None else record.T)


def _zero_cut_worker(task) -> bool:
    eps, dim, window, master, stream_id = task
    return zero_is_window_cut(sample_two_sided(LazyWalkSpec(eps, dim), window, SeedSpec(master, stream_id)))


def _palm_worker(task) -> Tuple[int, int]:
    d, eps, dim, window, max_attempts, master, stream_id = task
    sample = sample_palm(d, window, SeedSpec(master, stream_id), max_attempts, LazyWalkSpec(eps, dim))
    return (-1 if sample.record.T is None else sample.record.T), sample.attempts


def _tasks(spec: LazyWalkSpec, window: Window, replicates: int, seed: SeedSpec, block: int) -> list:
    return [(spec.eps, spec.dim, normalize_window(window), seed.master_seed, seed.child(block, i).stream_id)
            for i in range(replicates)]


def cut_probability(d: int, window: Window, replicates: int, seed: SeedSpec,
                    jump_chain: bool = False, threads: int = 1, block: int = 0) -> Estimate:
    """Koşulsuz çekilişlerde 0 ∈ D (veya jump_chain ile 0 ∈ D̃) oranı"""
    spec = LazyWalkSpec.jump_chain_of(d) if jump_chain else LazyWalkSpec.vertical_of(d)
    hits = run_replicates(_zero_cut_worker, _tasks(spec, window, replicates, seed, block), threads, "kesim")
    return mean_estimate(np.asarray(hits, dtype=np.float64))


def acceptance_by_window(d: int, windows: Sequence[int], replicates: int, seed: SeedSpec) -> List[float]:
    """İç içe pencerelerde ortak rastgele sayılarla 0 ∈ D oranı; pencere büyüdükçe oran artmaz"""
    spec = LazyWalkSpec.vertical_of(d)
    largest = max(windows)
    hits = np.zeros((replicates, len(windows)), dtype=bool)
    for i in range(replicates):
        path = sample_two_sided(spec, largest, seed.child(0, i))
        for j, w in enumerate(windows):
            inner = path.restrict(w, w)
            hits[i, j] = not _past_meets_future(inner.points, w)
    return [float(v) for v in hits.mean(axis=0)]


@dataclass
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    difference: Estimate

    def holds(self, k: float = 3.0) -> bool:
        return self.difference.within(0.0, k)


@dataclass
class CutMoments:
    d: int
    window: Tuple[int, int]
    replicates: int
    p_cut: Estimate
    acceptance_rate: Estimate
    palm_T: Estimate
    palm_T2: Estimate
    palm_T3: Estimate
    T_unconditioned: Estimate
    T2_unconditioned: Estimate
    T_on_cut: Estimate
    truncation_rate: float
    moment_cap: int
    identities: List[IdentityCheck] = field(default_factory=list)

    def identity(self, name: str) -> IdentityCheck:
        for check in self.identities:
            if check.name == name:
                return check
        raise KeyError(name)


def censor_at_window(T: np.ndarray, w_future: int) -> np.ndarray:
    """Pencerede kesim bulunamayan (T < 0) çekilişler T = W_future sayılır"""
    return np.where(np.asarray(T) < 0, w_future, T).astype(np.float64)


def _capped_relation(name: str, T_all: np.ndarray, zero_cut: np.ndarray, T_palm: np.ndarray, cap: int,
                     step: Callable[[np.ndarray], np.ndarray],
                     partial_sum: Callable[[np.ndarray], np.ndarray]) -> IdentityCheck:
    """E[f(T)·1{T≤L}] = P(0∈D)·Ê[Σ_{u≤min(T,L)} f(u)]; iki taraf da L ile sınırlı"""
    inside = (T_all > 0) & (T_all <= cap)
    lhs_col = np.where(inside, step(np.where(inside, T_all, 0).astype(np.float64)), 0.0)
    M = np.where(T_palm < 0, cap, np.minimum(T_palm, cap)).astype(np.float64)
    palm_side = mean_estimate(partial_sum(M))
    uncond = delta_method(np.column_stack([lhs_col, zero_cut]), lambda a, p: a - p * palm_side.value)
    p_value = float(np.mean(zero_cut))
    return IdentityCheck(name, float(np.mean(lhs_col)), p_value * palm_side.value,
                         combine_independent(uncond.value, [(1.0, uncond.stderr), (p_value, palm_side.stderr)]))


def palm_T_moments(d: int, window: Window = DEFAULT_WINDOW, replicates: int = 10 ** 4,
                   seed: SeedSpec = SeedSpec(0), threads: int = 1,
                   max_attempts: int = DEFAULT_MAX_ATTEMPTS, palm_replicates: Optional[int] = None,
                   moment_cap: Optional[int] = None) -> CutMoments:
    """Palm momentleri (reddetme örneklemesi) ve koşulsuz çekilişlerle kimlik denetimleri.

    Palm ve koşulsuz kümeler bağımsız akış bloklarından gelir (0 ve 1). Pencerede kesim
    bulunamayan çekilişler T = W_future olarak sayılır (alt sınır). Moment ilişkileri
    L = moment_cap (varsayılan W_future) seviyesinde kesilmiş biçimde denetlenir:
    P̂(T>k) ağır kuyruklu olduğundan kesilmemiş biçimlerin varyansı d küçükken sonsuzdur.
    """
    spec = LazyWalkSpec.vertical_of(d)
    w = normalize_window(window)
    palm_replicates = replicates if palm_replicates is None else palm_replicates
    cap = w[1] if moment_cap is None else int(moment_cap)
    if not 1 <= cap <= w[1]:
        raise ValueError(f"moment_cap 1..{w[1]} aralığında olmalı: {moment_cap}")
    print(f"⏳ Kesim momentleri: d={d}, pencere={w}, {palm_replicates} Palm + {replicates} koşulsuz çekiliş")

    palm_tasks = [(d, spec.eps, spec.dim, w, max_attempts, seed.master_seed, seed.child(0, i).stream_id)
                  for i in range(palm_replicates)]
    palm = run_replicates(_palm_worker, palm_tasks, threads, "palm")
    T_palm = np.array([t for t, _ in palm], dtype=np.int64)
    attempts = np.array([a for _, a in palm], dtype=np.float64)

    draws = run_replicates(_unconditioned_worker, _tasks(spec, w, replicates, seed, 1), threads, "koşulsuz")
    zero_cut = np.array([z for z, _ in draws], dtype=np.float64)
    T_all = np.array([t for _, t in draws], dtype=np.int64)
    truncated = int(np.sum(T_palm < 0) + np.sum(T_all < 0))
    truncation_rate = truncated / float(palm_replicates + replicates)
    if truncation_rate > 0.01:
        print(f"⚠️ Kesilme oranı yüksek: {truncation_rate:.4f} (pencere büyütülmeli)")

    p_cut = mean_estimate(zero_cut)
    # geometrik deneme sayısı: P̂ = N / Σ deneme
    acceptance = delta_method(np.column_stack([np.ones_like(attempts), attempts]), lambda a, b: a / b)

    T_u = censor_at_window(T_all, w[1])
    palm_T = censor_at_window(T_palm, w[1])
    ET = mean_estimate(T_u)
    ET2 = mean_estimate(T_u ** 2)
    T_on_cut = mean_estimate(T_u * zero_cut)

    hT = mean_estimate(palm_T)
    hT2 = mean_estimate(palm_T ** 2)
    hT3 = mean_estimate(palm_T ** 3)

    identities = []
    identities.append(IdentityCheck(
        "cut_time_on_cut", T_on_cut.value, 1.0,
        Estimate(T_on_cut.value - 1.0, T_on_cut.stderr)))
    prod = hT.value * p_cut.value
    identities.append(IdentityCheck(
        "palm_mean_times_cut_probability", prod, 1.0,
        combine_independent(prod - 1.0, [(p_cut.value, hT.stderr), (hT.value, p_cut.stderr)])))
    # Ê(T)·E(T) = Ê((T²+T)/2)
    identities.append(_capped_relation(
        "palm_second_moment_relation", T_all, zero_cut, T_palm, cap,
        lambda t: t, lambda m: m * (m + 1) / 2.0))
    # Ê(T)·E(T²) = Ê(T(T+1)(2T+1)/6)
    identities.append(_capped_relation(
        "palm_third_moment_relation", T_all, zero_cut, T_palm, cap,
        lambda t: t ** 2, lambda m: m * (m + 1) * (2 * m + 1) / 6.0))
    # Ê(T²)·P(0∈D) = 2E(T) - 1
    identities.append(_capped_relation(
        "palm_square_from_unconditioned", T_all, zero_cut, T_palm, cap,
        lambda t: 2.0 * t - 1.0, lambda m: m ** 2))

    return CutMoments(d, w, replicates, p_cut, acceptance, hT, hT2, hT3, ET, ET2, T_on_cut,
                      truncation_rate, cap, identities)


def palm_T_samples(d: int, window: Window, replicates: int, seed: SeedSpec, threads: int = 1,
                   max_attempts: int = DEFAULT_MAX_ATTEMPTS, block: int = 6) -> np.ndarray:
    """Palm altında T örnekleri; kesilmiş örnekler atılır"""
    spec = LazyWalkSpec.vertical_of(d)
    w = normalize_window(window)
    tasks = [(d, spec.eps, spec.dim, w, max_attempts, seed.master_seed, seed.child(block, i).stream_id)
             for i in range(replicates)]
    palm = run_replicates(_palm_worker, tasks, threads, "palm")
    return np.array([t for t, _ in palm if t >= 0], dtype=np.int64)


@dataclass
class WindowDoubling:
    at_window: Estimate
    at_double: Estimate
    shift_sigma: float


def window_doubling(d: int, window: int, replicates: int, seed: SeedSpec, threads: int = 1) -> WindowDoubling:
    """Ê(T) tahmini W ve 2W pencerelerinde, aynı yollar üzerinde"""
    spec = LazyWalkSpec.vertical_of(d)
    tasks = [(spec.eps, spec.dim, window, seed.master_seed, seed.child(2, i).stream_id) for i in range(replicates)]
    rows = run_replicates(_doubling_worker, tasks, threads, "pencere")
    cols = np.asarray(rows, dtype=np.float64)
    small = delta_method(cols[:, [1, 0]], lambda a, b: a / b)
    large = delta_method(cols[:, [3, 2]], lambda a, b: a / b)
    shift = abs(large.value - small.value) / small.stderr if small.stderr > 0 else 0.0
    if shift > 1.0:
        print(f"⚠️ Pencere ikiye katlanınca Ê(T) {shift:.2f}σ kaydı")
    return WindowDoubling(small, large, shift)


def _doubling_worker(task) -> Tuple[float, float, float, float]:
    eps, dim, window, master, stream_id = task
    path = sample_two_sided(LazyWalkSpec(eps, dim), 2 * window, SeedSpec(master, stream_id))
    out = []
    for candidate in (path.restrict(window, window), path):
        record = detect_window_cuts(candidate)
        ok = record.zero_is_cut and record.T is not None
        out.extend([1.0 if ok else 0.0, float(record.T) if ok else 0.0])
    return tuple(out)


@dataclass
class CutSegment:
    start: int
    length: int
    points: np.ndarray


@dataclass
class SegmentEstimate:
    value: float
    stderr: float
    segments: int


def segment_palm_estimator(f: Callable[[CutSegment], float], N: int, d: int, seed: SeedSpec,
                           lookahead: Optional[int] = None, burn_in: Optional[int] = None,
                           min_segments: int = 10, chains: int = 1) -> SegmentEstimate:
    """Uzun tek yönlü yolda ardışık kesimler arasındaki segmentlerin f ortalaması (Ê[f])"""
    if d < 2:
        raise ValueError(f"Geçersiz boyut: {d}")
    spec = LazyWalkSpec.vertical_of(d)
    lookahead = max(1000, N // 10) if lookahead is None else lookahead
    burn_in = max(1000, N // 10) if burn_in is None else burn_in
    values: List[float] = []
    for chain in range(chains):
        rng = as_stream(seed.child(3, chain))
        path = lazy_walk_path(spec, burn_in + N + lookahead, rng)
        mask = window_cut_mask(path)
        cuts = np.flatnonzero(mask)
        cuts = cuts[(cuts >= burn_in) & (cuts <= burn_in + N)]
        for start, end in zip(cuts[:-1], cuts[1:]):
            values.append(float(f(CutSegment(int(start), int(end - start), path[start:end]))))
    if len(values) < max(2, min_segments):
        raise TooFewSegments(f"Yalnızca {len(values)} segment bulundu (gerekli: {min_segments})")
    estimate = mean_estimate(values)
    return SegmentEstimate(estimate.value, estimate.stderr, len(values))


@dataclass
class LazyMoments:
    spec: LazyWalkSpec
    T: Estimate
    T2: Estimate
    samples: np.ndarray
    truncation_rate: float


def lazy_walk_T(spec: LazyWalkSpec, window: Window, replicates: int, seed: SeedSpec,
                threads: int = 1, block: int = 4) -> LazyMoments:
    """Z^ε için ilk pozitif pencere kesim zamanı T^ε (koşulsuz) ve ilk iki momenti"""
    draws = run_replicates(_unconditioned_worker, _tasks(spec, window, replicates, seed, block), threads, "tembel")
    T = np.array([t for _, t in draws], dtype=np.float64)
    found = T[T >= 0]
    truncation_rate = 1.0 - found.size / float(replicates)
    return LazyMoments(spec, mean_estimate(found), mean_estimate(found ** 2), found.astype(np.int64),
                       truncation_rate)


def lazy_identities(lazy: LazyMoments, jump: LazyMoments) -> List[IdentityCheck]:
    """E(T^ε) = E(T̃)/ε ve E[(T^ε)²] = (E(T̃²) + (1-ε)E(T̃))/ε²; iki bağımsız küme"""
    eps = lazy.spec.eps
    first_rhs = jump.T.value / eps
    second_rhs = (jump.T2.value + (1 - eps) * jump.T.value) / eps ** 2
    return [
        IdentityCheck("lazy_first_moment", lazy.T.value, first_rhs,
                      combine_independent(lazy.T.value - first_rhs,
                                          [(1.0, lazy.T.stderr), (1 / eps, jump.T.stderr)])),
        IdentityCheck("lazy_second_moment", lazy.T2.value, second_rhs,
                      combine_independent(lazy.T2.value - second_rhs,
                                          [(1.0, lazy.T2.stderr), (1 / eps ** 2, jump.T2.stderr),
                                           ((1 - eps) / eps ** 2, jump.T.stderr)])),
    ]


def _convolution_cells(dim: int, n: int) -> int:
    return sum((2 * s + 1) ** dim for s in range(n + 1))


def _return_probability_convolution(dim: int, eps: float, n: int) -> float:
    hold = 1.0 - eps
    move = eps / (2 * dim)
    p = np.ones((1,) * dim)
    for _ in range(n):
        q = np.zeros(tuple(size + 2 for size in p.shape))
        inner = tuple(slice(1, -1) for _ in range(dim))
        q[inner] += hold * p
        for axis in range(dim):
            for offset in (0, 2):
                target = list(inner)
                target[axis] = slice(offset, offset + p.shape[axis])
                q[tuple(target)] += move * p
        p = q
    return float(p[(n,) * dim])


def _quadrature_nodes(n: int, nodes: int) -> int:
    # cos^n(πx) frekansı nπ'ye kadar çıkar; Gauss–Legendre hatası ~ Ai(12) düzeyinde kalsın
    omega = math.pi * n
    return max(nodes, math.ceil((omega + 12.0 * omega ** (1.0 / 3.0)) / 2.0) + 8)


def _axis_moments(n: int, nodes: int) -> np.ndarray:
    """∫ cos^j(πx) dx / 2 üzerinden [-1,1], j = 0..n; tek j simetriden tam 0"""
    x, w = roots_legendre(_quadrature_nodes(n, nodes))
    c = np.cos(np.pi * x)
    half = w / 2.0
    out = np.zeros(n + 1)
    power = np.ones_like(c)
    for j in range(n + 1):
        if j % 2 == 0:
            out[j] = np.sum(half * power)
        power *= c
    return out


def _log_binomials(k: int) -> np.ndarray:
    j = np.arange(k + 1)
    return gammaln(k + 1) - gammaln(j + 1) - gammaln(k - j + 1)


def _return_probability_quadrature(dim: int, eps: float, n: int, nodes: int) -> float:
    # tensör Gauss–Legendre kuralı eksen başına 1-boyutlu momentlere ayrışır;
    # ortalama-kosinüs momentleri log ölçeğinde birleştirilir (tüm terimler ≥ 0)
    with np.errstate(divide="ignore"):
        log_axis = np.log(_axis_moments(n, nodes)) - np.arange(n + 1) * math.log(dim)
        log_mean = np.full(n + 1, -np.inf)
        log_mean[0] = 0.0
        for _ in range(dim):
            log_mean = np.array([logsumexp(_log_binomials(k) + log_mean[k::-1] + log_axis[:k + 1])
                                 for k in range(n + 1)])
        k = np.arange(n + 1)
        if eps < 1.0:
            log_hold = (n - k) * math.log1p(-eps)
        else:
            log_hold = np.where(k == n, 0.0, -np.inf)
        total = logsumexp(_log_binomials(n) + log_hold + k * math.log(eps) + log_mean)
    return float(np.exp(total))


def return_probability(dim: int, eps: float, n: int, method: str = "auto",
                       max_cells: int = 2 * 10 ** 8, max_n: int = 1000, nodes: int = 64) -> float:
    """P(Z^ε_n = 0), Z^ε ⊂ Z^dim. n tek ve ε < 1 için sıfır değildir.

    nodes eksen başına alt sınırdır; kareleme düğüm sayısı n ile büyür.
    """
    LazyWalkSpec(eps, dim)
    if n < 0:
        raise ValueError(f"n negatif olamaz: {n}")
    if n > max_n:
        raise ResourceLimitError(f"n={n} yapılandırılmış sınırı ({max_n}) aşıyor")
    if n == 0:
        return 1.0
    cells = _convolution_cells(dim, n)
    if method == "auto":
        method = "convolution" if dim <= 4 and n <= 30 and cells <= max_cells else "quadrature"
    if method == "convolution":
        if cells > max_cells:
            raise ResourceLimitError(f"Konvolüsyon kutusu çok büyük: {cells} hücre (sınır {max_cells})")
        return _return_probability_convolution(dim, eps, n)
    if method == "quadrature":
        return _return_probability_quadrature(dim, eps, n, nodes)
    raise ValueError(f"Bilinmeyen yöntem: {method}")
