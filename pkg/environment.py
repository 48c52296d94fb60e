"""
Kurabiye ortamları: deterministik, i.i.d. (tembel), dikey durağan ve eşlenmiş çift.

Site değerleri saklanmaz; (env_seed, koordinatlar, k) üzerinde saf bir hash'ten ters-CDF ile üretilir.
Aynı (ortam, site, k) her sorguda aynı değeri verir.
"""
import bisect
import math
import os
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from lattice import LatticePoint

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

Site = Tuple[int, ...]


class EnvironmentOrderError(ValueError):
    """Eşlenmiş çiftte β_1 ≤ β_2 sıralaması bozulduğunda"""


def _mix64(x: int) -> int:
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * _MUL1) & MASK64
    x = ((x ^ (x >> 27)) * _MUL2) & MASK64
    return x ^ (x >> 31)


def _mix64_array(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = x + np.uint64(_GOLDEN)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(_MUL1)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(_MUL2)
        return x ^ (x >> np.uint64(31))


def site_uniform(seed: int, coords: Iterable[int], k: Optional[int] = None) -> float:
    """(seed, coords, k) için [0,1) aralığında saf hash değeri"""
    h = _mix64(seed & MASK64)
    for c in coords:
        h = _mix64(h ^ (int(c) & MASK64))
    if k is not None:
        h = _mix64(h ^ (int(k) & MASK64))
    return (h >> 11) * 2.0 ** -53


def site_uniforms(seed: int, coords: np.ndarray, k: Optional[np.ndarray] = None) -> np.ndarray:
    """site_uniform'un vektörel hali; her satır için aynı sonucu üretir"""
    coords = np.ascontiguousarray(np.atleast_2d(coords), dtype=np.int64)
    h = np.full(coords.shape[0], _mix64(seed & MASK64), dtype=np.uint64)
    for j in range(coords.shape[1]):
        h = _mix64_array(h ^ np.ascontiguousarray(coords[:, j]).view(np.uint64))
    if k is not None:
        kk = np.ascontiguousarray(np.asarray(k, dtype=np.int64)).view(np.uint64)
        h = _mix64_array(h ^ kk)
    return (h >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True)
class CookieLaw:
    """Kurabiye marjinal dağılımı μ: sonlu ayrık ya da [a,b] üzerinde düzgün"""
    kind: str
    values: Tuple[float, ...]
    weights: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.kind == "uniform":
            if len(self.values) != 2 or self.values[0] > self.values[1]:
                raise ValueError(f"uniform dağılım için a ≤ b gerekli: {self.values}")
        elif self.kind == "discrete":
            if not self.values:
                raise ValueError("Ayrık dağılım en az bir atom içermeli")
            if not self.weights:
                object.__setattr__(self, "weights", (1.0,) * len(self.values))
            if len(self.weights) != len(self.values) or min(self.weights) <= 0:
                raise ValueError(f"Geçersiz ağırlıklar: {self.weights}")
        else:
            raise ValueError(f"Bilinmeyen dağılım türü: {self.kind}")
        for v in self.values:
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"Kurabiye değeri [-1,1] dışında: {v}")

    @classmethod
    def parse(cls, text: str) -> "CookieLaw":
        """'uniform:a,b' veya 'discrete:v1@w1,v2@w2' (ağırlıklar isteğe bağlı)"""
        try:
            kind, body = text.strip().split(":", 1)
            parts = [p.strip() for p in body.split(",") if p.strip()]
            if kind.strip() == "uniform":
                return cls("uniform", tuple(float(p) for p in parts))
            values, weights = [], []
            for part in parts:
                value, _, weight = part.partition("@")
                values.append(float(value))
                weights.append(float(weight) if weight else 1.0)
            return cls(kind.strip(), tuple(values), tuple(weights))
        except ValueError:
            raise
        except Exception as e:
            raise ValueError(f"Dağılım çözümlenemedi '{text}': {str(e)}")

    def to_text(self) -> str:
        if self.kind == "uniform":
            return f"uniform:{self.values[0]!r},{self.values[1]!r}"
        if len(set(self.weights)) == 1:
            return "discrete:" + ",".join(repr(v) for v in self.values)
        return "discrete:" + ",".join(f"{v!r}@{w!r}" for v, w in zip(self.values, self.weights))

    @property
    def probabilities(self) -> Tuple[float, ...]:
        total = math.fsum(self.weights)
        return tuple(w / total for w in self.weights)

    def _cumulative(self) -> np.ndarray:
        cum = np.cumsum(self.probabilities)
        cum[-1] = 1.0
        return cum

    def quantile(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if self.kind == "uniform":
            a, b = self.values
            return a + (b - a) * u
        idx = np.searchsorted(self._cumulative(), u, side="right")
        return np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]

    def quantile_scalar(self, u: float) -> float:
        if self.kind == "uniform":
            a, b = self.values
            return a + (b - a) * u
        idx = bisect.bisect_right(list(self._cumulative()), u)
        return self.values[min(idx, len(self.values) - 1)]

    def mean(self) -> float:
        if self.kind == "uniform":
            return 0.5 * (self.values[0] + self.values[1])
        return math.fsum(v * p for v, p in zip(self.values, self.probabilities))

    def bound(self) -> float:
        return max(abs(v) for v in self.values)

    def atoms(self) -> Tuple[Tuple[float, float], ...]:
        if self.kind != "discrete":
            raise ValueError("Atomlar yalnızca ayrık dağılım için tanımlı")
        return tuple(zip(self.values, self.probabilities))


@dataclass(frozen=True)
class CookieStack:
    betas: Tuple[float, ...]
    m: float

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if math.isinf(self.m) and len(self.betas) != 1:
            raise ValueError("m=∞ yalnızca tek (özdeş) değerle tanımlı")
        if not math.isinf(self.m) and len(self.betas) != int(self.m):
            raise ValueError(f"Yığın uzunluğu m={self.m} ile uyuşmuyor")
        for b in self.betas:
            if not -1.0 <= b <= 1.0:
                raise ValueError(f"Kurabiye değeri [-1,1] dışında: {b}")

    def at(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"Ziyaret indeksi k ≥ 1 olmalı: {k}")
        if k > self.m:
            return 0.0
        return self.betas[0] if math.isinf(self.m) else self.betas[k - 1]


def _validate_m(m: Union[int, float]) -> float:
    if isinstance(m, float) and math.isinf(m) and m > 0:
        return math.inf
    if int(m) != m or m < 1:
        raise ValueError(f"m pozitif tamsayı veya ∞ olmalı: {m}")
    return int(m)


class CookieEnvironment:
    """Ortak arayüz: beta(y, k) = β_k(y), k > m için 0"""

    m: float = 1
    sigma: Optional[float] = None
    identical: bool = True

    def __init__(self):
        self._debug = os.getenv("ERWLAB_DEBUG", "").lower() in ("1", "true", "yes")

    def _check_sigma(self, bound: float):
        if self.sigma is not None:
            if not 0 <= self.sigma < 1:
                raise ValueError(f"σ [0,1) aralığında olmalı: {self.sigma}")
            if bound > self.sigma + 1e-15:
                raise ValueError(f"Kurabiye sınırı σ={self.sigma} aşılıyor ({bound})")

    def _assert_bound(self, values):
        if self._debug and self.sigma is not None:
            assert np.all(np.abs(values) <= self.sigma + 1e-15), "σ sınırı aşıldı"

    def beta(self, y: LatticePoint, k: int) -> float:
        return self.beta_site(y.coords, k)

    def beta_site(self, coords: Site, k: int) -> float:
        if k < 1:
            raise ValueError(f"Ziyaret indeksi k ≥ 1 olmalı: {k}")
        if k > self.m:
            return 0.0
        value = self._value_scalar(tuple(coords), int(k))
        self._assert_bound(value)
        return value

    def beta_at(self, sites: np.ndarray, k: np.ndarray) -> np.ndarray:
        sites = np.atleast_2d(np.asarray(sites, dtype=np.int64))
        k = np.asarray(k, dtype=np.int64).reshape(-1)
        if k.size and k.min() < 1:
            raise ValueError("Ziyaret indeksi k ≥ 1 olmalı")
        values = np.zeros(k.shape[0], dtype=np.float64)
        active = k <= self.m
        if np.any(active):
            values[active] = self._value_array(sites[active], k[active])
        self._assert_bound(values)
        return values

    def stack(self, y: LatticePoint) -> CookieStack:
        if math.isinf(self.m):
            return CookieStack((self.beta(y, 1),), self.m)
        return CookieStack(tuple(self.beta(y, k) for k in range(1, int(self.m) + 1)), self.m)

    def reseeded(self, env_seed: int) -> "CookieEnvironment":
        return self

    def describe(self) -> str:
        raise NotImplementedError

    def _value_scalar(self, coords: Site, k: int) -> float:
        raise NotImplementedError

    def _value_array(self, sites: np.ndarray, k: np.ndarray) -> np.ndarray:
        return np.array([self._value_scalar(tuple(s), int(kk)) for s, kk in zip(sites, k)], dtype=np.float64)


class Deterministic(CookieEnvironment):
    """Her sitede aynı yığın; tek değer verilirse özdeş kurabiyeler"""

    def __init__(self, betas: Union[float, Sequence[float]], m: Optional[Union[int, float]] = None,
                 sigma: Optional[float] = None):
        super().__init__()
        betas = (float(betas),) if np.isscalar(betas) else tuple(float(b) for b in betas)
        self.m = _validate_m(len(betas) if m is None else m)
        if len(betas) == 1:
            self.betas = betas
        elif math.isinf(self.m) or len(betas) != self.m:
            raise ValueError(f"{len(betas)} değer m={self.m} ile uyuşmuyor")
        else:
            self.betas = betas
        for b in self.betas:
            if not -1.0 <= b <= 1.0:
                raise ValueError(f"Kurabiye değeri [-1,1] dışında: {b}")
        self.identical = len(set(self.betas)) == 1
        self.sigma = sigma
        self._check_sigma(max(abs(b) for b in self.betas))

    def _value_scalar(self, coords: Site, k: int) -> float:
        return self.betas[0] if len(self.betas) == 1 else self.betas[k - 1]

    def _value_array(self, sites: np.ndarray, k: np.ndarray) -> np.ndarray:
        if len(self.betas) == 1:
            return np.full(k.shape[0], self.betas[0])
        return np.asarray(self.betas)[k - 1]

    def describe(self) -> str:
        return f"deterministic(beta={','.join(repr(b) for b in self.betas)})"


class _HashedEnvironment(CookieEnvironment):
    kind = "hashed"

    def __init__(self, law: CookieLaw, m: Union[int, float], env_seed: int = 0,
                 identical: bool = True, sigma: Optional[float] = None):
        super().__init__()
        self.law = law
        self.m = _validate_m(m)
        self.env_seed = int(env_seed)
        self.identical = bool(identical)
        self.sigma = sigma
        if math.isinf(self.m) and not self.identical:
            raise ValueError("m=∞ yalnızca özdeş kurabiyelerle kullanılabilir")
        self._check_sigma(law.bound())

    def _key(self, coords: Site) -> Site:
        return coords

    def _key_array(self, sites: np.ndarray) -> np.ndarray:
        return sites

    def _value_scalar(self, coords: Site, k: int) -> float:
        u = site_uniform(self.env_seed, self._key(coords), None if self.identical else k)
        return self.law.quantile_scalar(u)

    def _value_array(self, sites: np.ndarray, k: np.ndarray) -> np.ndarray:
        u = site_uniforms(self.env_seed, self._key_array(sites), None if self.identical else k)
        return self.law.quantile(u)

    def reseeded(self, env_seed: int) -> "CookieEnvironment":
        return type(self)(self.law, self.m, env_seed, self.identical, self.sigma)

    def describe(self) -> str:
        m = "inf" if math.isinf(self.m) else self.m
        return f"{self.kind}(law={self.law.to_text()},m={m},identical={self.identical},seed={self.env_seed})"


class IIDLazy(_HashedEnvironment):
    """Siteler arası bağımsız yığınlar, site anahtarlı hash ile talep üzerine"""
    kind = "iid"


class VerticalStationary(_HashedEnvironment):
    """Yığın yalnızca dikey koordinata bağlı: β(x,z) = β(z)"""
    kind = "vertical"

    def _key(self, coords: Site) -> Site:
        return coords[1:]

    def _key_array(self, sites: np.ndarray) -> np.ndarray:
        return sites[:, 1:]


class CoupledPair(CookieEnvironment):
    """β_t = (1-t)β_1 + tβ_2; β_1 ≤ β_2 her sorguda denetlenir"""

    def __init__(self, lower: CookieEnvironment, upper: CookieEnvironment, t: float = 0.0):
        super().__init__()
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t [0,1] aralığında olmalı: {t}")
        if lower.m != upper.m:
            raise ValueError(f"Alt ortamların m değerleri farklı: {lower.m} / {upper.m}")
        self.lower = lower
        self.upper = upper
        self.t = float(t)
        self.m = lower.m
        self.identical = lower.identical and upper.identical
        bounds = [s for s in (lower.sigma, upper.sigma) if s is not None]
        self.sigma = max(bounds) if bounds else None

    def _ordered(self, lo, hi):
        if np.any(np.asarray(lo) > np.asarray(hi)):
            raise EnvironmentOrderError("Eşlenmiş çiftte β_1 ≤ β_2 sağlanmıyor")

    def _value_scalar(self, coords: Site, k: int) -> float:
        lo = self.lower.beta_site(coords, k)
        hi = self.upper.beta_site(coords, k)
        self._ordered(lo, hi)
        return (1.0 - self.t) * lo + self.t * hi

    def _value_array(self, sites: np.ndarray, k: np.ndarray) -> np.ndarray:
        lo = self.lower.beta_at(sites, k)
        hi = self.upper.beta_at(sites, k)
        self._ordered(lo, hi)
        return (1.0 - self.t) * lo + self.t * hi

    def difference_at(self, sites: np.ndarray, k: np.ndarray) -> np.ndarray:
        """(β_2 - β_1)_k(y); k > m için 0"""
        lo = self.lower.beta_at(sites, k)
        hi = self.upper.beta_at(sites, k)
        self._ordered(lo, hi)
        return hi - lo

    def reseeded(self, env_seed: int) -> "CoupledPair":
        # iki alt ortam aynı tohumu paylaşır, sıralama korunur
        return CoupledPair(self.lower.reseeded(env_seed), self.upper.reseeded(env_seed), self.t)

    def describe(self) -> str:
        return f"coupled(lower={self.lower.describe()},upper={self.upper.describe()},t={self.t!r})"


def interpolate(pair: CoupledPair, t: float) -> CoupledPair:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t [0,1] aralığında olmalı: {t}")
    return CoupledPair(pair.lower, pair.upper, t)


def sample_window(env: CookieEnvironment, sites: Iterable[Site]) -> Dict[Site, CookieStack]:
    """Sonlu bir site kümesinde ortamı somutlaştırır"""
    return {tuple(s): env.stack(LatticePoint(tuple(s))) for s in sites}


Permutation = Union[Mapping[int, int], Callable[[int], int]]


def e1_permute(sample: Mapping[Site, Any], delta: Mapping[Site, Permutation]) -> Dict[Site, Any]:
    """Her yatay doğru üzerinde permütasyon: çıktı(x,z) = girdi(δ_z(x), z).

    delta'da bulunmayan doğrular ve eşlemesi verilmeyen x'ler için δ_z özdeşliktir.
    """
    lines: Dict[Site, list] = {}
    for site in sample:
        lines.setdefault(tuple(site[1:]), []).append(site[0])

    permuted: Dict[Site, Any] = {}
    for z, xs in lines.items():
        mapping = delta.get(z)
        if mapping is None:
            images = {x: x for x in xs}
        elif callable(mapping):
            images = {x: int(mapping(x)) for x in xs}
        else:
            images = {x: int(mapping.get(x, x)) for x in xs}
        if len(set(images.values())) != len(images):
            raise ValueError(f"δ_z {z} doğrusunda birebir değil")
        for x, image in images.items():
            source = (image,) + z
            if source not in sample:
                raise ValueError(f"δ_z({x}) = {image} örnek penceresinin dışında (z={z})")
            permuted[(x,) + z] = sample[source]
    return permuted
