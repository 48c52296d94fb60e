"""
Kafes geometrisi ve tekrarlanabilir rastgele akışlar.

Koordinat 0 yatay (e1, uyarılan) eksendir; 1..d-1 koordinatları dikey bileşeni oluşturur.
Rastgele akışlar sayaç tabanlıdır (Philox): (master_seed, stream_id) çifti akışı tamamen belirler.
"""
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

STREAM_BLOCK = 2 ** 32
_U64 = 2 ** 64


class ResourceLimitError(RuntimeError):
    """Yapılandırılmış kaynak sınırı aşıldığında fırlatılır"""


@dataclass(frozen=True)
class Direction:
    axis: int
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"Geçersiz yön işareti: {self.sign}")
        if self.axis < 0:
            raise ValueError(f"Geçersiz eksen: {self.axis}")

    def __neg__(self) -> "Direction":
        return Direction(self.axis, -self.sign)

    @property
    def is_horizontal(self) -> bool:
        return self.axis == 0

    @property
    def index(self) -> int:
        """directions(d) listesindeki sıra numarası"""
        return 2 * self.axis + (0 if self.sign == 1 else 1)

    def vector(self, d: int) -> np.ndarray:
        if self.axis >= d:
            raise ValueError(f"Eksen {self.axis} boyut {d} için aralık dışında")
        v = np.zeros(d, dtype=np.int64)
        v[self.axis] = self.sign
        return v


@dataclass(frozen=True)
class LatticePoint:
    coords: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) < 2:
            raise ValueError(f"Kafes boyutu en az 2 olmalı (verilen: {len(self.coords)})")
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @classmethod
    def origin(cls, d: int) -> "LatticePoint":
        return cls((0,) * d)

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def horizontal(self) -> int:
        return self.coords[0]

    @property
    def vertical(self) -> Tuple[int, ...]:
        return self.coords[1:]


def directions(d: int) -> List[Direction]:
    """2d birim yönü sabit sırayla döner: +e1, -e1, +e2, -e2, ..."""
    if d < 1:
        raise ValueError(f"Geçersiz boyut: {d}")
    return [Direction(axis, sign) for axis in range(d) for sign in (1, -1)]


def direction_from_index(index: int, d: int) -> Direction:
    if not 0 <= index < 2 * d:
        raise ValueError(f"Yön indeksi aralık dışında: {index}")
    return Direction(index // 2, 1 if index % 2 == 0 else -1)


def step_vectors(d: int) -> np.ndarray:
    """(2d, d) boyutlu birim adım tablosu, directions(d) sırasıyla"""
    table = np.zeros((2 * d, d), dtype=np.int64)
    for i, direction in enumerate(directions(d)):
        table[i, direction.axis] = direction.sign
    return table


def step(p: LatticePoint, direction: Direction) -> LatticePoint:
    if direction.axis >= p.d:
        raise ValueError(f"Eksen {direction.axis} boyut {p.d} için aralık dışında")
    coords = list(p.coords)
    coords[direction.axis] += direction.sign
    return LatticePoint(tuple(coords))


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= int(value) < _U64:
                raise ValueError(f"{name} 64-bit aralığında olmalı: {value}")

    def child(self, block: int, index: int) -> "SeedSpec":
        """İç içe akış: stream_id = block·2^32 + index"""
        return SeedSpec(self.master_seed, nested_stream_id(block, index))


def nested_stream_id(block: int, index: int) -> int:
    if not 0 <= index < STREAM_BLOCK:
        raise ValueError(f"Replika indeksi 2^32 sınırını aşıyor: {index}")
    return block * STREAM_BLOCK + index


def derive_stream(seed: SeedSpec) -> np.random.Generator:
    sequence = np.random.SeedSequence(int(seed.master_seed), spawn_key=(int(seed.stream_id),))
    return np.random.Generator(np.random.Philox(sequence))


StreamLike = Union[SeedSpec, np.random.Generator]


def as_stream(seed: StreamLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return derive_stream(seed)
    raise TypeError(f"SeedSpec veya Generator bekleniyordu: {type(seed).__name__}")


def draw_seed(rng: np.random.Generator) -> int:
    """Akıştan 63-bitlik alt tohum çeker (ortam tohumu, site parası tohumu)"""
    return int(rng.integers(0, 2 ** 63, dtype=np.int64))


def row_labels(points: np.ndarray) -> np.ndarray:
    """Her satıra, eşit satırlara eşit olmak üzere, tamsayı etiket verir"""
    points = np.asarray(points)
    if points.ndim == 1:
        points = points[:, None]
    _, labels = np.unique(points, axis=0, return_inverse=True)
    return np.asarray(labels).reshape(-1)
