"""
Uyarılmış yürüyüş simülasyonu (sabit ortam altında P_β).

İki bağımsız mekanizma: doğrudan geçiş kuralı ve yardımcı değişkenlerle kurulum
(dikey SRW Z̃, η_i ~ Ber(1/d), ξ_i ~ Ber(1/2), site paraları ζ_k(y)).
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from environment import CookieEnvironment, CookieLaw, Site, site_uniform
from lattice import StreamLike, as_stream, draw_seed, row_labels, step_vectors


@dataclass
class Trajectory:
    positions: np.ndarray
    horiz_increments: np.ndarray
    move_flags: np.ndarray
    visit_index: np.ndarray
    cookie_used: np.ndarray

    @property
    def n(self) -> int:
        return len(self.horiz_increments)

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    @property
    def X(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def Z(self) -> np.ndarray:
        return self.positions[:, 1:]

    def prefix(self, n: int) -> "Trajectory":
        if not 0 <= n <= self.n:
            raise ValueError(f"Önek uzunluğu aralık dışında: {n}")
        return Trajectory(self.positions[: n + 1], self.horiz_increments[:n], self.move_flags[:n],
                          self.visit_index[: n + 1], self.cookie_used[:n])

    def header(self) -> List[str]:
        return ["time", "x"] + [f"z{i}" for i in range(1, self.d)] + ["E", "eta", "k", "cookie_used"]

    def rows(self) -> List[list]:
        rows = []
        for j in range(self.n + 1):
            coords = [int(c) for c in self.positions[j]]
            if j < self.n:
                tail = [int(self.horiz_increments[j]), int(self.move_flags[j]), int(self.visit_index[j]),
                        repr(float(self.cookie_used[j]))]
            else:
                tail = ["", "", int(self.visit_index[j]), ""]
            rows.append([j] + coords + tail)
        return rows


class VisitCounter:
    """Site -> ziyaret sayısı; replika başına temizlenir"""

    def __init__(self):
        self.counts: Dict[Site, int] = {}

    def visit(self, site: Site) -> int:
        k = self.counts.get(site, 0) + 1
        self.counts[site] = k
        return k

    def count(self, site: Site) -> int:
        return self.counts.get(site, 0)

    def clear(self):
        self.counts.clear()


def visit_indices(positions: np.ndarray) -> np.ndarray:
    """k_j = #{i ≤ j : Y_i = Y_j}, vektörel"""
    labels = row_labels(positions)
    length = len(labels)
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    starts = np.ones(length, dtype=bool)
    starts[1:] = sorted_labels[1:] != sorted_labels[:-1]
    first = np.maximum.accumulate(np.where(starts, np.arange(length), 0))
    k = np.empty(length, dtype=np.int64)
    k[order] = np.arange(length) - first + 1
    return k


def visit_count_semantics(traj: Trajectory, j: int) -> int:
    """Y_j sitesinin 0..j-1 zamanlarında tam k-1 kez ziyaret edildiği k"""
    if not 0 <= j < len(traj.positions):
        raise ValueError(f"Zaman aralık dışında: {j}")
    return int(traj.visit_index[j])


def _run_direct(cookie: Callable[[Site, int], float], d: int, n: int, u: np.ndarray) -> Trajectory:
    two_d = 2 * d
    pos = [0] * d
    positions = np.zeros((n + 1, d), dtype=np.int64)
    E = np.zeros(n, dtype=np.int8)
    eta = np.zeros(n, dtype=np.int8)
    visit = np.zeros(n + 1, dtype=np.int64)
    cookie_used = np.zeros(n, dtype=np.float64)
    counter = VisitCounter()

    site = tuple(pos)
    k = counter.visit(site)
    visit[0] = k
    for j in range(n):
        beta = cookie(site, k)
        # [0, 1+β) -> +e1, [1+β, 2) -> -e1, [2, 2d) -> dikey yönler
        x = u[j] * two_d
        if x < 1.0 + beta:
            pos[0] += 1
            E[j] = 1
            eta[j] = 1
        elif x < 2.0:
            pos[0] -= 1
            E[j] = -1
            eta[j] = 1
        else:
            idx = min(int(x), two_d - 1)
            pos[idx // 2] += 1 if idx % 2 == 0 else -1
        cookie_used[j] = beta
        site = tuple(pos)
        k = counter.visit(site)
        visit[j + 1] = k
        positions[j + 1] = pos
    return Trajectory(positions, E, eta, visit, cookie_used)


def simulate_direct(env: CookieEnvironment, d: int, n: int, seed: StreamLike) -> Trajectory:
    """Geçiş kuralıyla: taze kurabiyede P(±e1) = (1±β_k(y))/2d, diğer yönler 1/2d"""
    if d < 2 or n < 0:
        raise ValueError(f"Geçersiz parametreler: d={d}, n={n}")
    rng = as_stream(seed)
    u = rng.random(n)
    return _run_direct(lambda site, k: env.beta_site(site, k), d, n, u)


def simulate_discovery_order(law: CookieLaw, m, d: int, n: int, seed: StreamLike,
                             identical: bool = True) -> Trajectory:
    """Kurabiye yığını siteye ilk varışta μ'den çekilir (keşif sırası).

    Tavlanmış yasa IIDLazy ortamdaki yürüyüşünkiyle aynıdır.
    """
    if math.isinf(m) and not identical:
        raise ValueError("m=∞ yalnızca özdeş kurabiyelerle kullanılabilir")
    rng = as_stream(seed)
    u = rng.random(n)
    stacks: Dict[Site, tuple] = {}

    def cookie(site: Site, k: int) -> float:
        if k > m:
            return 0.0
        stack = stacks.get(site)
        if stack is None:
            size = 1 if identical else int(m)
            stack = tuple(law.quantile_scalar(v) for v in rng.random(size))
            stacks[site] = stack
        return stack[0] if identical else stack[k - 1]

    return _run_direct(cookie, d, n, u)


def lift_vertical_path(env: CookieEnvironment, vertical: np.ndarray, seed: StreamLike,
                       coin_seed: Optional[int] = None) -> Trajectory:
    """Verilen dikey yolun üzerine yatay bileşeni kurar.

    η_j = 1 ⟺ Z_j = Z_{j+1}. Taze kurabiyede ζ_k(y) site parası, aksi halde adil ξ_j parası kullanılır.
    Dikey yol üzerinde koşullama yapılmış olsa da yatay paralar ondan bağımsızdır.
    """
    rng = as_stream(seed)
    vertical = np.asarray(vertical, dtype=np.int64)
    if vertical.ndim == 1:
        vertical = vertical[:, None]
    n = len(vertical) - 1
    eta = np.all(vertical[1:] == vertical[:-1], axis=1)
    xi = rng.random(n) < 0.5
    if coin_seed is None:
        coin_seed = draw_seed(rng)

    vrows = [tuple(r) for r in vertical.tolist()]
    xs = np.zeros(n + 1, dtype=np.int64)
    E = np.zeros(n, dtype=np.int8)
    visit = np.zeros(n + 1, dtype=np.int64)
    cookie_used = np.zeros(n, dtype=np.float64)
    counter = VisitCounter()
    x = 0
    for j in range(n):
        site = (x,) + vrows[j]
        k = counter.visit(site)
        visit[j] = k
        fresh = k <= env.m
        if fresh:
            cookie_used[j] = env.beta_site(site, k)
        if eta[j]:
            if fresh:
                step = 1 if site_uniform(coin_seed, site, k) < (1.0 + cookie_used[j]) / 2.0 else -1
            else:
                step = 1 if xi[j] else -1
            x += step
            E[j] = step
        xs[j + 1] = x
    visit[n] = counter.visit((x,) + vrows[n])
    positions = np.column_stack([xs, vertical])
    return Trajectory(positions, E, eta.astype(np.int8), visit, cookie_used)


def lift_symmetric(vertical: np.ndarray, seed: StreamLike) -> Trajectory:
    """β ≡ 0 için vektörel yatay kurulum (P_0)"""
    rng = as_stream(seed)
    vertical = np.asarray(vertical, dtype=np.int64)
    if vertical.ndim == 1:
        vertical = vertical[:, None]
    n = len(vertical) - 1
    eta = np.all(vertical[1:] == vertical[:-1], axis=1)
    signs = np.where(rng.random(n) < 0.5, 1, -1)
    E = (signs * eta).astype(np.int8)
    xs = np.zeros(n + 1, dtype=np.int64)
    xs[1:] = np.cumsum(E, dtype=np.int64)
    positions = np.column_stack([xs, vertical])
    return Trajectory(positions, E, eta.astype(np.int8), visit_indices(positions), np.zeros(n))


def constructed_vertical(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Z_n = Z̃_{Σ_{i<n}(1-η_i)}: Z̃ basit rastgele yürüyüş, η_i ~ Ber(1/d)"""
    eta = rng.random(n) < 1.0 / d
    jumps = rng.integers(0, 2 * (d - 1), size=n)
    z_tilde = np.zeros((n + 1, d - 1), dtype=np.int64)
    z_tilde[1:] = np.cumsum(step_vectors(d - 1)[jumps], axis=0)
    consumed = np.zeros(n + 1, dtype=np.int64)
    consumed[1:] = np.cumsum(~eta, dtype=np.int64)
    return z_tilde[consumed]


def simulate_constructed(env: CookieEnvironment, d: int, n: int, seed: StreamLike) -> Trajectory:
    if d < 2 or n < 0:
        raise ValueError(f"Geçersiz parametreler: d={d}, n={n}")
    rng = as_stream(seed)
    return lift_vertical_path(env, constructed_vertical(d, n, rng), rng)


def simulate_symmetric(d: int, n: int, seed: StreamLike) -> Trajectory:
    """P_0 yörüngesi, tamamen vektörel"""
    if d < 2 or n < 0:
        raise ValueError(f"Geçersiz parametreler: d={d}, n={n}")
    rng = as_stream(seed)
    return lift_symmetric(constructed_vertical(d, n, rng), rng)
