"""
Küçük örnekler için kesin yol ölçüsü hesapları (test kahini).

Tüm yollar sözlük sırasıyla (yön indeksleri directions(d) sırası) üretilir. Varsayılan mod Kahan/fsum
toplamalı float; exact=True ile n ≤ 6 için Fraction kullanılır.
"""
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from environment import CookieEnvironment, CookieLaw, Site
from girsanov import weight
from lattice import Direction, ResourceLimitError, direction_from_index, step_vectors
from walker import Trajectory, visit_indices

Steps = Tuple[int, ...]
Number = Union[float, Fraction]
Mixture = Sequence[Tuple[float, CookieEnvironment]]

DEFAULT_MAX_PATHS = 10 ** 7
EXACT_MAX_N = 6


@dataclass(frozen=True)
class PathAtom:
    steps: Steps
    probability: Number

    def path(self, d: int) -> List[Direction]:
        return [direction_from_index(i, d) for i in self.steps]

    def positions(self, d: int) -> np.ndarray:
        out = np.zeros((len(self.steps) + 1, d), dtype=np.int64)
        if self.steps:
            out[1:] = np.cumsum(step_vectors(d)[list(self.steps)], axis=0)
        return out


def _check_size(d: int, n: int, max_paths: int, exact: bool):
    if d < 2 or n < 0:
        raise ValueError(f"Geçersiz parametreler: d={d}, n={n}")
    if (2 * d) ** n > max_paths:
        raise ResourceLimitError(f"(2d)^n = {(2 * d) ** n} yol sınırı {max_paths} değerini aşıyor")
    if exact and n > EXACT_MAX_N:
        raise ValueError(f"Kesin kesir modu n ≤ {EXACT_MAX_N} için tanımlı (n={n})")


def _number(value: float, exact: bool) -> Number:
    return Fraction(value) if exact else float(value)


def trajectory_of(steps: Steps, d: int) -> Trajectory:
    """Adım dizisinden Trajectory (cookie_used bilinmediğinden sıfır)"""
    idx = np.asarray(steps, dtype=np.int64)
    positions = PathAtom(tuple(steps), 0.0).positions(d)
    horizontal = idx < 2
    E = np.where(horizontal, np.where(idx % 2 == 0, 1, -1), 0).astype(np.int8)
    return Trajectory(positions, E, horizontal.astype(np.int8), visit_indices(positions), np.zeros(len(idx)))


def _quenched(d: int, n: int, cookie: Callable[[Site, int], Number], one: Number) -> List[PathAtom]:
    atoms: List[PathAtom] = []
    base = one / (2 * d)
    counts: Dict[Site, int] = {}
    pos = [0] * d
    steps: List[int] = []

    def visit(prob: Number):
        site = tuple(pos)
        k = counts.get(site, 0) + 1
        counts[site] = k
        if len(steps) == n:
            atoms.append(PathAtom(tuple(steps), prob))
        else:
            beta = cookie(site, k)
            for idx in range(2 * d):
                axis, sign = idx // 2, (1 if idx % 2 == 0 else -1)
                p = base * (one + sign * beta) if axis == 0 else base
                pos[axis] += sign
                steps.append(idx)
                visit(prob * p)
                steps.pop()
                pos[axis] -= sign
        counts[site] = k - 1

    visit(one)
    return atoms


def enumerate_paths(d: int, n: int, env: Union[None, CookieEnvironment, CookieLaw, Mixture] = None,
                    exact: bool = False, max_paths: int = DEFAULT_MAX_PATHS, m=1) -> List[PathAtom]:
    """Tüm (2d)^n yol ve olasılıkları.

    env None: P_0. CookieEnvironment: çarpım formülüyle quenched yasa. [(ağırlık, ortam), ...]: sonlu
    karışımın tavlanmış yasası. CookieLaw: i.i.d. ayrık μ ile tavlanmış yasa (m kurabiye).
    """
    _check_size(d, n, max_paths, exact)
    if isinstance(env, CookieLaw):
        return enumerate_iid_annealed(d, n, env, m, exact=exact, max_paths=max_paths)
    if isinstance(env, (list, tuple)):
        return _mixture(d, n, env, exact, max_paths)
    one: Number = Fraction(1) if exact else 1.0
    if env is None:
        return _quenched(d, n, lambda site, k: 0 * one, one)
    return _quenched(d, n, lambda site, k: _number(env.beta_site(site, k), exact), one)


def _mixture(d: int, n: int, mixture: Mixture, exact: bool, max_paths: int) -> List[PathAtom]:
    total = math.fsum(float(w) for w, _ in mixture)
    if total <= 0:
        raise ValueError("Karışım ağırlıkları pozitif olmalı")
    acc: Dict[Steps, Number] = {}
    for w, env in mixture:
        share = Fraction(w) / Fraction(total) if exact else float(w) / total
        for atom in enumerate_paths(d, n, env, exact, max_paths):
            acc[atom.steps] = acc.get(atom.steps, 0 * share) + share * atom.probability
    return [PathAtom(steps, acc[steps]) for steps in sorted(acc)]


def _stack_choices(law: CookieLaw, m: int, identical: bool, exact: bool) -> List[Tuple[Tuple[Number, ...], Number]]:
    atoms = [(_number(v, exact), _number(p, exact)) for v, p in law.atoms()]
    if identical:
        return [((v,), p) for v, p in atoms]
    choices = []
    for combo in product(atoms, repeat=m):
        prob = Fraction(1) if exact else 1.0
        for _, p in combo:
            prob = prob * p
        choices.append((tuple(v for v, _ in combo), prob))
    return choices


def enumerate_iid_annealed(d: int, n: int, law: CookieLaw, m: int = 1, identical: bool = True,
                           exact: bool = False, max_paths: int = DEFAULT_MAX_PATHS) -> List[PathAtom]:
    """i.i.d. ayrık μ altında tavlanmış yasa: her ilk ziyarette yığın üzerinde dallanır"""
    _check_size(d, n, max_paths, exact)
    if math.isinf(m):
        raise ValueError("Tavlanmış kahin sonlu m gerektirir")
    m = int(m)
    choices = _stack_choices(law, m, identical, exact)
    one: Number = Fraction(1) if exact else 1.0
    base = one / (2 * d)
    acc: Dict[Steps, Number] = defaultdict(lambda: 0 * one)
    counts: Dict[Site, int] = {}
    stacks: Dict[Site, tuple] = {}
    pos = [0] * d
    steps: List[int] = []

    def walk(prob: Number):
        site = tuple(pos)
        if site not in stacks and len(steps) < n:
            for stack, p in choices:
                stacks[site] = stack
                advance(prob * p)
            del stacks[site]
        else:
            advance(prob)

    def advance(prob: Number):
        site = tuple(pos)
        k = counts.get(site, 0) + 1
        counts[site] = k
        if len(steps) == n:
            acc[tuple(steps)] += prob
        else:
            stack = stacks[site]
            beta = 0 * one if k > m else (stack[0] if identical else stack[k - 1])
            for idx in range(2 * d):
                axis, sign = idx // 2, (1 if idx % 2 == 0 else -1)
                p = base * (one + sign * beta) if axis == 0 else base
                pos[axis] += sign
                steps.append(idx)
                walk(prob * p)
                steps.pop()
                pos[axis] -= sign
        counts[site] = k - 1

    walk(one)
    return [PathAtom(s, acc[s]) for s in sorted(acc)]


@dataclass(frozen=True)
class AuxiliaryOutcome:
    """Kurulumun yardımcı değişkenlerinin bir gerçekleşmesi ve ürettiği yol.

    coins: η_j = 1 olan her adım için (tür, işaret); tür "zeta" taze kurabiyede ζ_k(y), aksi halde "xi".
    """
    eta: Tuple[int, ...]
    jumps: Tuple[int, ...]
    coins: Tuple[Tuple[str, int], ...]
    probability: Number
    steps: Steps


def _vertical_indices(eta: Tuple[int, ...], jumps: Tuple[int, ...]) -> List[int]:
    """η_j = 0 adımlarında Z̃'nin sıradaki sıçraması; yön indeksi d boyutlu sırada (2 kaydırılmış)"""
    it = iter(jumps)
    return [-1 if e else next(it) + 2 for e in eta]


def enumerate_auxiliary(d: int, n: int, env: Optional[CookieEnvironment] = None,
                        exact: bool = False, max_paths: int = DEFAULT_MAX_PATHS) -> Iterator[AuxiliaryOutcome]:
    """η ~ Ber(1/d), Z̃ sıçramaları, ξ ~ Ber(1/2) ve ζ_k(y) ~ Ber((1+β)/2) üzerinde ayrı ayrı dallanır.

    Önce (η, Z̃) dikey yolu sabitler; yatay paralar yalnızca okundukları adımda dallanır, okunmayan
    paralar toplamda 1'e marjinalleşir. ζ_k(y) her (site, k) çifti için en fazla bir kez okunur.
    """
    _check_size(d, n, max_paths, exact)
    one: Number = Fraction(1) if exact else 1.0
    half = one / 2
    p_move = one / d
    p_jump = one / (2 * (d - 1))
    m = env.m if env is not None else 0

    for eta in product((1, 0), repeat=n):
        n_jumps = n - sum(eta)
        p_eta = p_move ** sum(eta) * (one - p_move) ** n_jumps
        for jumps in product(range(2 * (d - 1)), repeat=n_jumps):
            vertical = _vertical_indices(eta, jumps)
            counts: Dict[Site, int] = {}
            pos = [0] * d
            steps: List[int] = []
            coins: List[Tuple[str, int]] = []

            def lift(j: int, prob: Number) -> Iterator[AuxiliaryOutcome]:
                site = tuple(pos)
                k = counts.get(site, 0) + 1
                counts[site] = k
                if j == n:
                    yield AuxiliaryOutcome(eta, jumps, tuple(coins), prob, tuple(steps))
                else:
                    if eta[j]:
                        if k <= m:
                            beta = _number(env.beta_site(site, k), exact)
                            outcomes = [("zeta", 1, (one + beta) / 2), ("zeta", -1, (one - beta) / 2)]
                        else:
                            outcomes = [("xi", 1, half), ("xi", -1, half)]
                    else:
                        outcomes = [(None, 0, one)]
                    for kind, sign, p in outcomes:
                        idx = vertical[j] if kind is None else (0 if sign > 0 else 1)
                        axis, step_sign = idx // 2, (1 if idx % 2 == 0 else -1)
                        if kind is not None:
                            coins.append((kind, sign))
                        pos[axis] += step_sign
                        steps.append(idx)
                        yield from lift(j + 1, prob * p)
                        steps.pop()
                        pos[axis] -= step_sign
                        if kind is not None:
                            coins.pop()
                counts[site] = k - 1

            yield from lift(0, p_eta * p_jump ** n_jumps)


def construction_enumerate(d: int, n: int, env: Optional[CookieEnvironment] = None,
                           exact: bool = False, max_paths: int = DEFAULT_MAX_PATHS) -> List[PathAtom]:
    """Yardımcı değişkenlerin (η, Z̃ sıçramaları, ξ, ζ_k(y)) itilmiş yasası"""
    one: Number = Fraction(1) if exact else 1.0
    acc: Dict[Steps, Number] = defaultdict(lambda: 0 * one)
    for outcome in enumerate_auxiliary(d, n, env, exact, max_paths):
        acc[outcome.steps] += outcome.probability
    return [PathAtom(s, acc[s]) for s in sorted(acc)]


def path_weight(atom: PathAtom, d: int, env: CookieEnvironment, exact: bool = False) -> Number:
    """M_n(β) bir yol için; exact modda çarpanlar kesir olarak"""
    traj = trajectory_of(atom.steps, d)
    if not exact:
        return weight(traj, env).value
    betas = env.beta_at(traj.positions[:-1], traj.visit_index[:-1])
    out = Fraction(1)
    for e, b in zip(traj.horiz_increments.tolist(), betas.tolist()):
        out *= 1 + e * Fraction(b)
    return out


def girsanov_enumerate(d: int, n: int, env: CookieEnvironment, exact: bool = False,
                       max_paths: int = DEFAULT_MAX_PATHS) -> List[PathAtom]:
    """P_0 olasılıkları × M_n(β): yeniden ağırlıklanmış yasa"""
    return [PathAtom(a.steps, a.probability * path_weight(a, d, env, exact))
            for a in enumerate_paths(d, n, None, exact, max_paths)]


def oracle_expectation(atoms: Sequence[PathAtom], f: Callable[[PathAtom], Number]) -> Number:
    """Σ f(yol)·olasılık"""
    terms = [f(a) * a.probability for a in atoms]
    if all(isinstance(t, (Fraction, int)) for t in terms):
        return sum(terms, Fraction(0))
    return math.fsum(float(t) for t in terms)


def total_probability(atoms: Sequence[PathAtom]) -> Number:
    return oracle_expectation(atoms, lambda a: 1)


def tv_distance(a: Sequence[PathAtom], b: Sequence[PathAtom]) -> float:
    pa = {x.steps: x.probability for x in a}
    pb = {x.steps: x.probability for x in b}
    return 0.5 * math.fsum(abs(float(pa.get(s, 0) - pb.get(s, 0))) for s in set(pa) | set(pb))


def final_x(atom: PathAtom) -> int:
    """X_n"""
    return sum(1 if i == 0 else -1 for i in atom.steps if i < 2)


def golden_rows(atoms: Sequence[PathAtom]) -> List[list]:
    return [["-".join(str(i) for i in a.steps), repr(float(a.probability))] for a in atoms]
