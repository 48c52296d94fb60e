"""
Kabul kriterleri: verify alt komutunun çalıştırdığı denetimler.

Her kriter (geçti, ayrıntı) döner; replika sayıları verify_scale ile ölçeklenir.
"""
import filecmp
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from cut_times import (
    DEFAULT_WINDOW,
    LazyWalkSpec,
    lazy_identities,
    lazy_walk_T,
    palm_T_moments,
    palm_T_samples,
    return_probability,
    window_doubling,
)
from environment import CookieLaw, CoupledPair, Deterministic, IIDLazy
from estimators import (
    coupled_derivative,
    derivative_at_zero,
    derivative_v_m_beta,
    range_constant,
    speed_cut_ratio,
    speed_girsanov_sweep,
    speed_lln,
    sweep_form,
)
from experiment_config import ExperimentConfig
from girsanov import reweighted_expectation, weight
from lattice import SeedSpec
from oracle import construction_enumerate, enumerate_paths, girsanov_enumerate, oracle_expectation, path_weight, tv_distance
from stats import Estimate, agree, isotonic_check
from utils import format_duration
from walker import simulate_symmetric

WINDOW = 2000
# Palm örnekleminin kuyruğu çözebildiği kesme seviyesi: replika·P̂(T>L) ≫ 1
PALM_MOMENT_CAP = 32
PALM_REPLICATES = 4000
LLN_REPLICATES = 400
WEIGHT_REPLICATES = 20000
EXACT_TOL = 1e-12

Check = Tuple[bool, str]


@dataclass
class CriterionOutcome:
    number: int
    name: str
    passed: bool
    detail: str


def _scaled(base: int, scale: float) -> int:
    return max(10, int(round(base * scale)))


def _fmt(est: Estimate) -> str:
    return f"{est.value:.5f}±{est.stderr:.5f}"


def oracle_exactness(seed: SeedSpec, scale: float) -> Check:
    env = Deterministic(0.5, 1)
    direct = enumerate_paths(2, 3, env)
    constructed = construction_enumerate(2, 3, env)
    reweighted = girsanov_enumerate(2, 3, env)
    tvs = [tv_distance(direct, constructed), tv_distance(direct, reweighted), tv_distance(constructed, reweighted)]
    return max(tvs) < EXACT_TOL, "TV = " + ", ".join(f"{v:.2e}" for v in tvs)


def density_normalization(seed: SeedSpec, scale: float) -> Check:
    details, ok = [], True
    atoms = enumerate_paths(2, 3)
    for beta in (0.3, 0.7):
        env = Deterministic(beta, 1)
        exact = oracle_expectation(atoms, lambda a: path_weight(a, 2, env))
        ok &= abs(exact - 1.0) < EXACT_TOL
        details.append(f"kesin β={beta}: {exact:.15f}")
    replicates = _scaled(WEIGHT_REPLICATES, scale)
    for block, (d, beta) in enumerate([(2, 0.3), (2, 0.7), (6, 0.3), (6, 0.7)]):
        env = Deterministic(beta, 1)
        trajs = [simulate_symmetric(d, 50, seed.child(block, i)) for i in range(replicates)]
        result = reweighted_expectation(np.ones(replicates), [weight(t, env) for t in trajs], label=f"d={d}")
        est = Estimate(result.estimate, result.stderr)
        ok &= est.within(1.0)
        details.append(f"MC d={d} β={beta}: {_fmt(est)}")
    return ok, "; ".join(details)


def palm_identities(seed: SeedSpec, scale: float) -> Check:
    replicates = _scaled(PALM_REPLICATES, scale)
    details, ok = [], True
    names = ["cut_time_on_cut", "palm_mean_times_cut_probability", "palm_second_moment_relation"]
    for d in (6, 8, 10):
        moments = palm_T_moments(d, DEFAULT_WINDOW, replicates, seed, moment_cap=PALM_MOMENT_CAP)
        checks = names + (["palm_third_moment_relation"] if d == 10 else [])
        for name in checks:
            check = moments.identity(name)
            ok &= check.holds(3.0)
            details.append(f"d={d} {name}: {check.difference.z(0.0):.2f}σ")
        ok &= moments.truncation_rate < 0.01
        doubling = window_doubling(d, DEFAULT_WINDOW // 2, replicates, seed)
        ok &= doubling.shift_sigma < 1.0
        details.append(f"d={d} L={moments.moment_cap} kesilme={moments.truncation_rate:.4f} kayma={doubling.shift_sigma:.2f}σ")
    return ok, "; ".join(details)


def lazy_walk_identities(seed: SeedSpec, scale: float) -> Check:
    replicates = _scaled(PALM_REPLICATES, scale)
    d = 8
    jump = lazy_walk_T(LazyWalkSpec.jump_chain_of(d), WINDOW, replicates, seed, block=5)
    details, ok = [], True
    for block, eps in ((7, 0.5), (8, (d - 1) / d)):
        lazy = lazy_walk_T(LazyWalkSpec(eps, d - 1), WINDOW, replicates, seed, block=block)
        for check in lazy_identities(lazy, jump):
            ok &= check.holds(3.0)
            details.append(f"ε={eps} {check.name}: {check.difference.z(0.0):.2f}σ")
    return ok, "; ".join(details)


def return_probability_monotone(seed: SeedSpec, scale: float) -> Check:
    values = [return_probability(dim, 0.9, 10) for dim in (2, 3, 4, 5)]
    ok = all(a > b for a, b in zip(values, values[1:]))
    gaps = []
    for dim in (2, 3, 4, 5):
        gap = abs(return_probability(dim, 0.9, 10, "convolution") - return_probability(dim, 0.9, 10, "quadrature"))
        gaps.append(gap)
        ok &= gap < 1e-10
    return ok, f"P = {', '.join(f'{v:.12f}' for v in values)}; en büyük fark {max(gaps):.1e}"


def simple_walk_limit(seed: SeedSpec, scale: float) -> Check:
    details, ok = [], True
    for d, beta in ((4, 0.3), (8, 0.6)):
        est = speed_lln(Deterministic(beta, math.inf), d, 2000, _scaled(LLN_REPLICATES, scale), seed).as_estimate()
        ok &= est.within(beta / d)
        details.append(f"v(∞,{beta}) d={d}: {_fmt(est)} (β/d={beta / d})")
    deriv = derivative_v_m_beta(8, math.inf, 0.3, WINDOW, _scaled(PALM_REPLICATES, scale), seed).as_estimate()
    ok &= deriv.within(1 / 8)
    details.append(f"∂v/∂β(∞) d=8: {_fmt(deriv)}")
    return ok, "; ".join(details)


def derivative_at_zero_check(seed: SeedSpec, scale: float) -> Check:
    d = 8
    replicates = _scaled(PALM_REPLICATES, scale)
    zero = derivative_at_zero(d, WINDOW, replicates, seed).as_estimate()
    rng = range_constant(d, 20000, _scaled(50, scale), seed, palm_replicates=0).lln
    by_range = Estimate(rng.value / d, rng.stderr / d)
    numv = sweep_form(speed_girsanov_sweep(d, 1, [0.05], WINDOW, replicates, seed), "numv")[0]
    finite = Estimate(numv.value / 0.05, numv.stderr / 0.05)
    ok = agree(zero, by_range) and agree(zero, finite, slack=0.01)
    return ok, f"v'(0)={_fmt(zero)}, R(0)/d={_fmt(by_range)}, v(0.05)/0.05={_fmt(finite)}"


def speed_consistency(seed: SeedSpec, scale: float) -> Check:
    d, beta = 6, 0.5
    env = Deterministic(beta, 1)
    replicates = _scaled(PALM_REPLICATES, scale)
    lln = speed_lln(env, d, 5000, _scaled(LLN_REPLICATES, scale), seed).as_estimate()
    cut = speed_cut_ratio(env, d, WINDOW, replicates, seed).as_estimate()
    sweep = speed_girsanov_sweep(d, 1, [beta], WINDOW, replicates, seed)
    girsanov = sweep_form(sweep, "xm")[0].as_estimate()
    ok = agree(lln, cut) and agree(lln, girsanov) and agree(cut, girsanov)
    return ok, f"lln={_fmt(lln)}, kesim={_fmt(cut)}, girsanov={_fmt(girsanov)}"


def monotonicity_trend(seed: SeedSpec, scale: float) -> Check:
    grid = [0.0, 0.2, 0.4, 0.6, 0.8]
    estimates = sweep_form(speed_girsanov_sweep(10, 1, grid, WINDOW, _scaled(PALM_REPLICATES, scale), seed), "numv")
    check = isotonic_check(grid, [e.value for e in estimates], [e.stderr for e in estimates])
    slope = check.slope_at_zero
    ok = check.consistent and slope.value - 3.0 * slope.stderr > 0
    return ok, f"χ²={check.chi2:.2f} (eşik {check.threshold:.2f}), eğim(0)={_fmt(slope)}"


def coupled_derivative_checks(seed: SeedSpec, scale: float) -> Check:
    replicates = _scaled(PALM_REPLICATES // 4, scale)
    same = coupled_derivative(CoupledPair(Deterministic(0.3), Deterministic(0.3)), 0.5, 8, WINDOW, 20, 2, seed)
    ok = same.value == 0.0
    details = [f"β_1=β_2: {same.value!r}"]

    c, t = 0.4, 0.5
    pair = CoupledPair(Deterministic(0.0), Deterministic(c))
    coupled = coupled_derivative(pair, t, 8, WINDOW, replicates, 1, seed)
    scaled = derivative_v_m_beta(8, 1, t * c, WINDOW, _scaled(PALM_REPLICATES, scale), seed).as_estimate()
    reference = Estimate(c * scaled.value, c * scaled.stderr)
    ok &= agree(Estimate(coupled.value, coupled.stderr), reference)
    details.append(f"deterministik çift: {coupled.value:.5f}±{coupled.stderr:.5f} vs {_fmt(reference)}")

    lower = IIDLazy(CookieLaw.parse("uniform:0,0.15"), 1, sigma=0.3)
    upper = IIDLazy(CookieLaw.parse("uniform:0.15,0.3"), 1, sigma=0.3)
    positive = coupled_derivative(CoupledPair(lower, upper), 0.5, 12, WINDOW, replicates, 10, seed)
    ok &= positive.value - 3.0 * positive.stderr > 0
    ok &= positive.term1_above_bound
    ok &= positive.lower_bound is not None and positive.lower_bound.value > 0
    details.append(f"d=12 σ=0.3: {positive.value:.5f}±{positive.stderr:.5f}, "
                   f"ilk terim {_fmt(positive.term1)} ≥ {positive.term1_bound:.5f}, alt sınır {_fmt(positive.lower_bound)}")
    return ok, "; ".join(details)


def moment_boundedness(seed: SeedSpec, scale: float) -> Check:
    replicates = _scaled(PALM_REPLICATES, scale)
    second = {}
    for d in range(8, 13):
        T = palm_T_samples(d, WINDOW, replicates, seed).astype(np.float64)
        second[d] = float(np.mean(T ** 2))
    ok = all(v < 2.0 * second[8] for v in second.values())
    return ok, ", ".join(f"Ê(T²) d={d}: {v:.3f}" for d, v in second.items())


def engineering(seed: SeedSpec, scale: float) -> Check:
    from experiment_cli import main

    args = ["--seed", str(seed.master_seed), "--d", "6", "--replicates", "200", "--window", "500"]
    runs = [("sweep", ["--beta", "0,0.2,0.4"], "sweep.csv"),
            ("return-prob", ["--dim", "3", "--eps", "0.9", "--n", "10"], "return-prob.csv")]
    details, ok = [], True
    with tempfile.TemporaryDirectory() as tmp:
        for command, extra, filename in runs:
            outputs = []
            for threads in (1, 8):
                out = Path(tmp) / f"{command}-{threads}"
                code = main([command] + args + extra + ["--threads", str(threads), "--out", str(out)])
                ok &= code == 0
                outputs.append(out / command / filename)
            same = filecmp.cmp(outputs[0], outputs[1], shallow=False)
            ok &= same
            details.append(f"{command}: threads 1/8 aynı={same}")
    return ok, "; ".join(details)


CRITERIA: Dict[int, Tuple[str, Callable[[SeedSpec, float], Check]]] = {
    1: ("oracle_exactness", oracle_exactness),
    2: ("density_normalization", density_normalization),
    3: ("palm_identities", palm_identities),
    4: ("lazy_walk_identities", lazy_walk_identities),
    5: ("return_probability_monotone", return_probability_monotone),
    6: ("simple_walk_limit", simple_walk_limit),
    7: ("derivative_at_zero", derivative_at_zero_check),
    8: ("speed_consistency", speed_consistency),
    9: ("monotonicity_trend", monotonicity_trend),
    10: ("coupled_derivative", coupled_derivative_checks),
    11: ("moment_boundedness", moment_boundedness),
    12: ("engineering", engineering),
}


def run_acceptance(cfg: ExperimentConfig, criteria: Optional[Sequence[int]] = None) -> List[CriterionOutcome]:
    selected = sorted(criteria) if criteria else sorted(CRITERIA)
    unknown = [n for n in selected if n not in CRITERIA]
    if unknown:
        raise ValueError(f"Bilinmeyen kriter numaraları: {unknown}")
    outcomes = []
    for number in selected:
        name, check = CRITERIA[number]
        seed = SeedSpec((cfg.master_seed + number) % 2 ** 64)
        started = time.time()
        print(f"⏳ [{number}] {name}")
        try:
            passed, detail = check(seed, cfg.verify_scale)
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {str(e)}"
        outcome = CriterionOutcome(number, name, bool(passed), detail)
        mark = "✅ PASS" if outcome.passed else "❌ FAIL"
        print(f"{mark} [{number}] {name}: {detail} ({format_duration(time.time() - started)})")
        outcomes.append(outcome)
    passed = sum(o.passed for o in outcomes)
    print(f"📊 {passed}/{len(outcomes)} kriter geçti")
    return outcomes
