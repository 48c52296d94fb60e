import math

import numpy as np
import pytest

from lattice import SeedSpec, derive_stream
from stats import (
    Estimate,
    agree,
    combine_independent,
    delta_method,
    effective_sample_size,
    isotonic_check,
    jackknife,
    mean_estimate,
    ratio_estimate,
)


def test_estimate_tolerances():
    est = Estimate(1.0, 0.1)
    assert est.within(1.25)
    assert not est.within(1.35)
    assert est.within(1.35, slack=0.1)
    assert math.isclose(est.z(1.2), 2.0)
    assert Estimate(0.5, 0.0).z(0.5) == 0.0
    assert agree(Estimate(1.0, 0.3), Estimate(2.0, 0.4))
    assert not agree(Estimate(1.0, 0.03), Estimate(2.0, 0.04))


def test_mean_estimate():
    est = mean_estimate([1.0, 2.0, 3.0, 4.0])
    assert est.value == 2.5
    assert math.isclose(est.stderr, np.std([1, 2, 3, 4], ddof=1) / 2)
    with pytest.raises(ValueError):
        mean_estimate([])


def test_ratio_estimate_and_delta_method_agree():
    rng = derive_stream(SeedSpec(1))
    den = rng.integers(1, 10, size=500).astype(float)
    num = 0.3 * den + rng.normal(0, 1, size=500)
    ratio = ratio_estimate(num, den)
    assert math.isclose(ratio.value, num.sum() / den.sum())
    delta = delta_method(np.column_stack([num, den]), lambda a, b: a / b)
    assert math.isclose(ratio.stderr, delta.stderr)
    assert abs(ratio.jackknife_stderr - ratio.stderr) < 0.1 * ratio.stderr
    with pytest.raises(ValueError):
        ratio_estimate([1.0, 2.0], [0.0, 0.0])


def test_jackknife_of_mean_is_standard_error():
    x = np.arange(10, dtype=float)
    jack = jackknife(x, lambda a: a)
    assert math.isclose(jack.stderr, mean_estimate(x).stderr)


def test_combine_independent():
    est = combine_independent(0.0, [(1.0, 3.0), (2.0, 2.0)])
    assert est.stderr == 5.0


def test_effective_sample_size():
    assert math.isclose(effective_sample_size(np.zeros(50)), 50.0)
    assert math.isclose(effective_sample_size([0.0, 0.0, 1000.0]), 1.0)
    assert effective_sample_size([0.0, 0.0], [True, True]) == 0.0
    assert math.isclose(effective_sample_size([0.0, 0.0, 5.0], [False, False, True]), 2.0)


def test_isotonic_check():
    grid = [0.0, 0.2, 0.4, 0.6]
    increasing = isotonic_check(grid, [0.0, 0.02, 0.05, 0.07], [1e-12, 0.005, 0.005, 0.005])
    assert increasing.consistent
    assert increasing.chi2 == pytest.approx(0.0, abs=1e-9)
    assert math.isclose(increasing.slope_at_zero.value, 0.1)
    decreasing = isotonic_check(grid, [0.0, 0.2, 0.1, 0.0], [1e-12, 0.001, 0.001, 0.001])
    assert not decreasing.consistent
