import math

import numpy as np
import pytest

from cut_times import (
    LazyWalkSpec,
    RejectionBudgetExhausted,
    TooFewSegments,
    _capped_relation,
    acceptance_by_window,
    brute_force_cut_mask,
    censor_at_window,
    cut_probability,
    detect_window_cuts,
    lazy_identities,
    lazy_walk_path,
    lazy_walk_T,
    normalize_window,
    palm_T_moments,
    palm_T_samples,
    return_probability,
    sample_palm,
    sample_two_sided,
    segment_palm_estimator,
    window_cut_mask,
    window_doubling,
)
from lattice import ResourceLimitError, SeedSpec, derive_stream
from stats import combined_z

SMALL_WINDOW = 300


def test_window_cut_mask_matches_brute_force():
    for i in range(20):
        rng = derive_stream(SeedSpec(3, i))
        spec = LazyWalkSpec.vertical_of(3 + i % 5)
        points = lazy_walk_path(spec, 60, rng)
        assert np.array_equal(window_cut_mask(points), brute_force_cut_mask(points))


def test_cut_mask_on_straight_line():
    points = np.arange(6)[:, None]
    assert window_cut_mask(points).all()
    loop = np.array([[0], [1], [0], [1], [2]])
    assert window_cut_mask(loop).tolist() == [True, False, False, False, True]


def test_lazy_spec_validation():
    spec = LazyWalkSpec.vertical_of(8)
    assert spec.eps == 7 / 8 and spec.dim == 7
    assert LazyWalkSpec.jump_chain_of(8) == LazyWalkSpec(1.0, 7)
    with pytest.raises(ValueError):
        LazyWalkSpec(0.0, 3)
    with pytest.raises(ValueError):
        LazyWalkSpec(0.5, 0)
    assert normalize_window(10) == (10, 10)
    assert normalize_window((3, 7)) == (3, 7)


def test_two_sided_path_is_centred():
    path = sample_two_sided(LazyWalkSpec.vertical_of(6), (40, 60), SeedSpec(1))
    assert len(path.points) == 101
    assert np.all(path.at(0) == 0)
    assert len(path.future()) == 61
    inner = path.restrict(10, 20)
    assert np.array_equal(inner.at(0), path.at(0))
    assert len(inner.points) == 31


def test_palm_sample_conditions_on_zero_cut():
    sample = sample_palm(6, SMALL_WINDOW, SeedSpec(2))
    assert sample.record.zero_is_cut
    assert sample.attempts >= 1
    assert sample.record.T is None or sample.record.T > 0
    if sample.record.T is not None:
        assert sample.record.T == int(sample.record.positive_cuts[0])


def test_rejection_budget():
    with pytest.raises(RejectionBudgetExhausted):
        sample_palm(2, 2000, SeedSpec(0), max_attempts=3)


def test_acceptance_nonincreasing_in_window():
    rates = acceptance_by_window(6, [5, 20, 80, 200], 300, SeedSpec(4))
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert rates[-1] > 0


def test_detect_window_cuts_reports_first_positive_cut():
    path = sample_two_sided(LazyWalkSpec.vertical_of(8), SMALL_WINDOW, SeedSpec(6))
    record = detect_window_cuts(path)
    mask = brute_force_cut_mask(path.points)
    expected = np.flatnonzero(mask) - SMALL_WINDOW
    assert np.array_equal(record.window_cut_times, expected)
    assert record.zero_is_cut == bool(mask[SMALL_WINDOW])


@pytest.mark.parametrize("dim,eps,n,expected", [
    (1, 1.0, 2, 0.5),
    (1, 1.0, 4, 0.375),
    (2, 1.0, 2, 0.25),
    (1, 1.0, 3, 0.0),
    (3, 0.5, 0, 1.0),
])
def test_return_probability_known_values(dim, eps, n, expected):
    for method in ("convolution", "quadrature"):
        assert math.isclose(return_probability(dim, eps, n, method), expected, abs_tol=1e-12)


def test_return_probability_methods_agree_and_decrease_in_dim():
    values = []
    for dim in (2, 3, 4, 5):
        conv = return_probability(dim, 0.9, 10, "convolution")
        quad = return_probability(dim, 0.9, 10, "quadrature")
        assert abs(conv - quad) < 1e-10
        values.append(conv)
    assert all(a > b for a, b in zip(values, values[1:]))
    # ε < 1 iken tek n için de pozitif
    assert return_probability(2, 0.9, 3) > 0


def test_return_probability_limits():
    with pytest.raises(ResourceLimitError):
        return_probability(2, 0.5, 2000)
    with pytest.raises(ResourceLimitError):
        return_probability(6, 0.5, 30, "convolution", max_cells=10 ** 6)
    with pytest.raises(ValueError):
        return_probability(2, 0.5, 4, "simpson")


def test_segment_estimator_needs_segments():
    with pytest.raises(TooFewSegments):
        segment_palm_estimator(lambda s: s.length, 50, 3, SeedSpec(1), lookahead=50, burn_in=10,
                               min_segments=10 ** 6)


@pytest.mark.slow
def test_segment_mean_length_matches_inverse_cut_probability():
    seg = segment_palm_estimator(lambda s: s.length, 20000, 8, SeedSpec(5), lookahead=2000, burn_in=2000)
    p = cut_probability(8, 1000, 3000, SeedSpec(6))
    # Ê(T) = 1 / P(0 ∈ D)
    product = seg.value * p.value
    stderr = math.hypot(seg.stderr * p.value, p.stderr * seg.value)
    assert abs(product - 1.0) < 4 * stderr + 0.02


@pytest.mark.slow
def test_palm_moment_identities_d8():
    moments = palm_T_moments(8, 1000, 2000, SeedSpec(10), moment_cap=32)
    assert moments.truncation_rate < 0.01
    for name in ("cut_time_on_cut", "palm_mean_times_cut_probability", "palm_second_moment_relation",
                 "palm_square_from_unconditioned"):
        assert moments.identity(name).holds(4.0), name
    with pytest.raises(KeyError):
        moments.identity("missing")


@pytest.mark.slow
def test_jump_chain_cut_probability_relation():
    lazy = cut_probability(8, 1000, 3000, SeedSpec(1))
    jump = cut_probability(8, 1000, 3000, SeedSpec(2), jump_chain=True)
    scaled = jump.value * 7 / 8
    assert abs(lazy.value - scaled) < 4 * math.hypot(lazy.stderr, jump.stderr * 7 / 8)


@pytest.mark.slow
def test_lazy_walk_identities():
    jump = lazy_walk_T(LazyWalkSpec.jump_chain_of(8), 1000, 2000, SeedSpec(3), block=5)
    lazy = lazy_walk_T(LazyWalkSpec(0.5, 7), 1000, 2000, SeedSpec(3), block=7)
    for check in lazy_identities(lazy, jump):
        assert check.holds(4.0), check.name


@pytest.mark.slow
def test_window_doubling_and_palm_samples():
    doubling = window_doubling(8, 500, 1500, SeedSpec(8))
    assert combined_z(doubling.at_window, doubling.at_double) < 4
    T = palm_T_samples(8, 500, 200, SeedSpec(8))
    assert T.size > 190
    assert T.min() >= 1


def test_quadrature_matches_convolution_for_long_walks():
    for dim, n in ((1, 400), (2, 200)):
        conv = return_probability(dim, 0.9, n, "convolution")
        assert math.isclose(return_probability(dim, 0.9, n, "quadrature"), conv, rel_tol=1e-9)
        assert math.isclose(return_probability(dim, 0.9, n), conv, rel_tol=1e-9)
    # tek eksende basit yürüyüş: C(400,200)/2^400
    assert math.isclose(return_probability(1, 1.0, 400, "quadrature"), math.comb(400, 200) / 2 ** 400, rel_tol=1e-10)
    assert return_probability(1, 1.0, 401, "quadrature") == 0.0
    assert 0.0 < return_probability(5, 0.9, 1000) < return_probability(5, 0.9, 500)


def test_capped_relations_by_hand():
    T_all = np.array([1, 3, 50, -1])
    zero_cut = np.array([1.0, 0.0, 1.0, 0.0])
    T_palm = np.array([1, 2, -1])
    # L = 4: M = [1, 2, 4], p = 1/2
    second = _capped_relation("second", T_all, zero_cut, T_palm, 4, lambda t: t, lambda m: m * (m + 1) / 2.0)
    assert second.lhs == 1.0
    assert math.isclose(second.rhs, 7 / 3)
    assert math.isclose(second.difference.value, second.lhs - second.rhs)
    square = _capped_relation("square", T_all, zero_cut, T_palm, 4, lambda t: 2.0 * t - 1.0, lambda m: m ** 2)
    assert square.lhs == 1.5
    assert math.isclose(square.rhs, 3.5)


def test_truncated_draws_count_as_window_edge():
    assert censor_at_window(np.array([3, -1, 1]), 5).tolist() == [3.0, 5.0, 1.0]
    with pytest.raises(ValueError):
        palm_T_moments(6, 100, 10, SeedSpec(1), moment_cap=101)


@pytest.mark.slow
def test_capped_moment_relations_hold_in_heavy_tail():
    # d = 6: Ê(T²) sonsuz, kesilmiş ilişkiler yine de geçerli
    moments = palm_T_moments(6, 2000, 4000, SeedSpec(777), moment_cap=32)
    assert moments.moment_cap == 32
    for name in ("palm_second_moment_relation", "palm_third_moment_relation", "palm_square_from_unconditioned"):
        assert moments.identity(name).holds(4.0), name
