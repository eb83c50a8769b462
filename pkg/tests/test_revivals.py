import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbouncer.errors import DomainError
from qbouncer.revivals import (AnnotatedMinimum, detect_minima, fractional_revival_times,
                               match_fractions, scan, smooth, timeline_columns)


def totient(q):
    return sum(1 for p in range(1, q + 1) if math.gcd(p, q) == 1)


def test_fractional_times_small():
    got = fractional_revival_times(10.0, 2)
    assert got == [(1, 2, 5.0), (1, 1, 10.0)]


def test_fractional_times_default():
    got = fractional_revival_times(1.0, 4)
    assert [(p, q) for p, q, _ in got] == [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)]
    assert all(np.diff([t for _, _, t in got]) > 0)


@pytest.mark.parametrize("q_max", [5, 8, 12])
def test_fractional_count(q_max):
    got = fractional_revival_times(1.0, q_max)
    assert len(got) == 1 + sum(totient(q) for q in range(2, q_max + 1))
    assert len({Fraction(p, q) for p, q, _ in got}) == len(got)


@pytest.mark.parametrize("q_max", [1, 0, 2.5])
def test_fractional_bad_qmax(q_max):
    with pytest.raises(DomainError):
        fractional_revival_times(1.0, q_max)


def test_cosine_minima():
    t = np.linspace(0.0, 4.0, 4001)
    found = detect_minima(t, np.cos(2 * np.pi * t), 1.0)
    np.testing.assert_allclose([m[0] for m in found], [0.5, 1.5, 2.5, 3.5], atol=1e-6)
    np.testing.assert_allclose([m[1] for m in found], -1.0, atol=1e-6)


def test_monotone_has_no_minima():
    t = np.linspace(0.0, 1.0, 500)
    assert detect_minima(t, np.exp(t), 5.0) == []


def test_smoothing_suppresses_fast_wiggles():
    # a slow dip dressed with a fast oscillation of period 10 samples
    t = np.arange(2000.0)
    slow = (t - 1000.0) ** 2 / 1e6
    fast = 0.05 * np.sin(2 * np.pi * t / 10.0)
    assert len(detect_minima(t, slow + fast, 1.0)) > 100
    found = detect_minima(t, slow + fast, 10.0)
    assert len(found) == 1
    assert abs(found[0][0] - 1000.0) < 2.0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 50.0), st.floats(-100.0, 100.0))
def test_affine_invariance(a, b):
    t = np.linspace(0.0, 3.0, 601)
    y = np.cos(2 * np.pi * t) + 0.3 * np.cos(6 * np.pi * t + 0.4)
    base = detect_minima(t, y, 7.0)
    moved = detect_minima(t, a * y + b, 7.0)
    assert len(base) == len(moved)
    np.testing.assert_allclose([m[0] for m in base], [m[0] for m in moved], atol=1e-9)


@pytest.mark.parametrize("w", [0.5, 100.0, 101.0])
def test_window_out_of_range(w):
    t = np.linspace(0.0, 1.0, 100)
    with pytest.raises(DomainError):
        detect_minima(t, np.sin(t), w)


def test_odd_window_is_plain_boxcar():
    y = np.random.default_rng(1).normal(size=200)
    got, off = smooth(y, 7.0)
    assert off == 3
    np.testing.assert_allclose(got, np.convolve(y, np.ones(7) / 7, mode="valid"), atol=1e-14)


def test_fractional_window_interpolates():
    y = np.random.default_rng(2).normal(size=200)
    lo, _ = smooth(y, 7.0)
    hi, _ = smooth(y, 9.0)
    mid, off = smooth(y, 8.0)
    assert off == 4
    # a width of 8 weights the outer pair by 1/2
    kernel = np.array([0.5, 1, 1, 1, 1, 1, 1, 1, 0.5]) / 8.0
    np.testing.assert_allclose(mid, np.convolve(y, kernel, mode="valid"), atol=1e-14)
    assert lo.size == mid.size + 2 and hi.size == mid.size


def test_matching_examples():
    fr = fractional_revival_times(1.0, 4)
    got = match_fractions([(0.501, 0.0), (0.30, 0.0), (0.995, 0.0)], fr, 0.02)
    assert [m.fraction for m in got] == [(1, 2), None, (1, 1)]
    assert got[0].fraction_label == "1/2" and got[1].fraction_label is None


def test_matching_tie_goes_to_smaller_denominator():
    fr = [(1, 4, 0.25), (1, 3, 1 / 3)]
    mid = 0.5 * (0.25 + 1 / 3)
    got = match_fractions([(mid, 0.0)], fr, 0.05)
    assert got[0].fraction == (1, 3)


def test_matching_window_must_be_positive():
    with pytest.raises(DomainError):
        match_fractions([], fractional_revival_times(1.0, 4), 0.0)


def test_columns_order():
    cols = timeline_columns([2 / 3])
    assert cols == [
        "t", "S_rho", "S_gamma", "shannon_sum",
        "R_rho_a0.6667", "R_gamma_b2.0000", "renyi_sum_a0.6667",
        "N_rho_a0.6667", "N_gamma_a0.6667", "var_rho", "var_gamma",
        "prod_Nrho_vargamma_a0.6667", "prod_Ngamma_varrho_a0.6667",
        "prod_Nrho_Ngamma_a0.6667", "stddev_product", "autocorr_abs"]


def test_two_sample_scan(basis, grid):
    tl = scan(basis, grid, 0.0, 10.0, 2, [0.8])
    assert tl.times.tolist() == [0.0, 10.0]
    assert all(v == [] for v in tl.analyze().values())


@pytest.mark.parametrize("kwargs", [
    dict(t_start=5.0, t_end=5.0, num_samples=10), dict(t_start=0.0, t_end=5.0, num_samples=1),
    dict(t_start=0.0, t_end=5.0, num_samples=10, threads=0),
    dict(t_start=0.0, t_end=5.0, num_samples=10, alphas=[0.5]),
])
def test_scan_arguments(basis, grid, kwargs):
    kwargs.setdefault("alphas", [0.8])
    with pytest.raises(DomainError):
        scan(basis, grid, **kwargs)


@pytest.fixture(scope="module")
def short_scan(basis, grid):
    return scan(basis, grid, 0.0, 60.0, 601, [2 / 3], threads=1)


def test_stddev_minima_follow_bounces(short_scan):
    found = detect_minima(short_scan.times, short_scan.column("stddev_product"), 1.0)
    gaps = np.diff([m[0] for m in found])
    assert gaps.size >= 1
    np.testing.assert_allclose(gaps, 20.0, rtol=0.05)


def test_threads_do_not_change_results(basis, grid, short_scan):
    other = scan(basis, grid, 0.0, 60.0, 601, [2 / 3], threads=2)
    assert np.array_equal(other.table(), short_scan.table())


def test_default_timeline_columns(timeline, scan_config):
    assert timeline.times.size == scan_config.scan.num_samples
    assert timeline.times[0] == 0.0
    assert timeline.times[-1] == pytest.approx(1.05 * timeline.t_rev)
    assert np.all(np.isfinite(timeline.table()))


@pytest.mark.parametrize("name", ["renyi_sum_a0.6667", "renyi_sum_a0.8000", "shannon_sum"])
def test_entropy_sums_dip_at_fractional_revivals(timeline, name):
    labels = {m.fraction for m in timeline.minima[name]}
    assert {(1, 4), (1, 2), (1, 1)} <= labels


def test_entropic_diagnostics_resolve_more_fractions(timeline):
    def distinct(name):
        return {m.fraction for m in timeline.minima[name] if m.fraction is not None}

    ref = len(distinct("stddev_product"))
    for name in ("renyi_sum_a0.6667", "renyi_sum_a0.8000", "shannon_sum"):
        assert len(distinct(name)) >= ref


def test_matched_minima_are_consistent(timeline):
    window = 0.02 * timeline.t_rev
    for name, minima in timeline.minima.items():
        assert all(isinstance(m, AnnotatedMinimum) for m in minima)
        assert [m.t for m in minima] == sorted(m.t for m in minima)
        for m in minima:
            if m.fraction is not None:
                p, q = m.fraction
                assert math.gcd(p, q) == 1 and q <= 4
                assert abs(m.t - p / q * timeline.t_rev) <= window
