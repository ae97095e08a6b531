import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from percolab.estimators import (
    EstimateCI,
    crossing_probability,
    decay_fit,
    estimate_magnetization,
    estimate_psi,
    estimate_psi_on_ball,
    meanfield_verdict,
    psi_curve,
    tail_bound_verdict,
    wilson_interval,
    z_value,
)
@settings(max_examples=100, deadline=None)
@given(st.integers(0, 500), st.integers(1, 500))
def test_wilson_interval_bounds(k, n):
    if k > n:
        k = n
    lo, hi = wilson_interval(k, n)
    assert 0.0 <= lo <= k / n <= hi <= 1.0


def test_wilson_interval_edges():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and hi < 0.15
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0) and lo > 0.85


def test_estimate_psi_trivial(z1, z2):
    est = estimate_psi(z2, 0.37, 1, 200, rng_seed=1)
    assert est.point == 1.0 and est.hi == pytest.approx(1.0)
    est = estimate_psi(z2, 0.0, 2, 200, rng_seed=1)
    assert est.point == 0.0 and est.lo == 0.0


def test_estimate_psi_z1_exact_value(z1):
    # P(|cluster| >= 2) = 1 - (1-p)^2 = 3/4 on the line at p = 1/2
    est = estimate_psi(z1, 0.5, 2, 100_000, rng_seed=7)
    assert est.lo <= 0.75 <= est.hi


def test_psi_monotone_in_n_and_p(z2):
    curve = psi_curve(z2, 0.4, [2, 5, 10, 20], 4000, rng_seed=5)
    points = [curve[n].point for n in (2, 5, 10, 20)]
    assert points == sorted(points, reverse=True)
    # shared replicate keys couple the runs: monotone in p pointwise
    lo = psi_curve(z2, 0.35, [10], 4000, rng_seed=5)[10]
    hi = psi_curve(z2, 0.45, [10], 4000, rng_seed=5)[10]
    assert lo.point <= hi.point


def test_magnetization_p_zero(z2):
    h = 0.8
    mag = estimate_magnetization(z2, 0.0, h, cap=50, samples=500, rng_seed=3)
    truth = 1 - math.exp(-h)
    assert mag.lower.point == pytest.approx(truth, abs=1e-12)
    assert mag.upper.point == pytest.approx(truth, abs=1e-12)
    assert mag.lower.truncated_fraction == 0.0


def test_magnetization_large_h_bounds(z2):
    mag = estimate_magnetization(z2, 0.3, 20.0, cap=100, samples=300, rng_seed=9)
    assert 1 - math.exp(-20.0) <= mag.lower.point <= 1.0
    assert mag.lower.point <= mag.upper.point


def test_magnetization_gap_bound(z2):
    # upper - lower == truncated_fraction * e^{-h * effective cap}, exactly
    mag = estimate_magnetization(z2, 0.7, 0.05, cap=500, samples=300, rng_seed=4)
    gap = mag.upper.point - mag.lower.point
    bound = mag.lower.truncated_fraction * math.exp(-0.05 * mag.effective_cap)
    assert gap == pytest.approx(bound, abs=1e-12)
    assert mag.effective_cap <= 500


def test_magnetization_monotone_in_p_and_h(z2):
    # common random numbers: the coupled estimates are ordered pointwise
    m1 = estimate_magnetization(z2, 0.30, 0.2, 200, 400, rng_seed=8)
    m2 = estimate_magnetization(z2, 0.45, 0.2, 200, 400, rng_seed=8)
    assert m1.lower.point <= m2.lower.point + 1e-12
    m3 = estimate_magnetization(z2, 0.30, 0.4, 200, 400, rng_seed=8)
    assert m1.lower.point <= m3.lower.point + 1e-12


def test_decay_fit_exact_exponential():
    table = [(n, EstimateCI(0.8 * math.exp(-0.1 * n),
                            0.8 * math.exp(-0.1 * n),
                            0.8 * math.exp(-0.1 * n), 1000))
             for n in range(10, 80, 10)]
    fit = decay_fit(table)
    assert fit.rate == pytest.approx(0.1, abs=1e-9)
    assert fit.prefactor == pytest.approx(0.8, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-9)


def test_decay_fit_constant_input():
    table = [(n, EstimateCI(0.5, 0.49, 0.51, 1000)) for n in range(10, 80, 10)]
    fit = decay_fit(table)
    assert fit.rate == pytest.approx(0.0, abs=1e-12)


def test_decay_fit_needs_five_points():
    table = [(n, EstimateCI(0.5, 0.4, 0.6, 100)) for n in (1, 2, 3)]
    with pytest.raises(ValueError):
        decay_fit(table)
    zeros = [(n, EstimateCI(0.0, 0.0, 0.1, 100)) for n in range(10)]
    with pytest.raises(ValueError):
        decay_fit(zeros)


def test_tail_bound_verdict_never_fails_on_line(z1):
    # the line is subcritical at every p < 1, and n = 1 exercises the
    # boundary case where the inequality reduces to m >= 1 - e^{-h}
    report = tail_bound_verdict(z1, 0.3, 0.3, [1, 2, 5, 10], 2000, rng_seed=6,
                                cap=1000)
    assert not report.failed
    assert report.q <= 0.3
    assert report.rows[0]["n"] == 1
    assert report.magnetization.upper.hi >= 1 - math.exp(-0.3) - 0.05


def test_tail_bound_tiny_h_near_identity(z2):
    # h -> 0: the right side approaches psi_n(p) and q approaches p
    report = tail_bound_verdict(z2, 0.25, 0.01, [2, 5, 10], 2000, rng_seed=6,
                                cap=5000)
    assert not report.failed
    assert report.q >= 0.2


def test_meanfield_requires_z2(z1):
    with pytest.raises(ValueError):
        meanfield_verdict(z1, [0.5], 0.05, 100, 50, rng_seed=1)


def test_meanfield_trivial_endpoints(z2):
    rows = meanfield_verdict(z2, [0.0, 1.0], 0.05, cap=2000, samples=60,
                             rng_seed=2)
    assert all(r["verdict"] == "PASS" for r in rows)
    assert rows[0]["q_upper"] == 0.0
    assert rows[1]["q_upper"] < 0.05  # p = 1: magnetization is essentially 1


def test_crossing_probe_at_reference_threshold():
    # (n+1) x n box crosses the long way with probability exactly 1/2 at p = 1/2
    est = crossing_probability(0.5, 13, 12, 600, rng_seed=11)
    assert est.lo <= 0.5 <= est.hi


def test_estimate_psi_on_ball_single_edge(single_edge_ball):
    est = estimate_psi_on_ball(single_edge_ball, 0.3, 2, 2000, rng_seed=3)
    assert est.lo <= 0.3 <= est.hi


def test_z_value_matches_gaussian():
    assert z_value(0.999) == pytest.approx(3.2905267314919255, abs=1e-9)
