import math

import numpy as np
import pytest
from scipy.special import gammaln

from betaedge.correlation import (
    bulk_bound_profile,
    estimate_correlation,
    estimate_interaction_term,
    jensen_quantity,
    log_prefactor,
    split_bound_margin,
    tail_bound_profile,
    uniform_bound_probe,
    uniform_bound_theta,
)
from betaedge.ensemble import EnsembleParams, RngStream
from betaedge.scaling import DeltaSchedule, compute_scaling, normal_upper_tail

DELTA1 = DeltaSchedule.constant(1.0)


def iid_correlation_oracle(n, x, sc, mode):
    """Exact k-point correlation of n i.i.d. N(0,1) points after rescaling,
    derived directly from the product density (no partition functions):
    R_k = n!/(n-k)! prod_i pdf(b + x_i/a) / (a * w(x_i)) with w the
    reference-measure density."""
    x = np.asarray(x, dtype=float)
    k = x.size
    log_r = float(gammaln(n + 1) - gammaln(n - k + 1))
    phi = sc.b_n + x / sc.a_n
    log_r += float(np.sum(-0.5 * phi**2 - 0.5 * math.log(2 * math.pi) - math.log(sc.a_n)))
    if mode == "exp_measure":
        log_r += float(np.sum(x)) / sc.delta_n
    return log_r


def test_prefactor_single_point_closed_form():
    n = 10**4
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 0.0)
    lp = log_prefactor(n, 1, [0.0], sc, params, "lebesgue")
    expected = math.log(n) - math.log(sc.a_n) - sc.b_n**2 / 2 - 0.5 * math.log(2 * math.pi)
    assert abs(lp - expected) < 1e-9  # lgamma(n+1) - lgamma(n) carries ~1e-11 rounding


@pytest.mark.parametrize("mode", ["exp_measure", "lebesgue"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_prefactor_matches_iid_oracle_at_beta_zero(mode, k):
    n = 10**5
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 0.0)
    rng = np.random.default_rng(31)
    x = np.sort(rng.uniform(-2, 3, size=k))
    lp = log_prefactor(n, k, x, sc, params, mode)
    assert abs(lp - iid_correlation_oracle(n, x, sc, mode)) < 1e-10


def test_prefactor_cancellation_trend():
    # at beta = 0, delta = 1, x = 0 the log prefactor climbs to 0 from below
    vals = []
    for e in (3, 4, 5, 6, 7):
        n = 10**e
        sc = compute_scaling(n, DELTA1)
        vals.append(log_prefactor(n, 1, [0.0], sc, EnsembleParams(n, 0.0)))
    assert all(v < 0.0 for v in vals)
    assert all(b > a for a, b in zip(vals[:-1], vals[1:]))


def test_prefactor_coincident_points_flag():
    n = 1000
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 1e-4)
    lp = log_prefactor(n, 2, [0.0, 0.0], sc, params)
    assert lp == -math.inf
    est = estimate_correlation(n, 2, [0.0, 0.0], sc, params, rng=RngStream(1, 0))
    assert est.value == 0.0 and est.degenerate


def test_interaction_exact_short_circuits():
    n = 500
    sc = compute_scaling(n, DELTA1)
    assert estimate_interaction_term(n, 1, [0.0], sc, EnsembleParams(n, 0.0), 200,
                                     RngStream(0, 0)) == (1.0, 0.0)
    assert estimate_interaction_term(n, 0, [], sc, EnsembleParams(n, 1e-5), 200,
                                     RngStream(0, 0)) == (1.0, 0.0)


def test_interaction_rejects_small_sample_budget():
    n = 200
    sc = compute_scaling(n, DELTA1)
    with pytest.raises(ValueError):
        estimate_interaction_term(n, 1, [0.0], sc, EnsembleParams(n, 1e-5), 50,
                                  RngStream(0, 0))


def test_interaction_seed_consistency():
    n, m = 200, 500
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 1e-5)
    m1, s1 = estimate_interaction_term(n, 1, [0.0], sc, params, m, RngStream(50, 0))
    m2, s2 = estimate_interaction_term(n, 1, [0.0], sc, params, m, RngStream(51, 0))
    assert abs(m1 - m2) <= 3.0 * math.hypot(s1, s2)
    assert abs(m1 - 1.0) < 0.01  # interaction is a hair from 1 at these n beta


def test_correlation_beta_zero_matches_iid_oracle():
    n = 10**6
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 0.0)
    est = estimate_correlation(n, 2, [-1.0, 1.0], sc, params, "exp_measure")
    oracle = math.exp(iid_correlation_oracle(n, np.array([-1.0, 1.0]), sc, "exp_measure"))
    assert est.std_error == 0.0
    # the log-Z difference cancels ~1e6-magnitude terms, leaving ~1e-10 noise
    assert abs(est.value - oracle) < 1e-9 * oracle


def test_mode_identity():
    n = 10**4
    sc = compute_scaling(n, DeltaSchedule.constant(1.7))
    params = EnsembleParams(n, 1e-6)
    x = np.array([-0.3, 0.9, 2.0])
    gap = (log_prefactor(n, 3, x, sc, params, "exp_measure")
           - log_prefactor(n, 3, x, sc, params, "lebesgue"))
    assert abs(gap - float(np.sum(x)) / sc.delta_n) < 1e-12


def test_correlation_estimate_reproducible():
    n = 300
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 1e-5)
    a = estimate_correlation(n, 1, [0.0], sc, params, m_samples=120, rng=RngStream(9, 2))
    b = estimate_correlation(n, 1, [0.0], sc, params, m_samples=120, rng=RngStream(9, 2))
    assert a.value == b.value and a.std_error == b.std_error


def test_uniform_bound_probe_beta_zero():
    n = 10**5
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 0.0)
    rep = uniform_bound_probe(n, 1.0, [1, 2], params, sc, rng=RngStream(60, 0))
    assert rep.theta > math.e**2
    assert rep.passed and all(not e["skipped"] for e in rep.entries)


def test_uniform_bound_theta_monotone():
    sc = compute_scaling(1000, DELTA1)
    thetas = [uniform_bound_theta(K, sc) for K in (1.0, 2.0, 3.0, 5.0)]
    assert all(b > a for a, b in zip(thetas[:-1], thetas[1:]))


def test_uniform_bound_probe_budget_skip():
    n = 2000
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 1e-6)
    rep = uniform_bound_probe(n, 1.0, [n - 1], params, sc, m_samples=200,
                              rng=RngStream(61, 0), max_cost=1.0)
    assert rep.entries[0]["skipped"]
    assert "budget" in rep.entries[0]["reason"]


@pytest.mark.slow
def test_tail_profile_gaussian_max_oracle():
    # max of n iid Gaussians: upper-tail probabilities track n Phibar(b(1+t))
    n, m = 10**4, 100_000
    sc = compute_scaling(n, DELTA1)
    params = EnsembleParams(n, 0.0)
    t_grid = np.array([0.1, 0.15, 0.2, 0.25, 0.3])
    rep = tail_bound_profile(n, params, sc, 1.0, t_grid, m, RngStream(70, 0))
    oracle = n * normal_upper_tail(sc.b_n * (1.0 + t_grid))
    slope = np.polyfit(np.log(oracle), np.log(rep.upper_probs), 1)[0]
    assert 0.8 <= slope <= 1.2
    assert 0.8 <= rep.slope_ratio <= 1.2
    assert np.all(np.diff(rep.upper_probs) <= 0)


def test_tail_profile_empty_tail_is_trivially_bounded():
    n, m = 100, 300
    sc = compute_scaling(n, DELTA1)
    rep = tail_bound_profile(n, EnsembleParams(n, 0.0), sc, 1.0,
                             [0.1, 50.0], m, RngStream(71, 0))
    assert rep.probs[-1] == 0.0
    assert any("no exceedances" in note for note in rep.notes)


def test_tail_profile_validation():
    sc = compute_scaling(100, DELTA1)
    with pytest.raises(ValueError):
        tail_bound_profile(100, EnsembleParams(100, 0.0), sc, 1.0, [-0.1], 100,
                           RngStream(0, 0))


def test_bulk_profile_single_gaussian_slope():
    # P(|N| <= y) ~ y sqrt(2/pi) for small y
    y = np.array([0.02, 0.04, 0.06, 0.08, 0.1])
    rep = bulk_bound_profile(1, EnsembleParams(1, 0.0), 0.0, y, 1_000_000,
                             RngStream(72, 0))
    assert abs(rep.slope - math.sqrt(2 / math.pi)) < 0.05 * math.sqrt(2 / math.pi)
    assert rep.r_squared > 0.99


def test_bulk_profile_doubling():
    y = np.array([0.05, 0.1])
    rep = bulk_bound_profile(1, EnsembleParams(1, 0.0), 0.0, y, 1_000_000,
                             RngStream(73, 0))
    ratio = rep.probs[1] / rep.probs[0]
    assert 1.8 <= ratio <= 2.2
    assert np.all(np.diff(rep.probs) >= 0.0)


def test_bulk_profile_validation():
    with pytest.raises(ValueError):
        bulk_bound_profile(1, EnsembleParams(1, 0.0), 0.0, [1.5], 100, RngStream(0, 0))


def test_jensen_quantity_beta_zero_and_sign():
    n = 300
    sc = compute_scaling(n, DELTA1)
    assert jensen_quantity(n, EnsembleParams(n, 0.0), sc, 0.0, 100, RngStream(0, 0)) == (0.0, 0.0)
    mean, se = jensen_quantity(n, EnsembleParams(n, 1e-5), sc, 0.0, 100, RngStream(80, 0))
    assert mean >= 0.0 and se >= 0.0


def test_jensen_quantity_decreasing_trend():
    means = []
    for n in (200, 1000, 5000):
        beta = 1.0 / (n * math.log(n) ** 2)
        sc = compute_scaling(n, DELTA1)
        mean, _ = jensen_quantity(n, EnsembleParams(n, beta), sc, 0.0, 100, RngStream(81, n))
        means.append(mean)
    assert means[0] > means[1] > means[2] > 0.0


def test_split_bound_margin_property():
    rng = np.random.default_rng(90)
    a = rng.standard_normal(1_000_000) * 4.0
    b = rng.standard_normal(1_000_000) * 4.0
    beta = rng.uniform(1e-9, 1.0, size=1_000_000)
    assert np.all(split_bound_margin(a, b, beta) >= 0.0)
