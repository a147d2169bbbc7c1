import math

import numpy as np
import pytest

from betaedge.partition import (
    EULER_GAMMA,
    PartitionQuery,
    QuadratureSettings,
    check_confinement_ratio_bound,
    check_uniform_ratio_bounds,
    contiguity_log_ratio,
    log_partition,
    log_partition_factorial,
    log_partition_oracle,
    ratio_perturbed_alpha,
    ratio_shift_k,
)
from betaedge.scaling import DeltaSchedule, compute_scaling


def b_n_of(n):
    return compute_scaling(n, DeltaSchedule.constant(1.0)).b_n


def test_beta_zero_closed_form():
    # Z(n, alpha, 0) = (2 pi / alpha)^{n/2}
    q = PartitionQuery(3, 2.0, 0.0)
    assert abs(log_partition(q) - 1.5 * math.log(math.pi)) < 1e-14


def test_two_particle_beta_two_value():
    # int int e^{-(x^2+y^2)/2} (x-y)^2 = 4 pi
    q = PartitionQuery(2, 1.0, 2.0)
    assert abs(log_partition(q) - math.log(4 * math.pi)) < 1e-13
    est = log_partition_oracle(q)
    assert abs(est.log_value - math.log(4 * math.pi)) < 1e-6


def test_product_forms_agree():
    # factorial and shifted-Gamma forms are the same function
    rng = np.random.default_rng(20)
    for _ in range(100):
        n = int(rng.integers(1, 51))
        beta = float(rng.uniform(1e-3, 2.0))
        alpha = float(rng.uniform(0.5, 2.0))
        q = PartitionQuery(n, alpha, beta)
        assert abs(log_partition(q) - log_partition_factorial(q)) < 1e-12


def test_factorial_form_needs_positive_beta():
    with pytest.raises(ValueError):
        log_partition_factorial(PartitionQuery(3, 1.0, 0.0))


def test_oracle_single_particle():
    for alpha in (0.5, 1.0, 2.0):
        est = log_partition_oracle(PartitionQuery(1, alpha, 1.0))
        assert abs(est.log_value - 0.5 * math.log(2 * math.pi / alpha)) < 1e-8


def test_oracle_agrees_with_closed_form_n3():
    q = PartitionQuery(3, 1.0, 1.0)
    est = log_partition_oracle(q)
    assert abs(est.log_value - log_partition(q)) < 1e-5


def test_oracle_monte_carlo_path():
    q = PartitionQuery(5, 1.0, 0.8)
    est = log_partition_oracle(q, QuadratureSettings(mc_samples=400_000, mc_seed=3))
    assert abs(est.log_value - log_partition(q)) < 5.0 * max(est.error, 1e-4)


def test_oracle_domain_limits():
    with pytest.raises(ValueError):
        log_partition_oracle(PartitionQuery(5, 1.0, 1.0), QuadratureSettings(method="quadrature"))
    with pytest.raises(ValueError):
        log_partition_oracle(PartitionQuery(9, 1.0, 1.0))


def test_query_validation():
    with pytest.raises(ValueError):
        PartitionQuery(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        PartitionQuery(3, -1.0, 1.0)
    with pytest.raises(ValueError):
        PartitionQuery(3, 1.0, -0.5)


def test_monotone_in_beta_on_grid():
    for n in (2, 5, 20):
        vals = [log_partition(PartitionQuery(n, 1.0, b)) for b in (0.5, 1.0, 1.5, 2.0)]
        assert all(y > x for x, y in zip(vals[:-1], vals[1:]))


def test_shift_ratio_identity_and_residual():
    assert ratio_shift_k(50, 0, 1.0, 0.1).log_ratio == 0.0
    r = ratio_shift_k(10**5, 2, 1.0, 1e-7)
    assert abs(r.residual) < 1e-2
    # beta = 0: the ratio is exactly (2 pi)^{-k/2}
    r0 = ratio_shift_k(100, 3, 1.0, 0.0)
    assert abs(r0.residual) < 1e-12


def test_shift_residual_decreasing_along_n():
    res = []
    for n in (10**3, 10**4, 10**5):
        beta = 1.0 / (n * math.log(n) ** 2)
        res.append(abs(ratio_shift_k(n, 2, 1.0, beta).residual))
    assert res[0] > res[1] > res[2]


def test_shift_ratio_flags_large_nbeta():
    assert ratio_shift_k(1000, 1, 1.0, 0.01).flag is not None
    assert ratio_shift_k(1000, 1, 1.0, 1e-7).flag is None


def test_perturbed_alpha_ratio():
    # beta = 0: no perturbation at all
    assert ratio_perturbed_alpha(100, 2, 1.0, 0.0, 3.0) == 0.0
    n = 10**4
    lr = ratio_perturbed_alpha(n, 1, 1.0, 1e-6, b_n_of(n))
    assert 0.0 < lr < 1e-3  # smaller alpha means larger Z
    with pytest.raises(ValueError):
        ratio_perturbed_alpha(100, 1, 1e-12, 1.0, 0.1)


def test_confinement_bound_on_grid():
    for n in (100, 1000, 10_000):
        b = b_n_of(n)
        for beta in (0.0, 1.0 / (n * math.log(n) ** 2), 1.0 / (2 * n * math.log(n))):
            chk = check_confinement_ratio_bound(n, 1.0, beta, b)
            assert chk.satisfied, (n, beta, chk.margin)


def test_confinement_bound_beta_zero_is_equality():
    chk = check_confinement_ratio_bound(1000, 1.0, 0.0, b_n_of(1000))
    assert abs(chk.margin) < 1e-9


def test_confinement_literal_constant_fails_for_positive_beta():
    # regression anchor: without the exact Gamma-ratio factor the stated
    # bound is violated at finite n (the asymptotic constant alone is short
    # by ~ exp(gamma n beta / 2))
    n = 1000
    beta = 1.0 / (n * math.log(n) ** 2)
    chk = check_confinement_ratio_bound(n, 1.0, beta, b_n_of(n))
    assert chk.notes["margin_literal"] < 0.0
    assert chk.satisfied


def test_confinement_constant_converges_to_one():
    full, growth = [], []
    for n in (100, 1000, 10_000):
        beta = 1.0 / (n * math.log(n) ** 2)
        chk = check_confinement_ratio_bound(n, 1.0, beta, b_n_of(n))
        full.append(abs(chk.notes["log_c_n"]))
        growth.append(abs(chk.notes["log_c_growth"]))
    assert full[0] > full[1] > full[2]
    assert growth[0] > growth[1] > growth[2]
    assert growth[-1] < 1e-3  # the 4^x part alone is already this close to 1


def test_confinement_bound_precondition_errors():
    with pytest.raises(ValueError):
        check_confinement_ratio_bound(100, 1e-6, 1.0, 0.01)


def test_uniform_bounds_on_grid():
    for n in (100, 1000):
        beta = 1.0 / (n * math.log(n) ** 2)
        b = b_n_of(n)
        for k in (1, n // 2, n - 1):
            first, second = check_uniform_ratio_bounds(n, k, beta, b)
            assert first.satisfied and second.satisfied


def test_uniform_bounds_beta_zero_margins():
    n, b = 200, b_n_of(200)
    first, second = check_uniform_ratio_bounds(n, 3, 0.0, b)
    assert abs(first.margin - 3 * math.log(4.0)) < 1e-12
    one, two = check_uniform_ratio_bounds(n, 1, 0.0, b)
    assert abs(two.margin - math.log(2.0)) < 1e-12


def test_uniform_bounds_validation():
    with pytest.raises(ValueError):
        check_uniform_ratio_bounds(100, 100, 0.0, 3.0)
    with pytest.raises(ValueError):
        check_uniform_ratio_bounds(100, 1, 1000.0, 1.0)


def test_contiguity_identical_betas():
    r = contiguity_log_ratio(500, 1e-4, 1e-4)
    assert r.exact == 0.0 and r.predicted == 0.0


def test_contiguity_transition_at_n2000():
    n = 2000
    strong = contiguity_log_ratio(n, 0.0, n**-1.5)
    assert 0.9 <= strong.exact / strong.predicted <= 1.1
    weak = contiguity_log_ratio(n, 0.0, n**-2.5)
    assert abs(weak.exact) < 0.05


def test_contiguity_constant_is_quarter_gamma():
    # numerical derivative of the exact log-ratio fixes the n^2 coefficient:
    # gamma/4, not gamma/8 (sum_{i<=n} i = n(n+1)/2 carries a single 1/2)
    n = 4000
    bp = 1e-9  # deep in the linear regime, n beta' = 4e-6
    r = contiguity_log_ratio(n, 0.0, bp)
    quarter = EULER_GAMMA / 4.0 * n * n * bp
    eighth = EULER_GAMMA / 8.0 * n * n * bp
    assert abs(r.exact / quarter - 1.0) < 0.01
    assert r.exact / eighth > 1.9
