"""Correlation functions of the rescaled edge process and their probes.

The k-point correlation of the pattern a_n (lambda_i - b_n) factorizes into a
closed-form prefactor (combinatorics, Vandermonde of the probe points,
partition-function ratio, Gaussian weight at the probe locations) times an
interaction term

    E exp( beta sum_i sum_j log |1 + x_i/(a_n b_n) - z_j/b_n| )

over a size n-k ensemble sample.  The prefactor is evaluated exactly in log
space; the interaction term by plain Monte Carlo (at the tested n*beta the
integrand is so close to 1 that no variance reduction is warranted).  The
remaining routines estimate the tail/bulk single-particle bounds and the
uniform upper bound used to certify the Poisson limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from betaedge.ensemble import EnsembleParams, RngStream, sample_gaussian_iid, sample_tridiagonal
from betaedge.partition import PartitionQuery, log_partition
from betaedge.scaling import ScalingConstants, normal_upper_tail
from betaedge.tridiag import full_spectrum, top_k_eigenvalues

__all__ = [
    "MODES",
    "CorrelationEstimate",
    "log_prefactor",
    "estimate_interaction_term",
    "estimate_correlation",
    "uniform_bound_theta",
    "uniform_bound_probe",
    "tail_bound_profile",
    "bulk_bound_profile",
    "jensen_quantity",
    "split_bound_margin",
]

MODES = ("exp_measure", "lebesgue")


@dataclass(frozen=True)
class CorrelationEstimate:
    """Monte-Carlo estimate of the k-point correlation at probe points x."""

    k: int
    x: np.ndarray
    mode: str
    value: float
    std_error: float
    m_samples: int
    degenerate: bool = False  # coincident probe points with beta > 0


def _validate(n, k, x, sc, params, mode=None):
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if params.n != n or sc.n != n:
        raise ValueError(
            f"inconsistent sizes: n={n}, params.n={params.n}, sc.n={sc.n}"
        )
    if mode is not None and mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (k,):
        raise ValueError(f"x must have shape ({k},), got {x.shape}")
    return x


def log_prefactor(
    n: int,
    k: int,
    x,
    sc: ScalingConstants,
    params: EnsembleParams,
    mode: str = "exp_measure",
) -> float:
    """Log of every closed-form factor of the k-point correlation.

    Returns -inf (flagged, not raised) when probe points coincide and
    beta > 0: the Vandermonde of the probes vanishes.
    """
    x = _validate(n, k, x, sc, params, mode)
    beta, alpha = params.beta, params.alpha
    a_n, b_n, delta = sc.a_n, sc.b_n, sc.delta_n

    out = float(gammaln(n + 1.0) - gammaln(n - k + 1.0))
    out -= (k + beta * k * (k - 1) / 2.0) * math.log(a_n)
    if k > 1 and beta > 0.0:
        iu, ju = np.triu_indices(k, 1)
        gaps = np.abs(x[iu] - x[ju])
        if np.any(gaps == 0.0):
            return -math.inf
        out += beta * float(np.sum(np.log(gaps)))
    out += log_partition(PartitionQuery(n - k, alpha, beta)) - log_partition(
        PartitionQuery(n, alpha, beta)
    )
    out -= alpha / 2.0 * float(np.sum((x / a_n + b_n) ** 2))
    if mode == "exp_measure":
        out += float(np.sum(x)) / delta
    out += k * beta * (n - k) * math.log(b_n)
    return out


def estimate_interaction_term(
    n: int,
    k: int,
    x,
    sc: ScalingConstants,
    params: EnsembleParams,
    m_samples: int,
    rng: RngStream,
) -> tuple[float, float]:
    """Sample mean and standard error of the probe/bulk interaction factor.

    Averages exp(beta sum_ij log |1 + x_i/(a_n b_n) - z_j/b_n|) over
    ``m_samples`` spectra of size n-k.  Exact short-circuits: beta = 0 or
    k = 0 give (1, 0) without sampling.
    """
    if k == 0 or params.beta == 0.0:
        return 1.0, 0.0
    x = _validate(n, k, x, sc, params)
    if m_samples < 100:
        raise ValueError(f"m_samples must be >= 100, got {m_samples}")
    beta, alpha = params.beta, params.alpha
    m_size = n - k
    shifts = 1.0 + x / (sc.a_n * sc.b_n)  # (k,)
    vals = np.empty(m_samples)
    sub = EnsembleParams(m_size, beta, alpha)
    for s in range(m_samples):
        z = full_spectrum(sample_tridiagonal(sub, rng)).values
        w = shifts[:, None] - z[None, :] / sc.b_n
        vals[s] = math.exp(beta * float(np.sum(np.log(np.abs(w)))))
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(m_samples)) if m_samples > 1 else 0.0
    return mean, se


def estimate_correlation(
    n: int,
    k: int,
    x,
    sc: ScalingConstants,
    params: EnsembleParams,
    mode: str = "exp_measure",
    m_samples: int = 200,
    rng: RngStream | None = None,
) -> CorrelationEstimate:
    """k-point correlation estimate: exp(log prefactor) * interaction mean."""
    x = _validate(n, k, x, sc, params, mode)
    lp = log_prefactor(n, k, x, sc, params, mode)
    if lp == -math.inf:
        return CorrelationEstimate(k, x, mode, 0.0, 0.0, 0, degenerate=True)
    if params.beta == 0.0:
        return CorrelationEstimate(k, x, mode, math.exp(lp), 0.0, 0)
    if rng is None:
        raise ValueError("rng is required when beta > 0")
    mean, se = estimate_interaction_term(n, k, x, sc, params, m_samples, rng)
    pref = math.exp(lp)
    return CorrelationEstimate(k, x, mode, pref * mean, pref * se, m_samples)


def uniform_bound_theta(K_bound: float, sc: ScalingConstants) -> float:
    """The explicit per-point constant Theta_K of the uniform bound
    R_k <= Theta_K^k on [-K, K]^k:

        Theta_K = exp(9/8 + 6 log 2 + c_delta M + (M^2 + 2M)/8 + log M),

    M = max(1, K), c_delta an upper bound for 1/delta_n (here 1/delta at the
    evaluated n).  Increasing in K."""
    M = max(1.0, float(K_bound))
    c_delta = 1.0 / sc.delta_n
    return math.exp(9.0 / 8.0 + 6.0 * math.log(2.0) + c_delta * M + (M * M + 2.0 * M) / 8.0 + math.log(M))


@dataclass(frozen=True)
class UniformBoundReport:
    theta: float
    K_bound: float
    entries: list = field(default_factory=list)
    passed: bool = True


def uniform_bound_probe(
    n: int,
    K_bound: float,
    k_list,
    params: EnsembleParams,
    sc: ScalingConstants,
    mode: str = "exp_measure",
    m_samples: int = 200,
    rng: RngStream | None = None,
    max_cost: float = 2e10,
) -> UniformBoundReport:
    """Check estimated correlations against Theta_K^k at random probe grids.

    Each k in ``k_list`` draws x ~ Uniform[-K, K]^k and requires
    value <= Theta_K^k within 3 standard errors.  Entries whose Monte Carlo
    cost m_samples * (n-k)^2 exceeds ``max_cost`` are skipped with a recorded
    reason rather than run.
    """
    if rng is None:
        rng = RngStream(0, 0)
    theta = uniform_bound_theta(K_bound, sc)
    entries = []
    passed = True
    for k in k_list:
        cost = float(m_samples) * float(n - k) ** 2
        if params.beta > 0.0 and cost > max_cost:
            entries.append(
                {"k": int(k), "skipped": True,
                 "reason": f"estimated cost {cost:.3g} exceeds budget {max_cost:.3g}"}
            )
            continue
        x = rng.generator.uniform(-K_bound, K_bound, size=int(k))
        est = estimate_correlation(n, int(k), x, sc, params, mode, m_samples, rng)
        bound = theta ** int(k)
        ok = est.value - 3.0 * est.std_error <= bound
        passed = passed and ok
        entries.append(
            {"k": int(k), "skipped": False, "value": est.value,
             "std_error": est.std_error, "bound": bound, "ok": bool(ok)}
        )
    return UniformBoundReport(theta=theta, K_bound=K_bound, entries=entries, passed=passed)


def _sample_maxima(params: EnsembleParams, m_samples: int, rng: RngStream) -> np.ndarray:
    """Largest particle of ``m_samples`` independent ensemble draws."""
    out = np.empty(m_samples)
    if params.beta == 0.0:
        for s in range(m_samples):
            out[s] = float(np.max(sample_gaussian_iid(params.n, params.alpha, rng)))
    else:
        for s in range(m_samples):
            T = sample_tridiagonal(params, rng)
            out[s] = float(top_k_eigenvalues(T, 1).values[0])
    return out


@dataclass(frozen=True)
class TailProfileReport:
    t_grid: np.ndarray
    probs: np.ndarray          # two-sided P(|u - max/b_n| >= t)
    upper_probs: np.ndarray    # P(max/b_n - u >= t)
    lower_probs: np.ndarray
    exponents: np.ndarray      # predicted Gaussian decay exponents
    slope_ratio: float
    m_samples: int
    notes: list = field(default_factory=list)


def tail_bound_profile(
    n: int,
    params: EnsembleParams,
    sc: ScalingConstants,
    u: float,
    t_grid,
    m_samples: int,
    rng: RngStream,
) -> TailProfileReport:
    """Empirical tail of the scaled largest particle against the
    Gaussian-decay exponent

        -(alpha/2) (b^2 - n beta/(4 alpha)) (t + b^2 u / (b^2 - n beta/(4 alpha)))^2,

    the exponent of int_{|z| >= t} exp(-(c/2)(z+s)^2) dz with
    c = alpha (b^2 - n beta/(4 alpha)): substituting y = sqrt(c)(z+s) puts
    the threshold at sqrt(c)(t+s), so c enters the decay linearly.  Only the
    slope is fitted (the absolute constant is unspecified): slope_ratio is
    the least-squares slope of observed log-probabilities against these
    exponents, ~1 when the decay law holds.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if np.any(t_grid <= 0):
        raise ValueError("t grid must be positive")
    notes = []
    if max(params.alpha, params.n * params.beta) > 10.0:
        notes.append("hypothesis alpha v n*beta bounded is strained")
    b = sc.b_n
    alpha, beta = params.alpha, params.beta
    maxima = _sample_maxima(params, m_samples, rng) / b
    dev_upper = maxima - u
    upper = np.array([np.mean(dev_upper >= t) for t in t_grid])
    lower = np.array([np.mean(-dev_upper >= t) for t in t_grid])
    probs = upper + lower
    shift = b * b - n * beta / (4.0 * alpha)
    exponents = -alpha / 2.0 * shift * (t_grid + b * b * u / shift) ** 2
    mask = probs > 0
    if np.sum(mask) < 2:
        notes.append("too few exceedances for a slope fit; widen t grid or m_samples")
        slope = math.nan
    else:
        zero_t = t_grid[~mask]
        if zero_t.size:
            notes.append(
                f"no exceedances at t in {zero_t.tolist()}; bound trivially satisfied there"
            )
        logs = np.log(probs[mask])
        ex = exponents[mask]
        slope = float(np.polyfit(ex, logs, 1)[0])
    return TailProfileReport(
        t_grid=t_grid, probs=probs, upper_probs=upper, lower_probs=lower,
        exponents=exponents, slope_ratio=slope, m_samples=m_samples, notes=notes,
    )


@dataclass(frozen=True)
class BulkProfileReport:
    y_grid: np.ndarray
    probs: np.ndarray
    slope: float
    r_squared: float
    m_samples: int
    notes: list = field(default_factory=list)


def bulk_bound_profile(
    n: int,
    params: EnsembleParams,
    a_center: float,
    y_grid,
    m_samples: int,
    rng: RngStream,
) -> BulkProfileReport:
    """Empirical P(|particle - a| <= y) and its proportionality to y.

    The particle is exchangeable, so the indicator is averaged over all n
    eigenvalues of each sample (unbiased, n-fold variance reduction).  A
    linear fit through the origin gives the reported slope and R^2; only the
    y-scaling shape is checked (the constant is unspecified).
    """
    y_grid = np.asarray(y_grid, dtype=np.float64)
    if np.any((y_grid <= 0) | (y_grid >= 1)):
        raise ValueError("y grid must lie in (0, 1)")
    probs = np.zeros_like(y_grid)
    for s in range(m_samples):
        if params.beta == 0.0:
            lam = sample_gaussian_iid(params.n, params.alpha, rng)
        else:
            lam = full_spectrum(sample_tridiagonal(params, rng)).values
        dev = np.abs(lam - a_center)
        probs += np.array([np.mean(dev <= y) for y in y_grid])
    probs /= m_samples
    denom = float(np.sum(y_grid * y_grid))
    slope = float(np.sum(y_grid * probs) / denom)
    resid = probs - slope * y_grid
    total = float(np.sum((probs - np.mean(probs)) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / total if total > 0 else 1.0
    return BulkProfileReport(
        y_grid=y_grid, probs=probs, slope=slope, r_squared=r2, m_samples=m_samples
    )


def jensen_quantity(
    n: int,
    params: EnsembleParams,
    sc: ScalingConstants,
    x: float,
    m_samples: int,
    rng: RngStream,
) -> tuple[float, float]:
    """Monte Carlo estimate of n beta E |log |1 + x/(a_n b_n) - lambda/b_n||.

    The expectation concerns one exchangeable particle; the estimator
    averages the integrand over all n eigenvalues of each sampled matrix
    (unbiased by exchangeability, n-fold variance reduction).  Exactly 0 at
    beta = 0 (no sampling).
    """
    if params.beta == 0.0:
        return 0.0, 0.0
    if params.n != n or sc.n != n:
        raise ValueError("inconsistent sizes between n, params, sc")
    shift = 1.0 + x / (sc.a_n * sc.b_n)
    vals = np.empty(m_samples)
    for s in range(m_samples):
        lam = full_spectrum(sample_tridiagonal(params, rng)).values
        vals[s] = float(np.mean(np.abs(np.log(np.abs(shift - lam / sc.b_n)))))
    scale = n * params.beta
    mean = scale * float(np.mean(vals))
    se = scale * float(np.std(vals, ddof=1) / math.sqrt(m_samples)) if m_samples > 1 else 0.0
    return mean, se


def split_bound_margin(a, b, beta):
    """Margin of the splitting inequality |a+b|^beta <= 2^beta e^{beta(a^2+b^2)/8},
    in log space (nonnegative wherever the inequality holds)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    with np.errstate(divide="ignore"):
        lhs = beta * np.log(np.abs(a + b))
    rhs = beta * (np.log(2.0) + (a * a + b * b) / 8.0)
    return rhs - lhs
