"""Extreme point patterns and their Poisson-limit test battery.

A pattern is the set of rescaled eigenvalues a_n (lambda_i - b_n) falling in
an observation window.  Under the edge limit these form a Poisson process
whose intensity is e^{-x/delta} (converging zoom) or flat (diverging zoom);
at finite n the exact beta = 0 mean measure is the Gaussian tail
n Phibar(b_n + x/a_n) (`scaling.GaussianTail`), which the test battery can
use as the sharp finite-size null.

Tests are deterministic given their seeds: counting chi-square per cell with
pooled categories, Fano factors, disjoint-cell independence, time-changed
spacing KS against a simulated censored null, Gumbel KS for maxima, and the
pooled empirical-spectral KS against the standard normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtri
from scipy.stats import chi2 as chi2_dist

from betaedge.ensemble import RngStream, TridiagonalMatrix
from betaedge.scaling import (
    Exponential,
    GaussianTail,
    Homogeneous,
    ScalingConstants,
    gumbel_cdf,
    normal_upper_tail,
    rescale_points,
)
from betaedge.tridiag import Spectrum, sturm_count

__all__ = [
    "PointPattern",
    "TestReport",
    "extract_pattern",
    "time_change",
    "sample_poisson_pattern",
    "equal_mass_cells",
    "counts_in_cells",
    "count_test",
    "spacing_test",
    "ks_statistic",
    "two_sample_ks",
    "gumbel_max_test",
    "empirical_spectral_ks",
]


@dataclass(frozen=True)
class PointPattern:
    """Points of one replica inside an observation window, sorted ascending."""

    points: np.ndarray
    window: tuple[float, float]
    replica_id: int = 0

    def __post_init__(self):
        p = np.sort(np.asarray(self.points, dtype=np.float64))
        lo, hi = self.window
        if p.size and (p[0] < lo or p[-1] > hi):
            raise ValueError("points must lie inside the window")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "window", (float(lo), float(hi)))

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class TestReport:
    """Outcome of one statistical check.

    ``passed`` follows the rule stated in ``rule``: either the two-sided
    |observed - reference| <= tolerance or a one-sided comparison.
    """

    statistic_name: str
    observed: float
    reference: float
    tolerance: float
    n_replicas: int
    passed: bool
    rule: str = "two_sided"
    details: dict = field(default_factory=dict)


def extract_pattern(
    spectrum: Spectrum,
    sc: ScalingConstants,
    window: tuple[float, float],
    matrix: TridiagonalMatrix | None = None,
    replica_id: int = 0,
) -> PointPattern:
    """Rescale a spectrum and restrict it to the window.

    The spectrum must contain every eigenvalue above the window floor
    b_n + lo/a_n.  Completeness is certified by (in order): the spectrum
    being full, a Sturm count on ``matrix`` when provided, or the top slice
    provably extending below the floor.  Otherwise the caller is told to
    request a larger top-k.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    floor_lambda = sc.b_n + lo / sc.a_n
    values = spectrum.values
    if len(values) < spectrum.n:
        if matrix is not None:
            needed = matrix.n - sturm_count(matrix, floor_lambda)
            have = int(np.sum(values >= floor_lambda))
            if have < needed:
                raise ValueError(
                    f"spectrum holds {have} eigenvalues above the window floor "
                    f"but the matrix has {needed}; request a larger top-k"
                )
        elif not (values.size and float(np.min(values)) < floor_lambda):
            raise ValueError(
                "cannot certify completeness: top slice does not extend below "
                "the window floor; request a larger top-k or pass the matrix"
            )
    x = rescale_points(values, sc)
    x = x[(x >= lo) & (x <= hi)]
    return PointPattern(points=np.sort(x), window=(lo, hi), replica_id=replica_id)


def time_change(pattern: PointPattern, intensity) -> PointPattern:
    """Map points through the cumulative intensity of the null.

    Under the null the result is a rate-1 Poisson process on
    [0, mass(window)].  Homogeneous intensity reduces to a shift by lo.
    """
    lo, hi = pattern.window
    total = intensity.mass(lo, hi)
    pts = np.array([intensity.mass(lo, float(x)) for x in pattern.points])
    return PointPattern(points=pts, window=(0.0, total), replica_id=pattern.replica_id)


def sample_poisson_pattern(
    intensity, window: tuple[float, float], rng: RngStream, replica_id: int = 0
) -> PointPattern:
    """Draw one Poisson pattern with the given intensity on the window."""
    lo, hi = float(window[0]), float(window[1])
    total = intensity.mass(lo, hi)
    count = int(rng.generator.poisson(total))
    if count == 0:
        return PointPattern(np.empty(0), (lo, hi), replica_id)
    u = rng.generator.random(count)
    if isinstance(intensity, Homogeneous):
        pts = lo + (hi - lo) * u
    elif isinstance(intensity, Exponential):
        d = intensity.delta
        pts = -d * np.log(np.exp(-lo / d) - u * total / d)
    elif isinstance(intensity, GaussianTail):
        sc = intensity.sc
        top = float(normal_upper_tail(sc.b_n + lo / sc.a_n))
        pts = sc.a_n * (ndtri(1.0 - (top - u * total / sc.n)) - sc.b_n)
    else:
        raise TypeError(f"unsupported intensity {intensity!r}")
    return PointPattern(np.clip(pts, lo, hi), (lo, hi), replica_id)


def equal_mass_cells(intensity, window: tuple[float, float], n_cells: int):
    """Partition the window into cells of equal null mass."""
    lo, hi = float(window[0]), float(window[1])
    total = intensity.mass(lo, hi)
    edges = [lo]
    for j in range(1, n_cells):
        target = total * j / n_cells
        edges.append(float(brentq(lambda x: intensity.mass(lo, x) - target, lo, hi)))
    edges.append(hi)
    return [(edges[i], edges[i + 1]) for i in range(n_cells)]


def counts_in_cells(patterns, cells) -> np.ndarray:
    """(replicas x cells) matrix of point counts."""
    edges = np.array([c[0] for c in cells] + [cells[-1][1]])
    out = np.empty((len(patterns), len(cells)), dtype=np.int64)
    for r, pat in enumerate(patterns):
        idx = np.searchsorted(edges, pat.points, side="right")
        out[r] = np.bincount(idx, minlength=len(edges) + 1)[1 : len(edges)]
    return out


def count_test(
    patterns,
    cells,
    intensity,
    significance: float = 0.01,
    min_replicas: int = 500,
) -> TestReport:
    """Per-cell Poisson goodness of fit on pooled count categories.

    For each cell, the replica counts are compared to Poisson(mu_cell) by a
    chi-square over the categories {0, 1, 2, >=3} (merged so every expected
    count is >= 5); Fano factors (variance/mean) and the pairwise
    disjoint-cell count covariances are reported alongside.  Passes when
    every cell's p-value >= significance and every pairwise covariance is
    within 3 standard errors of 0.
    """
    n_rep = len(patterns)
    if n_rep < min_replicas:
        raise ValueError(f"need at least {min_replicas} replicas, got {n_rep}")
    counts = counts_in_cells(patterns, cells)
    cell_rows = []
    min_p = 1.0
    for j, cell in enumerate(cells):
        mu = intensity.mass(cell[0], cell[1])
        c = counts[:, j]
        observed = [
            int(np.sum(c == 0)),
            int(np.sum(c == 1)),
            int(np.sum(c == 2)),
            int(np.sum(c >= 3)),
        ]
        probs = [math.exp(-mu), mu * math.exp(-mu), mu * mu / 2.0 * math.exp(-mu)]
        probs.append(max(1.0 - sum(probs), 0.0))
        expected = [n_rep * p for p in probs]
        obs = list(observed)
        while len(expected) > 2 and expected[-1] < 5.0:
            expected[-2] += expected.pop()
            obs[-2] += obs.pop()
        while len(expected) > 2 and expected[0] < 5.0:
            expected[1] += expected[0]
            obs[1] += obs[0]
            del expected[0], obs[0]
        stat = 0.0
        for o, e in zip(obs, expected):
            if e > 0.0:
                stat += (o - e) ** 2 / e
            elif o > 0:
                stat = math.inf  # mass observed where the null puts none
        dof = max(len(expected) - 1, 1)
        p_value = float(chi2_dist.sf(stat, dof))
        mean = float(np.mean(c))
        fano = float(np.var(c, ddof=1) / mean) if mean > 0 else math.nan
        min_p = min(min_p, p_value)
        cell_rows.append(
            {
                "cell": [cell[0], cell[1]],
                "mu": mu,
                "mean_count": mean,
                "fano": fano,
                "chi2": stat,
                "dof": dof,
                "p_value": p_value,
                "categories_observed": obs,
                "categories_expected": expected,
            }
        )
    pair_rows = []
    independent = True
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            ci, cj = counts[:, i].astype(float), counts[:, j].astype(float)
            cov = float(np.cov(ci, cj, ddof=1)[0, 1])
            se = math.sqrt(
                (np.var(ci, ddof=1) * np.var(cj, ddof=1) + cov * cov) / n_rep
            )
            z = cov / se if se > 0 else 0.0
            ok = abs(z) <= 3.0
            independent = independent and ok
            pair_rows.append({"cells": [i, j], "cov": cov, "se": se, "z": z, "ok": ok})
    passed = (min_p >= significance) and independent
    return TestReport(
        statistic_name="poisson_count_chi2",
        observed=min_p,
        reference=significance,
        tolerance=0.0,
        n_replicas=n_rep,
        passed=passed,
        rule="one_sided: min cell p-value >= significance, cov z within 3",
        details={
            "intensity": intensity.label(),
            "cells": cell_rows,
            "pairs": pair_rows,
        },
    )


def _pooled_gaps(patterns) -> np.ndarray:
    gaps = []
    for pat in patterns:
        p = pat.points
        if p.size == 0:
            continue
        lo = pat.window[0]
        gaps.append(p[0] - lo)
        if p.size > 1:
            gaps.append(np.diff(p))
    if not gaps:
        return np.empty(0)
    return np.concatenate([np.atleast_1d(g) for g in gaps])


def two_sample_ks(a: np.ndarray, b: np.ndarray) -> float:
    """Sup distance between the empirical CDFs of two samples."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    allv = np.concatenate([a, b])
    fa = np.searchsorted(a, allv, side="right") / a.size
    fb = np.searchsorted(b, allv, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def spacing_test(
    patterns,
    intensity,
    threshold: float = 0.05,
    min_replicas: int = 500,
    null_replicas: int = 200_000,
    null_seed: int = 271828,
) -> TestReport:
    """Time-changed gap distribution against a simulated rate-1 null.

    Each pattern is mapped through the cumulative intensity; under the null
    the gaps (window start to first point, then consecutive) come from a
    rate-1 Poisson process right-censored by the window.  The same gap
    functional is applied to ``null_replicas`` synthetic rate-1 processes,
    and the two pooled samples are compared by the two-sample KS distance.
    Censoring therefore biases both sides identically.
    """
    n_rep = len(patterns)
    if n_rep < min_replicas:
        raise ValueError(f"need at least {min_replicas} replicas, got {n_rep}")
    windows = {pat.window for pat in patterns}
    if len(windows) != 1:
        raise ValueError("all patterns must share one window")
    lo, hi = windows.pop()
    total = intensity.mass(lo, hi)
    data_gaps = _pooled_gaps([time_change(p, intensity) for p in patterns])
    if data_gaps.size == 0:
        raise ValueError("no gaps observed; windows are effectively empty")

    rng = RngStream(null_seed, 0)
    counts = rng.generator.poisson(total, size=null_replicas)
    m_total = int(np.sum(counts))
    pos = rng.generator.random(m_total) * total
    rep = np.repeat(np.arange(null_replicas), counts)
    order = np.lexsort((pos, rep))
    pos, rep = pos[order], rep[order]
    first = np.ones(pos.size, dtype=bool)
    first[1:] = rep[1:] != rep[:-1]
    diffs = np.empty_like(pos)
    diffs[first] = pos[first]
    diffs[~first] = pos[~first] - pos[np.flatnonzero(~first) - 1]
    null_gaps = diffs

    ks = two_sample_ks(data_gaps, null_gaps)
    return TestReport(
        statistic_name="time_changed_spacing_ks",
        observed=ks,
        reference=0.0,
        tolerance=threshold,
        n_replicas=n_rep,
        passed=bool(ks <= threshold),
        rule="one_sided: KS distance <= tolerance",
        details={
            "intensity": intensity.label(),
            "n_gaps": int(data_gaps.size),
            "null_gaps": int(null_gaps.size),
            "window_mass": total,
        },
    )


def ks_statistic(samples, cdf) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    m = x.size
    if m == 0:
        raise ValueError("samples must be nonempty")
    f = np.asarray(cdf(x), dtype=np.float64)
    d_plus = float(np.max(np.arange(1, m + 1) / m - f))
    d_minus = float(np.max(f - np.arange(0, m) / m))
    return max(d_plus, d_minus)


def gumbel_max_test(max_samples, threshold: float = 0.05) -> TestReport:
    """KS of rescaled maxima against exp(-e^{-x})."""
    x = np.asarray(max_samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("max_samples must be nonempty")
    ks = ks_statistic(x, gumbel_cdf)
    return TestReport(
        statistic_name="gumbel_max_ks",
        observed=ks,
        reference=0.0,
        tolerance=threshold,
        n_replicas=int(x.size),
        passed=bool(ks <= threshold),
        rule="one_sided: KS distance <= tolerance",
    )


def empirical_spectral_ks(spectra, threshold: float = 0.02) -> TestReport:
    """Pooled-eigenvalue KS against the standard normal CDF.

    Expects full spectra; asserts the global empirical-measure limit, so the
    threshold is loose relative to the 1/sqrt(pool) sampling scale.
    """
    pools = []
    for sp in spectra:
        if len(sp) != sp.n:
            raise ValueError("empirical_spectral_ks needs full spectra")
        pools.append(sp.values)
    pooled = np.concatenate(pools)
    ks = ks_statistic(pooled, lambda t: 1.0 - normal_upper_tail(t))
    return TestReport(
        statistic_name="empirical_spectral_ks",
        observed=ks,
        reference=0.0,
        tolerance=threshold,
        n_replicas=len(pools),
        passed=bool(ks <= threshold),
        rule="one_sided: KS distance <= tolerance",
        details={"pooled_size": int(pooled.size)},
    )
