"""Seeded, embarrassingly parallel replica execution.

Each replica r of an experiment draws from the Philox stream
(seed, stream_offset + r), so results are bit-identical regardless of the
number of worker threads, and two passes over the same replica range see the
same matrices.  Workers hold no shared mutable state; results are merged in
replica order.

For edge experiments only a thin slice of each spectrum is kept: every
eigenvalue above the window floor, plus one eigenvalue below it (which both
certifies completeness of the slice and carries the maximum when the window
is empty).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from betaedge.ensemble import EnsembleParams, RngStream, sample_gaussian_iid, sample_tridiagonal
from betaedge.pointproc import PointPattern, extract_pattern
from betaedge.scaling import ScalingConstants
from betaedge.tridiag import (
    Spectrum,
    eigenvalues_in_interval,
    full_spectrum,
    sturm_count,
    top_k_eigenvalues,
)

__all__ = [
    "EdgeSamples",
    "default_threads",
    "sample_edge_values",
    "build_patterns",
    "rescaled_maxima",
    "sample_full_spectra",
]


def default_threads() -> int:
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class EdgeSamples:
    """Per-replica top eigenvalue slices (descending), down past the floor."""

    n: int
    beta: float
    alpha: float
    seed: int
    stream_offset: int
    floor_lambda: float
    values: list  # list of descending float arrays, one per replica
    bulk_values: list | None = None  # optional bulk-window slices
    bulk_interval: tuple[float, float] | None = None

    @property
    def replicas(self) -> int:
        return len(self.values)

    def maxima(self) -> np.ndarray:
        return np.array([v[0] for v in self.values])


def _edge_worker(
    n: int,
    beta: float,
    alpha: float,
    seed: int,
    stream_id: int,
    floor_lambda: float,
    k_budget: int,
    bulk: tuple[float, float] | None,
):
    rng = RngStream(seed, stream_id)
    if beta == 0.0:
        lam = sample_gaussian_iid(n, alpha, rng)
        above = np.sort(lam[lam >= floor_lambda])[::-1]
        below = lam[lam < floor_lambda]
        if below.size:
            vals = np.append(above, float(np.max(below)))
        else:
            vals = above
        bulk_vals = None
        if bulk is not None:
            sel = lam[(lam >= bulk[0]) & (lam <= bulk[1])]
            bulk_vals = np.sort(sel)[::-1]
        return vals, bulk_vals
    T = sample_tridiagonal(EnsembleParams(n, beta, alpha), rng)
    m = n - sturm_count(T, floor_lambda)
    k = min(m + 1, n)
    if k > k_budget:
        raise ValueError(
            f"replica {stream_id}: {m} eigenvalues above the window floor "
            f"exceed the top-k budget {k_budget}; raise k_top"
        )
    vals = top_k_eigenvalues(T, k).values
    bulk_vals = None
    if bulk is not None:
        bulk_vals = eigenvalues_in_interval(T, bulk[0], bulk[1]).values
    return vals, bulk_vals


def sample_edge_values(
    n: int,
    beta: float,
    alpha: float,
    floor_lambda: float,
    replicas: int,
    seed: int,
    stream_offset: int = 0,
    k_budget: int = 256,
    threads: int | None = None,
    bulk_interval: tuple[float, float] | None = None,
) -> EdgeSamples:
    """Sample ``replicas`` spectra, keeping eigenvalues above ``floor_lambda``
    (plus one below) and optionally a bulk-window slice."""
    threads = threads or default_threads()
    results: list = [None] * replicas
    bulks: list = [None] * replicas

    def task(r: int):
        return r, _edge_worker(
            n, beta, alpha, seed, stream_offset + r, floor_lambda, k_budget, bulk_interval
        )

    if threads <= 1:
        for r in range(replicas):
            _, (vals, bv) = task(r)
            results[r], bulks[r] = vals, bv
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for r, (vals, bv) in pool.map(task, range(replicas)):
                results[r], bulks[r] = vals, bv
    return EdgeSamples(
        n=n,
        beta=beta,
        alpha=alpha,
        seed=seed,
        stream_offset=stream_offset,
        floor_lambda=floor_lambda,
        values=results,
        bulk_values=bulks if bulk_interval is not None else None,
        bulk_interval=bulk_interval,
    )


def build_patterns(
    samples: EdgeSamples,
    sc: ScalingConstants,
    window: tuple[float, float],
    bulk: bool = False,
) -> list[PointPattern]:
    """Turn banked eigenvalue slices into window point patterns.

    The requested window floor must not undercut the floor the samples were
    extracted with (completeness would be unverifiable).
    """
    if bulk:
        if samples.bulk_values is None:
            raise ValueError("samples were collected without a bulk interval")
        lo_l, hi_l = samples.bulk_interval
        lo = sc.a_n * (lo_l - sc.b_n)
        hi = sc.a_n * (hi_l - sc.b_n)
        window = (lo, hi)
        source = samples.bulk_values
        full = True  # interval extraction is complete by construction
    else:
        floor_lambda = sc.b_n + window[0] / sc.a_n
        if floor_lambda < samples.floor_lambda - 1e-12:
            raise ValueError(
                f"window floor {floor_lambda} is below the sampled floor "
                f"{samples.floor_lambda}; re-sample with a lower floor"
            )
        source = samples.values
        full = False
    out = []
    for r, vals in enumerate(source):
        spec = Spectrum(values=vals, n=samples.n if not full else vals.size,
                        converged=True, tol=1e-12)
        pat = extract_pattern(spec, sc, window, replica_id=r)
        out.append(pat)
    return out


def rescaled_maxima(samples: EdgeSamples, sc: ScalingConstants) -> np.ndarray:
    return sc.a_n * (samples.maxima() - sc.b_n)


def sample_full_spectra(
    n: int,
    beta: float,
    alpha: float,
    replicas: int,
    seed: int,
    stream_offset: int = 0,
    threads: int | None = None,
) -> list[Spectrum]:
    """Full spectra of ``replicas`` independent draws (for global checks)."""
    threads = threads or default_threads()

    def task(r: int) -> tuple[int, Spectrum]:
        rng = RngStream(seed, stream_offset + r)
        if beta == 0.0:
            lam = np.sort(sample_gaussian_iid(n, alpha, rng))[::-1]
            sp = Spectrum(values=lam, n=n, converged=True, tol=1e-15)
        else:
            sp = full_spectrum(sample_tridiagonal(EnsembleParams(n, beta, alpha), rng))
        return r, sp

    results: list = [None] * replicas
    if threads <= 1:
        for r in range(replicas):
            results[r] = task(r)[1]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for r, sp in pool.map(task, range(replicas)):
                results[r] = sp
    return results
