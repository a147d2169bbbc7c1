"""Sampling the Gaussian beta-ensemble through its tridiagonal matrix model.

The ensemble of ``n`` particles with inverse temperature ``beta >= 0`` and
confinement ``alpha > 0`` has density proportional to

    exp(-(alpha/2) sum lambda_i^2) * prod_{i<j} |lambda_i - lambda_j|^beta.

For ``beta > 0`` the spectrum of a symmetric tridiagonal matrix with
independent Gaussian diagonal ``g_i / sqrt(alpha)`` and off-diagonal
``chi(m beta) / sqrt(2 alpha)`` entries (``m = n-1, ..., 1`` from the top-left
corner down) has exactly this joint law.  At ``beta = 0`` the particles are
plain i.i.d. centered Gaussians of variance ``1/alpha``.

Randomness comes from counter-based Philox streams keyed by
``(seed, stream_id)``: replicas with distinct stream ids are statistically
independent and can be sampled concurrently with no shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EnsembleParams",
    "TridiagonalMatrix",
    "RngStream",
    "sample_chi",
    "sample_tridiagonal",
    "sample_gaussian_iid",
]

_U64 = 2**64


@dataclass(frozen=True)
class EnsembleParams:
    """Parameters (n, beta, alpha) of the particle law."""

    n: int
    beta: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.beta) and self.beta >= 0.0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha!r}")


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as two flat arrays.

    ``offdiag`` entries are nonnegative as sampled (chi variables).  The
    matrix is never densified outside of test oracles.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=np.float64)
        e = np.asarray(self.offdiag, dtype=np.float64)
        if d.ndim != 1 or e.ndim != 1:
            raise ValueError("diag and offdiag must be 1-d arrays")
        if e.size != max(d.size - 1, 0):
            raise ValueError(
                f"offdiag length {e.size} != diag length {d.size} - 1"
            )
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def gershgorin_interval(self) -> tuple[float, float]:
        """Interval certainly containing every eigenvalue."""
        d, e = self.diag, self.offdiag
        if d.size == 1:
            v = float(d[0])
            return v, v
        r = np.zeros(d.size)
        r[:-1] += np.abs(e)
        r[1:] += np.abs(e)
        return float(np.min(d - r)), float(np.max(d + r))

    def dense(self) -> np.ndarray:
        """Densify (test oracles only; O(n^2) memory)."""
        a = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        a[idx, idx + 1] = self.offdiag
        a[idx + 1, idx] = self.offdiag
        return a


@dataclass
class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Two streams constructed with the same key replay bit-identical draw
    sequences.  A stream is single-owner: do not share one instance across
    concurrent tasks; give each replica its own ``stream_id`` instead.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not (0 <= int(self.seed) < _U64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not (0 <= int(self.stream_id) < _U64):
            raise ValueError("stream_id must be a 64-bit unsigned integer")
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh independent stream under the same seed."""
        return RngStream(self.seed, stream_id)


def sample_chi(k: float, rng: RngStream, size: int | None = None):
    """Draw from the chi distribution with ``k > 0`` degrees of freedom.

    ``k`` may be arbitrarily small (non-integer): the square of the draw is
    Gamma(k/2, scale 2) distributed.  For tiny shapes the underlying sampler
    uses the shape-boost identity Gamma(a) = Gamma(a+1) * U^(1/a); when
    U^(1/a) underflows the draw is exactly 0.0, which is the correct rounding
    of a value below the smallest positive double.
    """
    if not (np.isscalar(k) and math.isfinite(k) and k > 0.0):
        raise ValueError(f"chi degrees of freedom must be finite and > 0, got {k!r}")
    g = rng.generator.standard_gamma(k / 2.0, size=size)
    return np.sqrt(2.0 * g)


def sample_tridiagonal(params: EnsembleParams, rng: RngStream) -> TridiagonalMatrix:
    """Sample the tridiagonal matrix whose spectrum has the ensemble law.

    Requires ``beta > 0`` (the beta = 0 ensemble is i.i.d. Gaussian; use
    :func:`sample_gaussian_iid`).  The off-diagonal at position ``j`` is
    ``chi((n-1-j) * beta) / sqrt(2 alpha)``: the chi parameter runs from
    ``(n-1) beta`` at the top-left corner down to ``beta``.

    The diagonal Gaussians are drawn before the off-diagonal entries, so for
    a fixed stream the diagonal coincides bit-for-bit with
    ``sample_gaussian_iid(n, alpha, stream)``.
    """
    if params.beta == 0.0:
        raise ValueError(
            "beta = 0 has no tridiagonal coupling; use sample_gaussian_iid"
        )
    n, beta, alpha = params.n, params.beta, params.alpha
    sqrt_alpha = math.sqrt(alpha)
    diag = rng.generator.standard_normal(n) / sqrt_alpha
    if n == 1:
        return TridiagonalMatrix(diag, np.empty(0))
    dof = beta * np.arange(n - 1, 0, -1, dtype=np.float64)
    chi = np.sqrt(2.0 * rng.generator.standard_gamma(dof / 2.0))
    offdiag = chi / math.sqrt(2.0 * alpha)
    return TridiagonalMatrix(diag, offdiag)


def sample_gaussian_iid(n: int, alpha: float, rng: RngStream) -> np.ndarray:
    """``n`` independent centered Gaussians of variance ``1/alpha``."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValueError(f"alpha must be finite and > 0, got {alpha!r}")
    return rng.generator.standard_normal(int(n)) / math.sqrt(alpha)
