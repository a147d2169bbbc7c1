"""Centering/scaling sequences for the extreme point process and the limit
law primitives (Gumbel CDF, Poisson intensity measures, Gaussian tail gaps).

For fixed n and a schedule value delta_n, the rescaled process uses

    a_n = delta_n * sqrt(2 log n)
    b_n = sqrt(2 log n) - (log log n + 2 log delta_n + log 4 pi) / (2 sqrt(2 log n))

and a point pattern is obtained as a_n (lambda_i - b_n).  Everything here is
pure arithmetic; normal tails always go through erfc, never through 1 - CDF
(catastrophic cancellation at b_n ~ sqrt(2 log n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

__all__ = [
    "DeltaSchedule",
    "ScalingConstants",
    "compute_scaling",
    "rescale_points",
    "inverse_rescale_points",
    "gumbel_cdf",
    "normal_upper_tail",
    "Homogeneous",
    "Exponential",
    "GaussianTail",
    "expected_count",
    "mills_gap",
]


def normal_upper_tail(t):
    """P(N(0,1) >= t), computed via erfc for full relative accuracy."""
    return 0.5 * erfc(np.asarray(t, dtype=np.float64) / math.sqrt(2.0))


@dataclass(frozen=True)
class DeltaSchedule:
    """Schedule for the auxiliary zoom sequence delta_n.

    kinds:
      constant   delta_n = delta            (inhomogeneous limit e^{-x/delta})
      power_log  delta_n = (log n)^p        (diverging for p > 0)
      stretched  delta_n = exp(eps * sqrt(2 log n))
    """

    kind: str
    value: float

    _KINDS = ("constant", "power_log", "stretched")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; use one of {self._KINDS}")
        if not math.isfinite(self.value):
            raise ValueError("schedule parameter must be finite")
        if self.kind == "constant" and self.value <= 0:
            raise ValueError("constant schedule needs delta > 0")
        if self.kind == "stretched" and self.value <= 0:
            raise ValueError("stretched schedule needs eps > 0")

    @classmethod
    def constant(cls, delta: float) -> "DeltaSchedule":
        return cls("constant", float(delta))

    @classmethod
    def power_log(cls, p: float) -> "DeltaSchedule":
        return cls("power_log", float(p))

    @classmethod
    def stretched(cls, eps: float) -> "DeltaSchedule":
        return cls("stretched", float(eps))

    def delta(self, n: int) -> float:
        L = math.log(n)
        if self.kind == "constant":
            return self.value
        if self.kind == "power_log":
            return L ** self.value
        return math.exp(self.value * math.sqrt(2.0 * L))

    def growth_flag(self, n: int) -> str | None:
        """Warn when the schedule leaves the regime the beta > 0 limit needs.

        The homogeneous case requires log delta_n << sqrt(log n).  Constant
        and power_log schedules satisfy it automatically; a stretched
        schedule has log delta_n / sqrt(log n) = eps * sqrt(2) at every n,
        so it only qualifies in the sense eps << 1.
        """
        if self.kind != "stretched":
            return None
        ratio = self.value * math.sqrt(2.0)
        if ratio >= 0.5:
            return (
                f"stretched schedule has log(delta_n)/sqrt(log n) = {ratio:.3f} "
                "at every n; the homogeneous limit needs this << 1"
            )
        return None


@dataclass(frozen=True)
class ScalingConstants:
    """(a_n, b_n, delta_n) at a fixed n >= 3."""

    n: int
    a_n: float
    b_n: float
    delta_n: float


def compute_scaling(n: int, sched: DeltaSchedule) -> ScalingConstants:
    """Evaluate the centering and scaling sequences at ``n >= 3``."""
    if not (isinstance(n, (int, np.integer)) and n >= 3):
        raise ValueError(f"n must be an integer >= 3 (log log n > 0), got {n!r}")
    n = int(n)
    delta_n = sched.delta(n)
    L = math.log(n)
    root = math.sqrt(2.0 * L)
    a_n = delta_n * root
    b_n = root - (math.log(L) + 2.0 * math.log(delta_n) + math.log(4.0 * math.pi)) / (2.0 * root)
    return ScalingConstants(n=n, a_n=a_n, b_n=b_n, delta_n=delta_n)


def rescale_points(lambdas, sc: ScalingConstants) -> np.ndarray:
    """a_n (lambda_i - b_n), elementwise, order preserved."""
    lam = np.asarray(lambdas, dtype=np.float64)
    return sc.a_n * (lam - sc.b_n)


def inverse_rescale_points(points, sc: ScalingConstants) -> np.ndarray:
    """Map rescaled coordinates back: lambda = b_n + x / a_n."""
    x = np.asarray(points, dtype=np.float64)
    return sc.b_n + x / sc.a_n


def gumbel_cdf(x):
    """exp(-exp(-x)), the standard Gumbel distribution function."""
    return np.exp(-np.exp(-np.asarray(x, dtype=np.float64)))


# ---------------------------------------------------------------------------
# Intensity measures on the rescaled axis.  Each provides mass(lo, hi) (the
# expected number of points in [lo, hi] under the corresponding Poisson null)
# and density(x) for figure overlays.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Homogeneous:
    """Flat intensity (rate 1 by default): mass([lo, hi]) = rate * (hi - lo)."""

    rate: float = 1.0

    def mass(self, lo: float, hi: float) -> float:
        if math.isinf(hi):
            raise ValueError("homogeneous intensity has infinite mass on [lo, inf)")
        if hi < lo:
            raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
        return self.rate * (hi - lo)

    def density(self, x):
        return np.full_like(np.asarray(x, dtype=np.float64), self.rate)

    def label(self) -> str:
        return f"homogeneous(rate={self.rate:g})"


@dataclass(frozen=True)
class Exponential:
    """Intensity e^{-x/delta} dx: mass([lo, hi]) = delta (e^{-lo/d} - e^{-hi/d})."""

    delta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError("delta must be finite and > 0")

    def mass(self, lo: float, hi: float) -> float:
        if hi < lo:
            raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
        upper = 0.0 if math.isinf(hi) else math.exp(-hi / self.delta)
        return self.delta * (math.exp(-lo / self.delta) - upper)

    def density(self, x):
        return np.exp(-np.asarray(x, dtype=np.float64) / self.delta)

    def label(self) -> str:
        return f"exponential(delta={self.delta:g})"


@dataclass(frozen=True)
class GaussianTail:
    """Exact finite-n mean measure of the rescaled i.i.d.-Gaussian pattern.

    mass([lo, hi]) = n [ Phibar(b_n + lo/a_n) - Phibar(b_n + hi/a_n) ].

    This is the exact expected count at beta = 0 for every window (edge or
    bulk) and the natural finite-n null for Poisson-structure tests; it
    converges to the Exponential/Homogeneous limits on compacta.
    """

    sc: ScalingConstants

    def mass(self, lo: float, hi: float) -> float:
        if hi < lo:
            raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
        sc = self.sc
        upper = 0.0 if math.isinf(hi) else float(normal_upper_tail(sc.b_n + hi / sc.a_n))
        return sc.n * (float(normal_upper_tail(sc.b_n + lo / sc.a_n)) - upper)

    def density(self, x):
        sc = self.sc
        t = sc.b_n + np.asarray(x, dtype=np.float64) / sc.a_n
        return sc.n / sc.a_n * np.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)

    def quantile(self, lo: float, target_mass: float, hi_cap: float) -> float:
        """x in (lo, hi_cap] with mass([lo, x]) = target_mass."""
        return float(brentq(lambda x: self.mass(lo, x) - target_mass, lo, hi_cap))

    def label(self) -> str:
        return f"gaussian_tail(n={self.sc.n})"


def expected_count(interval: tuple[float, float], intensity) -> float:
    """Expected number of points of the null process in ``interval``."""
    lo, hi = float(interval[0]), float(interval[1])
    if lo > hi:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    return intensity.mass(lo, hi)


def mills_gap(n: int, x: float, y: float, sc: ScalingConstants) -> float:
    """n [ P(N >= x/a_n + b_n) - P(N >= y/a_n + b_n) ] via erfc.

    Under schedules with log delta_n << log n this converges to y - x as
    n grows; the approach is slow (log-scale corrections), see tests.
    """
    if not (x < y):
        raise ValueError(f"need x < y, got x={x}, y={y}")
    if n < 3:
        raise ValueError("n must be >= 3")
    if sc.n != n:
        raise ValueError(f"scaling constants were computed at n={sc.n}, not {n}")
    lo = float(normal_upper_tail(x / sc.a_n + sc.b_n))
    hi = float(normal_upper_tail(y / sc.a_n + sc.b_n))
    return n * (lo - hi)
