"""Gaussian beta-ensemble at high temperature: samplers, eigensolvers, and
numerical verification of the edge Poisson limit at desk scale.

The package is organized around the pipeline

    ensemble  -> tridiag -> scaling -> pointproc
                 partition, correlation (closed forms + Monte Carlo probes)
                 cli (experiment orchestration, reports, SVG figures)
"""

from betaedge.ensemble import (
    EnsembleParams,
    RngStream,
    TridiagonalMatrix,
    sample_chi,
    sample_gaussian_iid,
    sample_tridiagonal,
)
from betaedge.scaling import (
    DeltaSchedule,
    ScalingConstants,
    compute_scaling,
    expected_count,
    gumbel_cdf,
    mills_gap,
    rescale_points,
)
from betaedge.tridiag import Spectrum, full_spectrum, sturm_count, top_k_eigenvalues

__all__ = [
    "EnsembleParams",
    "RngStream",
    "TridiagonalMatrix",
    "sample_chi",
    "sample_gaussian_iid",
    "sample_tridiagonal",
    "Spectrum",
    "sturm_count",
    "top_k_eigenvalues",
    "full_spectrum",
    "DeltaSchedule",
    "ScalingConstants",
    "compute_scaling",
    "rescale_points",
    "gumbel_cdf",
    "expected_count",
    "mills_gap",
]

__version__ = "0.1.0"
