"""Seeded Monte Carlo for photon counting as a Poisson mixture.

Each temporal mode is assigned a coherent amplitude alpha drawn from an
amplitude model, then a photon count n ~ Poisson(|alpha|^2).  Averaged over
the ensemble, the count variance splits into a classical part (variance of
|alpha|^2) and a quantum part (mean conditional Poisson variance).  The module
also provides an empirical power-variance estimator that serves as an
independent cross-check of the analytic band integrals in ``radiometry``.

All randomness comes from numpy's PCG64 generator; Poisson draws use the
generator's built-in inversion (small mean) / PTRS rejection (large mean)
split.  Every result records the algorithm name and seed so runs are
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import PLANCK
from .radiometry import IntegrationSpec, SpectralBand, ThermalSource, mode_count, occupancy

RNG_ALGORITHM = "PCG64"


class AmplitudeModel(Enum):
    """How the per-mode coherent amplitude is distributed."""

    FIXED_AMPLITUDE = "fixed"
    COMPLEX_GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class CoherentAmplitudeSample:
    """A single coherent-state amplitude; ``xi`` is the mean occupancy it implies."""

    alpha: complex

    @property
    def xi(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class MixtureConfig:
    mean_occupancy: float
    n_temporal_samples: int
    amplitude_model: AmplitudeModel = AmplitudeModel.COMPLEX_GAUSSIAN
    rng_seed: int = 0

    def __post_init__(self):
        if self.mean_occupancy < 0.0:
            raise ValueError("mean occupancy must be non-negative")
        if self.n_temporal_samples < 1:
            raise ValueError("need at least one temporal sample")


@dataclass(frozen=True)
class CountStatistics:
    """Empirical photon-count moments with the classical/quantum bookkeeping kept."""

    sample_mean: float
    sample_variance: float
    classical_part: float  # variance of the conditional means |alpha|^2
    poisson_part: float  # mean conditional Poisson variance, = mean |alpha|^2
    histogram: np.ndarray  # counts per photon number n
    n_samples: int
    rng_algorithm: str
    rng_seed: int


def _draw_alpha(rng: np.random.Generator, model: AmplitudeModel, mean_occupancy: float,
                size: int) -> np.ndarray:
    if model is AmplitudeModel.FIXED_AMPLITUDE:
        return np.full(size, np.sqrt(mean_occupancy), dtype=complex)
    sigma = np.sqrt(0.5 * mean_occupancy)
    return rng.normal(0.0, sigma, size) + 1j * rng.normal(0.0, sigma, size)


def _draw_xi(rng: np.random.Generator, model: AmplitudeModel, mean_occupancy: float,
             size: int) -> np.ndarray:
    alpha = _draw_alpha(rng, model, mean_occupancy, size)
    return alpha.real ** 2 + alpha.imag ** 2


def sample_amplitudes(cfg: MixtureConfig) -> np.ndarray:
    """The coherent amplitudes a seeded run of :func:`sample_counts` would use."""
    rng = np.random.default_rng(cfg.rng_seed)
    return _draw_alpha(rng, cfg.amplitude_model, cfg.mean_occupancy,
                       cfg.n_temporal_samples)


def sample_counts(cfg: MixtureConfig) -> CountStatistics:
    """Draw photon counts from the configured Poisson mixture.

    For the fixed-amplitude model every mode has |alpha|^2 equal to the mean
    occupancy, so the counts are pure Poisson.  For the complex-Gaussian model
    the two quadratures of alpha are independent zero-mean normals with
    E|alpha|^2 equal to the mean occupancy, which makes |alpha|^2 exponential
    and the marginal counts Bose-Einstein distributed.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    xi = _draw_xi(rng, cfg.amplitude_model, cfg.mean_occupancy, cfg.n_temporal_samples)
    counts = rng.poisson(xi)
    m = cfg.n_temporal_samples
    sample_variance = float(counts.var(ddof=1)) if m > 1 else 0.0
    classical = float(xi.var(ddof=1)) if m > 1 else 0.0
    return CountStatistics(
        sample_mean=float(counts.mean()),
        sample_variance=sample_variance,
        classical_part=classical,
        poisson_part=float(xi.mean()),
        histogram=np.bincount(counts),
        n_samples=m,
        rng_algorithm=RNG_ALGORITHM,
        rng_seed=cfg.rng_seed,
    )


def variance_decomposition(stats: CountStatistics) -> tuple[float, float]:
    """Split the count variance into (classical, quantum) parts.

    The classical part is the variance of the conditional means and the
    quantum part is the mean conditional Poisson variance; by the law of
    total variance the two should sum to the sample variance up to
    estimator noise.
    """
    if stats.n_samples < 100:
        raise ValueError("at least 100 samples are needed for a stable decomposition")
    return stats.classical_part, stats.poisson_part


def histogram_csv(stats: CountStatistics) -> str:
    """Histogram as CSV text with columns ``n,count``."""
    lines = ["n,count"]
    lines.extend(f"{n},{int(c)}" for n, c in enumerate(stats.histogram))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PowerVarianceEstimate:
    """Empirical detected-power variance with its classical/quantum split.

    ``total`` conditions on the sampled mode amplitudes (law of total
    variance), which keeps the estimator noise near sqrt(2/M); the
    unconditioned count-variance estimate is kept in ``total_direct`` as a
    consistency cross-check (it is noisier at low occupancy).
    """

    classical: float  # W^2
    quantum: float  # W^2
    total_direct: float  # W^2, direct estimate from the count variance
    n_modes: int
    rng_algorithm: str
    rng_seed: int

    @property
    def total(self) -> float:
        return self.classical + self.quantum


def power_variance_mc(src: ThermalSource, band: SpectralBand, integ: IntegrationSpec,
                      seed: int) -> PowerVarianceEstimate:
    """Monte Carlo estimate of the detected-power variance for a thermal source.

    The band is split into sub-bins; each sub-bin contributes one longitudinal
    mode per coherence time (1/d_nu) per transverse mode over the integration
    time, i.e. about N*B*tau independent modes in total.  Each mode draws a
    complex-Gaussian amplitude at the local Planck occupancy followed by a
    Poisson count, and the counts are converted to energy at the bin
    frequency.  Sub-bins use independent spawned RNG streams and are merged
    deterministically.
    """
    n_trans = mode_count(src.etendue)
    b_tau = band.width * integ.tau
    if b_tau < 10.0:
        raise ValueError("B_pre * tau < 10: too few longitudinal modes for a variance")

    total_modes = n_trans * b_tau
    n_bins = int(min(band.n_quadrature_points, max(1, total_modes // 16)))
    edges = np.linspace(band.nu_lo, band.nu_hi, n_bins + 1)
    centres = 0.5 * (edges[:-1] + edges[1:])
    d_nu = band.width / n_bins

    children = np.random.SeedSequence(seed).spawn(n_bins)
    tau = integ.tau
    classical = quantum = direct = 0.0
    n_drawn = 0
    for centre, child in zip(centres, children):
        m = max(2, int(round(n_trans * tau * d_nu)))
        rng = np.random.default_rng(child)
        n_bar = occupancy(centre, src.temperature)
        xi = _draw_xi(rng, AmplitudeModel.COMPLEX_GAUSSIAN, n_bar, m)
        counts = rng.poisson(xi)
        scale = (PLANCK * centre / tau) ** 2 * m
        classical += scale * float(xi.var(ddof=1))
        quantum += scale * float(xi.mean())
        direct += scale * float(counts.var(ddof=1))
        n_drawn += m
    return PowerVarianceEstimate(classical, quantum, direct, n_drawn,
                                 RNG_ALGORITHM, seed)
