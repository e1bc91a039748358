"""Mode counting and thermal/quantum photon noise statistics for radiometric sources.

All public interfaces use ordinary frequency ``nu`` in Hz; the angular-frequency
measure is folded in once via d(omega)/2pi = d(nu).  Powers are in W, power
variances in W^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import BOLTZMANN, PLANCK


class QuadratureError(RuntimeError):
    """Raised when a band integral fails to converge to the requested tolerance."""


class Geometry(Enum):
    """Coupling geometry between a source and a single-detector beam."""

    TEM_LINE = "tem"
    HALF_SPACE = "halfspace"
    CONE = "cone"


@dataclass(frozen=True)
class EtendueSpec:
    """Source area, beam geometry and wavelength; fixes the transverse mode count.

    ``theta_max`` is the half opening angle of the beam (radians) and is only
    meaningful for the cone geometry.  ``polarizations`` applies an optional
    multiplicity of 2 when both polarisations couple.
    """

    geometry: Geometry
    area: float = 1.0  # m^2
    wavelength: float = 1.0  # m
    theta_max: float | None = None  # rad
    polarizations: int = 1

    def __post_init__(self):
        if self.area <= 0.0:
            raise ValueError("area must be positive")
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")
        if self.polarizations not in (1, 2):
            raise ValueError("polarizations must be 1 or 2")
        if self.geometry is Geometry.CONE:
            if self.theta_max is None or not 0.0 < self.theta_max <= 0.5 * math.pi:
                raise ValueError("cone half angle must lie in (0, pi/2]")
        elif self.theta_max is not None:
            raise ValueError("theta_max only applies to the cone geometry")

    @classmethod
    def tem_line(cls, polarizations: int = 1) -> "EtendueSpec":
        return cls(Geometry.TEM_LINE, polarizations=polarizations)

    @classmethod
    def half_space(cls, area: float, wavelength: float, polarizations: int = 1) -> "EtendueSpec":
        return cls(Geometry.HALF_SPACE, area, wavelength, polarizations=polarizations)

    @classmethod
    def cone(cls, area: float, wavelength: float, theta_max: float,
             polarizations: int = 1) -> "EtendueSpec":
        return cls(Geometry.CONE, area, wavelength, theta_max, polarizations)


@dataclass(frozen=True)
class SpectralBand:
    """Pre-detection frequency band [nu_lo, nu_hi] with a quadrature hint."""

    nu_lo: float  # Hz
    nu_hi: float  # Hz
    n_quadrature_points: int = 64

    def __post_init__(self):
        if not 0.0 < self.nu_lo < self.nu_hi:
            raise ValueError("band must satisfy 0 < nu_lo < nu_hi")
        if self.n_quadrature_points < 2:
            raise ValueError("need at least 2 quadrature points")

    @property
    def width(self) -> float:
        return self.nu_hi - self.nu_lo

    @property
    def centre(self) -> float:
        return 0.5 * (self.nu_lo + self.nu_hi)


@dataclass(frozen=True)
class ThermalSource:
    """Blackbody source at physical temperature ``temperature`` feeding an etendue."""

    temperature: float  # K
    etendue: EtendueSpec

    def __post_init__(self):
        if self.temperature < 0.0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class IntegrationSpec:
    """Post-detection integration time over which energy is collected."""

    tau: float  # s

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError("integration time must be positive")


@dataclass(frozen=True)
class PowerFluctuation:
    """Detected-power variance split into its classical and quantum parts."""

    classical: float  # W^2
    quantum: float  # W^2

    @property
    def total(self) -> float:
        return self.classical + self.quantum


def mode_count(etendue: EtendueSpec) -> float:
    """Effective number of transverse modes coupled through the etendue.

    TEM line carries exactly one mode; a half space carries A*pi/lambda^2;
    a cone of half angle theta carries A*pi*sin(theta)^2/lambda^2.  The count
    is a real scaling factor and need not be an integer.
    """
    if etendue.geometry is Geometry.TEM_LINE:
        n = 1.0
    elif etendue.geometry is Geometry.HALF_SPACE:
        n = etendue.area * math.pi / etendue.wavelength ** 2
    else:
        omega_eff = math.pi * math.sin(etendue.theta_max) ** 2
        n = etendue.area * omega_eff / etendue.wavelength ** 2
    return n * etendue.polarizations


def occupancy(nu, temperature: float):
    """Single-mode thermal (Planck) occupancy n = 1/(exp(h nu/kT) - 1).

    Accepts scalar or array frequencies.  A zero-temperature source returns
    exact zeros; the exponential is never evaluated in its overflow range.
    """
    nu_arr = np.asarray(nu, dtype=float)
    if np.any(nu_arr <= 0.0):
        raise ValueError("frequency must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be non-negative")
    out = np.zeros_like(nu_arr)
    if temperature > 0.0:
        x = PLANCK * nu_arr / (BOLTZMANN * temperature)
        small = x < 700.0
        out = np.where(small, 1.0 / np.expm1(np.where(small, x, 1.0)), np.exp(-x))
    return float(out) if out.ndim == 0 else out


def gauss_legendre_integral(fn, lo: float, hi: float, order: int, n_panels: int = 1) -> float:
    """Composite Gauss-Legendre integral of ``fn`` over [lo, hi].

    Panels are geometrically spaced, which keeps wide (multi-decade) bands
    well resolved.  ``fn`` must accept an array argument.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    if n_panels > 1:
        edges = np.geomspace(lo, hi, n_panels + 1)
    else:
        edges = np.array([lo, hi])
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = mid[:, None] + half[:, None] * nodes[None, :]
    vals = np.asarray(fn(t.ravel()), dtype=float).reshape(t.shape)
    return float(np.sum(half * (vals @ weights)))


def adaptive_integral(fn, lo: float, hi: float, rtol: float = 1e-9,
                      initial_order: int = 32, max_order: int = 4096) -> float:
    """Gauss-Legendre integral with order doubling until ``rtol`` is met."""
    n_panels = max(1, math.ceil(math.log(hi / lo) / math.log(8.0)))
    order = min(512, max(8, initial_order))
    prev = gauss_legendre_integral(fn, lo, hi, order, n_panels)
    while order <= max_order:
        order *= 2
        cur = gauss_legendre_integral(fn, lo, hi, order, n_panels)
        if abs(cur - prev) <= rtol * max(abs(cur), abs(prev)) or cur == prev == 0.0:
            return cur
        prev = cur
    raise QuadratureError(
        f"band integral did not converge to rtol={rtol:g} by order {max_order}"
    )


def thermal_power(src: ThermalSource, band: SpectralBand, rtol: float = 1e-9) -> float:
    """Average thermal power N * integral of h*nu*n(nu) over the band, in W."""
    if src.temperature == 0.0:
        return 0.0
    n_modes = mode_count(src.etendue)

    def integrand(nu):
        return PLANCK * nu * occupancy(nu, src.temperature)

    return n_modes * adaptive_integral(integrand, band.nu_lo, band.nu_hi, rtol,
                                       band.n_quadrature_points)


def power_fluctuation(src: ThermalSource, band: SpectralBand, integ: IntegrationSpec,
                      rtol: float = 1e-9) -> PowerFluctuation:
    """Variance of the detected power over integration time tau.

    The classical (wave) term integrates P(nu)^2/N and the quantum (photon
    shot) term integrates h*nu*P(nu), where P(nu) = N h nu n(nu) is the
    spectral power.  Both are returned separately; their sum is the total
    variance.  In the Rayleigh-Jeans single-mode limit the classical term
    reproduces the radiometer equation.
    """
    if src.temperature == 0.0:
        return PowerFluctuation(0.0, 0.0)
    n_modes = mode_count(src.etendue)
    temp = src.temperature

    def classical_integrand(nu):
        return n_modes * (PLANCK * nu * occupancy(nu, temp)) ** 2

    def quantum_integrand(nu):
        return n_modes * (PLANCK * nu) ** 2 * occupancy(nu, temp)

    classical = adaptive_integral(classical_integrand, band.nu_lo, band.nu_hi, rtol,
                                  band.n_quadrature_points) / integ.tau
    quantum = adaptive_integral(quantum_integrand, band.nu_lo, band.nu_hi, rtol,
                                band.n_quadrature_points) / integ.tau
    return PowerFluctuation(classical, quantum)


def radiometer_resolution(temperature: float, pre_bandwidth: float, tau: float) -> float:
    """Radiometer equation: smallest detectable temperature change T/sqrt(B*tau)."""
    if temperature <= 0.0 or pre_bandwidth <= 0.0 or tau <= 0.0:
        raise ValueError("temperature, bandwidth and integration time must be positive")
    return temperature / math.sqrt(pre_bandwidth * tau)


def crossover_frequency(temperature: float) -> float:
    """Frequency where the classical and quantum noise terms are equal.

    For a flat single-mode spectrum the two variance terms balance where the
    occupancy equals one, i.e. nu = k*T*ln(2)/h.
    """
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    return BOLTZMANN * temperature * math.log(2.0) / PLANCK
