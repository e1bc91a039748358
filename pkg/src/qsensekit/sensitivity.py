"""Detector-vs-amplifier sensitivity comparison curves.

Detector noise equivalent powers convert to equivalent noise temperatures so
that incoherent (power-detecting) and coherent (amplifying) receivers can be
placed on one temperature-vs-frequency plot.  The curve families:

* quantum-amplifier system: T = (h nu / k)(n(nu, T_src) + 1), i.e. the source
  Planck term plus one half photon of source vacuum plus the amplifier's
  standard-quantum-limit half photon.  The closed form is our modelling
  choice; it reproduces the two known limits (T_src at low frequency, h nu/k
  at high frequency) but mid-band values are model dependent.
* single-mode radiance: T = (h nu / k) n(nu, T_src).
* detector NEP: T = NEP * sqrt(2R / (k^2 pi nu)) for a spectral resolution R.
* dark rate: the NEP of a shot-noise-limited counter with dark rate G_d is
  taken as h*nu*sqrt(2*G_d), again a modelling choice, then converted as above.
* squeezed amplifier: the amplifier half photon is divided by the linear
  squeeze factor; the source term is left untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import BOLTZMANN, PLANCK
from .radiometry import occupancy


@dataclass(frozen=True)
class DetectorSpec:
    """A power detector characterised by intrinsic NEP and spectral selectivity.

    Either ``resolution`` (R = nu0/delta_nu, Lorentzian noise bandwidth
    pi*nu0/4R) or an explicit pre-detection ``bandwidth`` must be given.
    """

    nep: float  # W/Hz^0.5
    nu0: float  # Hz
    resolution: float | None = None
    bandwidth: float | None = None  # Hz

    def __post_init__(self):
        if self.nep < 0.0:
            raise ValueError("NEP must be non-negative")
        if self.nu0 <= 0.0:
            raise ValueError("centre frequency must be positive")
        if (self.resolution is None) == (self.bandwidth is None):
            raise ValueError("give exactly one of resolution or bandwidth")
        if self.resolution is not None and self.resolution < 1.0:
            raise ValueError("resolution must be >= 1")
        if self.bandwidth is not None and self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")

    @property
    def effective_bandwidth(self) -> float:
        if self.bandwidth is not None:
            return self.bandwidth
        return 0.25 * math.pi * self.nu0 / self.resolution


def nep_to_temperature(nep: float, pre_bandwidth: float) -> float:
    """Equivalent noise temperature NEP/(k sqrt(2 B_pre)) of a power detector."""
    if nep < 0.0 or pre_bandwidth <= 0.0:
        raise ValueError("NEP must be non-negative and bandwidth positive")
    return nep / (BOLTZMANN * math.sqrt(2.0 * pre_bandwidth))


def nep_to_temperature_resolved(detector: DetectorSpec) -> float:
    """Equivalent noise temperature sqrt(2R/(k^2 pi nu0)) * NEP.

    Identical to :func:`nep_to_temperature` evaluated at the Lorentzian noise
    bandwidth pi*nu0/4R.
    """
    if detector.resolution is None:
        return nep_to_temperature(detector.nep, detector.bandwidth)
    return detector.nep * math.sqrt(
        2.0 * detector.resolution / (BOLTZMANN ** 2 * math.pi * detector.nu0))


class CurveKind(Enum):
    QUANTUM_AMP_SYSTEM = "amp"
    SINGLE_MODE_RADIANCE = "radiance"
    DETECTOR_NEP = "nep"
    DARK_RATE = "dark"
    SQUEEZED_SQL = "squeezed"


def _format_temperature(t: float) -> str:
    if t < 1.0:
        return f"{t * 1e3:g}mK"
    return f"{t:g}K"


@dataclass(frozen=True)
class CurveSpec:
    """One curve family for the sensitivity comparison plot."""

    kind: CurveKind
    t_source: float = 0.0  # K
    nep: float = 0.0  # W/Hz^0.5
    resolution: float = 100.0
    dark_rate: float = 0.0  # Hz
    squeeze_db: float = 0.0
    grid: tuple[float, ...] | None = None  # optional frequency domain, Hz
    label: str | None = None

    def __post_init__(self):
        if self.grid is not None:
            g = tuple(float(x) for x in self.grid)
            if len(g) == 0 or any(x <= 0.0 for x in g) or any(
                    b <= a for a, b in zip(g, g[1:])):
                raise ValueError("grid must be strictly increasing and positive")
            object.__setattr__(self, "grid", g)

    @classmethod
    def quantum_amp(cls, t_source: float) -> "CurveSpec":
        return cls(CurveKind.QUANTUM_AMP_SYSTEM, t_source=t_source)

    @classmethod
    def single_mode(cls, t_source: float) -> "CurveSpec":
        return cls(CurveKind.SINGLE_MODE_RADIANCE, t_source=t_source)

    @classmethod
    def detector_nep(cls, nep: float, resolution: float) -> "CurveSpec":
        return cls(CurveKind.DETECTOR_NEP, nep=nep, resolution=resolution)

    @classmethod
    def dark_counts(cls, dark_rate: float, resolution: float) -> "CurveSpec":
        return cls(CurveKind.DARK_RATE, dark_rate=dark_rate, resolution=resolution)

    @classmethod
    def squeezed(cls, squeeze_db: float, t_source: float) -> "CurveSpec":
        return cls(CurveKind.SQUEEZED_SQL, t_source=t_source, squeeze_db=squeeze_db)

    @property
    def effective_label(self) -> str:
        if self.label:
            return self.label
        kind = self.kind
        if kind is CurveKind.QUANTUM_AMP_SYSTEM:
            return f"amp_{_format_temperature(self.t_source)}"
        if kind is CurveKind.SINGLE_MODE_RADIANCE:
            return f"radiance_{_format_temperature(self.t_source)}"
        if kind is CurveKind.DETECTOR_NEP:
            return f"nep_{self.nep:g}_R{self.resolution:g}"
        if kind is CurveKind.DARK_RATE:
            return f"dark_{self.dark_rate:g}Hz_R{self.resolution:g}"
        return f"squeezed_{self.squeeze_db:g}dB_{_format_temperature(self.t_source)}"


@dataclass(frozen=True)
class CurvePoint:
    nu: float  # Hz
    t_equiv: float  # K


def _curve_value(spec: CurveSpec, nu: float) -> float:
    photon_temp = PLANCK * nu / BOLTZMANN
    kind = spec.kind
    if kind is CurveKind.QUANTUM_AMP_SYSTEM:
        return photon_temp * (occupancy(nu, spec.t_source) + 1.0)
    if kind is CurveKind.SINGLE_MODE_RADIANCE:
        return photon_temp * occupancy(nu, spec.t_source)
    if kind is CurveKind.DETECTOR_NEP:
        return nep_to_temperature_resolved(
            DetectorSpec(spec.nep, nu, resolution=spec.resolution))
    if kind is CurveKind.DARK_RATE:
        dark_nep = PLANCK * nu * math.sqrt(2.0 * spec.dark_rate)
        return nep_to_temperature_resolved(
            DetectorSpec(dark_nep, nu, resolution=spec.resolution))
    # squeezed amplifier: only the amplifier half photon is squeezed
    squeeze = 10.0 ** (spec.squeeze_db / 10.0)
    return photon_temp * (occupancy(nu, spec.t_source) + 0.5 + 0.5 / squeeze)


def curve_point(spec: CurveSpec, nu: float) -> CurvePoint:
    """Equivalent noise temperature of one curve family at frequency ``nu``."""
    if nu <= 0.0:
        raise ValueError("frequency must be positive")
    if spec.grid is not None and not spec.grid[0] <= nu <= spec.grid[-1]:
        raise ValueError("frequency lies outside the curve's grid domain")
    return CurvePoint(nu, _curve_value(spec, nu))


def curve_values(spec: CurveSpec, grid) -> np.ndarray:
    return np.array([_curve_value(spec, float(nu)) for nu in grid])


@dataclass(frozen=True, eq=False)
class CurveTable:
    """Dense table of curve values: one row per frequency, one column per spec."""

    frequencies: np.ndarray
    labels: tuple[str, ...]
    values: np.ndarray  # (n_freq, n_spec)

    def to_csv(self) -> str:
        lines = [",".join(("nu_Hz",) + self.labels)]
        for i, nu in enumerate(self.frequencies):
            row = [f"{nu:.12g}"] + [f"{v:.12g}" for v in self.values[i]]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def figure7_dataset(specs, grid) -> CurveTable:
    """Evaluate the supplied curve families on a common frequency grid."""
    specs = list(specs)
    freqs = np.asarray(list(grid), dtype=float)
    if not specs or freqs.size == 0:
        raise ValueError("need at least one curve spec and one frequency")
    if np.any(freqs <= 0.0) or np.any(np.diff(freqs) <= 0.0):
        raise ValueError("frequency grid must be positive and strictly increasing")
    values = np.column_stack([curve_values(s, freqs) for s in specs])
    return CurveTable(freqs, tuple(s.effective_label for s in specs), values)


def default_figure7_specs() -> list[CurveSpec]:
    """The default curve families for the comparison plot."""
    specs = [CurveSpec.quantum_amp(t) for t in (0.010, 0.050, 4.0, 200.0)]
    specs += [CurveSpec.single_mode(t) for t in (0.010, 0.050, 4.0)]
    specs += [CurveSpec.detector_nep(nep, 100.0)
              for nep in (1e-18, 1e-19, 1e-20, 1e-21, 1e-22)]
    specs += [CurveSpec.dark_counts(rate, 100.0) for rate in (10.0, 100.0, 1000.0)]
    specs.append(CurveSpec.squeezed(10.0, 0.001))
    return specs


def default_frequency_grid(nu_min: float = 1e8, nu_max: float = 1e13,
                           points_per_decade: int = 10) -> np.ndarray:
    """Log-spaced frequency grid covering the comparison range."""
    if not 0.0 < nu_min < nu_max or points_per_decade < 1:
        raise ValueError("invalid grid parameters")
    decades = math.log10(nu_max / nu_min)
    n = int(round(decades * points_per_decade)) + 1
    return np.geomspace(nu_min, nu_max, n)
