"""Quantised lumped-element formulas and superconductor material constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import BOLTZMANN, ELEMENTARY_CHARGE, HBAR, PLANCK


@dataclass(frozen=True)
class ResonatorSpec:
    """An L-C resonator weakly coupled to a bath at temperature ``temperature``."""

    omega0: float  # rad/s
    inductance: float  # H
    capacitance: float  # F
    quality_factor: float
    temperature: float  # K

    def __post_init__(self):
        if self.inductance <= 0.0 or self.capacitance <= 0.0:
            raise ValueError("inductance and capacitance must be positive")
        if self.quality_factor <= 0.0:
            raise ValueError("quality factor must be positive")
        if self.temperature < 0.0:
            raise ValueError("temperature must be non-negative")
        expected = 1.0 / math.sqrt(self.inductance * self.capacitance)
        if abs(self.omega0 - expected) > 1e-9 * expected:
            raise ValueError("omega0 must equal 1/sqrt(L*C)")

    @classmethod
    def from_lc(cls, inductance: float, capacitance: float, quality_factor: float,
                temperature: float) -> "ResonatorSpec":
        omega0 = 1.0 / math.sqrt(inductance * capacitance)
        return cls(omega0, inductance, capacitance, quality_factor, temperature)

    @property
    def frequency(self) -> float:
        return self.omega0 / (2.0 * math.pi)


@dataclass(frozen=True)
class Material:
    """A superconductor identified by its critical temperature."""

    name: str
    t_c: float  # K

    def __post_init__(self):
        if self.t_c <= 0.0:
            raise ValueError("critical temperature must be positive")


# Common thin-film superconductors; user-supplied entries extend this set.
BUILTIN_MATERIALS: tuple[Material, ...] = (
    Material("NbN", 16.0),
    Material("Nb", 9.3),
    Material("Ta", 4.48),
    Material("Al", 1.2),
    Material("Mo", 0.9),
    Material("Ti", 0.39),
)


def thermal_coth(omega0: float, temperature: float) -> float:
    """coth(hbar*omega0 / 2kT); returns exactly 1 at zero temperature."""
    if omega0 <= 0.0:
        raise ValueError("omega0 must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0.0:
        return 1.0
    x = 0.5 * HBAR * omega0 / (BOLTZMANN * temperature)
    return 1.0 / math.tanh(x)


def quadrature_variance(res: ResonatorSpec) -> tuple[float, float]:
    """Voltage and current quadrature variances of a thermal resonator.

    (dv)^2 = (hbar*w0/2C) coth(hbar*w0/2kT) and (di)^2 = (hbar*w0/2L) coth(...);
    at zero temperature the coth factor is one and the vacuum values remain.
    """
    factor = thermal_coth(res.omega0, res.temperature)
    dv2 = 0.5 * HBAR * res.omega0 / res.capacitance * factor
    di2 = 0.5 * HBAR * res.omega0 / res.inductance * factor
    return dv2, di2


def classical_quantum_crossover_temperature(nu0: float) -> float:
    """Bath temperature h*nu0/k below which a resonator is quantum dominated."""
    if nu0 <= 0.0:
        raise ValueError("frequency must be positive")
    return PLANCK * nu0 / BOLTZMANN


def lorentzian_noise_bandwidth(f0: float, quality_factor: float) -> float:
    """Noise bandwidth pi*f0/(2Q) of a single-pole (Lorentzian) resonance."""
    if f0 <= 0.0 or quality_factor <= 0.0:
        raise ValueError("frequency and quality factor must be positive")
    return 0.5 * math.pi * f0 / quality_factor


@dataclass(frozen=True)
class GapProperties:
    energy_gap_ev: float
    gap_frequency_hz: float


def gap_properties(material: Material) -> GapProperties:
    """Superconducting energy gap 7kT_c/2 (eV) and pair-breaking frequency (Hz)."""
    gap_joule = 3.5 * BOLTZMANN * material.t_c
    return GapProperties(gap_joule / ELEMENTARY_CHARGE, gap_joule / PLANCK)


def flux_quantum() -> float:
    """Magnetic flux quantum h/2e in Wb."""
    return PLANCK / (2.0 * ELEMENTARY_CHARGE)


def materials_csv(materials=BUILTIN_MATERIALS) -> str:
    """Materials with derived gap values as CSV: name, T_c, E_g, f_g."""
    lines = ["name,Tc_K,Eg_eV,fg_Hz"]
    for m in materials:
        gap = gap_properties(m)
        lines.append(f"{m.name},{m.t_c:.12g},{gap.energy_gap_ev:.12g},"
                     f"{gap.gap_frequency_hz:.12g}")
    return "\n".join(lines) + "\n"


def materials_from_csv(text: str) -> tuple[Material, ...]:
    """Read materials from CSV with at least ``name`` and ``Tc_K`` columns."""
    rows = [line.strip() for line in text.splitlines() if line.strip()
            and not line.startswith("#")]
    if not rows:
        raise ValueError("empty materials file")
    header = [col.strip().lower() for col in rows[0].split(",")]
    try:
        name_col = header.index("name")
        tc_col = header.index("tc_k")
    except ValueError as exc:
        raise ValueError("materials CSV needs 'name' and 'Tc_K' columns") from exc
    out = []
    for row in rows[1:]:
        cells = [c.strip() for c in row.split(",")]
        out.append(Material(cells[name_col], float(cells[tc_col])))
    return tuple(out)
