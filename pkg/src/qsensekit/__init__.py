"""Noise and sensitivity modelling for quantum-limited radio to far-infrared receivers."""

__version__ = "0.1.0"

from . import (  # noqa: F401
    circuit_elements,
    constants,
    coupled_mode,
    noise_network,
    photon_statistics,
    radiometry,
    sensitivity,
)
