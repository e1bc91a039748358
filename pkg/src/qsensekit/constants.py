"""Physical constants, CODATA 2018 (exact SI defining values)."""

import math

PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2.0 * math.pi)  # J s
BOLTZMANN = 1.380649e-23  # J / K
SPEED_OF_LIGHT = 299792458.0  # m / s
ELEMENTARY_CHARGE = 1.602176634e-19  # C

CONSTANTS_REVISION = "CODATA-2018"
