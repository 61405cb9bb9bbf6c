"""Physical constants (CODATA 2018, SI units).

Kept in one table so derived numbers are reproducible regardless of which
scipy version happens to be installed.
"""

HBAR = 1.054571817e-34  # J s
ELECTRON_MASS = 9.1093837015e-31  # kg
ELEMENTARY_CHARGE = 1.602176634e-19  # C, magnitude |e|
SPEED_OF_LIGHT = 299792458.0  # m/s

KEV = 1.0e3 * ELEMENTARY_CHARGE  # J
MICROMETER = 1.0e-6
NANOMETER = 1.0e-9
