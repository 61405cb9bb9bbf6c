"""Laboratory inputs to derived beam scales.

Everything is SI internally. The electron charge is stored as its magnitude
and signs are applied in the formulas (the electron has e = -|e|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import (
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    HBAR,
    KEV,
    NANOMETER,
    SPEED_OF_LIGHT,
)
from .errors import DomainError

__all__ = [
    "PhysicalSetup",
    "derive_setup",
    "free_space_setup",
    "setup_from_lab_units",
    "with_rayleigh_distance",
    "with_waist",
]


@dataclass(frozen=True)
class PhysicalSetup:
    """Field, beam energy and waist together with every derived scale.

    ``B == 0`` is a valid free-space setup: the magnetic lengths are then
    infinite and the Larmor frequency vanishes.
    """

    B: float
    kinetic_energy: float
    w0: float
    gamma: float
    v: float
    k: float
    w_m: float
    z_m: float
    z_R: float
    z_L: float
    omega_L: float
    omega_c: float

    @property
    def mass(self) -> float:
        """Relativistic mass gamma * m0."""
        return self.gamma * ELECTRON_MASS

    @property
    def is_free_space(self) -> bool:
        return self.B == 0.0

    @property
    def width_ratio(self) -> float:
        """z_m / z_R = w_m^2 / w0^2 (infinite in free space)."""
        return self.z_m / self.z_R

    @property
    def larmor_wavenumber(self) -> float:
        """1/z_m, the Larmor rotation rate per unit propagation length."""
        return 0.0 if self.is_free_space else 1.0 / self.z_m

    def rows(self) -> list[tuple[str, float, str]]:
        """(label, value, unit) rows for reporting."""
        return [
            ("B", self.B, "T"),
            ("kinetic_energy", self.kinetic_energy, "J"),
            ("kinetic_energy_kev", self.kinetic_energy / KEV, "keV"),
            ("w0", self.w0, "m"),
            ("gamma", self.gamma, "1"),
            ("v", self.v, "m/s"),
            ("beta", self.v / SPEED_OF_LIGHT, "1"),
            ("k", self.k, "1/m"),
            ("w_m", self.w_m, "m"),
            ("z_m", self.z_m, "m"),
            ("z_R", self.z_R, "m"),
            ("z_L", self.z_L, "m"),
            ("omega_L", self.omega_L, "rad/s"),
            ("omega_c", self.omega_c, "rad/s"),
        ]


def _kinematics(kinetic_energy: float) -> tuple[float, float, float]:
    gamma = 1.0 + kinetic_energy / (ELECTRON_MASS * SPEED_OF_LIGHT**2)
    v = SPEED_OF_LIGHT * math.sqrt(1.0 - 1.0 / gamma**2)
    k = gamma * ELECTRON_MASS * v / HBAR
    return gamma, v, k


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be a positive finite number, got {value!r}")


def derive_setup(B: float, kinetic_energy: float, w0: float) -> PhysicalSetup:
    """Derive all scales from field [T], kinetic energy [J] and waist [m]."""
    _check_positive(B=B, kinetic_energy=kinetic_energy, w0=w0)
    gamma, v, k = _kinematics(kinetic_energy)
    mass = gamma * ELECTRON_MASS
    w_m = 2.0 * math.sqrt(HBAR / (ELEMENTARY_CHARGE * B))
    z_m = k * w_m**2 / 2.0
    omega_L = ELEMENTARY_CHARGE * B / (2.0 * mass)
    return PhysicalSetup(
        B=float(B),
        kinetic_energy=float(kinetic_energy),
        w0=float(w0),
        gamma=gamma,
        v=v,
        k=k,
        w_m=w_m,
        z_m=z_m,
        z_R=k * w0**2 / 2.0,
        z_L=2.0 * math.pi * z_m,
        omega_L=omega_L,
        omega_c=2.0 * omega_L,
    )


def free_space_setup(kinetic_energy: float, w0: float) -> PhysicalSetup:
    """The B = 0 limit, handled explicitly instead of via a huge z_m."""
    _check_positive(kinetic_energy=kinetic_energy, w0=w0)
    gamma, v, k = _kinematics(kinetic_energy)
    return PhysicalSetup(
        B=0.0,
        kinetic_energy=float(kinetic_energy),
        w0=float(w0),
        gamma=gamma,
        v=v,
        k=k,
        w_m=math.inf,
        z_m=math.inf,
        z_R=k * w0**2 / 2.0,
        z_L=math.inf,
        omega_L=0.0,
        omega_c=0.0,
    )


def with_waist(setup: PhysicalSetup, w0: float) -> PhysicalSetup:
    """Same field and energy, different beam waist."""
    if setup.is_free_space:
        return free_space_setup(setup.kinetic_energy, w0)
    return derive_setup(setup.B, setup.kinetic_energy, w0)


def with_rayleigh_distance(setup: PhysicalSetup, z_R: float) -> PhysicalSetup:
    """Same field and energy, waist chosen so that k w0^2 / 2 = z_R."""
    _check_positive(z_R=z_R)
    return with_waist(setup, math.sqrt(2.0 * z_R / setup.k))


def setup_from_lab_units(
    field_tesla: float,
    energy_kev: float,
    waist_nm: float | None = None,
    zr_um: float | None = None,
) -> PhysicalSetup:
    """Build a setup from the units used on the command line.

    Exactly one of ``waist_nm`` and ``zr_um`` must be given. A zero field
    selects the free-space branch.
    """
    if (waist_nm is None) == (zr_um is None):
        raise DomainError("give exactly one of waist_nm and zr_um")
    _check_positive(energy_kev=energy_kev)
    if field_tesla < 0:
        raise DomainError(f"field_tesla must be non-negative, got {field_tesla!r}")
    energy = energy_kev * KEV
    w0 = waist_nm * NANOMETER if waist_nm is not None else None
    if w0 is None:
        _check_positive(zr_um=zr_um)
        k = _kinematics(energy)[2]
        w0 = math.sqrt(2.0 * zr_um * 1e-6 / k)
    _check_positive(waist=w0)
    if field_tesla == 0:
        return free_space_setup(energy, w0)
    return derive_setup(field_tesla, energy, w0)
