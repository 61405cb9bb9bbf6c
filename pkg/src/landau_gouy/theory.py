"""Closed-form rotation observables of vortex beams in a uniform field.

Angles are radians; z positions are metres. ``knife_edge_rotation`` gives
the change in pattern azimuth <phi>(z_k) - <phi>(z_df); a pattern cut at
z_k and recorded at z_df therefore appears rotated by minus that amount
relative to the knife-edge plane.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constants import HBAR
from .errors import DomainError
from .modes import ModeIndex, beam_width, gouy_branch, width_profile
from .params import PhysicalSetup

__all__ = [
    "RotationModel",
    "RotationSample",
    "RotationCurve",
    "mean_angular_frequency",
    "bohmian_rotation_angle",
    "knife_edge_rotation",
    "free_lg_rotation",
    "landau_rotation",
    "landau_frequency",
    "rotation_angle",
    "rotation_curve",
    "reversal_points",
]


class RotationModel(str, enum.Enum):
    GENERALIZED_GOUY = "gouy"
    FREE_LG = "free-lg"
    LANDAU_QUANTIZED = "landau"
    SIMULATED = "simulated"


@dataclass(frozen=True)
class RotationSample:
    z_k: float
    angle: float
    model: RotationModel


@dataclass
class RotationCurve:
    """Delta<phi> sampled against knife-edge position (or plane position).

    ``status`` is "ok" unless the curve came from snapshots with no
    measurable orientation, in which case it is "symmetric-pattern" and
    ``samples`` is empty.
    """

    setup: PhysicalSetup | None
    mode: ModeIndex | None
    z_df: float
    samples: list[RotationSample] = field(default_factory=list)
    status: str = "ok"

    def __post_init__(self):
        zs = [s.z_k for s in self.samples]
        if any(b < a for a, b in zip(zs, zs[1:])):
            self.samples = sorted(self.samples, key=lambda s: s.z_k)
        if len({s.model for s in self.samples}) > 1:
            raise ValueError("all samples in a curve must share one model")

    @property
    def z(self) -> np.ndarray:
        return np.array([s.z_k for s in self.samples])

    @property
    def angles(self) -> np.ndarray:
        return np.array([s.angle for s in self.samples])

    @property
    def model(self) -> RotationModel | None:
        return self.samples[0].model if self.samples else None


def _require_vortex(mode: ModeIndex) -> None:
    if mode.ell == 0:
        raise DomainError("mean angular frequency defined for ell != 0")


def mean_angular_frequency(setup: PhysicalSetup, mode: ModeIndex, z):
    """<omega>(z) = omega_L (sgn(ell) w_m^2 / w(z)^2 + 1).

    Written as sgn(ell) 2 hbar / (m w^2) + omega_L, which is the same thing
    and stays finite in free space.
    """
    _require_vortex(mode)
    w = beam_width(setup, z)
    out = mode.sign * 2.0 * HBAR / (setup.mass * w**2) + setup.omega_L
    return out if np.ndim(out) else float(out)


def bohmian_rotation_angle(setup: PhysicalSetup, mode: ModeIndex, z):
    """<phi>(z) = integral of <omega> dz / v, zero at the focus."""
    _require_vortex(mode)
    out = mode.sign * gouy_branch(setup, z) + np.asarray(z, dtype=float) * setup.larmor_wavenumber
    return out if np.ndim(out) else float(out)


def knife_edge_rotation(setup: PhysicalSetup, mode: ModeIndex, z_k, z_df):
    return bohmian_rotation_angle(setup, mode, z_k) - bohmian_rotation_angle(setup, mode, z_df)


def free_lg_rotation(setup: PhysicalSetup, mode: ModeIndex, z_k, z_df):
    """Comparison model: free LG beam width substituted into <omega>."""
    _require_vortex(mode)
    z_k = np.asarray(z_k, dtype=float)
    z_df = np.asarray(z_df, dtype=float)
    out = mode.sign * (np.arctan(z_k / setup.z_R) - np.arctan(z_df / setup.z_R)) + (
        z_k - z_df
    ) * setup.larmor_wavenumber
    return out if np.ndim(out) else float(out)


def landau_frequency(setup: PhysicalSetup, mode: ModeIndex) -> float:
    """(sgn(ell) + 1) omega_L: cyclotron, Larmor or zero."""
    return (mode.sign + 1) * setup.omega_L


def landau_rotation(setup: PhysicalSetup, mode: ModeIndex, z_k, z_df):
    """Rigid rotation at the quantized Landau frequency."""
    _require_vortex(mode)
    out = (mode.sign + 1) * (np.asarray(z_k, dtype=float) - np.asarray(z_df, dtype=float)) * setup.larmor_wavenumber
    return out if np.ndim(out) else float(out)


_MODEL_FUNCS = {
    RotationModel.GENERALIZED_GOUY: knife_edge_rotation,
    RotationModel.FREE_LG: free_lg_rotation,
    RotationModel.LANDAU_QUANTIZED: landau_rotation,
}


def rotation_angle(model: RotationModel | str, setup, mode, z_k, z_df):
    return _MODEL_FUNCS[RotationModel(model)](setup, mode, z_k, z_df)


def rotation_curve(
    setup: PhysicalSetup,
    mode: ModeIndex,
    z_df: float,
    z_k,
    model: RotationModel | str = RotationModel.GENERALIZED_GOUY,
) -> RotationCurve:
    model = RotationModel(model)
    z_k = np.sort(np.atleast_1d(np.asarray(z_k, dtype=float)))
    angles = np.atleast_1d(rotation_angle(model, setup, mode, z_k, z_df))
    samples = [RotationSample(float(z), float(a), model) for z, a in zip(z_k, angles)]
    return RotationCurve(setup=setup, mode=mode, z_df=float(z_df), samples=samples)


def reversal_points(setup: PhysicalSetup, mode: ModeIndex, z_lo: float, z_hi: float, samples: int = 2001):
    """Positions in [z_lo, z_hi] where <omega> changes sign (only for ell < 0).

    Brackets are found on a uniform scan and refined with Brent's method on
    q(z) - z_m/z_R, i.e. w(z) = w_m.
    """
    _require_vortex(mode)
    if mode.ell > 0 or setup.is_free_space:
        return []
    target = setup.width_ratio

    def excess(z):
        return float(width_profile(setup, z)[0]) - target

    zs = np.linspace(z_lo, z_hi, samples)
    vals = width_profile(setup, zs)[0] - target
    roots = []
    for a, b, fa, fb in zip(zs[:-1], zs[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brentq(excess, a, b, xtol=1e-15 * setup.z_m, rtol=1e-15))
    if vals[-1] == 0.0:
        roots.append(float(zs[-1]))
    return roots
