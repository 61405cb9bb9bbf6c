"""Paraxial Landau modes and their beam-parameter functions.

z = 0 is the focal plane (w'(0) = 0). All functions accept scalar z or numpy
arrays of z unless noted. The width is written as w(z) = w0 * sqrt(q(z)) with

    q(z) = cos^2(z/z_m) + (z_m/z_R)^2 sin^2(z/z_m)    (B > 0)
    q(z) = 1 + (z/z_R)^2                              (B = 0)

which keeps the magnetic and free-space branches in one code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PhysicalSetup
from .special import laguerre, laguerre_derivative, log_mode_norm

__all__ = [
    "ModeIndex",
    "ModeFrame",
    "continuous_arctan",
    "gouy_branch",
    "beam_width",
    "width_profile",
    "inverse_curvature",
    "curvature_radius",
    "gouy_phase",
    "gouy_phase_derivative",
    "mode_frame",
    "evaluate_mode",
    "mode_z_derivative",
    "peak_density",
]


@dataclass(frozen=True)
class ModeIndex:
    """Radial quantum number n >= 0 and topological charge ell."""

    n: int
    ell: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"radial index n must be a non-negative integer, got {self.n!r}")
        if int(self.ell) != self.ell:
            raise ValueError(f"topological charge must be an integer, got {self.ell!r}")

    @property
    def N(self) -> int:
        return 2 * self.n + abs(self.ell) + 1

    @property
    def sign(self) -> int:
        return int(np.sign(self.ell))


@dataclass(frozen=True)
class ModeFrame:
    w: float
    R: float
    gouy: float
    z: float


def continuous_arctan(ratio: float, u):
    """arctan(ratio * tan u) + pi * floor(u/pi + 1/2), continuous in u.

    Evaluated with atan2 on the reduced argument so the tan poles at
    u = (j + 1/2) pi never appear.
    """
    u = np.asarray(u, dtype=float)
    j = np.floor(u / np.pi + 0.5)
    red = u - j * np.pi
    out = j * np.pi + np.arctan2(ratio * np.sin(red), np.cos(red))
    return out if out.ndim else float(out)


def gouy_branch(setup: PhysicalSetup, z):
    """The continuous arctan term shared by the Gouy phase and rotation angle."""
    if setup.is_free_space:
        return np.arctan(np.asarray(z, dtype=float) / setup.z_R)
    return continuous_arctan(setup.width_ratio, np.asarray(z, dtype=float) / setup.z_m)


def width_profile(setup: PhysicalSetup, z):
    """q(z), q'(z), q''(z) with w(z)^2 = w0^2 q(z)."""
    z = np.asarray(z, dtype=float)
    if setup.is_free_space:
        zr2 = setup.z_R**2
        return 1.0 + z**2 / zr2, 2.0 * z / zr2, np.full_like(z, 2.0 / zr2)
    a2 = setup.width_ratio**2
    u = z / setup.z_m
    c, s = np.cos(u), np.sin(u)
    q = c**2 + a2 * s**2
    dq = (a2 - 1.0) * np.sin(2 * u) / setup.z_m
    d2q = 2.0 * (a2 - 1.0) * np.cos(2 * u) / setup.z_m**2
    return q, dq, d2q


def beam_width(setup: PhysicalSetup, z):
    q = width_profile(setup, z)[0]
    out = setup.w0 * np.sqrt(q)
    return out if np.ndim(out) else float(out)


def inverse_curvature(setup: PhysicalSetup, z):
    """1/R(z) = w'(z)/w(z); finite everywhere, zero on flat wavefronts."""
    q, dq, _ = width_profile(setup, z)
    out = dq / (2.0 * q)
    return out if np.ndim(out) else float(out)


def curvature_radius(setup: PhysicalSetup, z):
    """Wavefront radius of curvature; signed infinity where the wavefront is flat."""
    z = np.asarray(z, dtype=float)
    if setup.is_free_space:
        with np.errstate(divide="ignore"):
            out = np.where(z == 0, np.inf, z + np.divide(setup.z_R**2, z, where=z != 0, out=np.ones_like(z)))
        return out if out.ndim else float(out)
    a2 = setup.width_ratio**2
    u = z / setup.z_m
    num = setup.k * setup.w_m**2 * (np.cos(u) ** 2 + a2 * np.sin(u) ** 2)
    den = (a2 - 1.0) * np.sin(2 * u)
    # sin(2u) at multiples of pi/2 is ~1e-16, not 0; treat as a zero of the denominator
    flat = np.abs(np.sin(2 * u)) < 1e-14
    if abs(a2 - 1.0) < 1e-12:  # Landau state: w0 == w_m
        flat = np.ones_like(flat)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(flat, np.copysign(np.inf, np.where(den == 0, 1.0, den)), num / den)
    return out if out.ndim else float(out)


def gouy_phase(setup: PhysicalSetup, mode: ModeIndex, z):
    """N * continuous_arctan + ell * z / z_m (free space: N * arctan(z/z_R))."""
    branch = gouy_branch(setup, z)
    out = mode.N * branch + mode.ell * np.asarray(z, dtype=float) * setup.larmor_wavenumber
    return out if np.ndim(out) else float(out)


def gouy_phase_derivative(setup: PhysicalSetup, mode: ModeIndex, z):
    """dPhi_G/dz = N / (z_R q(z)) + ell / z_m."""
    q = width_profile(setup, z)[0]
    out = mode.N / (setup.z_R * q) + mode.ell * setup.larmor_wavenumber
    return out if np.ndim(out) else float(out)


def mode_frame(setup: PhysicalSetup, mode: ModeIndex, z: float) -> ModeFrame:
    return ModeFrame(
        w=beam_width(setup, z),
        R=curvature_radius(setup, z),
        gouy=gouy_phase(setup, mode, z),
        z=float(z),
    )


def _radial_parts(setup, mode, r2, z):
    w = beam_width(setup, z)
    s = 2.0 * r2 / w**2
    al = abs(mode.ell)
    norm = np.exp(log_mode_norm(mode.n, mode.ell)) / w
    envelope = norm * s ** (al / 2.0) * np.exp(-r2 / w**2)
    lag = laguerre(mode.n, al, s)
    return w, s, envelope, lag


def _phase(setup, mode, x, y, r2, z):
    return (
        mode.ell * np.arctan2(y, x)
        + 0.5 * setup.k * r2 * inverse_curvature(setup, z)
        - gouy_phase(setup, mode, z)
    )


def evaluate_mode(setup: PhysicalSetup, mode: ModeIndex, x, y, z: float):
    """Complex amplitude Psi_nl(x, y; z) of the paraxial Landau mode.

    Normalised so that the integral of |Psi|^2 over the transverse plane is 1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x**2 + y**2
    _, _, envelope, lag = _radial_parts(setup, mode, r2, z)
    return envelope * lag * np.exp(1j * _phase(setup, mode, x, y, r2, z))


def mode_z_derivative(setup: PhysicalSetup, mode: ModeIndex, x, y, z: float):
    """Analytic d Psi_nl / dz at fixed (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x**2 + y**2
    w, s, envelope, lag = _radial_parts(setup, mode, r2, z)
    q, dq, d2q = width_profile(setup, z)
    dlogw = dq / (2.0 * q)  # w'/w
    al = abs(mode.ell)
    # d/dw of the real amplitude, written as (amplitude factor) * dw/dz / w
    ds_dlogw = -2.0 * s
    damp = envelope * (
        lag * (-(1.0 + al) + 2.0 * r2 / w**2)
        + laguerre_derivative(mode.n, al, s) * ds_dlogw
    ) * dlogw
    dinvR = (d2q * q - dq**2) / (2.0 * q**2)
    dphase = 0.5 * setup.k * r2 * dinvR - gouy_phase_derivative(setup, mode, z)
    phase = np.exp(1j * _phase(setup, mode, x, y, r2, z))
    return (damp + 1j * envelope * lag * dphase) * phase


def peak_density(setup: PhysicalSetup, mode: ModeIndex, z: float) -> float:
    """Maximum of |Psi_nl|^2 over the transverse plane at z."""
    # self-similar: peak scales as 1/w^2; locate it once on a dense radial grid
    al = abs(mode.ell)
    s = np.linspace(0.0, 4.0 * (mode.N + 5), 20001)
    prof = s**al * np.exp(-s) * laguerre(mode.n, al, s) ** 2
    w = beam_width(setup, z)
    return float(np.exp(2 * log_mode_norm(mode.n, mode.ell)) / w**2 * prof.max())
