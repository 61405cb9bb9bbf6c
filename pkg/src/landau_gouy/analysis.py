"""Observables extracted from sampled fields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.ndimage import map_coordinates

from .errors import AmbiguousUnwrapError
from .field import ComplexField, spectral_gradient
from .modes import ModeIndex, beam_width, evaluate_mode
from .params import PhysicalSetup
from .theory import RotationCurve, RotationModel, RotationSample, free_lg_rotation, knife_edge_rotation

__all__ = [
    "PatternOrientation",
    "OamSpectrum",
    "RESULTANT_THRESHOLD",
    "orientation_angle",
    "rotation_from_snapshots",
    "oam_expectation",
    "oam_spectrum",
    "truncated_mode_spectrum",
    "radial_inverse_square_moment",
    "theory_comparison",
]

RESULTANT_THRESHOLD = 0.05


@dataclass(frozen=True)
class PatternOrientation:
    angle: float
    resultant: float
    z: float

    @property
    def meaningful(self) -> bool:
        return self.resultant > RESULTANT_THRESHOLD

    @property
    def status(self) -> str:
        return "ok" if self.meaningful else "symmetric-pattern"


@dataclass(frozen=True)
class OamSpectrum:
    """Azimuthal power |c_s|^2 at offsets s from the reference charge."""

    offsets: np.ndarray
    weights: np.ndarray
    mean: float
    reference: int
    normalization: float
    captured: float

    def weight(self, offset: int) -> float:
        hit = np.nonzero(self.offsets == offset)[0]
        return float(self.weights[hit[0]]) if hit.size else 0.0


def orientation_angle(field: ComplexField) -> PatternOrientation:
    """Intensity-weighted circular mean of the azimuth about the beam axis."""
    X, Y = field.mesh()
    rho = field.intensity()
    total = rho.sum()
    if total == 0:
        return PatternOrientation(0.0, 0.0, field.z)
    resultant = np.sum(rho * (X + 1j * Y) / np.hypot(X, Y))
    return PatternOrientation(float(np.angle(resultant)), float(abs(resultant) / total), field.z)


def rotation_from_snapshots(snapshots, threshold: float = RESULTANT_THRESHOLD) -> RotationCurve:
    """Unwrapped pattern rotation of each snapshot relative to the first.

    Consecutive orientations must differ by less than pi/2; otherwise the
    unwrap is ambiguous and AmbiguousUnwrapError asks for denser planes.
    """
    snapshots = list(snapshots)
    if len(snapshots) < 2:
        raise ValueError("need at least two snapshots")
    orient = [orientation_angle(f) for f in snapshots]
    z_last = snapshots[-1].z
    if any(o.resultant <= threshold for o in orient):
        return RotationCurve(setup=None, mode=None, z_df=z_last, samples=[], status="symmetric-pattern")
    angles = [0.0]
    for prev, cur in zip(orient, orient[1:]):
        step = math.remainder(cur.angle - prev.angle, 2 * math.pi)
        if abs(step) >= math.pi / 2:
            raise AmbiguousUnwrapError(
                f"orientation jumps by {math.degrees(step):.1f} deg between z={prev.z:.6e} and z={cur.z:.6e}; "
                "record more planes"
            )
        angles.append(angles[-1] + step)
    samples = [RotationSample(o.z, a, RotationModel.SIMULATED) for o, a in zip(orient, angles)]
    return RotationCurve(setup=None, mode=None, z_df=z_last, samples=samples)


def oam_expectation(field: ComplexField) -> float:
    """<L_z>/hbar = <Phi| -i (x d/dy - y d/dx) |Phi> / <Phi|Phi>, spectral derivatives."""
    X, Y = field.mesh()
    dfx, dfy = spectral_gradient(field)
    lz = -1j * (X * dfy - Y * dfx)
    num = np.vdot(field.data, lz)
    den = np.vdot(field.data, field.data)
    return float((num / den).real)


def _ring_grid(n_r: int, n_phi: int, r_max: float):
    dr = r_max / n_r
    r = (np.arange(n_r) + 0.5) * dr
    # half-step offset: no sample ever sits on phi = 0 or phi = pi
    phi = 2 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    return r, dr, phi


def _polar_samples(field: ComplexField, n_r: int, n_phi: int, r_max: float | None):
    if r_max is None:
        r_max = 0.5 * min(field.extent) - 2 * max(field.dx, field.dy)
    r, dr, phi = _ring_grid(n_r, n_phi, r_max)
    R, P = np.meshgrid(r, phi, indexing="ij")
    ix = R * np.cos(P) / field.dx + (field.nx - 1) / 2.0
    iy = R * np.sin(P) / field.dy + (field.ny - 1) / 2.0
    coords = np.array([iy, ix])
    re = map_coordinates(field.data.real, coords, order=3, mode="constant")
    im = map_coordinates(field.data.imag, coords, order=3, mode="constant")
    return r, dr, phi, re + 1j * im


def _ring_spectrum(r, dr, phi, polar, reference: int, captured: float) -> OamSpectrum:
    """Demodulate by e^{-i reference phi}, FFT each ring, integrate r dr.

    Offsets run symmetrically about the reference. The unpaired Nyquist bin
    is its own alias at +-n_phi/2, so it counts with offset 0 in the mean.
    """
    n_phi = phi.size
    demod = polar * np.exp(-1j * reference * phi)[None, :]
    coeff = sfft.fft(demod, axis=1) / n_phi
    power = (np.abs(coeff) ** 2 * (r * dr)[:, None]).sum(axis=0) * 2 * np.pi
    offsets = np.rint(sfft.fftfreq(n_phi) * n_phi).astype(int)
    order = np.argsort(offsets)
    offsets, power = offsets[order], power[order]
    total = power.sum()
    if total == 0:
        raise ValueError("field has no power inside the sampled disc")
    weights = power / total
    lever = np.where(np.abs(offsets) * 2 == n_phi, 0, offsets)
    return OamSpectrum(
        offsets=offsets,
        weights=weights,
        mean=float(reference + np.sum(lever * weights)),
        reference=reference,
        normalization=float(weights.sum()),
        captured=captured,
    )


def oam_spectrum(
    field: ComplexField,
    reference: int = 0,
    n_phi: int = 512,
    n_r: int | None = None,
    r_max: float | None = None,
) -> OamSpectrum:
    """Azimuthal Fourier power on rings, integrated over r dr.

    Offsets are relative to ``reference`` (typically the charge of the uncut
    mode); ``mean`` is the absolute mean OAM <L_z>/hbar.
    """
    if n_r is None:
        n_r = min(field.nx, field.ny) // 2
    r, dr, phi, polar = _polar_samples(field, n_r, n_phi, r_max)
    total = float(np.sum(np.abs(polar) ** 2 * (r * dr)[:, None]) * 2 * np.pi / n_phi)
    nrm = field.norm()
    return _ring_spectrum(r, dr, phi, polar, reference, total / nrm if nrm else 0.0)


def truncated_mode_spectrum(
    setup: PhysicalSetup,
    mode: ModeIndex,
    z: float,
    n_phi: int = 4096,
    n_r: int = 400,
    r_widths: float = 6.0,
) -> OamSpectrum:
    """Spectrum of the analytic mode cut to 0 < phi < pi, sampled on rings.

    The cut is applied exactly in the azimuth rather than on a Cartesian
    grid, so this measures what the truncation itself does to the OAM.
    """
    w = beam_width(setup, z)
    r_max = (r_widths + math.sqrt(mode.N)) * w
    r, dr, phi = _ring_grid(n_r, n_phi, r_max)
    R, P = np.meshgrid(r, phi, indexing="ij")
    vals = evaluate_mode(setup, mode, R * np.cos(P), R * np.sin(P), z)
    vals = np.where(P < np.pi, vals, 0.0)
    return _ring_spectrum(r, dr, phi, vals, mode.ell, 1.0)


def radial_inverse_square_moment(field: ComplexField, core_radius: float | None = None) -> float:
    """<r^-2> by grid quadrature, excluding a core disc (default radius 2 dx)."""
    if core_radius is None:
        core_radius = 2.0 * field.dx
    X, Y = field.mesh()
    r2 = X**2 + Y**2
    rho = field.intensity()
    mask = r2 > core_radius**2
    return float(np.sum(rho[mask] / r2[mask]) / rho.sum())


def theory_comparison(
    setup: PhysicalSetup, mode: ModeIndex, z_k: float, z_df: float, simulated_rotation: float
) -> dict:
    """Simulated pattern rotation (observation minus knife-edge plane) next to
    the two closed-form predictions, which enter with a minus sign."""
    gouy = -knife_edge_rotation(setup, mode, z_k, z_df)
    free = -free_lg_rotation(setup, mode, z_k, z_df)
    return {
        "z_k": z_k,
        "z_df": z_df,
        "simulated": simulated_rotation,
        "gouy": gouy,
        "free_lg": free,
        "gouy_error": simulated_rotation - gouy,
        "free_lg_error": simulated_rotation - free,
        "w_k": beam_width(setup, z_k),
    }
