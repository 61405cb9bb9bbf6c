"""Sampled transverse wavefunctions on a uniform, cell-centred Cartesian grid.

Sample (iy, ix) sits at x = (ix - (nx-1)/2) dx, y = (iy - (ny-1)/2) dy, so
the grid is mirror-symmetric about both axes and never samples the beam axis
or the line y = 0 itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .modes import ModeIndex, evaluate_mode
from .params import PhysicalSetup

__all__ = [
    "ComplexField",
    "axis_coordinates",
    "balanced_extent",
    "mode_field",
    "spectral_gradient",
    "wavenumbers",
]

MIN_POINTS = 64


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def axis_coordinates(n: int, d: float) -> np.ndarray:
    return (np.arange(n) - (n - 1) / 2.0) * d


def wavenumbers(n: int, d: float) -> np.ndarray:
    return 2.0 * np.pi * sfft.fftfreq(n, d)


@dataclass(frozen=True)
class ComplexField:
    """Complex amplitudes ``data[iy, ix]`` at axial position ``z``."""

    data: np.ndarray
    dx: float
    dy: float
    z: float

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex, copy=True)
        if arr.ndim != 2:
            raise ValueError("field data must be two-dimensional")
        ny, nx = arr.shape
        for n in (nx, ny):
            if not _is_pow2(n) or n < MIN_POINTS:
                raise ValueError(f"grid sizes must be powers of two >= {MIN_POINTS}, got {arr.shape}")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid spacing must be positive")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "z", float(self.z))

    @property
    def nx(self) -> int:
        return self.data.shape[1]

    @property
    def ny(self) -> int:
        return self.data.shape[0]

    @property
    def x(self) -> np.ndarray:
        return axis_coordinates(self.nx, self.dx)

    @property
    def y(self) -> np.ndarray:
        return axis_coordinates(self.ny, self.dy)

    @property
    def extent(self) -> tuple[float, float]:
        return self.nx * self.dx, self.ny * self.dy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="xy")

    def intensity(self) -> np.ndarray:
        return np.abs(self.data) ** 2

    def norm(self) -> float:
        """Total probability, sum |Phi|^2 dx dy."""
        return float(np.sum(self.intensity()) * self.dx * self.dy)

    def replace(self, data=None, z=None) -> "ComplexField":
        return ComplexField(
            self.data if data is None else data,
            self.dx,
            self.dy,
            self.z if z is None else z,
        )

    def normalized(self) -> "ComplexField":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalise a zero field")
        return self.replace(self.data / math.sqrt(nrm))

    def inner(self, other: "ComplexField") -> complex:
        """<self|other> with the dx dy measure."""
        return complex(np.vdot(self.data, other.data) * self.dx * self.dy)


def balanced_extent(setup: PhysicalSetup, n: int) -> float:
    """Grid extent L = w_m sqrt(pi n).

    At this extent the largest grid wavenumber maps onto the grid edge under
    the harmonic part of the propagator, so the kinetic and potential parts
    of the spectrum are equal and the Chebyshev order per unit z is smallest.
    """
    if setup.is_free_space:
        raise ValueError("no magnetic length in free space; give the extent explicitly")
    return setup.w_m * math.sqrt(math.pi * n)


def mode_field(
    setup: PhysicalSetup, mode: ModeIndex, z: float, n: int, extent: float | None = None
) -> ComplexField:
    """Sample Psi_nl on an n x n grid of side ``extent`` (default balanced)."""
    if extent is None:
        extent = balanced_extent(setup, n)
    d = extent / n
    xs = axis_coordinates(n, d)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    return ComplexField(evaluate_mode(setup, mode, X, Y, z), d, d, z)


def spectral_gradient(field: ComplexField) -> tuple[np.ndarray, np.ndarray]:
    """(d/dx, d/dy) of the field by FFT differentiation."""
    kx = wavenumbers(field.nx, field.dx)
    ky = wavenumbers(field.ny, field.dy)
    dfx = sfft.ifft(1j * kx[None, :] * sfft.fft(field.data, axis=1), axis=1)
    dfy = sfft.ifft(1j * ky[:, None] * sfft.fft(field.data, axis=0), axis=0)
    return dfx, dfy
