"""Probability current, Bohmian velocities and streamlines.

The current is j = [hbar Im(psi* grad psi) - e A |psi|^2] / m with the
symmetric gauge A = B x r / 2 and e = -|e|, so the vector-potential term
adds omega_L * (-y, x) to the transverse velocity. Streamlines are
parameterised by z because v_z = hbar k / m is uniform for paraxial beams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import RectBivariateSpline
from scipy.special import roots_genlaguerre

from .constants import HBAR
from .errors import DomainError, NodeProximityError
from .field import ComplexField, spectral_gradient
from .modes import ModeIndex, evaluate_mode, inverse_curvature, peak_density, beam_width
from .params import PhysicalSetup
from .special import laguerre

__all__ = [
    "RHO_FLOOR",
    "local_angular_frequency",
    "ModeVelocityField",
    "SnapshotVelocityField",
    "velocity_at",
    "Trajectory",
    "integrate_trajectory",
    "quadrature_starts",
    "sample_starts",
    "ensemble_mean_gain",
]

RHO_FLOOR = 1e-12


def local_angular_frequency(setup: PhysicalSetup, mode: ModeIndex, r):
    """omega(r) = hbar ell / (m r^2) + omega_L."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("local angular frequency is singular at r = 0")
    out = HBAR * mode.ell / (setup.mass * r**2) + setup.omega_L
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ModeVelocityField:
    """Closed-form velocity of a pure mode.

    ``b_sign = -1`` flips the field direction (omega_L -> -omega_L).
    """

    setup: PhysicalSetup
    mode: ModeIndex
    b_sign: int = 1

    def __post_init__(self):
        if self.b_sign not in (1, -1):
            raise ValueError("b_sign must be +1 or -1")

    def density(self, x, y, z):
        return np.abs(evaluate_mode(self.setup, self.mode, x, y, z)) ** 2

    def peak(self, z) -> float:
        return peak_density(self.setup, self.mode, z)

    def velocity(self, x, y, z):
        s = self.setup
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = x**2 + y**2
        radial = s.v * inverse_curvature(s, z)  # v_r / r
        swirl = HBAR * self.mode.ell / (s.mass * r2) + self.b_sign * s.omega_L  # v_phi / r
        vx = radial * x - swirl * y
        vy = radial * y + swirl * x
        return vx, vy, np.full_like(vx, s.v)


class SnapshotVelocityField:
    """Velocity from sampled fields: spectral gradients, bicubic splines in
    (x, y), and linear interpolation in z between snapshots.

    psi and grad psi are interpolated (not v itself) so the 1/rho factor is
    applied only at the query point.
    """

    def __init__(self, setup: PhysicalSetup, snapshots, b_sign: int = 1):
        snaps = sorted(snapshots, key=lambda f: f.z)
        if not snaps:
            raise ValueError("need at least one snapshot")
        self.setup = setup
        self.b_sign = b_sign
        self.z = np.array([f.z for f in snaps])
        self._planes = [self._splines(f) for f in snaps]
        self._peaks = [float(f.intensity().max()) for f in snaps]

    @staticmethod
    def _splines(f: ComplexField):
        dfx, dfy = spectral_gradient(f)
        out = []
        for arr in (f.data, dfx, dfy):
            # RectBivariateSpline wants f[x, y]
            out.append(RectBivariateSpline(f.x, f.y, arr.real.T))
            out.append(RectBivariateSpline(f.x, f.y, arr.imag.T))
        return out

    def _eval_plane(self, i, x, y):
        vals = [sp.ev(x, y) for sp in self._planes[i]]
        return vals[0] + 1j * vals[1], vals[2] + 1j * vals[3], vals[4] + 1j * vals[5]

    def _eval(self, x, y, z):
        if len(self.z) == 1 or z <= self.z[0]:
            return self._eval_plane(0, x, y)
        if z >= self.z[-1]:
            return self._eval_plane(len(self.z) - 1, x, y)
        i = int(np.searchsorted(self.z, z)) - 1
        t = (z - self.z[i]) / (self.z[i + 1] - self.z[i])
        a = self._eval_plane(i, x, y)
        b = self._eval_plane(i + 1, x, y)
        return tuple((1 - t) * p + t * q for p, q in zip(a, b))

    def density(self, x, y, z):
        return np.abs(self._eval(x, y, z)[0]) ** 2

    def peak(self, z) -> float:
        return float(np.interp(z, self.z, self._peaks))

    def velocity(self, x, y, z):
        s = self.setup
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        psi, gx, gy = self._eval(x, y, z)
        rho = np.abs(psi) ** 2
        scale = HBAR / s.mass
        wl = self.b_sign * s.omega_L
        vx = scale * np.imag(np.conj(psi) * gx) / rho - wl * y
        vy = scale * np.imag(np.conj(psi) * gy) / rho + wl * x
        return vx, vy, np.full_like(vx, s.v)


def velocity_at(vfield, x, y, z, floor: float = RHO_FLOOR):
    """(v_x, v_y, v_z) at a point, refusing points within the node floor."""
    rho = float(vfield.density(x, y, z))
    if rho <= floor * vfield.peak(z):
        raise NodeProximityError(f"density {rho:.3e} at ({x:.3e}, {y:.3e}, {z:.3e}) is below the node floor")
    vx, vy, vz = vfield.velocity(x, y, z)
    return float(vx), float(vy), float(vz)


@dataclass
class Trajectory:
    """Streamline samples; ``phi`` is the continuously unwrapped azimuth."""

    points: np.ndarray
    phi: np.ndarray
    start: tuple[float, float, float]
    status: str = "complete"
    rtol: float = 1e-9
    nfev: int = 0
    meta: dict = dc_field(default_factory=dict)

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 2]

    @property
    def radius(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    @property
    def azimuth_gain(self) -> float:
        return float(self.phi[-1] - self.phi[0])


def integrate_trajectory(
    vfield,
    start: tuple[float, float],
    z0: float,
    z_end: float,
    tol: float = 1e-9,
    samples: int = 201,
    floor: float = RHO_FLOOR,
) -> Trajectory:
    """Integrate dx/dz = v_x/v_z, dy/dz = v_y/v_z with RK45.

    The azimuth is carried as a third state variable, d phi/dz =
    (x v_y - y v_x) / (r^2 v_z), so it never needs unwrapping. Entering the
    node neighbourhood stops the run and marks the trajectory "truncated".
    """
    if not z_end > z0:
        raise ValueError("z_end must exceed z0")
    x0, y0 = map(float, start)
    velocity_at(vfield, x0, y0, z0, floor)
    r_scale = math.hypot(x0, y0) or 1.0

    def rhs(z, state):
        x, y, _ = state
        vx, vy, vz = vfield.velocity(x, y, z)
        vx, vy, vz = float(vx), float(vy), float(vz)
        r2 = x * x + y * y
        return [vx / vz, vy / vz, (x * vy - y * vx) / (r2 * vz)]

    def node(z, state):
        return float(vfield.density(state[0], state[1], z)) - floor * vfield.peak(z)

    node.terminal = True
    node.direction = -1

    z_eval = np.linspace(z0, z_end, samples)
    sol = solve_ivp(
        rhs,
        (z0, z_end),
        [x0, y0, math.atan2(y0, x0)],
        method="RK45",
        t_eval=z_eval,
        rtol=tol,
        atol=[tol * r_scale, tol * r_scale, tol],
        events=node,
    )
    if not sol.success:
        raise RuntimeError(f"streamline integration failed: {sol.message}")
    status = "truncated" if sol.status == 1 else "complete"
    pts = np.column_stack([sol.y[0], sol.y[1], sol.t])
    return Trajectory(points=pts, phi=sol.y[2].copy(), start=(x0, y0, z0), status=status, rtol=tol, nfev=sol.nfev)


def quadrature_starts(setup: PhysicalSetup, mode: ModeIndex, z0: float, radial: int = 8, angles: int = 8):
    """Density-weighted start points (x, y, weight) on a Gauss-Laguerre rule.

    In s = 2 r^2 / w^2 the radial density is s^|l| e^-s L_n(s)^2. Nodes use
    the generalised weight s^(|l|-1) e^-s, so quantities of the form A/s + B
    (the azimuth gain of a pure-mode streamline) are averaged exactly.
    """
    al = abs(mode.ell)
    base = al - 1 if al > 0 else 0
    s, w = roots_genlaguerre(radial, base)
    extra = s if al > 0 else np.ones_like(s)
    weights = w * extra * laguerre(mode.n, al, s) ** 2
    weights = weights / weights.sum()
    r = beam_width(setup, z0) * np.sqrt(s / 2.0)
    out = []
    for j in range(angles):
        th = 2 * math.pi * (j + 0.5) / angles
        for ri, wi in zip(r, weights):
            out.append((ri * math.cos(th), ri * math.sin(th), wi / angles))
    return out


def sample_starts(setup: PhysicalSetup, mode: ModeIndex, z0: float, count: int, seed: int = 0):
    """Seeded draws (x, y, weight) from |Psi|^2 at z0 by inverse-CDF in s."""
    rng = np.random.default_rng(seed)
    al = abs(mode.ell)
    s_grid = np.linspace(0.0, 8.0 * mode.N + 40.0, 40001)
    pdf = s_grid**al * np.exp(-s_grid) * laguerre(mode.n, al, s_grid) ** 2
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(s_grid))])
    cdf /= cdf[-1]
    s = np.interp(rng.random(count), cdf, s_grid)
    th = rng.random(count) * 2 * math.pi
    r = beam_width(setup, z0) * np.sqrt(s / 2.0)
    return [(float(a), float(b), 1.0 / count) for a, b in zip(r * np.cos(th), r * np.sin(th))]


def ensemble_mean_gain(vfield, starts, z0: float, z_end: float, tol: float = 1e-10) -> tuple[float, list[Trajectory]]:
    """Weighted mean azimuth gain over completed streamlines."""
    trajs, gains, weights = [], [], []
    for x, y, wt in starts:
        t = integrate_trajectory(vfield, (x, y), z0, z_end, tol=tol, samples=2)
        trajs.append(t)
        if t.status == "complete":
            gains.append(t.azimuth_gain)
            weights.append(wt)
    if not gains:
        raise RuntimeError("no streamline completed")
    w = np.asarray(weights)
    return float(np.dot(w, gains) / w.sum()), trajs
