import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from landau_gouy.constants import ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, KEV, SPEED_OF_LIGHT
from landau_gouy.errors import DomainError
from landau_gouy.params import (
    derive_setup,
    free_space_setup,
    setup_from_lab_units,
    with_rayleigh_distance,
    with_waist,
)

mpmath = pytest.importorskip("mpmath")


def _oracle(B, T, w0):
    """Independent 50-digit evaluation of the derived scales."""
    mp = mpmath.mp
    mp.dps = 50
    hbar, m0, e, c = (mp.mpf(repr(v)) for v in (HBAR, ELECTRON_MASS, ELEMENTARY_CHARGE, SPEED_OF_LIGHT))
    B, T, w0 = mp.mpf(repr(B)), mp.mpf(repr(T)), mp.mpf(repr(w0))
    gamma = 1 + T / (m0 * c**2)
    v = c * mp.sqrt(1 - 1 / gamma**2)
    k = gamma * m0 * v / hbar
    w_m = 2 * mp.sqrt(hbar / (e * B))
    return {
        "gamma": gamma,
        "v": v,
        "k": k,
        "w_m": w_m,
        "z_m": k * w_m**2 / 2,
        "z_R": k * w0**2 / 2,
        "omega_L": e * B / (2 * gamma * m0),
    }


@pytest.mark.parametrize("B,kev,w0", [(1.9, 200.0, 1e-9), (0.5, 80.0, 3e-8), (7.0, 300.0, 5e-7)])
def test_derived_scales_match_high_precision_oracle(B, kev, w0):
    s = derive_setup(B, kev * KEV, w0)
    ref = _oracle(B, kev * KEV, w0)
    for name, value in ref.items():
        assert getattr(s, name) == pytest.approx(float(value), rel=1e-13), name
    assert s.omega_c == 2 * s.omega_L
    assert s.z_L == pytest.approx(2 * math.pi * s.z_m, rel=1e-15)


def test_lab_values(lab):
    assert lab.v / SPEED_OF_LIGHT == pytest.approx(0.69531, abs=1e-5)
    assert lab.gamma == pytest.approx(1.39139, abs=1e-5)
    assert lab.w_m == pytest.approx(3.7225e-8, rel=1e-4)


@pytest.mark.parametrize(
    "args",
    [(0.0, 200 * KEV, 1e-9), (-1.0, 200 * KEV, 1e-9), (1.9, 0.0, 1e-9), (1.9, 200 * KEV, -1e-9), (math.nan, 1.0, 1.0), (1.9, math.inf, 1e-9)],
)
def test_nonpositive_inputs_rejected(args):
    with pytest.raises(DomainError):
        derive_setup(*args)


@given(B=st.floats(0.01, 20), factor=st.floats(0.1, 100))
def test_magnetic_length_scales_as_inverse_sqrt_field(B, factor):
    a = derive_setup(B, 200 * KEV, 1e-9)
    b = derive_setup(B * factor, 200 * KEV, 1e-9)
    assert a.w_m / b.w_m == pytest.approx(math.sqrt(factor), rel=1e-12)
    assert b.omega_L / a.omega_L == pytest.approx(factor, rel=1e-12)


@given(kev=st.floats(1, 1000), w0=st.floats(1e-10, 1e-6))
def test_rayleigh_and_waist_are_consistent(kev, w0):
    s = derive_setup(1.0, kev * KEV, w0)
    back = with_rayleigh_distance(s, s.z_R)
    assert back.w0 == pytest.approx(w0, rel=1e-12)
    assert s.width_ratio == pytest.approx(s.z_m / s.z_R, rel=1e-12)


def test_free_space_branch():
    f = free_space_setup(200 * KEV, 2e-8)
    assert f.is_free_space and f.omega_L == 0 and math.isinf(f.z_m)
    assert with_waist(f, 1e-8).is_free_space
    assert setup_from_lab_units(0.0, 200.0, waist_nm=20.0).is_free_space


def test_lab_units_require_one_size():
    with pytest.raises(DomainError):
        setup_from_lab_units(1.9, 200.0)
    with pytest.raises(DomainError):
        setup_from_lab_units(1.9, 200.0, waist_nm=1.0, zr_um=1.0)
    s = setup_from_lab_units(1.9, 200.0, zr_um=1000.0)
    assert s.z_R == pytest.approx(1e-3, rel=1e-12)
