"""Exit criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; a per-criterion PASS/FAIL
table is printed at the end of the session.
"""

import csv
import math
import time
from pathlib import Path

import numpy as np
import pytest

from landau_gouy import cli
from landau_gouy.analysis import truncated_mode_spectrum
from landau_gouy.bohmian import ModeVelocityField, ensemble_mean_gain, quadrature_starts
from landau_gouy.constants import KEV, SPEED_OF_LIGHT
from landau_gouy.experiment import run_knife_edge
from landau_gouy.field import mode_field
from landau_gouy.modes import ModeIndex, beam_width, gouy_phase
from landau_gouy.params import derive_setup, free_space_setup, with_rayleigh_distance, with_waist
from landau_gouy.propagator import make_plan, propagate
from landau_gouy.recipes import RECIPES, recipe_config
from landau_gouy.theory import (
    bohmian_rotation_angle,
    free_lg_rotation,
    knife_edge_rotation,
    mean_angular_frequency,
    reversal_points,
)

pytestmark = pytest.mark.acceptance

DATA = Path(__file__).parent / "data"


@pytest.mark.criterion(1, "parameter reproduction (z_m ~ 1759 um, v ~ 0.7c)")
def test_criterion_01_parameters(record_property):
    s = derive_setup(1.9, 200 * KEV, 1e-9)
    zm_um = s.z_m * 1e6
    beta = s.v / SPEED_OF_LIGHT
    zm_err = abs(zm_um - 1759.0) / 1759.0
    v_err = abs(beta - 0.7) / 0.7
    record_property("detail", f"z_m = {zm_um:.2f} um ({100 * zm_err:.2f}% off), v = {beta:.4f} c ({100 * v_err:.2f}% off)")
    assert v_err < 0.01
    assert zm_err < 0.01


@pytest.mark.criterion(2, "limit suite (Landau quantization, B -> 0)")
def test_criterion_02_limits(record_property):
    t0 = time.perf_counter()
    base = derive_setup(1.9, 200 * KEV, 1e-9)
    landau = with_waist(base, base.w_m)
    zs = np.linspace(-2 * math.pi * landau.z_m, 2 * math.pi * landau.z_m, 100)
    worst_a = 0.0
    for ell in (-3, -1, 1, 3):
        ratio = mean_angular_frequency(landau, ModeIndex(0, ell), zs) / landau.omega_L
        worst_a = max(worst_a, float(np.max(np.abs(ratio - (np.sign(ell) + 1)))))

    free = free_space_setup(200 * KEV, 20e-9)
    zs = np.linspace(-50 * free.z_R, 50 * free.z_R, 1001)
    w_ref = free.w0 * np.sqrt(1 + (zs / free.z_R) ** 2)
    worst_b = float(np.max(np.abs(beam_width(free, zs) - w_ref) / w_ref))
    for n, ell in ((0, 1), (1, -3), (2, 3)):
        m = ModeIndex(n, ell)
        ref = m.N * np.arctan(zs / free.z_R)
        got = gouy_phase(free, m, zs)
        worst_b = max(worst_b, float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300))))
        rot_ref = np.sign(ell) * np.arctan(zs / free.z_R)
        rot = bohmian_rotation_angle(free, m, zs)
        worst_b = max(worst_b, float(np.max(np.abs(rot - rot_ref) / np.maximum(np.abs(rot_ref), 1e-300))))
    elapsed = time.perf_counter() - t0
    record_property("detail", f"(a) max |<w>/w_L - (sgn+1)| = {worst_a:.1e}; (b) max rel dev {worst_b:.1e}; {elapsed:.2f} s")
    assert worst_a <= 1e-12
    assert worst_b <= 1e-12
    assert elapsed < 1.0


@pytest.mark.criterion(3, "frequency curve over one period with z_m = 4 z_R")
def test_criterion_03_frequency_curve(tmp_path, record_property):
    t0 = time.perf_counter()
    cfg = recipe_config("fig2")
    (s_neg, m_neg), (s_pos, m_pos) = cfg.cases()
    assert m_neg.ell < 0 < m_pos.ell
    assert s_pos.z_m == pytest.approx(4 * s_pos.z_R, rel=1e-12)
    zs = np.linspace(-math.pi * s_pos.z_m, 0.0, 4001)
    omega = mean_angular_frequency(s_pos, m_pos, zs) / s_pos.omega_L
    w_min = float(np.min(beam_width(s_pos, zs)))
    target = 1 + s_pos.w_m**2 / w_min**2
    max_err = abs(omega.max() - target) / target

    roots = reversal_points(s_neg, m_neg, -math.pi * s_neg.z_m, 0.0)
    residual = max(abs(beam_width(s_neg, z) - s_neg.w_m) / s_neg.w_m for z in roots)
    omega_at_roots = [abs(mean_angular_frequency(s_neg, m_neg, z)) / s_neg.omega_L for z in roots]

    assert cli.main(["rotation-curve", "--config", _write(tmp_path, "fig2"), "--out-dir", str(tmp_path / "o")]) == 0
    with open(tmp_path / "o" / "frequency_0.csv") as fh:
        rows = list(csv.DictReader(fh))
    consts = {(float(r["landau_pos"]), float(r["landau_zero"]), float(r["landau_neg"])) for r in rows}
    elapsed = time.perf_counter() - t0
    record_property(
        "detail",
        f"max {omega.max():.12f} vs {target:.12f}; {len(roots)} zero crossings, |w-w_m|/w_m <= {residual:.1e}; {elapsed:.2f} s",
    )
    assert max_err < 1e-9
    assert len(roots) == 2
    assert residual < 1e-9
    assert max(omega_at_roots) < 1e-8
    assert consts == {(2.0, 1.0, 0.0)}
    assert elapsed < 1.0


@pytest.mark.criterion(4, "knife-edge curves vs digitized experimental points (10 deg RMS)")
def test_criterion_04_experiment(record_property):
    path = DATA / "fig3_digitized.csv"
    if not path.exists():
        record_property("detail", f"fixture {path.name} not available; experimental points were not digitized")
        pytest.fail(f"missing digitized experimental fixture {path}")
    base = derive_setup(1.9, 200 * KEV, 1e-9)
    zr = {1: 1.46e-6, 3: 2.84e-6}
    resid = []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            ell = int(row["ell"])
            s = with_rayleigh_distance(base, zr[abs(ell)])
            pred = math.degrees(knife_edge_rotation(s, ModeIndex(0, ell), float(row["z_k_um"]) * 1e-6, -9e-6))
            resid.append(pred - float(row["angle_deg"]))
    rms = float(np.sqrt(np.mean(np.square(resid))))
    record_property("detail", f"RMS {rms:.2f} deg over {len(resid)} points")
    assert rms < 10.0


@pytest.mark.criterion(5, "v d<phi>/dz equals <omega> (finite differences)")
def test_criterion_05_derivative(record_property):
    rng = np.random.default_rng(20240605)
    base = derive_setup(1.9, 200 * KEV, 1e-9)
    worst = 0.0
    for zr, ell in ((1.46e-6, 1), (1.46e-6, -1), (2.84e-6, 3), (2.84e-6, -3), (1e-3, 3), (1e-3, -3)):
        s = with_rayleigh_distance(base, zr)
        m = ModeIndex(0, ell)
        zs = rng.uniform(-2 * math.pi * s.z_m, 2 * math.pi * s.z_m, 1000 // 6 + 1)
        h = s.z_m * 1e-6
        fd = s.v * (bohmian_rotation_angle(s, m, zs + h) - bohmian_rotation_angle(s, m, zs - h)) / (2 * h)
        exact = mean_angular_frequency(s, m, zs)
        # relative to the local frequency scale; <omega> itself passes through zero for ell < 0
        scale = np.abs(exact) + s.omega_L
        worst = max(worst, float(np.max(np.abs(fd - exact) / scale)))
    record_property("detail", f"max relative error {worst:.2e}")
    assert worst < 1e-5


@pytest.mark.slow
@pytest.mark.criterion(6, "propagator oracle: Psi_03, 1024^2, quarter period")
def test_criterion_06_oracle(desk, record_property):
    t0 = time.perf_counter()
    mode = ModeIndex(0, 3)
    z0, z1 = -math.pi * desk.z_m / 4, 0.0
    initial = mode_field(desk, mode, z0, 1024)
    plan = make_plan(desk, initial, z0, z1, dz=math.pi * desk.z_m / 512)
    (final,) = propagate(plan, initial, [z1])
    exact = mode_field(desk, mode, z1, 1024, initial.extent[0])
    err = np.linalg.norm(final.data - exact.data) / np.linalg.norm(exact.data)
    drift = abs(final.norm() - initial.norm()) / initial.norm()
    elapsed = time.perf_counter() - t0
    record_property("detail", f"L2 rel error {err:.2e}, norm drift {drift:.1e}, {elapsed:.0f} s")
    assert err < 1e-6
    assert drift < 1e-8


CUTS = (1, 2, 3, 4)  # z_k = -j pi z_m / 4


@pytest.fixture(scope="module")
def fig6_runs(desk):
    runs = {}
    t0 = time.perf_counter()
    for ell in (-3, 3):
        for j in CUTS:
            runs[ell, j] = run_knife_edge(
                desk, ModeIndex(0, ell), -j * math.pi * desk.z_m / 4, 0.0, grid=256, planes=9, keep_snapshots=False
            )
    runs["elapsed"] = time.perf_counter() - t0
    return runs


@pytest.mark.slow
@pytest.mark.criterion(7, "simulated rotation vs generalized Gouy within 2 deg")
def test_criterion_07_simulation(desk, fig6_runs, record_property):
    errs, lines = [], []
    for (ell, j), run in ((k, v) for k, v in fig6_runs.items() if k != "elapsed"):
        e = math.degrees(run.rotation - run.predicted)
        errs.append(abs(e))
        lines.append(f"l={ell:+d} j={j}: {math.degrees(run.rotation):.2f}/{math.degrees(run.predicted):.2f}")
    neg = [fig6_runs[-3, j].rotation for j in CUTS]
    steps = np.diff(neg)
    reverses = bool(np.any(steps > 0) and np.any(steps < 0))
    far = fig6_runs[3, 4]
    gap = math.degrees(abs(knife_edge_rotation(desk, far.mode, far.z_k, 0.0) - free_lg_rotation(desk, far.mode, far.z_k, 0.0)))
    sim_vs_free = math.degrees(abs(far.rotation + free_lg_rotation(desk, far.mode, far.z_k, 0.0)))
    record_property(
        "detail",
        f"max |sim - theory| {max(errs):.2f} deg; l=-3 reversal {reverses}; Gouy/free-LG gap {gap:.1f} deg "
        f"(sim off free-LG by {sim_vs_free:.1f}); {fig6_runs['elapsed']:.0f} s",
    )
    assert max(errs) < 2.0, "; ".join(lines)
    assert reverses
    assert gap > 2.0 and sim_vs_free > 2.0
    assert fig6_runs["elapsed"] < 3600


@pytest.mark.slow
@pytest.mark.criterion(8, "OAM conserved by truncation (1e-3) and propagation (1%)")
def test_criterion_08_oam(desk, fig6_runs, record_property):
    worst_cut = 0.0
    for ell in (1, -3, 3):
        for j in CUTS:
            spec = truncated_mode_spectrum(desk, ModeIndex(0, ell), -j * math.pi * desk.z_m / 4)
            worst_cut = max(worst_cut, abs(spec.mean - ell))
    worst_drift, worst_abs = 0.0, 0.0
    for key, run in fig6_runs.items():
        if key == "elapsed":
            continue
        ell = run.mode.ell
        worst_drift = max(worst_drift, run.lz_drift / abs(ell))
        worst_abs = max(worst_abs, max(abs(r.lz - ell) for r in run.records) / abs(ell))
    record_property(
        "detail",
        f"cut |<Lz> - l| {worst_cut:.1e}; propagation drift {100 * worst_drift:.2f}% of |l| "
        f"(grid-sampled cut sits {100 * worst_abs:.2f}% below l, see ledger)",
    )
    assert worst_cut < 1e-3
    assert worst_drift < 0.01


@pytest.mark.criterion(9, "Bohmian ensemble mean azimuth gain within 1%")
def test_criterion_09_bohmian(desk, record_property):
    t0 = time.perf_counter()
    mode = ModeIndex(0, 1)
    z0, z1 = -math.pi * desk.z_m / 2, 0.0
    starts = quadrature_starts(desk, mode, z0)
    assert len(starts) == 64
    gain, trajs = ensemble_mean_gain(ModeVelocityField(desk, mode), starts, z0, z1)
    target = knife_edge_rotation(desk, mode, z1, z0)  # integral of <omega> dz / v
    err = abs(gain - target) / abs(target)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{gain:.10f} vs {target:.10f} rad, rel err {err:.1e}, {elapsed:.1f} s")
    assert all(t.status == "complete" for t in trajs)
    assert err < 0.01
    assert elapsed < 60


@pytest.mark.criterion(10, "experimental-regime simulation: declared not reproducible")
def test_criterion_10_declared(record_property):
    cfg = recipe_config("fig4")
    assert cfg.recipe.command == "simulate"
    assert cfg.numerics.regrid_factor is not None
    assert sorted(cfg.mode.ell) == [-3, -1, 1, 3]
    record_property("detail", "declared; substituted by criteria 6-8, fig4 preset emitted but not gated")


def _write(tmp_path, name):
    path = tmp_path / f"{name}.ini"
    path.write_text(RECIPES[name])
    return str(path)
