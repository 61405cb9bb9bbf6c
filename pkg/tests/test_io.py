import dataclasses
import hashlib
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from landau_gouy.errors import ConfigError
from landau_gouy.field import ComplexField, mode_field
from landau_gouy.io import (
    GeometryConfig,
    ModeConfig,
    NumericsConfig,
    RunConfig,
    SetupConfig,
    dump_config,
    load_config,
    load_field,
    load_manifest,
    override,
    parse_config,
    read_csv,
    read_pgm,
    save_field,
    sha256_file,
    write_csv,
    write_field_pgm,
    write_manifest,
)
from landau_gouy.modes import ModeIndex

finite = st.floats(allow_nan=False, allow_infinity=False)
positive = st.floats(1e-6, 1e6, allow_nan=False)


@st.composite
def configs(draw):
    ells = draw(st.lists(st.integers(-5, 5).filter(bool), min_size=1, max_size=4))
    zr = tuple(draw(st.lists(positive, min_size=len(ells), max_size=len(ells))))
    lo = draw(st.floats(-1e4, 0, allow_nan=False))
    return RunConfig(
        setup=SetupConfig(field_tesla=draw(st.floats(0.01, 20)), energy_kev=draw(positive), zr_um=zr),
        mode=ModeConfig(n=(draw(st.integers(0, 4)),), ell=tuple(ells)),
        geometry=GeometryConfig(
            zk_um=tuple(draw(st.lists(finite, max_size=3))),
            zdf_um=draw(finite),
            zk_range_um=(lo, lo + draw(positive)),
            steps=draw(st.integers(2, 5000)),
        ),
        numerics=NumericsConfig(
            grid=2 ** draw(st.integers(6, 12)),
            regrid_factor=draw(st.none() | st.floats(1.01, 10)),
            cheb_tol=draw(st.floats(1e-16, 1e-4)),
        ),
    ).validate()


@given(cfg=configs())
def test_config_round_trip(cfg):
    assert parse_config(dump_config(cfg)) == cfg


def test_defaults_parse():
    cfg = parse_config("[setup]\nzr_um = 1000\n")
    assert cfg.setup.zr_um == (1000.0,) and cfg.mode.ell == (1,)
    (setup, mode), = cfg.cases()
    assert setup.z_R == pytest.approx(1e-3) and mode == ModeIndex(0, 1)


def test_load_from_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[setup]\nwaist_nm = 20\n[mode]\nell = -1, 1\n")
    cfg = load_config(path)
    assert [m.ell for _, m in cfg.cases()] == [-1, 1]
    with pytest.raises(ConfigError, match="cannot read|No such|not found"):
        load_config(tmp_path / "missing.ini")


@pytest.mark.parametrize(
    "text,message",
    [
        ("[setup]\nzr_um = 1000\nnonsense\n", "line 3"),
        ("zr_um = 1\n", "line 1"),
        ("[setup]\nzr_um = 1\nzr_um = 2\n", "line 3"),
        ("[setup]\nzr_um = 1\n[bogus]\nx = 1\n", r"\[bogus\]"),
        ("[setup]\nzr_um = 1\ncolour = red\n", "setup.colour"),
        ("[setup]\nzr_um = abc\n", "setup.zr_um"),
        ("[setup]\nzr_um = 1\nwaist_nm = 2\n", "exactly one"),
        ("[setup]\nzr_um = 1\n[numerics]\ngrid = 100\n", "numerics.grid"),
        ("[setup]\nzr_um = 1\n[geometry]\nzk_range_um = 5, 1\n", "geometry.zk_range_um"),
        ("[setup]\nzr_um = 1\n[recipe]\nmodels = gouy, magic\n", "magic"),
        ("[setup]\nzr_um = 1, 2\n[mode]\nell = 1, 2, 3\n", "one per mode.ell"),
    ],
)
def test_config_errors_name_the_problem(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(text)


def test_override():
    cfg = parse_config("[setup]\nzr_um = 1000\n")
    assert override(cfg, "numerics", grid=None) is cfg
    assert override(cfg, "numerics", grid=512).numerics.grid == 512
    with pytest.raises(ConfigError):
        override(cfg, "numerics", grid=300)


def test_knife_edge_positions(desk):
    cfg = parse_config("[setup]\nzr_um = 1000\n[geometry]\nzk_um = -20, -350\nzk_pi_zm = -0.5\n")
    zs = cfg.knife_edges(desk)
    assert list(zs) == sorted(zs) and len(zs) == 3
    assert -0.5 * np.pi * desk.z_m in zs
    cfg = parse_config("[setup]\nzr_um = 1000\n[geometry]\nzk_range_pi_zm = -1, 0\nsteps = 5\n")
    np.testing.assert_allclose(cfg.knife_edge_range(desk), np.linspace(-np.pi * desk.z_m, 0, 5))


def test_pgm_of_zero_field(tmp_path):
    f = ComplexField(np.zeros((64, 64), complex), 1.0, 1.0, 0.0)
    write_field_pgm(f, tmp_path / "z.pgm")
    assert not read_pgm(tmp_path / "z.pgm").any()


def test_pgm_of_ring(tmp_path, desk):
    f = mode_field(desk, ModeIndex(0, 2), 0.0, 64)
    write_field_pgm(f, tmp_path / "r.pgm")
    img = read_pgm(tmp_path / "r.pgm")
    assert img.shape == (64, 64) and img.max() == 65535
    np.testing.assert_array_equal(img, img[::-1])
    np.testing.assert_array_equal(img, img[:, ::-1])
    np.testing.assert_array_equal(img, img.T)
    raw = (tmp_path / "r.pgm").read_bytes()
    assert raw.startswith(b"P5\n64 64\n65535\n")
    write_field_pgm(f, tmp_path / "r2.pgm")
    assert sha256_file(tmp_path / "r2.pgm") == hashlib.sha256(raw).hexdigest()
    with pytest.raises(ValueError):
        write_field_pgm(f, tmp_path / "g.pgm", gamma=0)


def test_pgm_row_zero_is_top(tmp_path):
    data = np.zeros((64, 64), complex)
    data[-1, 3] = 1.0  # largest y
    write_field_pgm(ComplexField(data, 1.0, 1.0, 0.0), tmp_path / "t.pgm")
    assert read_pgm(tmp_path / "t.pgm")[0, 3] == 65535


@given(values=st.lists(finite, min_size=1, max_size=20))
def test_csv_round_trip_is_exact(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    write_csv(path, ["i", "v"], [(i, v) for i, v in enumerate(values)])
    cols = read_csv(path)
    np.testing.assert_array_equal(cols["v"], np.array(values))


def test_manifest(tmp_path, desk):
    cfg = parse_config("[setup]\nzr_um = 1000\n")
    (tmp_path / "a.csv").write_text("x\n1\n")
    path = write_manifest(tmp_path, cfg, [desk], [tmp_path / "a.csv"], extra={"runs": []})
    man = load_manifest(path)
    assert man["files"] == [{"path": "a.csv", "sha256": sha256_file(tmp_path / "a.csv")}]
    assert parse_config(man["config"]) == cfg
    assert man["setups"][0]["z_R"] == pytest.approx(1e-3)
    assert man["_root"] == str(tmp_path) and man["runs"] == []
    json.loads(path.read_text())


def test_field_npy_round_trip(tmp_path, desk):
    f = mode_field(desk, ModeIndex(0, 1), 0.1, 64)
    save_field(f, tmp_path / "f.npy")
    g = load_field(tmp_path / "f.npy", f.dx, f.dy, f.z)
    np.testing.assert_array_equal(g.data, f.data)


def test_configs_are_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        RunConfig().setup.field_tesla = 2.0
