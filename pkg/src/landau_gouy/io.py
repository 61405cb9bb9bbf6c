"""Run configuration, deterministic output formats and run manifests.

Config files are INI-style (``[section]`` headers, ``key = value`` lines,
``#`` comments). List values are comma separated. Every key is validated
against a fixed schema; unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .constants import KEV, MICROMETER, NANOMETER
from .errors import ConfigError
from .field import ComplexField
from .modes import ModeIndex
from .params import PhysicalSetup, setup_from_lab_units, with_rayleigh_distance

__all__ = [
    "SetupConfig",
    "ModeConfig",
    "GeometryConfig",
    "NumericsConfig",
    "OutputConfig",
    "RecipeConfig",
    "RunConfig",
    "load_config",
    "parse_config",
    "dump_config",
    "write_field_pgm",
    "read_pgm",
    "write_csv",
    "read_csv",
    "sha256_file",
    "write_manifest",
    "load_manifest",
    "SOFTWARE_VERSION",
]

SOFTWARE_VERSION = "0.1.0"
FLOAT_FMT = "%.16e"


@dataclass(frozen=True)
class SetupConfig:
    field_tesla: float = 1.9
    energy_kev: float = 200.0
    waist_nm: tuple[float, ...] = ()
    zr_um: tuple[float, ...] = ()
    zr_zm: float | None = None

    def validate(self):
        if not (self.field_tesla >= 0 and math.isfinite(self.field_tesla)):
            raise ConfigError("setup.field_tesla must be finite and >= 0")
        if not (self.energy_kev > 0 and math.isfinite(self.energy_kev)):
            raise ConfigError("setup.energy_kev must be finite and > 0")
        given = [bool(self.waist_nm), bool(self.zr_um), self.zr_zm is not None]
        if sum(given) != 1:
            raise ConfigError("setup: give exactly one of waist_nm, zr_um, zr_zm")
        for key in ("waist_nm", "zr_um"):
            if any(not (v > 0 and math.isfinite(v)) for v in getattr(self, key)):
                raise ConfigError(f"setup.{key} values must be finite and > 0")
        if self.zr_zm is not None:
            if not self.zr_zm > 0:
                raise ConfigError("setup.zr_zm must be > 0")
            if self.field_tesla == 0:
                raise ConfigError("setup.zr_zm needs field_tesla > 0")


@dataclass(frozen=True)
class ModeConfig:
    n: tuple[int, ...] = (0,)
    ell: tuple[int, ...] = (1,)

    def validate(self):
        if not self.ell:
            raise ConfigError("mode.ell needs at least one value")
        if any(v < 0 for v in self.n):
            raise ConfigError("mode.n values must be >= 0")
        if len(self.n) not in (1, len(self.ell)):
            raise ConfigError("mode.n must have one value or one per ell")


@dataclass(frozen=True)
class GeometryConfig:
    zk_um: tuple[float, ...] = ()
    zk_pi_zm: tuple[float, ...] = ()
    zdf_um: float = 0.0
    zk_range_um: tuple[float, ...] = ()
    zk_range_pi_zm: tuple[float, ...] = ()
    steps: int = 201

    def validate(self):
        if self.steps < 2:
            raise ConfigError("geometry.steps must be >= 2")
        for key in ("zk_range_um", "zk_range_pi_zm"):
            val = getattr(self, key)
            if val and (len(val) != 2 or not val[0] < val[1]):
                raise ConfigError(f"geometry.{key} must be two ascending values")
        if self.zk_range_um and self.zk_range_pi_zm:
            raise ConfigError("geometry: give at most one of zk_range_um, zk_range_pi_zm")


@dataclass(frozen=True)
class NumericsConfig:
    grid: int = 256
    extent_factor: float = 1.0
    dz_frac: float = 512.0
    cheb_tol: float = 1e-15
    planes: int = 33
    spill_tol: float = 1e-3
    regrid_factor: float | None = None
    trajectories: int = 64
    extent_um: float | None = None

    def validate(self):
        if self.grid < 64 or self.grid & (self.grid - 1):
            raise ConfigError("numerics.grid must be a power of two >= 64")
        if not self.extent_factor > 0:
            raise ConfigError("numerics.extent_factor must be > 0")
        if not self.dz_frac > 0:
            raise ConfigError("numerics.dz_frac must be > 0")
        if not 0 < self.cheb_tol < 1e-3:
            raise ConfigError("numerics.cheb_tol must lie in (0, 1e-3)")
        if self.planes < 2:
            raise ConfigError("numerics.planes must be >= 2")
        if not self.spill_tol > 0:
            raise ConfigError("numerics.spill_tol must be > 0")
        if self.regrid_factor is not None and not self.regrid_factor > 1:
            raise ConfigError("numerics.regrid_factor must be > 1")
        if self.trajectories < 1:
            raise ConfigError("numerics.trajectories must be >= 1")
        if self.extent_um is not None and not self.extent_um > 0:
            raise ConfigError("numerics.extent_um must be > 0")


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    formats: tuple[str, ...] = ("csv", "pgm", "npy")
    gamma: float = 1.0

    def validate(self):
        bad = set(self.formats) - {"csv", "pgm", "npy"}
        if bad:
            raise ConfigError(f"output.formats: unknown format(s) {sorted(bad)}")
        if not self.gamma > 0:
            raise ConfigError("output.gamma must be > 0")


@dataclass(frozen=True)
class RecipeConfig:
    name: str = ""
    command: str = ""
    models: tuple[str, ...] = ("gouy",)

    def validate(self):
        from .theory import RotationModel

        for m in self.models:
            try:
                RotationModel(m)
            except ValueError:
                raise ConfigError(f"recipe.models: unknown model {m!r}") from None


_SECTIONS = {
    "setup": SetupConfig,
    "mode": ModeConfig,
    "geometry": GeometryConfig,
    "numerics": NumericsConfig,
    "output": OutputConfig,
    "recipe": RecipeConfig,
}


@dataclass(frozen=True)
class RunConfig:
    setup: SetupConfig = field(default_factory=SetupConfig)
    mode: ModeConfig = field(default_factory=ModeConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    recipe: RecipeConfig = field(default_factory=RecipeConfig)

    def validate(self) -> "RunConfig":
        for name in _SECTIONS:
            getattr(self, name).validate()
        n_cases = len(self.mode.ell)
        for key in ("waist_nm", "zr_um"):
            vals = getattr(self.setup, key)
            if vals and len(vals) not in (1, n_cases):
                raise ConfigError(f"setup.{key} must have one value or one per mode.ell")
        return self

    def cases(self) -> list[tuple[PhysicalSetup, ModeIndex]]:
        """One (setup, mode) pair per entry of mode.ell."""
        s = self.setup
        out = []
        for i, ell in enumerate(self.mode.ell):
            n = self.mode.n[i] if len(self.mode.n) > 1 else self.mode.n[0]
            if s.waist_nm:
                w = s.waist_nm[i] if len(s.waist_nm) > 1 else s.waist_nm[0]
                phys = setup_from_lab_units(s.field_tesla, s.energy_kev, waist_nm=w)
            elif s.zr_um:
                zr = s.zr_um[i] if len(s.zr_um) > 1 else s.zr_um[0]
                phys = setup_from_lab_units(s.field_tesla, s.energy_kev, zr_um=zr)
            else:
                base = setup_from_lab_units(s.field_tesla, s.energy_kev, zr_um=1.0)
                phys = with_rayleigh_distance(base, s.zr_zm * base.z_m)
            out.append((phys, ModeIndex(n, ell)))
        return out

    def knife_edges(self, setup: PhysicalSetup) -> np.ndarray:
        """Explicit cut positions (metres), ascending."""
        g = self.geometry
        zs = [v * MICROMETER for v in g.zk_um]
        if g.zk_pi_zm:
            if setup.is_free_space:
                raise ConfigError("geometry.zk_pi_zm needs a magnetic field")
            zs += [v * math.pi * setup.z_m for v in g.zk_pi_zm]
        return np.sort(np.array(zs, dtype=float))

    def knife_edge_range(self, setup: PhysicalSetup) -> np.ndarray:
        g = self.geometry
        if g.zk_range_um:
            lo, hi = (v * MICROMETER for v in g.zk_range_um)
        elif g.zk_range_pi_zm:
            if setup.is_free_space:
                raise ConfigError("geometry.zk_range_pi_zm needs a magnetic field")
            lo, hi = (v * math.pi * setup.z_m for v in g.zk_range_pi_zm)
        else:
            return self.knife_edges(setup)
        return np.linspace(lo, hi, g.steps)

    @property
    def z_df(self) -> float:
        return self.geometry.zdf_um * MICROMETER


def _field_kind(section_cls, name):
    for f in fields(section_cls):
        if f.name == name:
            return f.type
    return None


def _convert(section: str, key: str, raw: str, kind: str):
    raw = raw.strip()
    try:
        if kind.startswith("tuple[float"):
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind.startswith("tuple[int"):
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if kind.startswith("tuple[str"):
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if kind == "float | None":
            return None if raw.lower() in ("", "none") else float(raw)
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as {kind}") from None


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), comment_prefixes=("#", ";")
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{source}, line {exc.lineno}: expected a [section] header") from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0]
        raise ConfigError(f"{source}, line {lineno}: expected 'key = value'") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{source}, line {exc.lineno}: duplicate key {exc.option!r}") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"{source}, line {exc.lineno}: duplicate section {exc.section!r}") from None

    parts = {}
    for section in parser.sections():
        cls = _SECTIONS.get(section)
        if cls is None:
            raise ConfigError(f"{source}: unknown section [{section}]")
        values = {}
        for key, raw in parser.items(section):
            kind = _field_kind(cls, key)
            if kind is None:
                raise ConfigError(f"{source}: unknown key {section}.{key}")
            values[key] = _convert(section, key, raw, kind)
        parts[section] = cls(**values)
    return RunConfig(**parts).validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"config {path} is not valid UTF-8") from None
    return parse_config(text, source=str(path))


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    """Echo every key, defaults included; parse_config(dump_config(c)) == c."""
    lines = []
    for section in _SECTIONS:
        lines.append(f"[{section}]")
        part = getattr(cfg, section)
        for f in fields(part):
            lines.append(f"{f.name} = {_format_value(getattr(part, f.name))}")
        lines.append("")
    return "\n".join(lines)


def override(cfg: RunConfig, section: str, **values) -> RunConfig:
    """Replace keys of one section (None values are ignored) and revalidate."""
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return cfg
    return replace(cfg, **{section: replace(getattr(cfg, section), **values)}).validate()


def write_field_pgm(field_: ComplexField, path, gamma: float = 1.0) -> None:
    """|Phi|^2 as a 16-bit binary PGM (P5), max-normalised, row 0 at +y.

    Pixel values are round(65535 * (I / I_max) ** gamma); a zero field
    gives an all-zero image.
    """
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    inten = field_.intensity()[::-1]
    peak = inten.max()
    scaled = np.zeros_like(inten) if peak == 0 else (inten / peak) ** gamma
    pix = np.rint(scaled * 65535.0).astype(">u2")
    header = f"P5\n{field_.nx} {field_.ny}\n65535\n".encode("ascii")
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(pix.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write PGM {path}: {exc.strerror}") from exc


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path} is not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[4], dtype=dtype, count=w * h).reshape(h, w)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    return str(v)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in body]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals)
    return cols


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def setup_record(setup: PhysicalSetup) -> dict:
    return {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in asdict(setup).items()}


def write_manifest(out_dir, cfg: RunConfig, setups, files, extra=None) -> Path:
    """manifest.json listing every output file with its sha256 checksum."""
    out_dir = Path(out_dir)
    entries = []
    for f in sorted(Path(p) for p in files):
        entries.append({"path": str(f.relative_to(out_dir)), "sha256": sha256_file(f)})
    manifest = {
        "software": {"name": "landau_gouy", "version": SOFTWARE_VERSION},
        "config": dump_config(cfg),
        "setups": [setup_record(s) for s in setups],
        "files": entries,
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_manifest(path) -> dict:
    path = Path(path)
    manifest = json.loads(path.read_text(encoding="utf-8"))
    manifest["_root"] = str(path.parent)
    return manifest


def save_field(field_: ComplexField, path) -> None:
    """Snapshot as .npy of [real, imag]; grid spacing and z travel in planes.csv."""
    np.save(path, np.stack([field_.data.real, field_.data.imag]))


def load_field(path, dx: float, dy: float, z: float) -> ComplexField:
    arr = np.load(path)
    return ComplexField(arr[0] + 1j * arr[1], dx, dy, z)


# handy unit conversions used by the CLI
TO_UM = 1.0 / MICROMETER
TO_NM = 1.0 / NANOMETER
TO_KEV = 1.0 / KEV
