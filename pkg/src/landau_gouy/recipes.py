"""Preset configurations that regenerate each figure-style output."""

from __future__ import annotations

from pathlib import Path

from .io import parse_config

__all__ = ["RECIPES", "recipe_config", "emit_figure_recipes"]

_COMMON_SETUP = "field_tesla = 1.9\nenergy_kev = 200.0\n"

RECIPES: dict[str, str] = {
    # streamline preset: the lowest vortex mode over one width period
    "fig1": f"""# Bohmian streamlines of a paraxial Landau mode over one period
[setup]
{_COMMON_SETUP}zr_um = 1000.0

[mode]
n = 0
ell = 1

[geometry]
zk_range_pi_zm = -1.0, 0.0
steps = 401

[numerics]
trajectories = 16

[recipe]
name = fig1
command = trajectories
""",
    "fig2": f"""# normalised mean angular frequency over one period, z_m = 4 z_R
[setup]
{_COMMON_SETUP}zr_zm = 0.25

[mode]
n = 0
ell = -1, 1

[geometry]
zk_range_pi_zm = -1.0, 0.0
steps = 401

[recipe]
name = fig2
command = rotation-curve
models = gouy, landau
""",
    "fig3": f"""# knife-edge rotation for the experimental optics
[setup]
{_COMMON_SETUP}zr_um = 1.46, 1.46, 2.84, 2.84

[mode]
n = 0
ell = -1, 1, -3, 3

[geometry]
zdf_um = -9.0
zk_range_um = -350.0, -20.0
steps = 331

[recipe]
name = fig3
command = rotation-curve
models = gouy
""",
    "fig4": f"""# wave simulation at the experimental cuts; large-memory machines only
[setup]
{_COMMON_SETUP}zr_um = 1.46, 1.46, 2.84, 2.84

[mode]
n = 0
ell = -3, -1, 1, 3

[geometry]
zdf_um = -9.0
zk_um = -350.0, -100.0, -80.0, -50.0, -20.0

[numerics]
grid = 4096
planes = 65
regrid_factor = 2.0

[recipe]
name = fig4
command = simulate
models = gouy
""",
    "fig5": f"""# extended knife-edge range, both divergent and convergent stretches
[setup]
{_COMMON_SETUP}zr_um = 1.46, 1.46, 2.84, 2.84

[mode]
n = 0
ell = -1, 1, -3, 3

[geometry]
zdf_um = -9.0
zk_range_pi_zm = -2.0, -0.00001
steps = 801

[recipe]
name = fig5
command = rotation-curve
models = gouy, free-lg
""",
    "fig6": f"""# desk-scale wave simulation with a 20 nm class waist
[setup]
{_COMMON_SETUP}zr_um = 1000.0

[mode]
n = 0
ell = -3, 3

[geometry]
zdf_um = 0.0
zk_pi_zm = -1.0, -0.75, -0.5, -0.25
zk_range_pi_zm = -1.0, 0.0
steps = 401

[numerics]
grid = 256
planes = 33

[recipe]
name = fig6
command = simulate
models = gouy, free-lg
""",
}


def recipe_config(name: str):
    try:
        text = RECIPES[name]
    except KeyError:
        raise KeyError(f"unknown recipe {name!r}; choose from {sorted(RECIPES)}") from None
    return parse_config(text, source=f"<recipe {name}>")


def emit_figure_recipes(out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in RECIPES.items():
        parse_config(text, source=name)
        path = out_dir / f"{name}.ini"
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths
