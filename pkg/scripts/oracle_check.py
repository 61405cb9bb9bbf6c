"""Propagate an untruncated mode and compare with the closed form.

Default: Psi_03, 1024 x 1024, a quarter period up to the focus.
"""

import argparse
import math
import time

import numpy as np

from landau_gouy.field import mode_field
from landau_gouy.modes import ModeIndex
from landau_gouy.params import setup_from_lab_units
from landau_gouy.propagator import make_plan, propagate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=1024)
    ap.add_argument("--n", type=int, default=0)
    ap.add_argument("--ell", type=int, default=3)
    ap.add_argument("--span", type=float, default=0.25, help="in units of pi z_m, ending at the focus")
    ap.add_argument("--planes", type=int, default=5)
    args = ap.parse_args()

    setup = setup_from_lab_units(1.9, 200.0, zr_um=1000.0)
    mode = ModeIndex(args.n, args.ell)
    z0 = -args.span * math.pi * setup.z_m
    initial = mode_field(setup, mode, z0, args.grid)
    plan = make_plan(setup, initial, z0, 0.0)
    print(f"Chebyshev order per step: {plan.order()}")
    t0 = time.perf_counter()
    snaps = propagate(plan, initial, np.linspace(z0, 0.0, args.planes))
    for s in snaps:
        exact = mode_field(setup, mode, s.z, args.grid, initial.extent[0])
        err = np.linalg.norm(s.data - exact.data) / np.linalg.norm(exact.data)
        print(f"z/z_m = {s.z / setup.z_m:+.4f}  L2 error {err:.2e}  norm {s.norm():.15f}")
    print(f"{time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
