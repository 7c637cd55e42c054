#!/usr/bin/env python3
"""Calibration error of the 4-, 8- and 16-neighbourhoods, and the void-cell
value of g = 1 over a sweep of directions."""
import argparse

import numpy as np

from voidcell.densities import constant_surface
from voidcell.geometry import calibration_directions, make_stencil, stencil_calibration
from voidcell.surface import cell_domain, solve_void_cell


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells-per-rho", type=int, default=32)
    ap.add_argument("--angles", type=int, default=12)
    args = ap.parse_args()
    for size in (4, 8, 16):
        print(f"n{size}: tau = {stencil_calibration(make_stencil(size), calibration_directions()):.6f}")
    st = make_stencil(16)
    dom = cell_domain(1.0, 1.0 / args.cells_per_rho)
    g = constant_surface()
    print(f"{'angle':>7} {'line cost':>10} {'void cell':>10}")
    for t in np.linspace(0, np.pi / 2, args.angles):
        nu = np.array([np.cos(t), np.sin(t)])
        res = solve_void_cell(g, dom, (0.0, 0.0), nu, st)
        print(f"{np.degrees(t):7.2f} {st.line_cost(nu):10.5f} {res.normalized:10.5f}")


if __name__ == "__main__":
    main()
