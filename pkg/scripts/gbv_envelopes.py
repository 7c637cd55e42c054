#!/usr/bin/env python3
"""g^BV envelope tables for the constant, crystalline and non-convex densities."""
import argparse
import os

import numpy as np

from voidcell.densities import constant_surface, crystalline_surface, nonconvex_surface
from voidcell.relaxation import gbv_table, write_envelope_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolution", type=int, default=64)
    ap.add_argument("--out", default="results/gbv")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for name, g in (("constant", constant_surface()), ("crystalline", crystalline_surface()),
                    ("nonconvex", nonconvex_surface())):
        rows = gbv_table(g, (0.0, 0.0), args.resolution)
        write_envelope_csv(os.path.join(args.out, f"{name}.csv"), rows)
        print(name)
        for ang, _, _, gv, env, tol in rows[:8]:
            print(f"  {np.degrees(ang):8.3f}  g = {gv:.4f}  envelope = {env:.4f} +- {tol:.4f}")


if __name__ == "__main__":
    main()
