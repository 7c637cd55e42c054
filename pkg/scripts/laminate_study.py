#!/usr/bin/env python3
"""Laminate f_hom against the harmonic / arithmetic means over cube size and mesh."""
import argparse

import numpy as np

from voidcell.densities import make_laminate_bulk
from voidcell.elastic import homogenized_bulk
from voidcell.oracles import laminate_1d


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--contrast", type=float, nargs="+", default=[2.0, 5.0, 10.0])
    ap.add_argument("--cells", type=int, nargs="+", default=[8, 16])
    ap.add_argument("--r", type=int, nargs="+", default=[4, 8, 16])
    args = ap.parse_args()
    normal = np.array([[0.0, 0.0], [1.0, 0.0]])
    parallel = np.array([[0.0, 0.0], [0.0, 1.0]])
    print(f"{'a_high':>7} {'cells':>5} {'normal':>9} {'harmonic':>9} {'parallel':>9} {'mean':>7}")
    for a in args.contrast:
        f = make_laminate_bulk(1.0, a, scalar_mode=True)
        for n in args.cells:
            fn = homogenized_bulk(f, normal, args.r, n).estimate
            fp = homogenized_bulk(f, parallel, args.r, n).estimate
            print(f"{a:7g} {n:5d} {fn:9.5f} {laminate_1d([1.0, a]):9.5f} {fp:9.5f} {(1 + a) / 2:7.3f}")


if __name__ == "__main__":
    main()
