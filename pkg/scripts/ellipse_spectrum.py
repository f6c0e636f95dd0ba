"""Ellipse spectrum from the Grunsky route against the closed form +-(1/2) a^m."""
import argparse

import numpy as np

from npgrunsky import ellipse, grunsky_table_recursive, spectrum, assemble, symmetrize


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("-N", type=int, default=20)
    args = p.parse_args()

    sp = spectrum(assemble(symmetrize(grunsky_table_recursive(ellipse(args.a), args.N))))
    exact = 0.5 * args.a ** np.arange(1, args.N + 1)
    print(f"{'m':>3} {'lambda_2m-1':>24} {'closed form':>24} {'error':>9}")
    for m in range(args.N):
        lam = sp.eigenvalues[2 * m]
        print(f"{m + 1:3d} {lam:24.17g} {exact[m]:24.17g} {abs(lam - exact[m]):9.1e}")


if __name__ == "__main__":
    main()
