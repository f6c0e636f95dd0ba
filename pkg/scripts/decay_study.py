"""Decay of |lambda_2k| for power-law coefficient families a_k = c k^-beta.

For each beta: power-fit slope on a truncation-safe window, the bound
constant over growing windows and the Grunsky-sum constant for S = 16, 32.
"""
import argparse

import numpy as np

from npgrunsky import grunsky_table_recursive, powerlaw, spectrum, assemble, symmetrize
from npgrunsky.decay import bound_constant, fit_decay, lemma_constant, order_eigenvalues, usable_range
from npgrunsky.spectrum import tail_norm


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--betas", type=float, nargs="*", default=[3, 4, 5, 6])
    p.add_argument("-N", type=int, default=128)
    p.add_argument("--c", type=float, default=0.2)
    args = p.parse_args()

    for beta in args.betas:
        m = powerlaw(args.c, beta, 64)
        table = grunsky_table_recursive(m, args.N)
        mu = symmetrize(table)
        sp = order_eigenvalues(spectrum(assemble(mu)))
        lo, hi = usable_range(sp, tail_norm(mu, args.N - 1) + 1e-16, start=4)
        fit = fit_decay(sp, "power", (lo, hi))
        e = beta - 2.5  # smoothness heuristic p + alpha
        p_int = max(0, int(np.ceil(e)) - 1)
        alpha = e - p_int
        consts = [bound_constant(sp, p_int, alpha, (1, K)) for K in (8, 16, 32) if K <= hi] if e > 0.5 else []
        M16 = lemma_constant(table, p_int, alpha, 16).M
        M32 = lemma_constant(table, p_int, alpha, 32).M
        print(f"beta={beta:g}: fit [{lo},{hi}] slope {fit.slope:.3f} (residual {fit.residual:.2f}); "
              f"p+alpha={p_int + alpha:g} bound constants {', '.join(f'{c:.4g}' for c in consts) or 'n/a'}; "
              f"lemma M(16)={M16:.4g} M(32)={M32:.4g}")


if __name__ == "__main__":
    main()
