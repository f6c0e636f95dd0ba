"""Nystrom discretization of the NP operator, used as an independent oracle.

K*[phi](x) = p.v. 1/(2 pi) int <x - y, nu_x> / |x - y|^2 phi(y) dsigma(y)
is discretized with the periodic trapezoid rule on theta -> Psi(gamma e^(i theta)),
dsigma = h dtheta. The kernel is smooth on a smooth curve; its diagonal
limit is kappa(x) / (4 pi).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import BoundarySample, ExteriorMap, boundary_sample
from .spectrum import Spectrum

IMAG_TOL = 1e-9


@dataclass(frozen=True)
class KernelMatrix:
    n: int
    A: np.ndarray
    nodes: BoundarySample

    def zeta0_residual(self) -> float:
        """max |A zeta_0 - zeta_0 / 2| / max|zeta_0| for the density zeta_0 = 1/h."""
        z0 = 1.0 / self.nodes.h
        return float(np.abs(self.A @ z0 - 0.5 * z0).max() / np.abs(z0).max())


def build_kernel_matrix(m: ExteriorMap, n: int, offset: float = 0.0) -> KernelMatrix:
    """A[i, j] = K(x_i, x_j) h_j (2 pi / n), diagonal kappa_i / (4 pi) h_i (2 pi / n)."""
    if n < 8:
        raise ValueError("quadrature size must be at least 8")
    nodes = boundary_sample(m, n, offset)
    x = nodes.point
    d = x[:, None] - x[None, :]
    dist2 = np.abs(d) ** 2
    np.fill_diagonal(dist2, 1.0)
    if np.any(dist2 < 1e-28 * max(1.0, np.abs(x).max() ** 2)):
        raise ValueError("distinct quadrature nodes coincide")
    # <x - y, nu_x> = Re((x - y) conj(nu_x))
    K = np.real(d * nodes.normal.conj()[:, None]) / dist2 / (2 * np.pi)
    np.fill_diagonal(K, nodes.curvature / (4 * np.pi))
    A = K * (nodes.h * (2 * np.pi / n))[None, :]
    return KernelMatrix(n, A, nodes)


def oracle_spectrum(kernel: KernelMatrix, count: int | None = None) -> Spectrum:
    """Mean-zero eigenvalues of the Nystrom matrix, ordered by |lambda| then sign.

    The eigenvalue closest to 1/2 (the zeta_0 direction) is removed and
    reported as ``zeta0_eigenvalue``.
    """
    n = kernel.n
    count = n - 1 if count is None else count
    if count > n - 1:
        raise ValueError("count must be below the quadrature size")
    ev = np.linalg.eigvals(kernel.A)
    imag = float(np.abs(ev.imag).max())
    if imag > IMAG_TOL:
        raise ArithmeticError(f"imaginary residue {imag:.3g}; quadrature too coarse")
    ev = ev.real
    j0 = int(np.argmin(np.abs(ev - 0.5)))
    zeta0 = float(ev[j0])
    rest = np.delete(ev, j0)
    rest = rest[pair_order(rest)][:count]
    jitter = pairing_jitter(rest)
    return Spectrum(rest, None, zeta0, jitter, {"imag_residue": imag, "n": n})


def pair_order(values: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Permutation sorting by decreasing |lambda|, positive member first within each pair.

    Sorting on (|lambda|, sign) alone is not enough: a jittered -0.25000000001
    would land ahead of +0.25, and a repeated magnitude would pair two
    positives. Within runs of magnitudes closer than ``tol`` the signs are
    interleaved greedily.
    """
    values = np.asarray(values, dtype=float)
    order = list(np.lexsort((-values, -np.abs(values))))
    mag = np.abs(values)
    for i in range(len(order)):
        want_positive = i % 2 == 0
        if (values[order[i]] >= 0) == want_positive:
            continue
        for j in range(i + 1, len(order)):
            if mag[order[i]] - mag[order[j]] > tol:
                break
            if (values[order[j]] >= 0) == want_positive:
                order.insert(i, order.pop(j))
                break
    return np.array(order, dtype=int)


def pairing_jitter(values: np.ndarray) -> float:
    """Largest ||lambda_{2k-1}| - |lambda_{2k}|| over complete pairs."""
    mag = np.abs(values)
    p = len(mag) // 2 * 2
    if p == 0:
        return 0.0
    return float(np.abs(mag[0:p:2] - mag[1:p:2]).max())


@dataclass(frozen=True)
class Comparison:
    count: int
    max_abs: float
    max_rel: float
    worst_index: int

    def as_text(self) -> str:
        return (
            f"count = {self.count}\nmax_abs_deviation = {self.max_abs:.17g}\n"
            f"max_rel_deviation = {self.max_rel:.17g}\nworst_index = {self.worst_index}\n"
        )


def compare(a: Spectrum, b: Spectrum, count: int) -> Comparison:
    """Deviation of the top ``count`` magnitudes, paired by rank."""
    if len(a) < count or len(b) < count:
        raise ValueError(f"both spectra need at least {count} eigenvalues")
    ma = np.sort(a.magnitudes)[::-1][:count]
    mb = np.sort(b.magnitudes)[::-1][:count]
    dev = np.abs(ma - mb)
    scale = np.maximum(np.maximum(ma, mb), np.finfo(float).tiny)
    rel = np.where(np.maximum(ma, mb) > 0, dev / scale, 0.0)
    worst = int(np.argmax(dev)) + 1 if count else 0
    return Comparison(count, float(dev.max(initial=0.0)), float(rel.max(initial=0.0)), worst)
