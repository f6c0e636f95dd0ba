"""Faber polynomials and Grunsky coefficients of an exterior map.

Two independent routes to the Grunsky table are provided:

* :func:`grunsky_table_recursive` runs the column recursion
  c[m, k+1] = c[m+1, k] - a[m+k] + sum_s a[m-s] c[s, k] - sum_s a[k-s] c[m, s]
  seeded with c[n, 1] = n a_n;
* :func:`grunsky_table_by_composition` samples F_m(Psi(w)) - w^m on a circle
  and reads off the negative Fourier modes.

Tables store the capacity-normalized coefficients c[m, k] gamma^-(m+k), which
keeps large windows in range for any gamma; ``.c`` restores the raw values.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .conformal import ExteriorMap

IDENTITY_TOL = 1e-10


class GrunskyIdentityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FaberTable:
    """``coeffs[m, j]`` is the coefficient of z**j in F_m (lower triangular, monic rows)."""

    max_degree: int
    coeffs: np.ndarray

    def __call__(self, m: int, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs[m, : m + 1])


@dataclass(frozen=True)
class GrunskyTable:
    """Grunsky coefficients for 1 <= m, k <= N.

    ``c_hat[m-1, k-1] = c_{m,k} gamma^-(m+k)``.
    """

    N: int
    c_hat: np.ndarray
    gamma: float

    @property
    def c(self) -> np.ndarray:
        idx = np.arange(1, self.N + 1)
        return self.c_hat * self.gamma ** (idx[:, None] + idx[None, :])

    def __getitem__(self, mk):
        """Raw coefficient c_{m,k} with 1-based indices."""
        m, k = mk
        return self.c_hat[m - 1, k - 1] * self.gamma ** (m + k)

    def identity_residual(self) -> float:
        """max |m c_{k,m} - k c_{m,k}| over the window, relative to max |k c_{m,k}| (normalized)."""
        idx = np.arange(1, self.N + 1)
        kc = self.c_hat * idx[None, :]  # k c_{m,k}
        diff = np.abs(kc - kc.T)  # kc.T[m,k] = m c_{k,m}
        return float(diff.max() / max(1.0, np.abs(kc).max())) if self.N else 0.0


@dataclass(frozen=True)
class SymmetrizedGrunsky:
    """mu_{m,k} = sqrt(k/m) c_{m,k}, stored normalized: ``mu_hat = mu gamma^-(m+k)``."""

    N: int
    mu_hat: np.ndarray
    gamma: float
    identity_residual: float = 0.0

    @property
    def mu(self) -> np.ndarray:
        idx = np.arange(1, self.N + 1)
        return self.mu_hat * self.gamma ** (idx[:, None] + idx[None, :])


def faber_table(m: ExteriorMap, N: int) -> FaberTable:
    """Monomial coefficients of F_0..F_N from
    F_{n+1}(z) = z F_n(z) - sum_{s=0}^n a_s F_{n-s}(z) - n a_n.

    Monomial coefficients grow quickly with degree; use
    :func:`faber_values` for numerical evaluation at high degree.
    """
    a = m.coeffs(N + 1)
    F = np.zeros((N + 1, N + 1), dtype=complex)
    F[0, 0] = 1.0
    for n in range(N):
        row = np.zeros(N + 1, dtype=complex)
        row[1 : n + 2] = F[n, : n + 1]
        for s in range(n + 1):
            row -= a[s] * F[n - s]
        row[0] -= n * a[n]
        F[n + 1] = row
    return FaberTable(N, F)


def faber_values(m: ExteriorMap, N: int, z, derivative: bool = False):
    """F_0(z) .. F_N(z) evaluated pointwise by the Faber recursion.

    Returns an array of shape ``(N + 1,) + z.shape``; with ``derivative=True``
    also the values of F_n'(z).
    """
    z = np.asarray(z, dtype=complex)
    a = m.coeffs(N + 1)
    F = np.zeros((N + 1,) + z.shape, dtype=complex)
    F[0] = 1.0
    dF = np.zeros_like(F)
    for n in range(N):
        # sum_{s=0}^n a_s F_{n-s}, left to right in s
        acc = np.tensordot(a[: n + 1], F[n::-1], axes=1)
        F[n + 1] = z * F[n] - acc - n * a[n]
        if derivative:
            dacc = np.tensordot(a[: n + 1], dF[n::-1], axes=1)
            dF[n + 1] = F[n] + z * dF[n] - dacc
    return (F, dF) if derivative else F


def grunsky_table_recursive(m: ExteriorMap, N: int) -> GrunskyTable:
    """Grunsky coefficients by the column recursion.

    Column 1 is seeded for rows 1..2N-1; column k is filled for rows
    1..2N-k so every dependency of the next column exists. Entries outside
    the N x N window are discarded. Runs on the capacity-one map.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    mh = m.normalized()
    rows = 2 * N
    a = mh.coeffs(2 * N + 1)
    a[0] = 0.0  # a0 never enters the recursion
    c = np.zeros((rows + 1, N + 1), dtype=complex)  # 1-based
    c[1:rows, 1] = np.arange(1, rows) * a[1:rows]
    for k in range(1, N):
        top = rows - k - 1  # rows 1..top of column k+1
        mm = np.arange(1, top + 1)
        col = c[2 : top + 2, k] - a[mm + k]
        # sum_{s=1}^{m-1} a_{m-s} c_{s,k}
        conv = np.convolve(a[1:top], c[1:top, k])
        col[1:] += conv[: top - 1]
        # sum_{s=1}^{k-1} a_{k-s} c_{m,s}
        if k > 1:
            col -= c[1 : top + 1, 1:k] @ a[k - 1 : 0 : -1]
        c[1 : top + 1, k + 1] = col
    return GrunskyTable(N, c[1 : N + 1, 1 : N + 1].copy(), m.gamma)


def default_radius(m: ExteriorMap, N: int) -> float:
    # Close enough to gamma that c gamma^k R^-k loses few digits up to k = N,
    # far enough that 8N samples leave aliasing below ~1e-14.
    return m.gamma * (1.0 + 4.0 / max(N, 4))


def grunsky_table_by_composition(
    m: ExteriorMap, N: int, R: float | None = None, samples: int | None = None
) -> GrunskyTable:
    """Grunsky coefficients read off F_m(Psi(w)) - w^m on the circle |w| = R.

    The remainder G_n(w) = F_n(Psi(w)) - w^n is propagated directly,
    G_{n+1} = Psi G_n - sum_{s<=n} a_s G_{n-s} - n a_n + sum_{j>n} a_j w^(n-j),
    which avoids cancelling the w^n growth. The FFT of G_m gives
    c_{m,k} R^-k at frequency -k.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if R is None:
        R = default_radius(m, N)
    if R <= m.gamma:
        raise ValueError(f"R = {R} must exceed gamma = {m.gamma}")
    M = samples if samples is not None else 8 * N
    if M < 4 * N:
        raise ValueError("need at least 4N samples on the circle")
    mh = m.normalized()
    r = R / m.gamma
    w = r * np.exp(2j * np.pi * np.arange(M) / M)
    L = mh.L
    a = mh.coeffs(max(N, L) + 1)
    psi = mh(w)
    winv = 1.0 / w
    # tails T_n(w) = sum_{j>n} a_j w^(n-j), built from the top down
    T = np.zeros((N + 1, M), dtype=complex)
    acc = np.zeros(M, dtype=complex)
    for j in range(max(N, L), 0, -1):
        acc = acc * winv + a[j]
        if j - 1 <= N:
            T[j - 1] = acc * winv
    G = np.zeros((N + 1, M), dtype=complex)
    for n in range(N):
        s_acc = np.tensordot(a[: n + 1], G[n::-1], axes=1)
        G[n + 1] = psi * G[n] - s_acc - n * a[n] + T[n]
    spec = np.fft.fft(G[1:], axis=1) / M
    k = np.arange(1, N + 1)
    c_hat = spec[:, (-k) % M] * r ** k[None, :]
    # modes near the Nyquist index fold back onto k <= N
    edge = np.abs(spec[:, M // 2 - 2 : M // 2 + 1]).max() * r**N
    if edge > 1e-11 * max(1.0, float(np.abs(c_hat).max())):
        warnings.warn(
            f"composition oracle: Nyquist-band coefficients ~{edge:.2g}; table may be aliased",
            RuntimeWarning,
            stacklevel=2,
        )
    return GrunskyTable(N, c_hat, m.gamma)


def symmetrize(table: GrunskyTable, tol: float = IDENTITY_TOL) -> SymmetrizedGrunsky:
    """mu_{m,k} = sqrt(k/m) c_{m,k}, averaged with sqrt(m/k) c_{k,m} so mu is exactly symmetric."""
    idx = np.arange(1, table.N + 1, dtype=float)
    w = np.sqrt(idx[None, :] / idx[:, None])  # sqrt(k/m)
    one = w * table.c_hat
    other = one.T  # sqrt(m/k) c_{k,m}
    resid = np.abs(one - other)
    scale = max(1.0, float(np.abs(one).max())) if table.N else 1.0
    worst = float(resid.max()) / scale if table.N else 0.0
    if worst > tol:
        i, j = np.unravel_index(int(np.argmax(resid)), resid.shape)
        raise GrunskyIdentityError(
            f"Grunsky identity residual {worst:.3g} exceeds {tol:g} at (m, k) = ({i + 1}, {j + 1})"
        )
    return SymmetrizedGrunsky(table.N, 0.5 * (one + other), table.gamma, worst)


def row_l2_report(mu: SymmetrizedGrunsky) -> np.ndarray:
    """sum_k |mu_{m,k} / gamma^(m+k)|^2 for each row m; every entry should be <= 1."""
    return np.sum(np.abs(mu.mu_hat) ** 2, axis=1)
