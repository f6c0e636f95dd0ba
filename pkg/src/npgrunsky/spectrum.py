"""Truncated Neumann-Poincare operator in the zeta basis.

On span{zeta_{+-1}, ..., zeta_{+-N}} the operator acts by

    K*[zeta_m]  = sum_k G[k, m] zeta_{-k},
    K*[zeta_-m] = sum_k conj(G[k, m]) zeta_k,      G[k, m] = mu_{k,m} / (2 gamma^(m+k)).

Coefficient vectors are laid out as ``(b_1..b_N, b_-1..b_-N)``; in that
basis the operator is the Hermitian block matrix H = [[0, conj(G)], [G, 0]]
whose eigenvalues are +-sigma_i(G).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grunsky import SymmetrizedGrunsky

NORM_TOL = 1e-12
RESIDUAL_TOL = 1e-10
ZETA0_EIGENVALUE = 0.5


class NormBoundError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TruncatedNPMatrix:
    N: int
    G: np.ndarray
    gamma: float

    def hermitian(self) -> np.ndarray:
        """The 2N x 2N matrix H acting on ``(b_+, b_-)`` coefficient vectors."""
        N = self.N
        H = np.zeros((2 * N, 2 * N), dtype=complex)
        H[:N, N:] = self.G.conj()
        H[N:, :N] = self.G
        return H


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ordered +s1, -s1, +s2, -s2, ... and matching eigenvectors.

    ``vectors[:, i]`` is the coefficient vector of eigenvalue ``eigenvalues[i]``
    over (zeta_1..zeta_N, zeta_-1..zeta_-N). Oracle spectra carry no vectors.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray | None = None
    zeta0_eigenvalue: float = ZETA0_EIGENVALUE
    pairing_jitter: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    def __len__(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class DensityCoefficients:
    """Coefficients b_m of sum_m b_m zeta_m for m in -N..-1, 1..N (b_0 omitted)."""

    plus: np.ndarray  # b_1..b_N
    minus: np.ndarray  # b_-1..b_-N

    @classmethod
    def unit(cls, N: int, m: int) -> "DensityCoefficients":
        """The density zeta_m, m != 0."""
        if m == 0 or abs(m) > N:
            raise ValueError(f"mode {m} outside 1 <= |m| <= {N}")
        plus = np.zeros(N, dtype=complex)
        minus = np.zeros(N, dtype=complex)
        (plus if m > 0 else minus)[abs(m) - 1] = 1.0
        return cls(plus, minus)

    @classmethod
    def from_vector(cls, v) -> "DensityCoefficients":
        v = np.asarray(v, dtype=complex)
        N = len(v) // 2
        return cls(v[:N].copy(), v[N:].copy())

    @property
    def N(self) -> int:
        return len(self.plus)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.plus, self.minus])

    def norm(self) -> float:
        """K^{-1/2} norm, i.e. the l2 norm of the coefficients."""
        return float(np.linalg.norm(self.vector()))

    def inner(self, other: "DensityCoefficients") -> complex:
        return complex(np.vdot(other.vector(), self.vector()))

    def evaluate(self, theta, h) -> np.ndarray:
        """Density values sum_m b_m |m|^(1/2) e^(i m theta) / h on the boundary."""
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.N + 1)
        ph = np.exp(1j * np.multiply.outer(theta, k))
        s = (ph * np.sqrt(k)) @ self.plus + (ph.conj() * np.sqrt(k)) @ self.minus
        return s / h


def assemble(mu: SymmetrizedGrunsky, check: bool = True) -> TruncatedNPMatrix:
    """G[k, m] = mu_{k,m} / (2 gamma^(m+k)); rejects sigma_max(G) > 1/2."""
    G = 0.5 * mu.mu_hat
    G = 0.5 * (G + G.T)  # exact symmetry, already true for averaged mu
    mat = TruncatedNPMatrix(mu.N, G, mu.gamma)
    if check and mu.N:
        smax = float(np.linalg.norm(G, 2))
        if smax > 0.5 + NORM_TOL:
            raise NormBoundError(f"sigma_max(G) = {smax:.17g} exceeds the bound ||K*|| <= 1/2")
    return mat


def _fix_phase(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max())
    if nz.size:
        p = v[nz[0]]
        v = v * (abs(p) / p)
    return v


def spectrum(mat: TruncatedNPMatrix, check_residual: bool = True) -> Spectrum:
    """Eigenpairs of the truncated operator from the SVD of G.

    With G = U S V^*, G v_i = s_i u_i and conj(G) u_i = s_i v_i (G is
    symmetric), so (v_i, +-u_i)/sqrt(2) are eigenvectors for +-s_i.
    """
    N = mat.N
    try:
        U, s, Vh = np.linalg.svd(mat.G)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"SVD failed to converge: {exc}") from None
    V = Vh.conj().T
    lam = np.empty(2 * N)
    lam[0::2] = s
    lam[1::2] = -s
    vecs = np.empty((2 * N, 2 * N), dtype=complex)
    r2 = np.sqrt(0.5)
    for i in range(N):
        vecs[:, 2 * i] = _fix_phase(np.concatenate([V[:, i], U[:, i]]) * r2)
        vecs[:, 2 * i + 1] = _fix_phase(np.concatenate([V[:, i], -U[:, i]]) * r2)
    if check_residual and N:
        H = mat.hermitian()
        res = np.linalg.norm(H @ vecs - vecs * lam[None, :], axis=0).max()
        if res > RESIDUAL_TOL:
            raise ArithmeticError(f"eigenpair residual {res:.3g} above {RESIDUAL_TOL:g}")
    return Spectrum(lam, vecs)


def apply(mat: TruncatedNPMatrix, phi: DensityCoefficients) -> DensityCoefficients:
    """Coefficients of K*[phi]: minus part G b_+, plus part conj(G) b_-."""
    if phi.N != mat.N:
        raise ValueError(f"density has N = {phi.N}, operator has N = {mat.N}")
    return DensityCoefficients(mat.G.conj() @ phi.minus, mat.G @ phi.plus)


def tail_norm(mu: SymmetrizedGrunsky, N_cut: int) -> float:
    """Largest singular value of rows N_cut+1..N of G: ||K* - P_N K*|| inside the window."""
    if not 0 <= N_cut < mu.N:
        raise ValueError(f"N_cut must satisfy 0 <= N_cut < N = {mu.N}")
    rows = 0.5 * mu.mu_hat[N_cut:, :]
    return float(np.linalg.norm(rows, 2))


def tail_norms(mu: SymmetrizedGrunsky, cuts) -> np.ndarray:
    return np.array([tail_norm(mu, int(c)) for c in cuts])


def zeta0_action() -> float:
    """K*[zeta_0] = zeta_0 / 2."""
    return ZETA0_EIGENVALUE
