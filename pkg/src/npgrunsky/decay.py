"""Eigenvalue ordering, decay-law fits and finite-window bound constants."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grunsky import GrunskyTable, grunsky_table_recursive, symmetrize
from .nystrom import pair_order
from .spectrum import Spectrum, assemble, spectrum, tail_norm

WEYL_TOL = 1e-10


class PairingError(ValueError):
    pass


@dataclass(frozen=True)
class DecayReport:
    model: str  # "power" or "exponential"
    slope: float
    intercept: float
    fit_range: tuple[int, int]
    residual: float  # max |log|lambda_2k| - fit| over the range
    bound_constant: float | None = None

    def predict(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        x = np.log(k) if self.model == "power" else k
        return np.exp(self.intercept + self.slope * x)


@dataclass(frozen=True)
class LemmaConstantReport:
    M: float
    grid: tuple[int, int]  # 1 <= s, r <= grid
    worst_pair: tuple[int, int]
    exponent: float


def order_eigenvalues(raw: Spectrum, pairing_tol: float = 1e-6) -> Spectrum:
    """Sort into +-pairs by decreasing magnitude, positive member first.

    Raises :class:`PairingError` when consecutive magnitudes differ by more
    than ``pairing_tol`` (only oracle spectra can do that); the measured
    jitter is stored on the result.
    """
    lam = np.asarray(raw.eigenvalues, dtype=float)
    order = pair_order(lam)
    lam = lam[order]
    mag = np.abs(lam)
    p = len(lam) // 2 * 2
    jitter = float(np.abs(mag[0:p:2] - mag[1:p:2]).max()) if p else 0.0
    if jitter > pairing_tol:
        k = int(np.argmax(np.abs(mag[0:p:2] - mag[1:p:2])))
        raise PairingError(f"unpaired magnitudes at pair {k + 1}: jitter {jitter:.3g}")
    vecs = raw.vectors[:, order] if raw.vectors is not None else None
    return Spectrum(lam, vecs, raw.zeta0_eigenvalue, jitter, dict(raw.meta))


def paired_magnitudes(spec: Spectrum) -> np.ndarray:
    """|lambda_2k| for k = 1, 2, ... (one magnitude per pair)."""
    return np.abs(np.asarray(spec.eigenvalues))[1::2]


def fit_decay(spec: Spectrum, model: str = "power", fit_range: tuple[int, int] | None = None) -> DecayReport:
    """Least-squares fit of log|lambda_2k| against log k (power) or k (exponential)."""
    if model in ("exp", "exponential"):
        model = "exponential"
    elif model != "power":
        raise ValueError(f"unknown decay model {model!r}")
    mag = paired_magnitudes(spec)
    lo, hi = fit_range if fit_range is not None else (1, len(mag))
    if not 1 <= lo < hi <= len(mag):
        raise ValueError(f"fit range [{lo}, {hi}] outside 1..{len(mag)}")
    k = np.arange(lo, hi + 1, dtype=float)
    y = mag[lo - 1 : hi]
    if np.any(y == 0):
        raise ValueError("zero eigenvalue inside the fit range")
    x = np.log(k) if model == "power" else k
    slope, intercept = np.polyfit(x, np.log(y), 1)
    resid = float(np.abs(np.log(y) - (intercept + slope * x)).max())
    return DecayReport(model, float(slope), float(intercept), (lo, hi), resid)


def usable_range(spec: Spectrum, floor: float, start: int = 1) -> tuple[int, int]:
    """Largest [start, K] on which |lambda_2k| >= 1e3 * floor (truncation-safe fit window)."""
    mag = paired_magnitudes(spec)
    ok = mag >= 1e3 * floor
    K = start - 1
    while K < len(mag) and ok[K]:
        K += 1
    return start, K


def _check_exponent(p: float, alpha: float) -> float:
    if p < 0 or not 0 < alpha < 1:
        raise ValueError("need p >= 0 and 0 < alpha < 1")
    return p + alpha


def bound_constant(spec: Spectrum, p: float, alpha: float, fit_range: tuple[int, int] | None = None) -> float:
    """Smallest C with |lambda_2k| <= C k^(-p-alpha+1/2) for every k in the range."""
    e = _check_exponent(p, alpha)
    if e <= 0.5:
        raise ValueError("the decay bound needs p + alpha > 1/2")
    mag = paired_magnitudes(spec)
    lo, hi = fit_range if fit_range is not None else (1, len(mag))
    k = np.arange(lo, hi + 1, dtype=float)
    return float((mag[lo - 1 : hi] * k ** (e - 0.5)).max(initial=0.0))


def lemma_constant(table: GrunskyTable, p: float, alpha: float, S: int) -> LemmaConstantReport:
    """M = max_{s,r <= S} |sum_k c_{s,k} conj(c_{k,r}) gamma^-(s+r+2k)| (s r)^(p+alpha).

    The inner sum runs over the whole table, so the table should be
    comfortably wider than S.
    """
    e = _check_exponent(p, alpha)
    if S > table.N:
        raise ValueError(f"S = {S} exceeds table size {table.N}")
    c = table.c_hat  # c_{m,k} gamma^-(m+k)
    inner = c[:S, :] @ c[:, :S].conj()
    s = np.arange(1, S + 1, dtype=float) ** e
    val = np.abs(inner) * np.outer(s, s)
    i, j = np.unravel_index(int(np.argmax(val)), val.shape)
    return LemmaConstantReport(float(val[i, j]), (S, S), (int(i) + 1, int(j) + 1), e)


@dataclass(frozen=True)
class TailRow:
    N: int
    tail_norm: float
    next_eigenvalue: float  # |lambda_{2N+1}|
    ok: bool


def tail_vs_eigenvalue_study(domain, N_list, window: int | None = None) -> list[TailRow]:
    """Per cut N: the tail norm and |lambda_{2N+1}| of a common window.

    Checks |lambda_{2N+1}| <= tail_norm(N) + 1e-10 (the rank-2N operator
    P_N K* can get no closer to K* than |lambda_{2N+1}|).
    """
    N_list = [int(n) for n in N_list]
    W = window if window is not None else 2 * max(N_list)
    mu = symmetrize(grunsky_table_recursive(domain, W))
    spec = spectrum(assemble(mu))
    mag = np.abs(spec.eigenvalues)
    rows = []
    for n in N_list:
        t = tail_norm(mu, n)
        lam = float(mag[2 * n])
        rows.append(TailRow(n, t, lam, lam <= t + WEYL_TOL))
    return rows
