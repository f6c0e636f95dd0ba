"""Single layer potentials of the zeta densities and the jump-relation checks.

Inside the domain S[zeta_m] = -F_m(z) / (2 sqrt(m) gamma^m); outside, in the
coordinates z = Psi(e^(rho + i theta)),

    S[zeta_m] = -(sum_k c_{m,k} e^(-k(rho + i theta)) + gamma^(2m) e^(m(-rho + i theta))) / (2 sqrt(m) gamma^m),

and S[zeta_-m] is the complex conjugate. S[zeta_0] is ln(gamma) inside and
rho outside. Averaging the two one-sided normal derivatives of S[zeta_m]
recovers K*[zeta_m], which ties the potential series back to the matrix
representation in :mod:`npgrunsky.spectrum`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conformal import (
    ExteriorMap,
    boundary_sample,
    evaluate_derivatives,
    evaluate_map,
    invert_map,
    scale_factor,
    winding_number,
)
from .grunsky import GrunskyTable, faber_values
from .spectrum import DensityCoefficients, TruncatedNPMatrix, apply

SERIES_TOL = 1e-13
POLYGON_SIZE = 1024
BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class PotentialEvaluation:
    point: complex | tuple[float, float]
    value: complex
    side: str  # "interior", "exterior" or "boundary"
    terms_used: int = 0
    tail_bound: float = 0.0
    other_value: complex | None = None  # exterior-side value for boundary points


def _exterior_series(table: GrunskyTable, m: int, delta, theta, deriv: bool = False):
    """sum_k c_hat_{m,k} q^k (or sum_k k c_hat q^k) with q = e^-(delta + i theta), adaptively truncated.

    Uses |c_hat_{m,k}| <= sqrt(m/k) for the a-priori tail bound.
    """
    delta = np.asarray(delta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    dmin = float(np.min(delta))
    N = table.N
    if dmin > 0:
        # smallest K with sqrt(m) e^(-K d) / (1 - e^-d) < tol
        need = math.log(math.sqrt(m) / (SERIES_TOL * -math.expm1(-dmin))) / dmin
        K = int(min(N, max(1, math.ceil(need))))
    else:
        K = N
    k = np.arange(1, K + 1)
    q = np.exp(-np.multiply.outer(delta + 1j * theta, k))
    coef = table.c_hat[m - 1, :K] * (k if deriv else 1)
    val = q @ coef
    if dmin > 0:
        r = math.exp(-dmin)
        lead = (K + 1) if deriv else 1.0
        bound = math.sqrt(m) * lead * r ** (K + 1) / (1 - r) ** (2 if deriv else 1)
    else:
        bound = math.inf
    return val, K, bound


def single_layer_exterior(m_map: ExteriorMap, table: GrunskyTable, mode: int, rho, theta):
    """(value, terms_used, tail_bound) of S[zeta_mode] at exterior coordinates (rho, theta)."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(rho < m_map.rho0 - 1e-14):
        raise ValueError("exterior evaluation needs rho >= rho0")
    if mode == 0:
        return rho + 0j, 0, 0.0
    m = abs(mode)
    delta = rho - m_map.rho0
    series, K, bound = _exterior_series(table, m, delta, theta)
    val = -(series + np.exp(m * (-delta + 1j * theta))) / (2 * math.sqrt(m))
    if mode < 0:
        val = np.conj(val)
    return val, K, bound / (2 * math.sqrt(m))


def single_layer_interior(m_map: ExteriorMap, mode: int, z):
    """S[zeta_mode] at points of the closed domain (no membership check)."""
    z = np.asarray(z, dtype=complex)
    if mode == 0:
        return np.full(z.shape, m_map.rho0 + 0j)
    m = abs(mode)
    F = faber_values(m_map, m, z)[m]
    val = -F / (2 * math.sqrt(m) * m_map.gamma**m)
    return np.conj(val) if mode < 0 else val


def boundary_polygon(m_map: ExteriorMap, n: int = POLYGON_SIZE) -> np.ndarray:
    return boundary_sample(m_map, n).point


def classify(m_map: ExteriorMap, z, polygon: np.ndarray | None = None) -> np.ndarray:
    """'interior', 'exterior' or 'boundary' for each point.

    Winding number about a boundary polygon, refined by map inversion close
    to the curve.
    """
    if polygon is None:
        polygon = boundary_polygon(m_map)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    wn = winding_number(polygon, z)
    # distance to polygon edges
    p0, p1 = polygon, np.roll(polygon, -1)
    e = p1 - p0
    t = np.clip(np.real((z[:, None] - p0) * e.conj()) / np.abs(e) ** 2, 0, 1)
    dist = np.abs(z[:, None] - (p0 + t * e)).min(axis=1)
    side = np.where(wn != 0, "interior", "exterior").astype(object)
    # within a chord length of the polygon the sag of the true curve matters:
    # settle those points by inverting the map
    near = np.flatnonzero(dist < np.abs(e).max())
    if near.size:
        w = np.atleast_1d(invert_map(m_map, z[near]))
        hit = np.abs(evaluate_map(m_map, w, continued=True) - z[near]) <= 1e-10 * max(1.0, m_map.gamma)
        on = hit & (np.abs(np.abs(w) - m_map.gamma) <= BOUNDARY_TOL * m_map.gamma)
        side[near] = np.where(on, "boundary", np.where(hit, "exterior", "interior"))
    return side


def single_layer(m_map: ExteriorMap, table: GrunskyTable, mode: int, where) -> PotentialEvaluation:
    """S[zeta_mode] at ``where``: a complex point z, or an exterior coordinate pair (rho, theta).

    Complex points are classified with a boundary polygon; points on the
    boundary (within tolerance) are evaluated from both sides.
    """
    if abs(mode) > table.N and mode != 0:
        raise ValueError(f"mode {mode} outside the Grunsky table (N = {table.N})")
    if isinstance(where, tuple):
        rho, theta = where
        val, K, bound = single_layer_exterior(m_map, table, mode, rho, theta)
        return PotentialEvaluation(where, complex(val), "exterior", K, bound)
    z = complex(where)
    side = classify(m_map, z)[0]
    if side == "interior":
        return PotentialEvaluation(z, complex(single_layer_interior(m_map, mode, z)), "interior")
    w = invert_map(m_map, z)
    rho, theta = max(math.log(abs(w)), m_map.rho0), float(np.angle(w))
    val, K, bound = single_layer_exterior(m_map, table, mode, rho, theta)
    if side == "exterior":
        return PotentialEvaluation(z, complex(val), "exterior", K, bound)
    inner = complex(single_layer_interior(m_map, mode, z))
    return PotentialEvaluation(z, inner, "boundary", K, bound, other_value=complex(val))


def continuity_residual(
    m_map: ExteriorMap, table: GrunskyTable, mode: int, n_samples: int = 256, eps: float = 1e-3
) -> float:
    """max_theta |S[zeta_mode](exterior, rho0 + eps) - S[zeta_mode](interior probe at rho0 - eps)|.

    The interior probe is z = Psi(e^(rho0 - eps + i theta)) with Psi continued
    as a Laurent polynomial; probes are checked to lie inside the domain.
    """
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    rho0 = m_map.rho0
    ext, _, _ = single_layer_exterior(m_map, table, mode, np.full(n_samples, rho0 + eps), theta)
    zin = evaluate_map(m_map, np.exp(rho0 - eps + 1j * theta), continued=True)
    if mode != 0:
        side = classify(m_map, zin)
        if np.any(side == "exterior"):
            raise ValueError(f"interior probe left the domain for eps = {eps}")
    inner = single_layer_interior(m_map, mode, zin)
    return float(np.abs(ext - inner).max())


def _exterior_normal_derivative(m_map, table, m: int, t: float, theta):
    rho = m_map.rho0 + t
    series, _, _ = _exterior_series(table, m, np.full(np.shape(theta), t), theta, deriv=True)
    drho = (series + m * np.exp(m * (-t + 1j * theta))) / (2 * math.sqrt(m))
    return drho / scale_factor(m_map, np.full(np.shape(theta), rho), theta)


def _interior_normal_derivative(m_map, m: int, t: float, theta):
    w = np.exp(m_map.rho0 - t + 1j * theta)
    z = evaluate_map(m_map, w, continued=True)
    d1, _ = evaluate_derivatives(m_map, w, continued=True)
    _, dF = faber_values(m_map, m, z, derivative=True)
    wd = w * d1
    return -dF[m] * (wd / np.abs(wd)) / (2 * math.sqrt(m) * m_map.gamma**m)


def _richardson(d):
    # d = D(t), D(t/2), D(t/4) with D(t) = D0 + c1 t + c2 t^2 + ...
    return (8 * d[2] - 6 * d[1] + d[0]) / 3


@dataclass(frozen=True)
class JumpResult:
    theta: np.ndarray
    value: np.ndarray  # K*[zeta_m](theta)
    jump: np.ndarray  # dS+/dnu - dS-/dnu, should equal zeta_m
    ratio: float  # Richardson difference ratio, ~2 for first-order convergence
    flagged: bool


def np_via_jump(
    m_map: ExteriorMap, table: GrunskyTable, mode: int, theta, eps: float = 1e-4
) -> JumpResult:
    """K*[zeta_mode](theta) as the average of the one-sided normal derivatives of S[zeta_mode].

    Exterior derivatives come from the termwise rho-derivative of the Grunsky
    series, interior ones from F_m'; each side is evaluated at rho0 +- t for
    t = eps, eps/2, eps/4 and extrapolated to t = 0 with two Richardson
    levels. ``ratio`` is the successive-difference ratio, ~2 for the
    expected first-order approach; anything far from 2 sets ``flagged``.
    """
    if mode == 0:
        raise ValueError("mode 0 is handled by zeta0_action")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m = abs(mode)
    ts = (eps, eps / 2, eps / 4)
    ext = [_exterior_normal_derivative(m_map, table, m, t, theta) for t in ts]
    inn = [_interior_normal_derivative(m_map, m, t, theta) for t in ts]
    plus = _richardson(ext)
    minus = _richardson(inn)
    ratios = []
    for side in (ext, inn):
        d1 = np.abs(side[0] - side[1]).max()
        d2 = np.abs(side[1] - side[2]).max()
        if d2 > 1e-13:
            ratios.append(d1 / d2)
    ratio = float(np.mean(ratios)) if ratios else 2.0
    flagged = bool(ratios) and not all(1.5 <= r <= 2.5 for r in ratios)
    value = 0.5 * (plus + minus)
    jump = plus - minus
    if mode < 0:
        value, jump = np.conj(value), np.conj(jump)
    return JumpResult(theta, value, jump, ratio, flagged)


def matrix_action_values(m_map: ExteriorMap, mat: TruncatedNPMatrix, mode: int, theta) -> np.ndarray:
    """sum_k G[k, m] zeta_-k(theta) (or its conjugate pair for mode < 0) on the boundary."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = apply(mat, DensityCoefficients.unit(mat.N, mode))
    h = scale_factor(m_map, np.full(theta.shape, m_map.rho0), theta)
    return out.evaluate(theta, h)


def zeta_values(m_map: ExteriorMap, mode: int, theta) -> np.ndarray:
    """zeta_mode(theta) = |mode|^(1/2) e^(i mode theta) / h (zeta_0 = 1/h)."""
    theta = np.asarray(theta, dtype=float)
    h = scale_factor(m_map, np.full(theta.shape, m_map.rho0), theta)
    return math.sqrt(abs(mode)) * np.exp(1j * mode * theta) / h if mode else 1.0 / h
