"""Exterior conformal maps given by a finite Laurent series.

A domain is described by the map

    Psi(w) = w + a0 + a_1/w + a_2/w**2 + ... + a_L/w**L,   |w| >= gamma,

sending the exterior of the disk of radius ``gamma`` (the logarithmic
capacity) onto the exterior of the domain. Every other module works from
an :class:`ExteriorMap`; there is no other domain description.
"""
from __future__ import annotations

import json
import math
from dataclasses import InitVar, dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

CUSP_TOL = 1e-12


class DomainError(ValueError):
    """Invalid domain description (bad document, gamma <= 0, non-univalent map)."""


class CuspError(DomainError):
    """Psi' vanishes (numerically) on the evaluation circle."""


@dataclass(frozen=True)
class UnivalenceReport:
    verdict: str  # "pass", "pass-unproven" or "fail"
    necessary_margin: float
    sufficient_margin: float


@dataclass(frozen=True)
class ExteriorMap:
    """Laurent coefficients of an exterior map.

    ``a[k-1]`` holds a_k; coefficients past ``len(a)`` are exactly zero.
    Construction rejects maps that violate the area theorem unless
    ``check=False`` (used to inspect rejected coefficient sets).
    """

    gamma: float
    a0: complex = 0j
    a: tuple[complex, ...] = field(default_factory=tuple)
    check: InitVar[bool] = True

    def __post_init__(self, check: bool):
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or gamma <= 0:
            raise DomainError(f"gamma must be a positive number, got {self.gamma!r}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a", tuple(complex(x) for x in self.a))
        area = _area_sum(self)
        if check and area > gamma**2 * (1 + 1e-14):
            raise DomainError(
                f"area theorem violated: sum k|a_k|^2 gamma^(-2k) = {area:.17g} "
                f"> gamma^2 = {gamma**2:.17g}"
            )

    @property
    def rho0(self) -> float:
        return math.log(self.gamma)

    @property
    def L(self) -> int:
        return len(self.a)

    def coeffs(self, n: int) -> np.ndarray:
        """Array ``c`` of length ``n + 1`` with ``c[k] = a_k`` (``c[0] = a0``), zero padded."""
        out = np.zeros(n + 1, dtype=complex)
        out[0] = self.a0
        m = min(n, self.L)
        out[1 : m + 1] = self.a[:m]
        return out

    def normalized(self) -> "ExteriorMap":
        """The capacity-one map w -> Psi(gamma w)/gamma."""
        g = self.gamma
        return ExteriorMap(
            1.0, self.a0 / g, tuple(ak * g ** (-k - 1) for k, ak in enumerate(self.a, 1)), check=False
        )

    @cached_property
    def univalence(self) -> UnivalenceReport:
        return univalence_check(self)

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "a0": [self.a0.real, self.a0.imag],
            "a": [[x.real, x.imag] for x in self.a],
        }

    def __call__(self, w):
        return evaluate_map(self, w)


def _area_sum(m: ExteriorMap) -> float:
    return float(sum(k * abs(ak) ** 2 * m.gamma ** (-2 * k) for k, ak in enumerate(m.a, 1)))


def univalence_check(m: ExteriorMap) -> UnivalenceReport:
    """Area-theorem necessary margin and the coefficient-sum sufficient margin.

    ``sufficient_margin > 0`` proves injectivity on |w| >= gamma, since then
    |(Psi(w) - Psi(v))/(w - v) - 1| <= sum k|a_k| gamma^-(k+1) < 1.
    """
    g = m.gamma
    necessary = g**2 - _area_sum(m)
    sufficient = 1.0 - float(sum(k * abs(ak) * g ** (-(k + 1)) for k, ak in enumerate(m.a, 1)))
    if necessary < 0:
        verdict = "fail"
    elif sufficient > 0:
        verdict = "pass"
    else:
        verdict = "pass-unproven"
    return UnivalenceReport(verdict, necessary, sufficient)


def _check_outside(m: ExteriorMap, w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) < m.gamma * (1 - 1e-14)):
        raise DomainError(f"|w| must be >= gamma = {m.gamma}")
    return w


def _laurent(m: ExteriorMap, w: np.ndarray, deriv: int) -> np.ndarray:
    # Horner in 1/w over the stored coefficients.
    if deriv == 0:
        acc = np.zeros_like(w)
        for ak in reversed(m.a):
            acc = (acc + ak) / w
        return w + m.a0 + acc
    inv = 1.0 / w
    acc = np.zeros_like(w)
    for k in range(m.L, 0, -1):
        ak = m.a[k - 1]
        coef = -k * ak if deriv == 1 else k * (k + 1) * ak
        acc = acc * inv + coef
    if deriv == 1:
        return 1.0 + acc * inv**2
    return acc * inv**3


def evaluate_map(m: ExteriorMap, w, *, continued: bool = False):
    """Psi(w) for |w| >= gamma.

    ``continued=True`` skips the domain check and evaluates the finite Laurent
    polynomial anywhere in w != 0 (used for probes just inside the circle).
    """
    w = np.asarray(w, dtype=complex) if continued else _check_outside(m, w)
    out = _laurent(m, w, 0)
    return out[()] if out.ndim == 0 else out


def evaluate_derivatives(m: ExteriorMap, w, *, continued: bool = False):
    """(Psi'(w), Psi''(w)) by termwise differentiation."""
    w = np.asarray(w, dtype=complex) if continued else _check_outside(m, w)
    d1, d2 = _laurent(m, w, 1), _laurent(m, w, 2)
    if d1.ndim == 0:
        return d1[()], d2[()]
    return d1, d2


def scale_factor(m: ExteriorMap, rho, theta, *, continued: bool = False):
    """h(rho, theta) = |Psi'(e^(rho + i theta))| e^rho."""
    rho = np.asarray(rho, dtype=float)
    if not continued and np.any(rho < m.rho0 - 1e-14):
        raise DomainError("rho must be >= rho0 = ln(gamma)")
    w = np.exp(rho + 1j * np.asarray(theta, dtype=float))
    d1, _ = evaluate_derivatives(m, w, continued=True)
    if np.any(np.abs(d1) < CUSP_TOL * m.gamma):
        raise CuspError("Psi' vanishes at the evaluation point")
    h = np.abs(d1) * np.exp(rho)
    return h[()] if np.ndim(h) == 0 else h


@dataclass(frozen=True)
class BoundarySample:
    """Equispaced samples of the boundary curve theta -> Psi(gamma e^(i theta)).

    Array-valued: entry ``j`` belongs to ``theta[j] = 2 pi j / n``.
    """

    theta: np.ndarray
    point: np.ndarray
    h: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray

    def __len__(self) -> int:
        return len(self.theta)


def boundary_sample(m: ExteriorMap, n: int, offset: float = 0.0) -> BoundarySample:
    """Points, scale factor, outward unit normal and curvature at n angles.

    theta increases counterclockwise; the outward normal is the unit tangent
    rotated by -pi/2, i.e. w Psi'(w)/|w Psi'(w)|. ``offset`` shifts the grid.
    """
    if n < 4:
        raise ValueError("need at least 4 boundary samples")
    theta = 2 * np.pi * np.arange(n) / n + offset
    w = m.gamma * np.exp(1j * theta)
    d1, d2 = evaluate_derivatives(m, w)
    if np.any(np.abs(d1) < CUSP_TOL * m.gamma):
        j = int(np.argmin(np.abs(d1)))
        raise CuspError(f"cusp: |Psi'| = {abs(d1[j]):.3g} at theta = {theta[j]:.6g}")
    wd = w * d1
    h = np.abs(wd)
    normal = wd / h
    # kappa = Re(1 + w Psi''/Psi') / |w Psi'|
    curvature = np.real(1.0 + w * d2 / d1) / h
    return BoundarySample(theta, evaluate_map(m, w), h, normal, curvature)


def winding_number(polygon: np.ndarray, z) -> np.ndarray:
    """Winding number of a closed polygon around each point of ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d = polygon[None, :] - z[:, None]
    ang = np.angle(np.roll(d, -1, axis=1) / d)
    return np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(int)


def invert_map(m: ExteriorMap, z, tol: float = 1e-14, maxiter: int = 100):
    """Solve Psi(w) = z for |w| > gamma by Newton's method, starting from w = z - a0."""
    z = np.asarray(z, dtype=complex)
    w = z - m.a0
    w = np.where(np.abs(w) < 1.5 * m.gamma, 1.5 * m.gamma * np.exp(1j * np.angle(w)), w)
    for _ in range(maxiter):
        f = evaluate_map(m, w, continued=True) - z
        d1, _ = evaluate_derivatives(m, w, continued=True)
        step = f / d1
        # keep iterates off the circle interior where the series may fold back
        w_new = w - step
        small = np.abs(w_new) < m.gamma
        w_new = np.where(small, w_new * (m.gamma / np.abs(w_new)) * 1.0000001, w_new)
        w = w_new
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(w))):
            break
    return w[()] if np.ndim(w) == 0 else w


# -- domain documents and presets -------------------------------------------


def _complex_pair(x, what: str) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise DomainError(f"{what}: expected [re, im], got {x!r}")


def domain_from_dict(doc: dict) -> ExteriorMap:
    if not isinstance(doc, dict) or "gamma" not in doc:
        raise DomainError("domain document must be an object with a 'gamma' field")
    gamma = doc["gamma"]
    if not isinstance(gamma, (int, float)) or isinstance(gamma, bool):
        raise DomainError(f"gamma must be a number, got {gamma!r}")
    a0 = _complex_pair(doc.get("a0", [0.0, 0.0]), "a0")
    a = doc.get("a", [])
    if not isinstance(a, list):
        raise DomainError("'a' must be an array of [re, im] pairs")
    coeffs = tuple(_complex_pair(x, f"a[{i}]") for i, x in enumerate(a))
    return ExteriorMap(gamma, a0, coeffs)


def parse_domain(text: str) -> ExteriorMap:
    """Parse a JSON domain document ``{"gamma": g, "a0": [re, im], "a": [[re, im], ...]}``.

    The returned map carries its univalence report as ``.univalence``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed domain document: {exc}") from None
    m = domain_from_dict(doc)
    m.univalence  # noqa: B018  (computed eagerly so it travels with the map)
    return m


def load_domain(path: str | Path) -> ExteriorMap:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read domain document {path}: {exc.strerror}") from None
    return parse_domain(text)


def disk(gamma: float = 1.0) -> ExteriorMap:
    return ExteriorMap(gamma)


def ellipse(a: complex = 0.5, gamma: float = 1.0) -> ExteriorMap:
    """Psi(w) = w + a/w."""
    return ExteriorMap(gamma, 0j, (complex(a),))


def powerlaw(c: float = 0.2, beta: float = 4.0, L: int = 64, gamma: float = 1.0) -> ExteriorMap:
    """a_k = c k^-beta for k = 1..L."""
    return ExteriorMap(gamma, 0j, tuple(c * k ** (-beta) for k in range(1, int(L) + 1)))


def random_map(seed: int = 0, L: int = 8, margin: float = 0.5, gamma: float = 1.0) -> ExteriorMap:
    """Random complex coefficients scaled so the sufficient univalence margin equals ``margin``."""
    rng = np.random.default_rng(seed)
    raw = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) * np.arange(1, L + 1) ** -2.0
    weight = sum(k * abs(x) * gamma ** (-(k + 1)) for k, x in enumerate(raw, 1))
    scale = (1.0 - margin) / weight
    a0 = complex(rng.standard_normal(), rng.standard_normal())
    return ExteriorMap(gamma, a0, tuple(scale * raw))


PRESETS = {"disk": disk, "ellipse": ellipse, "powerlaw": powerlaw, "random": random_map}


def _preset_value(text: str):
    for conv in (int, float, complex):
        try:
            return conv(text.replace("i", "j") if conv is complex else text)
        except ValueError:
            continue
    raise DomainError(f"bad preset parameter value {text!r}")


def preset(spec: str) -> ExteriorMap:
    """Build a preset map from ``name:key=value,...`` (e.g. ``ellipse:a=0.5,gamma=1``)."""
    name, _, params = spec.partition(":")
    if name not in PRESETS:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    kwargs = {}
    for item in filter(None, params.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise DomainError(f"bad preset parameter {item!r}")
        kwargs[key.strip()] = _preset_value(val.strip())
    try:
        return PRESETS[name](**kwargs)
    except TypeError as exc:
        raise DomainError(f"preset {name}: {exc}") from None
