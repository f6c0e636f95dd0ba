"""Invariants over randomly generated univalent maps."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from npgrunsky.conformal import ExteriorMap, univalence_check
from npgrunsky.decay import order_eigenvalues
from npgrunsky.grunsky import grunsky_table_by_composition, grunsky_table_recursive, row_l2_report, symmetrize
from npgrunsky.spectrum import DensityCoefficients, Spectrum, apply, assemble, spectrum, tail_norm

coef = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def univalent_maps(draw):
    """Random coefficients rescaled so sum k |a_k| gamma^-(k+1) = 1 - margin."""
    L = draw(st.integers(1, 10))
    a = np.array(draw(st.lists(coef, min_size=L, max_size=L)), dtype=complex)
    gamma = draw(st.floats(0.5, 3.0))
    margin = draw(st.floats(0.05, 0.95))
    k = np.arange(1, L + 1)
    s = np.sum(k * np.abs(a) * gamma ** -(k + 1.0))
    if s == 0:
        a[0] = 0.1 * gamma**2
        s = np.sum(k * np.abs(a) * gamma ** -(k + 1.0))
    a *= (1 - margin) / s
    a0 = draw(coef)
    return ExteriorMap(gamma, a0, tuple(complex(x) for x in a))


settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@given(univalent_maps())
def test_generated_maps_pass(m):
    assert univalence_check(m).verdict == "pass"


@given(univalent_maps(), st.integers(4, 24))
def test_grunsky_identity(m, N):
    assert grunsky_table_recursive(m, N).identity_residual() < 1e-10


@given(univalent_maps())
def test_recursion_equals_composition(m):
    a = grunsky_table_recursive(m, 24)
    b = grunsky_table_by_composition(m, 24)
    assert np.abs(a.c_hat - b.c_hat).max() < 1e-10


@given(univalent_maps(), st.integers(2, 32))
def test_norm_bounds(m, N):
    mu = symmetrize(grunsky_table_recursive(m, N))
    assert row_l2_report(mu).max() <= 1 + 1e-12
    assert np.linalg.norm(assemble(mu).G, 2) <= 0.5 + 1e-12


@given(univalent_maps(), st.integers(2, 24))
def test_spectrum_symmetric_and_bounded(m, N):
    mu = symmetrize(grunsky_table_recursive(m, N))
    sp = spectrum(assemble(mu))
    lam = sp.eigenvalues
    np.testing.assert_array_equal(lam[0::2], -lam[1::2])
    assert np.all(np.abs(lam) <= 0.5 + 1e-12)
    for k in range(N):
        assert abs(lam[2 * k]) <= tail_norm(mu, k) + 1e-10


@given(univalent_maps(), st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_apply_is_self_adjoint(m, N, seed):
    mat = assemble(symmetrize(grunsky_table_recursive(m, N)))
    rng = np.random.default_rng(seed)
    x = DensityCoefficients.from_vector(rng.normal(size=2 * N) + 1j * rng.normal(size=2 * N))
    y = DensityCoefficients.from_vector(rng.normal(size=2 * N) + 1j * rng.normal(size=2 * N))
    lhs = apply(mat, x).inner(y)
    rhs = x.inner(apply(mat, y))
    assert abs(lhs - rhs) < 1e-12 * (1 + x.norm() * y.norm())


@given(st.lists(st.floats(0.001, 0.5), min_size=1, max_size=20), st.randoms())
def test_ordering_is_a_permutation(mags, rnd):
    vals = np.array([s * x for x in mags for s in (1, -1)])
    shuffled = vals.copy()
    rnd.shuffle(shuffled)
    out = order_eigenvalues(Spectrum(shuffled)).eigenvalues
    np.testing.assert_array_equal(np.sort(out), np.sort(vals))
    assert np.all(np.diff(np.abs(out)) <= 0)
    assert np.all(out[0::2] >= 0)


@given(univalent_maps(), st.floats(0.3, 3.0))
def test_scale_invariance(m, t):
    scaled = ExteriorMap(t * m.gamma, t * m.a0, tuple(t ** (k + 1) * a for k, a in enumerate(m.a, 1)))
    a = spectrum(assemble(symmetrize(grunsky_table_recursive(m, 12)))).eigenvalues
    b = spectrum(assemble(symmetrize(grunsky_table_recursive(scaled, 12)))).eigenvalues
    np.testing.assert_allclose(a, b, atol=1e-12)
