import numpy as np
import pytest

from npgrunsky.conformal import disk, ellipse, powerlaw
from npgrunsky.decay import (
    PairingError,
    bound_constant,
    fit_decay,
    lemma_constant,
    order_eigenvalues,
    paired_magnitudes,
    tail_vs_eigenvalue_study,
    usable_range,
)
from npgrunsky.grunsky import grunsky_table_recursive, symmetrize
from npgrunsky.spectrum import Spectrum, assemble, spectrum


def _spec(m, N):
    return spectrum(assemble(symmetrize(grunsky_table_recursive(m, N))))


def test_ellipse_exponential_fit():
    r = fit_decay(_spec(ellipse(0.5), 20), "exp")
    assert r.model == "exponential"
    assert abs(r.slope - np.log(0.5)) < 1e-12
    assert r.residual < 1e-9
    np.testing.assert_allclose(r.predict([1, 2]), [0.25, 0.125], rtol=1e-12)


def test_powerlaw_fit():
    m = powerlaw(0.2, 4, 64)
    sp = _spec(m, 128)
    r = fit_decay(sp, "power", (4, 24))
    assert r.slope < -1.2
    # the tail of the window is truncation noise; it must not reach the fit
    lo, hi = usable_range(sp, 1e-15, start=4)
    assert hi >= 24


def test_fit_rejects_zeros_and_bad_ranges():
    sp = _spec(disk(), 8)
    with pytest.raises(ValueError, match="zero"):
        fit_decay(sp, "power")
    sp = _spec(ellipse(), 8)
    with pytest.raises(ValueError):
        fit_decay(sp, "power", (3, 9))
    with pytest.raises(ValueError):
        fit_decay(sp, "cubic")


def test_order_eigenvalues():
    raw = Spectrum(np.array([-0.1, 0.3, 0.1, -0.3000000001]))
    out = order_eigenvalues(raw)
    np.testing.assert_array_equal(out.eigenvalues, [0.3, -0.3000000001, 0.1, -0.1])
    assert out.pairing_jitter == pytest.approx(1e-10, rel=1e-3)
    with pytest.raises(PairingError, match="pair 1"):
        order_eigenvalues(Spectrum(np.array([0.3, -0.2, 0.1, -0.1])))


def test_paired_magnitudes():
    np.testing.assert_allclose(paired_magnitudes(_spec(ellipse(0.5), 4)), [0.25, 0.125, 0.0625, 0.03125])


def test_bound_constant():
    sp = _spec(ellipse(0.5), 20)
    # |lambda_2k| k^(p + alpha - 1/2) = 0.5^(k+1) k, maximal at k = 1, 2
    assert bound_constant(sp, 1, 0.5) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        bound_constant(sp, 0, 0.3)
    with pytest.raises(ValueError):
        bound_constant(sp, 1, 1.5)


def test_bound_constant_bounds_window(any_preset):
    sp = _spec(any_preset, 32)
    C = bound_constant(sp, 1, 0.5, (1, 16))
    k = np.arange(1, 17)
    assert np.all(paired_magnitudes(sp)[:16] <= C * k ** -1.0 * (1 + 1e-12))


def test_lemma_constant_ellipse():
    t = grunsky_table_recursive(ellipse(0.5), 40)
    e = 1.5
    rep = lemma_constant(t, 1, 0.5, 16)
    s = np.arange(1, 17)
    assert abs(rep.M - (0.25**s * s ** (2 * e)).max()) < 1e-12
    assert rep.worst_pair[0] == rep.worst_pair[1]
    with pytest.raises(ValueError):
        lemma_constant(t, 1, 0.5, 41)


def test_lemma_constant_plateau():
    t = grunsky_table_recursive(powerlaw(0.2, 4, 64), 128)
    a = lemma_constant(t, 1, 0.5, 16).M
    b = lemma_constant(t, 1, 0.5, 32).M
    assert abs(b - a) <= 0.1 * a


def test_tail_study_ellipse():
    rows = tail_vs_eigenvalue_study(ellipse(0.5), [2, 4, 8])
    for r in rows:
        assert r.ok
        assert abs(r.tail_norm - 0.5 ** (r.N + 2)) < 1e-15
        assert abs(r.tail_norm - r.next_eigenvalue) < 1e-12


def test_tail_study_powerlaw_strict():
    rows = tail_vs_eigenvalue_study(powerlaw(0.2, 4, 64), [8, 16, 32])
    assert all(r.ok and r.next_eigenvalue < r.tail_norm for r in rows)
