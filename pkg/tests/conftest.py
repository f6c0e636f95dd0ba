import numpy as np
import pytest

from npgrunsky.conformal import ellipse, disk, powerlaw, random_map, ExteriorMap

# analytic (finite Laurent series) presets used across the suite
PRESETS = {
    "disk": lambda: disk(),
    "ellipse": lambda: ellipse(0.5, 1.0),
    "ellipse_complex": lambda: ellipse(0.3 + 0.4j, 1.3),
    "powerlaw3": lambda: powerlaw(0.2, 3, 64, 1.0),
    "powerlaw4": lambda: powerlaw(0.2, 4, 64, 1.0),
    "random1": lambda: random_map(1),
    "random_gamma2": lambda: random_map(2, L=12, margin=0.3, gamma=2.0),
}


@pytest.fixture(params=sorted(PRESETS))
def any_preset(request):
    return PRESETS[request.param]()


@pytest.fixture
def two_term():
    """Psi(w) = w + 0.3/w + 0.1/w^2."""
    return ExteriorMap(1.0, 0, (0.3, 0.1))


def laurent_of_faber(m, mdeg):
    """Laurent coefficients of F_m(Psi(w)) by exact polynomial composition.

    Returns a dict power -> coefficient. Independent of the Grunsky
    recursion: uses the monomial Faber table and Laurent-series products.
    """
    from npgrunsky.grunsky import faber_table

    F = faber_table(m, mdeg).coeffs[mdeg, : mdeg + 1]
    L = m.L
    # Psi as Laurent array over powers 1, 0, -1, ..., -L
    psi = np.concatenate([[1.0, m.a0], np.asarray(m.a, dtype=complex)])
    total = {}
    power = np.array([1.0 + 0j])  # Psi^0, top power 0
    for j in range(mdeg + 1):
        top = j
        for i, c in enumerate(power):
            total[top - i] = total.get(top - i, 0) + F[j] * c
        power = np.convolve(power, psi)
    return total


# -- acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES = []


def record_acceptance(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
