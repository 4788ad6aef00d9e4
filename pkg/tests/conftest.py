import numpy as np
import pytest


def symplectic_spectrum(cov):
    """Generic symplectic eigenvalues of a positive-definite covariance matrix.

    The spectrum of i*Omega*cov is that of the Hermitian R (i*Omega) R with
    R = cov^(1/2), which stays well conditioned for degenerate pairs.
    """
    n = cov.shape[0] // 2
    omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    w, U = np.linalg.eigh(cov)
    R = (U * np.sqrt(w)) @ U.T
    ev = np.linalg.eigvalsh(R @ (1j * omega) @ R)
    return np.sort(ev[ev > 0])


def two_mode_cov(a, b, c):
    Z = np.diag([1.0, -1.0])
    I = np.eye(2)
    return np.block([[a * I, c * Z], [c * Z, b * I]])


def beam_splitter(t, n_modes, i, j):
    """Symplectic matrix of a beam splitter with amplitude transmission t on modes i, j."""
    S = np.eye(2 * n_modes)
    r = np.sqrt(1 - t * t)
    for q in range(2):
        a, b = 2 * i + q, 2 * j + q
        S[a, a], S[a, b], S[b, a], S[b, b] = t, r, -r, t
    return S


def condition_on_homodyne_x(cov, keep, measured):
    """Covariance of modes ``keep`` after an x-homodyne on mode ``measured``."""
    idx = [2 * m + q for m in keep for q in range(2)]
    mx = 2 * measured
    gA = cov[np.ix_(idx, idx)]
    C = cov[np.ix_(idx, [mx])]
    return gA - C @ C.T / cov[mx, mx]


def condition_on_heterodyne(cov, keep, measured):
    idx = [2 * m + q for m in keep for q in range(2)]
    mb = [2 * measured, 2 * measured + 1]
    gA = cov[np.ix_(idx, idx)]
    C = cov[np.ix_(idx, mb)]
    gB = cov[np.ix_(mb, mb)]
    return gA - C @ np.linalg.inv(gB + np.eye(2)) @ C.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one status line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
