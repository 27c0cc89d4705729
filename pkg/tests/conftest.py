import numpy as np
import pytest

from gaussclone import gaussian as gc

ACCEPTANCE_RESULTS = []


def random_cov(rng, max_r=1.0, max_nth=1.5, pure=False):
    """Random physical single-mode covariance: rotated squeezed thermal state."""
    r = rng.uniform(-max_r, max_r)
    n_th = 0.0 if pure else rng.uniform(0.0, max_nth)
    phi = rng.uniform(0, np.pi)
    rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    base = gc.squeezed_thermal(n_th, r).cov
    return rot @ base @ rot.T


def random_state(rng, max_alpha=2.0, **kw):
    alpha = rng.uniform(-max_alpha, max_alpha) + 1j * rng.uniform(-max_alpha, max_alpha)
    cov = random_cov(rng, **kw)
    return gc.GaussianState(np.sqrt(2) * np.array([alpha.real, alpha.imag]), 0.5 * (cov + cov.T))


def random_measurement(rng):
    cov = random_cov(rng, max_r=0.5, max_nth=2.0)
    return gc.GaussianMeasurement(0.5 * (cov + cov.T))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
