"""Fidelities between single-mode Gaussian states and the optimal cloning ancilla."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gaussian as gc
from .errors import DimensionError, RangeError, ShapeError
from .gaussian import GaussianMeasurement, GaussianState, inv2

DIAG_TOL = 1e-12
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    delta: float
    det_sum: float


def _det2(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _mixedness_term(sigma_a: np.ndarray, sigma_b: np.ndarray) -> float:
    delta = 4.0 * (_det2(sigma_a) - 0.25) * (_det2(sigma_b) - 0.25)
    # pure states sit on the boundary; round-off may push delta slightly negative
    return max(delta, 0.0)


def _fidelity_from_covs(sigma_a, sigma_b, dx=None) -> FidelityReport:
    total = sigma_a + sigma_b
    det_sum = _det2(total)
    delta = _mixedness_term(sigma_a, sigma_b)
    f = 1.0 / (np.sqrt(det_sum + delta) - np.sqrt(delta))
    if dx is not None:
        f *= np.exp(-0.5 * dx @ inv2(total) @ dx)
    return FidelityReport(float(f), delta, det_sum)


def gaussian_fidelity(a: GaussianState, b: GaussianState) -> FidelityReport:
    """Uhlmann fidelity between two single-mode Gaussian states."""
    if a.n_modes != 1 or b.n_modes != 1:
        raise DimensionError("gaussian_fidelity expects single-mode states")
    return _fidelity_from_covs(a.cov, b.cov, a.mean - b.mean)


def symmetric_cloning_fidelity(sigma_k, sigma_3, sigma_m) -> float:
    """Input/clone fidelity of the balanced symmetric cloner.

    The clone covariance is ``sigma_k + (sigma_3 + sigma_m)/2`` and its mean
    equals the input mean, so the result does not depend on any displacement.
    """
    sigma_k, sigma_3, sigma_m = (np.asarray(m, dtype=float) for m in (sigma_k, sigma_3, sigma_m))
    clone = sigma_k + 0.5 * (sigma_3 + sigma_m)
    return _fidelity_from_covs(sigma_k, clone).fidelity


def _check_diagonal(**mats) -> None:
    for name, m in mats.items():
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ShapeError(f"{name} must be 2x2")
        if abs(m[0, 1]) > DIAG_TOL or abs(m[1, 0]) > DIAG_TOL:
            raise ShapeError(f"{name} must be diagonal (off-diagonal {m[0, 1]:.3g})")


def optimal_ancilla_squeezing(sigma_k, sigma_m) -> float:
    """Squeezing ``s`` of the vacuum ancilla that maximises the cloning fidelity.

    Valid for diagonal covariances; the optimum is exact for pure inputs.
    """
    _check_diagonal(sigma_k=sigma_k, sigma_m=sigma_m)
    sigma_k, sigma_m = np.asarray(sigma_k, float), np.asarray(sigma_m, float)
    num = 4.0 * sigma_k[0, 0] + sigma_m[0, 0]
    den = 4.0 * sigma_k[1, 1] + sigma_m[1, 1]
    return float(0.25 * np.log(num / den))


def golden_section_max(fun, lo: float, hi: float, tol: float = 1e-8, max_iter: int = 500):
    """Maximise a unimodal ``fun`` on ``[lo, hi]``; returns ``(x, fun(x))``."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def maximize_fidelity_numeric(sigma_k, sigma_m, bracket=(-3.0, 3.0), tol: float = 1e-8):
    """Numerically optimal squeezed-vacuum ancilla: returns ``(s_star, F_star)``."""
    _check_diagonal(sigma_k=sigma_k, sigma_m=sigma_m)

    def objective(s):
        return symmetric_cloning_fidelity(sigma_k, gc.squeezed_thermal(0.0, s).cov, sigma_m)

    return golden_section_max(objective, *bracket, tol=tol)


def scan_thermal_photons(sigma_k, sigma_m, n_th_grid=None, bracket=(-3.0, 3.0)):
    """Best fidelity for each ancilla thermal photon number on a grid.

    For each ``n_th`` the ancilla squeezing is re-optimised. Returns
    ``(n_th_grid, best_fidelities)``.
    """
    if n_th_grid is None:
        n_th_grid = np.linspace(0.0, 2.0, 21)
    n_th_grid = np.asarray(n_th_grid, dtype=float)
    best = []
    for n_th in n_th_grid:
        def objective(s, n_th=n_th):
            return symmetric_cloning_fidelity(sigma_k, gc.squeezed_thermal(n_th, s).cov, sigma_m)

        best.append(golden_section_max(objective, *bracket)[1])
    return n_th_grid, np.array(best)


def squeezed_cloning_fidelities(r: float, eta: float) -> tuple[float, float]:
    """Cloning fidelity of a squeezed input with optimal and with vacuum ancilla."""
    if not 0.0 < eta <= 1.0:
        raise RangeError(f"eta must lie in (0, 1], got {eta}")
    sigma_1 = gc.squeezed_coherent(0.0, r).cov
    sigma_m = GaussianMeasurement.double_homodyne(eta).cov
    s_bar = optimal_ancilla_squeezing(sigma_1, sigma_m)
    f_opt = symmetric_cloning_fidelity(sigma_1, gc.squeezed_thermal(0.0, s_bar).cov, sigma_m)
    f_vac = symmetric_cloning_fidelity(sigma_1, gc.vacuum().cov, sigma_m)
    return f_opt, f_vac


def enhancement(r: float, eta: float) -> float:
    """Relative fidelity gain from the optimal squeezed ancilla over the vacuum."""
    if abs(r) > 3.0:
        raise RangeError(f"|r| must not exceed 3, got {r}")
    f_opt, f_vac = squeezed_cloning_fidelities(r, eta)
    return (f_opt - f_vac) / f_vac
