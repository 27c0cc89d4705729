"""Moment-representation calculus for multimode Gaussian states.

Conventions (fixed throughout the package):

* hbar = 1, quadratures ``x = (a + a^dag)/sqrt(2)`` and ``y = (a - a^dag)/(i sqrt(2))``,
  so the vacuum covariance matrix is ``I/2``.
* Phase-space vectors are ordered ``(x1, y1, x2, y2, ...)``.
* A symplectic matrix ``S`` acts as ``cov -> S.T @ cov @ S`` and ``mean -> S.T @ mean``.

States are immutable; every operation returns a new state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    PhysicalityError,
    RangeError,
    SingularMatrixError,
)

SYMMETRY_TOL = 1e-10
PHYSICAL_TOL = 1e-10
SQUEEZE_GUARD = 10.0
_DET_GUARD = 1e-300


@lru_cache(maxsize=None)
def _symplectic_form(n_modes: int) -> np.ndarray:
    omega = np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    omega.setflags(write=False)
    return omega


def symplectic_form(n_modes: int) -> np.ndarray:
    """Standard symplectic form for ``(x1, y1, x2, y2, ...)`` ordering."""
    return _symplectic_form(int(n_modes))


def _det2(m: np.ndarray) -> float:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of ``cov``, sorted ascending (one value per mode)."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    if n == 1:
        return np.array([np.sqrt(max(_det2(cov), 0.0))])
    # eigenvalues of Omega @ cov are +-i nu
    ev = np.abs(np.linalg.eigvals(symplectic_form(n) @ cov).imag)
    ev.sort()
    return ev[::2]


def inv2(m: np.ndarray) -> np.ndarray:
    """Closed-form inverse of a 2x2 matrix with a determinant guard."""
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if not np.isfinite(det) or abs(det) <= _DET_GUARD:
        raise SingularMatrixError(f"2x2 block is singular (det={det!r})")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def _mode_slice(mode: int) -> slice:
    return slice(2 * mode, 2 * mode + 2)


def _as_quad(z: complex) -> np.ndarray:
    z = complex(z)
    return np.sqrt(2.0) * np.array([z.real, z.imag])


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of an ``n``-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray
    _nu: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mean = _freeze(np.ravel(self.mean))
        cov = _freeze(self.cov)
        if mean.size == 0 or mean.size % 2:
            raise DimensionError(f"mean length must be even and positive, got {mean.size}")
        if cov.shape != (mean.size, mean.size):
            raise DimensionError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise RangeError("state moments must be finite")
        if np.abs(cov - cov.T).max() > SYMMETRY_TOL:
            raise PhysicalityError("covariance matrix is not symmetric")
        nu = symplectic_eigenvalues(cov)
        if nu[0] < 0.5 - PHYSICAL_TOL:
            raise PhysicalityError(f"symplectic eigenvalue {nu[0]:.6g} < 1/2")
        nu.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "_nu", nu)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        return self._nu

    def is_pure(self, tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(self.symplectic_eigenvalues() - 0.5) <= tol))

    def allclose(self, other: "GaussianState", atol: float = 1e-10) -> bool:
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        state = cls(np.asarray(data["mean"], float), np.asarray(data["cov"], float))
        if "n_modes" in data and int(data["n_modes"]) != state.n_modes:
            raise DimensionError("n_modes disagrees with moment sizes")
        return state


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """Linear phase-space map, validated against ``S.T @ Omega @ S = Omega``."""

    matrix: np.ndarray

    def __post_init__(self):
        s = _freeze(self.matrix)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise DimensionError(f"symplectic matrix must be 2n x 2n, got {s.shape}")
        omega = symplectic_form(s.shape[0] // 2)
        if np.max(np.abs(s.T @ omega @ s - omega)) > 1e-10:
            raise RangeError("matrix is not symplectic")
        object.__setattr__(self, "matrix", s)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True, eq=False)
class GaussianMeasurement:
    """Gaussian single-mode POVM with noise covariance ``cov``.

    The outcome ``z`` maps to the phase-space vector ``sqrt(2) (Re z, Im z)``.
    """

    cov: np.ndarray

    def __post_init__(self):
        cov = _freeze(self.cov)
        if cov.shape != (2, 2):
            raise DimensionError("measurement covariance must be 2x2")
        if abs(cov[0, 1] - cov[1, 0]) > SYMMETRY_TOL:
            raise PhysicalityError("measurement covariance is not symmetric")
        if symplectic_eigenvalues(cov)[0] < 0.5 - PHYSICAL_TOL or cov[0, 0] <= 0:
            raise PhysicalityError("measurement covariance is not a valid state covariance")
        object.__setattr__(self, "cov", cov)

    @classmethod
    def double_homodyne(cls, eta: float = 1.0) -> "GaussianMeasurement":
        """Double-homodyne (heterodyne) detection with quantum efficiency ``eta``."""
        if not 0.0 < eta <= 1.0:
            raise RangeError(f"quantum efficiency must lie in (0, 1], got {eta}")
        return cls((2.0 - eta) / (2.0 * eta) * np.eye(2))


# -- state builders ---------------------------------------------------------------


def vacuum() -> GaussianState:
    return GaussianState(np.zeros(2), 0.5 * np.eye(2))


def coherent(alpha: complex) -> GaussianState:
    return GaussianState(_as_quad(alpha), 0.5 * np.eye(2))


def squeezed_coherent(alpha: complex, r: float) -> GaussianState:
    """State ``D(alpha) S(r)|0>``; ``r > 0`` stretches the x quadrature."""
    if abs(r) > SQUEEZE_GUARD:
        raise RangeError(f"|r| must not exceed {SQUEEZE_GUARD}, got {r}")
    return GaussianState(_as_quad(alpha), 0.5 * np.diag([np.exp(2 * r), np.exp(-2 * r)]))


def squeezed_thermal(n_th: float, s: float) -> GaussianState:
    """Zero-mean squeezed thermal state with ``n_th`` mean thermal photons."""
    if n_th < 0:
        raise RangeError(f"thermal photon number must be >= 0, got {n_th}")
    if abs(s) > SQUEEZE_GUARD:
        raise RangeError(f"|s| must not exceed {SQUEEZE_GUARD}, got {s}")
    w = (2.0 * n_th + 1.0) / 2.0
    return GaussianState(np.zeros(2), np.diag([w * np.exp(2 * s), w * np.exp(-2 * s)]))


def tensor(*states: GaussianState) -> GaussianState:
    """Product state; moments are concatenated / block-diagonally stacked."""
    if not states:
        raise DimensionError("tensor needs at least one state")
    n = sum(s.mean.size for s in states)
    cov = np.zeros((n, n))
    i = 0
    for s in states:
        k = s.mean.size
        cov[i : i + k, i : i + k] = s.cov
        i += k
    return GaussianState(np.concatenate([s.mean for s in states]), cov)


# -- symplectic evolution ---------------------------------------------------------


def bs_symplectic(tau: float, n_modes: int = 2, modes: Sequence[int] = (0, 1)) -> SymplecticOp:
    """Beam splitter of transmissivity ``tau`` between ``modes``.

    On the selected pair the matrix is ``[[sqrt(tau) I, sqrt(1-tau) I],
    [-sqrt(1-tau) I, sqrt(tau) I]]``; other modes are untouched.
    """
    if not 0.0 <= tau <= 1.0:
        raise RangeError(f"transmissivity must lie in [0, 1], got {tau}")
    return _bs_symplectic(float(tau), int(n_modes), tuple(int(m) for m in modes))


@lru_cache(maxsize=256)
def _bs_symplectic(tau: float, n_modes: int, modes: tuple) -> SymplecticOp:
    i, j = modes
    if i == j or not (0 <= i < n_modes and 0 <= j < n_modes):
        raise IndexError(f"invalid mode pair {modes!r} for {n_modes} modes")
    t, r = np.sqrt(tau), np.sqrt(1.0 - tau)
    s = np.eye(2 * n_modes)
    eye = np.eye(2)
    s[_mode_slice(i), _mode_slice(i)] = t * eye
    s[_mode_slice(i), _mode_slice(j)] = r * eye
    s[_mode_slice(j), _mode_slice(i)] = -r * eye
    s[_mode_slice(j), _mode_slice(j)] = t * eye
    return SymplecticOp(s)


def apply_symplectic(state: GaussianState, op: SymplecticOp) -> GaussianState:
    s = op.matrix
    if s.shape[0] != state.mean.size:
        raise DimensionError(f"{op.n_modes}-mode operation on {state.n_modes}-mode state")
    cov = s.T @ state.cov @ s
    return GaussianState(s.T @ state.mean, 0.5 * (cov + cov.T))


def displace(state: GaussianState, mode: int, z: complex, gain: float = 1.0) -> GaussianState:
    """Apply ``D(gain * z)`` to ``mode``; only the mean changes."""
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range for {state.n_modes}-mode state")
    mean = state.mean.copy()
    mean[_mode_slice(mode)] += gain * _as_quad(z)
    return GaussianState(mean, state.cov)


def partial_trace(state: GaussianState, keep: Iterable[int]) -> GaussianState:
    """Marginal state of the modes in ``keep`` (in the given order)."""
    keep = [int(k) for k in keep]
    if not keep:
        raise IndexError("keep must name at least one mode")
    for k in keep:
        if not 0 <= k < state.n_modes:
            raise IndexError(f"mode {k} out of range for {state.n_modes}-mode state")
    idx = np.concatenate([np.arange(2 * k, 2 * k + 2) for k in keep])
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


# -- Gaussian measurement ---------------------------------------------------------


def _split(state: GaussianState, mode: int):
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range for {state.n_modes}-mode state")
    meas_idx = np.arange(2 * mode, 2 * mode + 2)
    rest_idx = np.array([i for i in range(state.mean.size) if i // 2 != mode], dtype=int)
    return meas_idx, rest_idx


def outcome_covariance(state: GaussianState, mode: int, meas: GaussianMeasurement) -> np.ndarray:
    """Covariance ``B + sigma_M`` of the outcome vector ``sqrt(2)(Re z, Im z)``."""
    meas_idx, _ = _split(state, mode)
    return state.cov[np.ix_(meas_idx, meas_idx)] + meas.cov


def outcome_density(state: GaussianState, mode: int, meas: GaussianMeasurement, z: complex) -> float:
    """Probability density of outcome ``z`` (with respect to ``d^2 z = dRe z dIm z``)."""
    meas_idx, _ = _split(state, mode)
    sigma = outcome_covariance(state, mode, meas)
    d = _as_quad(z) - state.mean[meas_idx]
    det = np.linalg.det(sigma)
    return float(np.exp(-0.5 * d @ inv2(sigma) @ d) / (np.pi * np.sqrt(det)))


def conditional_gain(state: GaussianState, mode: int, meas: GaussianMeasurement) -> np.ndarray:
    """Matrix ``C Sigma^-1`` mapping outcome residuals to conditional-mean shifts."""
    meas_idx, rest_idx = _split(state, mode)
    c = state.cov[np.ix_(rest_idx, meas_idx)]
    return c @ inv2(outcome_covariance(state, mode, meas))


def measure_mode(
    state: GaussianState, mode: int, meas: GaussianMeasurement, z: complex
) -> tuple[GaussianState, float]:
    """Condition the remaining modes on outcome ``z`` of ``meas`` applied to ``mode``.

    Returns the conditional state of the unmeasured modes (in their original
    order) and the outcome density. The conditional covariance is the Schur
    complement ``A - C Sigma^-1 C^T`` and does not depend on ``z``.
    """
    if state.n_modes < 2:
        raise DimensionError("measure_mode needs at least two modes")
    meas_idx, rest_idx = _split(state, mode)
    k = conditional_gain(state, mode, meas)
    a = state.cov[np.ix_(rest_idx, rest_idx)]
    c = state.cov[np.ix_(rest_idx, meas_idx)]
    cov = a - k @ c.T
    mean = state.mean[rest_idx] + k @ (_as_quad(z) - state.mean[meas_idx])
    return GaussianState(mean, 0.5 * (cov + cov.T)), outcome_density(state, mode, meas, z)


def sample_outcomes(
    state: GaussianState,
    mode: int,
    meas: GaussianMeasurement,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """Draw ``size`` outcomes ``z`` from the outcome density."""
    meas_idx, _ = _split(state, mode)
    sigma = outcome_covariance(state, mode, meas)
    xm = rng.multivariate_normal(state.mean[meas_idx], sigma, size=size, method="cholesky")
    return (xm[:, 0] + 1j * xm[:, 1]) / np.sqrt(2.0)


def sample_outcome(
    state: GaussianState, mode: int, meas: GaussianMeasurement, rng: np.random.Generator
) -> complex:
    return complex(sample_outcomes(state, mode, meas, rng, 1)[0])


def average_feedforward(state: GaussianState, meas: GaussianMeasurement, gain: float) -> GaussianState:
    """Measure mode 1, displace mode 0 by ``gain * z`` and average over ``z``.

    Closed form: ``cov = A + g^2 Sigma + g (C + C^T)``, ``mean = X_0 + g X_1``.
    """
    if state.n_modes != 2:
        raise DimensionError("average_feedforward expects a two-mode state")
    a = state.cov[:2, :2]
    c = state.cov[:2, 2:]
    sigma = outcome_covariance(state, 1, meas)
    cov = a + gain**2 * sigma + gain * (c + c.T)
    mean = state.mean[:2] + gain * state.mean[2:]
    return GaussianState(mean, 0.5 * (cov + cov.T))
