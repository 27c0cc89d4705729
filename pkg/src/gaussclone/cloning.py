"""Selective linear-optics cloning machine.

Pipeline: inputs ``rho1 (x) rho2`` -> beam splitter ``tau1`` -> Gaussian
measurement of the second output -> feed-forward displacement ``g z`` on the
first output -> mixing with the ancilla ``rho3`` at beam splitter ``tau2``.
The two output ports of the second beam splitter are the clones; clone 1 is
the transmitted arm (first block of the output covariance matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gaussian as gc
from .errors import DimensionError, RangeError
from .gaussian import GaussianMeasurement, GaussianState

TAU_MIN = 1e-6


def _check_tau(name: str, tau: float) -> None:
    if not TAU_MIN <= tau <= 1.0 - TAU_MIN:
        raise RangeError(f"{name} must lie in [{TAU_MIN}, {1 - TAU_MIN}], got {tau}")


def feedforward_factors(tau1: float, gain: float) -> tuple[float, float]:
    """Weights ``(f1, f2)`` with which the input moments enter the clones."""
    t, r = np.sqrt(tau1), np.sqrt(1.0 - tau1)
    return t + gain * r, gain * t - r


@dataclass(frozen=True)
class ClonerConfig:
    tau1: float = 0.5
    tau2: float = 0.5
    gain: float = 1.0
    meas: GaussianMeasurement = field(default_factory=GaussianMeasurement.double_homodyne)
    ancilla: GaussianState = field(default_factory=gc.vacuum)

    def __post_init__(self):
        _check_tau("tau1", self.tau1)
        _check_tau("tau2", self.tau2)
        if not np.isfinite(self.gain):
            raise RangeError("gain must be finite")
        if self.ancilla.n_modes != 1:
            raise DimensionError("ancilla must be a single-mode state")

    @classmethod
    def symmetric(cls, gain: float = 1.0, eta: float = 1.0, ancilla: GaussianState | None = None):
        """Balanced beam splitters and double-homodyne detection of efficiency ``eta``."""
        return cls(
            tau1=0.5,
            tau2=0.5,
            gain=gain,
            meas=GaussianMeasurement.double_homodyne(eta),
            ancilla=gc.vacuum() if ancilla is None else ancilla,
        )

    @property
    def f1(self) -> float:
        return feedforward_factors(self.tau1, self.gain)[0]

    @property
    def f2(self) -> float:
        return feedforward_factors(self.tau1, self.gain)[1]


@dataclass(frozen=True)
class CloneResult:
    clone1: GaussianState
    clone2: GaussianState
    f1: float
    f2: float


def _check_inputs(rho1: GaussianState, rho2: GaussianState) -> None:
    if rho1.n_modes != 1 or rho2.n_modes != 1:
        raise DimensionError("cloner inputs must be single-mode states")


def _after_first_bs(rho1, rho2, cfg):
    _check_inputs(rho1, rho2)
    return gc.apply_symplectic(gc.tensor(rho1, rho2), gc.bs_symplectic(cfg.tau1))


def _split_clones(displaced: GaussianState, cfg: ClonerConfig) -> CloneResult:
    out = gc.apply_symplectic(gc.tensor(displaced, cfg.ancilla), gc.bs_symplectic(cfg.tau2))
    return CloneResult(
        gc.partial_trace(out, [0]), gc.partial_trace(out, [1]), cfg.f1, cfg.f2
    )


def run_averaged(rho1: GaussianState, rho2: GaussianState, cfg: ClonerConfig) -> CloneResult:
    """Clones after averaging the feed-forward over all measurement outcomes."""
    mixed = _after_first_bs(rho1, rho2, cfg)
    return _split_clones(gc.average_feedforward(mixed, cfg.meas, cfg.gain), cfg)


def run_single_shot(
    rho1: GaussianState, rho2: GaussianState, cfg: ClonerConfig, z: complex
) -> tuple[CloneResult, float]:
    """Clones conditioned on one measurement outcome ``z``, plus the outcome density."""
    mixed = _after_first_bs(rho1, rho2, cfg)
    cond, density = gc.measure_mode(mixed, 1, cfg.meas, z)
    return _split_clones(gc.displace(cond, 0, z, cfg.gain), cfg), density


def single_shot_means(
    rho1: GaussianState, rho2: GaussianState, cfg: ClonerConfig, zs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised single-shot run over an array of outcomes.

    Returns ``(means1, means2, cov1, cov2)`` where ``means_k`` has shape
    ``(len(zs), 2)``. The clone covariances do not depend on the outcome.
    """
    zs = np.asarray(zs, dtype=complex).ravel()
    mixed = _after_first_bs(rho1, rho2, cfg)
    k = gc.conditional_gain(mixed, 1, cfg.meas)
    xm = np.sqrt(2.0) * np.column_stack([zs.real, zs.imag])
    cond = mixed.mean[:2] + (xm - mixed.mean[2:]) @ k.T + cfg.gain * xm
    s = gc.bs_symplectic(cfg.tau2).matrix
    joint = np.hstack([cond, np.broadcast_to(cfg.ancilla.mean, cond.shape)])
    out = joint @ s
    ref, _ = run_single_shot(rho1, rho2, cfg, 0.0)
    return out[:, :2], out[:, 2:], ref.clone1.cov, ref.clone2.cov


def clone_moments_closed_form(sigma1, sigma2, sigma3, x1, x2, x3, cfg: ClonerConfig):
    """Clone moments ``(mean1, mean2, cov1, cov2)`` written directly in the inputs.

    Only ``tau1``, ``tau2``, ``gain`` and ``meas`` are read from ``cfg``; the
    ancilla moments are the explicit ``sigma3``/``x3`` arguments.
    """
    sigma1, sigma2, sigma3 = (np.asarray(m, float) for m in (sigma1, sigma2, sigma3))
    x1, x2, x3 = (np.asarray(v, float) for v in (x1, x2, x3))
    f1, f2 = feedforward_factors(cfg.tau1, cfg.gain)
    t2, r2 = np.sqrt(cfg.tau2), np.sqrt(1.0 - cfg.tau2)
    mix_mean = f1 * x1 + f2 * x2
    mix_cov = f1**2 * sigma1 + f2**2 * sigma2 + cfg.gain**2 * cfg.meas.cov
    return (
        t2 * mix_mean - r2 * x3,
        r2 * mix_mean + t2 * x3,
        cfg.tau2 * mix_cov + (1.0 - cfg.tau2) * sigma3,
        (1.0 - cfg.tau2) * mix_cov + cfg.tau2 * sigma3,
    )


def gain_select(target: int, tau1: float) -> float:
    """Gain that removes the other input from the clones.

    ``target=1`` clones ``rho1`` (``f2 = 0``); ``target=2`` clones ``rho2``
    (``f1 = 0``), with the clone amplitude carrying a pi phase shift.
    """
    _check_tau("tau1", tau1)
    if target == 1:
        return float(np.sqrt((1.0 - tau1) / tau1))
    if target == 2:
        return float(-np.sqrt(tau1 / (1.0 - tau1)))
    raise ValueError(f"target must be 1 or 2, got {target!r}")


def phase_flip(state: GaussianState) -> GaussianState:
    """pi phase rotation: negates every mean, leaves the covariance unchanged."""
    return GaussianState(-state.mean, state.cov)
