"""Binary communication through the selective cloner.

The sender encodes a bit in the feed-forward gain (``g = +1`` or ``g = -1``);
each receiver gets one single-shot clone and decides by thresholding a noisy
homodyne measurement of the x quadrature (``x >= threshold`` means bit 1).
Both bits are sent with probability 1/2.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erf

from . import gaussian as gc
from .cloning import ClonerConfig, single_shot_means
from .errors import BudgetError, RangeError
from .gaussian import GaussianState

QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"
MIN_QUAD_ORDER = 40
DEFAULT_MC_SAMPLES = 1_000_000


def _check_efficiency(name: str, value: float) -> None:
    if not 0.0 < value <= 1.0:
        raise RangeError(f"{name} must lie in (0, 1], got {value}")


@dataclass(frozen=True)
class HomodyneDetector:
    epsilon: float = 1.0
    threshold: float = 0.0

    def __post_init__(self):
        _check_efficiency("epsilon", self.epsilon)

    @property
    def noise_variance(self) -> float:
        return (1.0 - self.epsilon) / (4.0 * self.epsilon)


@dataclass(frozen=True)
class CommEstimate:
    value: float
    abs_error: float
    method: str
    n_evals: int


def homodyne_x_marginal(state: GaussianState, epsilon: float) -> tuple[float, float]:
    """Mean and variance of the x-quadrature record of an inefficient homodyne detector."""
    _check_efficiency("epsilon", epsilon)
    if state.n_modes != 1:
        raise ValueError("homodyne_x_marginal expects a single-mode state")
    return float(state.mean[0]), float(state.cov[0, 0] + (1.0 - epsilon) / (4.0 * epsilon))


def _advantage(mu_plus, mu_minus, var_plus, var_minus, threshold):
    """``D`` with error probability ``1/2 - D/4``; odd under mirroring both means."""
    return erf((mu_plus - threshold) / np.sqrt(2.0 * var_plus)) - erf(
        (mu_minus - threshold) / np.sqrt(2.0 * var_minus)
    )


def _error_prob(mu_plus, mu_minus, var_plus, var_minus, threshold):
    return 0.5 - 0.25 * _advantage(mu_plus, mu_minus, var_plus, var_minus, threshold)


def error_prob_given_z(
    clone_plus: GaussianState, clone_minus: GaussianState, det: HomodyneDetector
) -> float:
    """Equal-prior error probability of telling the ``g=+1`` clone from the ``g=-1`` one."""
    mu_p, var_p = homodyne_x_marginal(clone_plus, det.epsilon)
    mu_m, var_m = homodyne_x_marginal(clone_minus, det.epsilon)
    return float(_error_prob(mu_p, mu_m, var_p, var_m, det.threshold))


class _Protocol:
    """Vectorised single-shot error probability for coherent inputs ``|alpha>``."""

    def __init__(self, alpha: float, eta: float, det: HomodyneDetector):
        self.rho = gc.coherent(alpha)
        self.det = det
        self.cfg_plus = ClonerConfig.symmetric(gain=1.0, eta=eta)
        self.cfg_minus = ClonerConfig.symmetric(gain=-1.0, eta=eta)
        self.mixed = gc.apply_symplectic(gc.tensor(self.rho, self.rho), gc.bs_symplectic(0.5))
        self.outcome_mean = self.mixed.mean[2:]
        self.outcome_cov = gc.outcome_covariance(self.mixed, 1, self.cfg_plus.meas)

    def advantage(self, zs: np.ndarray) -> np.ndarray:
        mp, _, cov_p, _ = single_shot_means(self.rho, self.rho, self.cfg_plus, zs)
        mm, _, cov_m, _ = single_shot_means(self.rho, self.rho, self.cfg_minus, zs)
        noise = self.det.noise_variance
        return _advantage(
            mp[:, 0], mm[:, 0], cov_p[0, 0] + noise, cov_m[0, 0] + noise, self.det.threshold
        )

    def error_given(self, zs: np.ndarray) -> np.ndarray:
        return 0.5 - 0.25 * self.advantage(zs)

    def quadrature(self, order: int) -> float:
        t, w = np.polynomial.hermite.hermgauss(order)
        chol = np.linalg.cholesky(self.outcome_cov)
        t1, t2 = (a.ravel() for a in np.meshgrid(t, t, indexing="ij"))
        weights = np.outer(w, w).ravel() / np.pi
        xm = self.outcome_mean + np.sqrt(2.0) * np.column_stack([t1, t2]) @ chol.T
        zs = (xm[:, 0] + 1j * xm[:, 1]) / np.sqrt(2.0)
        adv = self.advantage(zs)
        # the rule is symmetric: node k mirrors node n-1-k through the outcome mean
        half = adv.size // 2
        total = np.sum(weights[:half] * (adv[:half] + adv[::-1][:half]))
        if adv.size % 2:
            total += weights[half] * adv[half]
        return float(0.5 - 0.25 * total)

    def monte_carlo(self, n: int, rng: np.random.Generator) -> tuple[float, float]:
        # antithetic pairs mirrored through the outcome mean
        half = max(n // 2, 1)
        zs = gc.sample_outcomes(self.mixed, 1, self.cfg_plus.meas, rng, half)
        center = (self.outcome_mean[0] + 1j * self.outcome_mean[1]) / np.sqrt(2.0)
        pair = 0.5 * (self.advantage(zs) + self.advantage(2 * center - zs))
        se = 0.25 * pair.std(ddof=1) / np.sqrt(half) if half > 1 else np.inf
        return float(0.5 - 0.25 * pair.mean()), float(se)


def average_error_probability(
    alpha: float,
    eta: float = 1.0,
    epsilon: float = 1.0,
    method: str = QUADRATURE,
    budget: int | None = None,
    seed: int | np.random.SeedSequence | None = None,
    tol: float | None = None,
    threshold: float = 0.0,
) -> CommEstimate:
    """Outcome-averaged error probability of the coherent-state protocol.

    ``budget`` is the Gauss-Hermite order per axis (quadrature, at least 40)
    or the number of outcome samples (Monte Carlo). The quadrature error is
    estimated by comparison with a rule of 1.5x the order. A ``BudgetError``
    is raised when ``tol`` is given and the reported error exceeds it.
    """
    if not np.isfinite(alpha) or alpha < 0:
        raise RangeError(f"alpha must be real and >= 0, got {alpha}")
    _check_efficiency("eta", eta)
    det = HomodyneDetector(epsilon, threshold)
    proto = _Protocol(alpha, eta, det)
    if method in (QUADRATURE, "quad"):
        order = MIN_QUAD_ORDER if budget is None else int(budget)
        if order < MIN_QUAD_ORDER:
            raise RangeError(f"quadrature order must be >= {MIN_QUAD_ORDER}, got {order}")
        value = proto.quadrature(order)
        finer = order + order // 2
        abs_error = abs(value - proto.quadrature(finer))
        est = CommEstimate(value, abs_error, QUADRATURE, order**2 + finer**2)
    elif method in (MONTE_CARLO, "mc"):
        n = DEFAULT_MC_SAMPLES if budget is None else int(budget)
        if n < 2:
            raise RangeError("Monte Carlo budget must be at least 2 samples")
        rng = np.random.default_rng(seed)
        value, se = proto.monte_carlo(n, rng)
        est = CommEstimate(value, se, MONTE_CARLO, 2 * max(n // 2, 1))
    else:
        raise ValueError(f"unknown method {method!r}")
    if tol is not None and est.abs_error > tol:
        raise BudgetError(
            f"error estimate {est.abs_error:.3g} exceeds tolerance {tol:.3g} with budget {budget}"
        )
    return est


def point_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Per-grid-point seed stream, independent of evaluation order."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(index,))


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("GAUSSCLONE_THREADS", "1")))
    except ValueError:
        return 1


def error_curve(
    alphas: Sequence[float],
    eta: float = 1.0,
    epsilon: float = 1.0,
    method: str = QUADRATURE,
    budget: int | None = None,
    seed: int = 0,
    tol: float | None = None,
    workers: int | None = None,
) -> list[tuple[float, float, float, str]]:
    """Rows ``(alpha, h_e, abs_error, method)`` over a sorted amplitude grid."""
    alphas = [float(a) for a in alphas]
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise RangeError("alpha grid must be sorted")

    def point(i):
        est = average_error_probability(
            alphas[i], eta, epsilon, method, budget, point_seed(seed, i), tol
        )
        return alphas[i], est.value, est.abs_error, est.method

    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, range(len(alphas))))
    return [point(i) for i in range(len(alphas))]
