"""Brute-force number-basis oracle for the Gaussian formalism.

Everything here is built from ladder-operator matrix elements in a truncated
Fock space and shares no code with the moment calculus. Only ideal detection
(unit efficiency) is covered. Two-mode operators use the ordering
``|n1, n2> -> n1 * D + n2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import DimensionError, RangeError, TruncationError

TRACE_TOL = 1e-8
_DROP = 1e-14


def recommended_cutoff(alpha: complex = 0.0, r: float = 0.0) -> int:
    """Cutoff large enough for ``|alpha, r>`` to keep its trace deficit negligible."""
    return int(np.ceil(8.0 * (abs(alpha) ** 2 + np.sinh(r) ** 2) + 20))


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Truncated density matrix.

    ``factors`` optionally holds a spectral decomposition ``(weights, vectors)``
    with ``matrix = vectors @ diag(weights) @ vectors^dag``; operations use it to
    avoid diagonalising two-mode matrices.
    """

    matrix: np.ndarray
    cutoff: int
    n_modes: int = 1
    factors: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = self.cutoff**self.n_modes
        if self.n_modes not in (1, 2) or m.shape != (dim, dim):
            raise DimensionError(f"matrix shape {m.shape} does not fit cutoff {self.cutoff}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_factors(cls, weights, vectors, cutoff: int, n_modes: int = 1) -> "FockDensityMatrix":
        weights = np.asarray(weights, dtype=float)
        vectors = np.asarray(vectors, dtype=complex)
        return cls((vectors * weights) @ vectors.conj().T, cutoff, n_modes, (weights, vectors))

    @classmethod
    def from_ket(cls, ket: np.ndarray, cutoff: int, n_modes: int = 1) -> "FockDensityMatrix":
        ket = np.asarray(ket, dtype=complex)
        return cls.from_factors(np.ones(1), ket[:, None], cutoff, n_modes)

    def spectral(self) -> tuple[np.ndarray, np.ndarray]:
        if self.factors is not None:
            return self.factors
        return _factor(self.matrix)

    @property
    def trace_deficit(self) -> float:
        return float(1.0 - np.trace(self.matrix).real)

    def certify(self, bound: float = TRACE_TOL) -> "FockDensityMatrix":
        if self.trace_deficit > bound:
            raise TruncationError(
                f"trace deficit {self.trace_deficit:.3g} exceeds {bound:.3g} at cutoff {self.cutoff}"
            )
        return self


@dataclass(frozen=True, eq=False)
class FockOperator:
    matrix: np.ndarray
    cutoff: int
    n_modes: int = 1

    def apply(self, rho: FockDensityMatrix) -> FockDensityMatrix:
        """``U rho U^dag``, evaluated on the spectral factors of ``rho``."""
        if rho.cutoff != self.cutoff or rho.n_modes != self.n_modes:
            raise DimensionError("operator and state live in different spaces")
        w, v = rho.spectral()
        return FockDensityMatrix.from_factors(w, self.matrix @ v, self.cutoff, self.n_modes)


def _factor(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(rho)
    keep = w > _DROP * max(w.max(), 1.0)
    return w[keep], v[:, keep]


# -- single-mode building blocks --------------------------------------------------


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)


def coherent_ket(alpha: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff)
    alpha = complex(alpha)
    if alpha == 0:
        ket = np.zeros(cutoff, dtype=complex)
        ket[0] = 1.0
        return ket
    log_mag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * abs(alpha) ** 2
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


@lru_cache(maxsize=16)
def _creation_index(cutoff: int):
    m, n = np.tril_indices(cutoff)
    k = m - n
    log_coeff = 0.5 * (gammaln(m + 1) - gammaln(n + 1)) - gammaln(k + 1)
    return m, n, k, log_coeff


def _creation_exp(beta: complex, cutoff: int) -> np.ndarray:
    """Exact matrix elements of ``exp(beta a^dag)`` below the cutoff."""
    m, n, k, log_coeff = _creation_index(cutoff)
    out = np.zeros((cutoff, cutoff), dtype=complex)
    out[m, n] = np.exp(k * np.log(abs(beta)) + log_coeff + 1j * k * np.angle(beta))
    return out


def displacement(beta: complex, cutoff: int) -> np.ndarray:
    """Matrix of ``D(beta)`` restricted to the first ``cutoff`` number states.

    Uses the normally ordered form ``exp(-|beta|^2/2) exp(beta a^dag) exp(-beta* a)``,
    whose truncated product is exact element by element.
    """
    beta = complex(beta)
    if beta == 0:
        return np.eye(cutoff, dtype=complex)
    left = _creation_exp(beta, cutoff)
    right = _creation_exp(-beta, cutoff).conj().T
    return np.exp(-0.5 * abs(beta) ** 2) * (left @ right)


def squeezed_vacuum_ket(r: float, cutoff: int, pad: int = 40) -> np.ndarray:
    """``S(r)|0>`` with ``S(r) = exp(r (a^dag^2 - a^2)/2)``, via a padded matrix exponential."""
    big = 2 * cutoff + pad
    a = annihilation(big)
    gen = 0.5 * r * (a.T @ a.T - a @ a)
    vac = np.zeros(big)
    vac[0] = 1.0
    return (expm(gen) @ vac)[:cutoff].astype(complex)


def fock_coherent(alpha: complex, cutoff: int) -> FockDensityMatrix:
    return FockDensityMatrix.from_ket(coherent_ket(alpha, cutoff), cutoff).certify()


def fock_squeezed(alpha: complex, r: float, cutoff: int, pad: int = 40) -> FockDensityMatrix:
    """``D(alpha) S(r)|0><...|`` built in a padded space and truncated."""
    big = 2 * cutoff + pad
    ket = displacement(alpha, big) @ squeezed_vacuum_ket(r, big, pad)
    return FockDensityMatrix.from_ket(ket[:cutoff], cutoff).certify()


def fock_thermal(n_th: float, cutoff: int) -> FockDensityMatrix:
    if n_th < 0:
        raise RangeError("thermal photon number must be >= 0")
    n = np.arange(cutoff)
    p = (n_th / (1.0 + n_th)) ** n / (1.0 + n_th) if n_th > 0 else (n == 0).astype(float)
    return FockDensityMatrix(np.diag(p), cutoff).certify()


def fock_displace(rho: FockDensityMatrix, beta: complex) -> FockDensityMatrix:
    if rho.n_modes != 1:
        raise DimensionError("fock_displace acts on single-mode states")
    return FockOperator(displacement(beta, rho.cutoff), rho.cutoff).apply(rho)


# -- two-mode operations ----------------------------------------------------------


@lru_cache(maxsize=8)
def _beamsplitter_matrix(tau: float, cutoff: int) -> np.ndarray:
    theta = np.arccos(np.sqrt(tau))
    d = cutoff
    u = np.zeros((d * d, d * d), dtype=complex)
    # a b^dag - a^dag b conserves total photon number; exponentiate block by block
    for total in range(2 * d - 1):
        n1 = np.arange(max(0, total - d + 1), min(total, d - 1) + 1)
        n2 = total - n1
        idx = n1 * d + n2
        # state j+1 is state j with one photon moved from mode b to mode a
        amp = np.sqrt(n1[1:] * n2[:-1])
        gen = np.diag(amp, 1) - np.diag(amp, -1)
        u[np.ix_(idx, idx)] = expm(theta * gen)
    u.setflags(write=False)
    return u


def fock_beamsplitter(tau: float, cutoff: int) -> FockOperator:
    """Beam splitter unitary ``exp(theta (a b^dag - a^dag b))``, ``cos(theta) = sqrt(tau)``.

    In the Heisenberg picture ``a -> sqrt(tau) a - sqrt(1-tau) b`` and
    ``b -> sqrt(1-tau) a + sqrt(tau) b``.
    """
    if not 0.0 <= tau <= 1.0:
        raise RangeError(f"transmissivity must lie in [0, 1], got {tau}")
    return FockOperator(_beamsplitter_matrix(float(tau), int(cutoff)), cutoff, 2)


def fock_tensor(a: FockDensityMatrix, b: FockDensityMatrix) -> FockDensityMatrix:
    if a.cutoff != b.cutoff or a.n_modes != 1 or b.n_modes != 1:
        raise DimensionError("fock_tensor needs two single-mode states with equal cutoff")
    wa, va = a.spectral()
    wb, vb = b.spectral()
    w = np.kron(wa, wb)
    v = np.einsum("ia,jb->ijab", va, vb).reshape(a.cutoff**2, -1)
    return FockDensityMatrix.from_factors(w, v, a.cutoff, 2)


def fock_partial_trace(rho: FockDensityMatrix, keep: int) -> FockDensityMatrix:
    """Reduced state of mode ``keep`` (0 or 1) of a two-mode state."""
    if rho.n_modes != 2:
        raise DimensionError("partial trace needs a two-mode state")
    d = rho.cutoff
    if keep not in (0, 1):
        raise IndexError(f"mode {keep} out of range")
    if rho.factors is not None:
        w, v = rho.factors
        psi = v.T.reshape(-1, d, d)
        if keep == 1:
            psi = psi.transpose(0, 2, 1)
        red = np.einsum("k,kia,kja->ij", w, psi, psi.conj())
        return FockDensityMatrix(red, d)
    t = rho.matrix.reshape(d, d, d, d)
    if keep == 0:
        red = np.einsum("ikjk->ij", t)
    elif keep == 1:
        red = np.einsum("kikj->ij", t)
    else:
        raise IndexError(f"mode {keep} out of range")
    return FockDensityMatrix(red, d)


def fock_heterodyne_condition(rho: FockDensityMatrix, z: complex) -> tuple[FockDensityMatrix, float]:
    """Project mode 1 on ``|z><z|/pi``; returns the renormalised mode-0 state and the density."""
    if rho.n_modes != 2:
        raise DimensionError("heterodyne conditioning needs a two-mode state")
    d = rho.cutoff
    c = coherent_ket(z, d)
    t = rho.matrix.reshape(d, d, d, d)
    cond = np.einsum("k,ikjl,l->ij", c.conj(), t, c) / np.pi
    density = float(np.trace(cond).real)
    if density <= 0:
        raise TruncationError("outcome has vanishing probability in the truncated space")
    return FockDensityMatrix(cond / density, d), density


# -- fidelity and moments ---------------------------------------------------------


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fock_uhlmann_fidelity(a: FockDensityMatrix, b: FockDensityMatrix) -> float:
    """``(Tr sqrt(sqrt(a) b sqrt(a)))^2``."""
    if a.cutoff != b.cutoff or a.n_modes != b.n_modes:
        raise DimensionError("states live in different spaces")
    sa = _psd_sqrt(a.matrix)
    w = np.linalg.eigvalsh(sa @ b.matrix @ sa)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def _quadrature_ops(cutoff: int):
    """Exact truncated matrices of x, y, x^2, y^2 and (xy + yx)/2."""
    a = annihilation(cutoff)
    ad = a.T
    n = np.diag(np.arange(cutoff, dtype=float))
    a2 = np.diag(np.sqrt(np.arange(1, cutoff - 1) * np.arange(2, cutoff)), 2)
    ad2 = a2.T
    eye = np.eye(cutoff)
    x = (a + ad) / np.sqrt(2.0)
    y = (a - ad) / (1j * np.sqrt(2.0))
    xx = 0.5 * (a2 + ad2 + 2 * n + eye)
    yy = 0.5 * (-a2 - ad2 + 2 * n + eye)
    xy = (a2 - ad2) / 2j
    return x, y, xx, yy, xy


def fock_moments(rho: FockDensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature mean vector and covariance matrix (``(x1, y1, x2, y2)`` ordering)."""
    d = rho.cutoff
    x, y, xx, yy, xy = _quadrature_ops(d)
    singles = [fock_partial_trace(rho, k).matrix for k in range(2)] if rho.n_modes == 2 else [rho.matrix]
    mean = []
    for r in singles:
        mean += [np.trace(r @ x).real, np.trace(r @ y).real]
    mean = np.array(mean)
    dim = 2 * rho.n_modes
    second = np.zeros((dim, dim))
    for k, r in enumerate(singles):
        i = 2 * k
        second[i, i] = np.trace(r @ xx).real
        second[i + 1, i + 1] = np.trace(r @ yy).real
        second[i, i + 1] = second[i + 1, i] = np.trace(r @ xy).real
    if rho.n_modes == 2:
        t = rho.matrix.reshape(d, d, d, d)
        ops = (x, y)
        for p in range(2):
            for q in range(2):
                val = np.einsum("ikjl,ji,lk->", t, ops[p], ops[q]).real
                second[p, 2 + q] = second[2 + q, p] = val
    return mean, second - np.outer(mean, mean)


# -- cloning pipeline -------------------------------------------------------------


def fock_clone_pipeline(
    rho1: FockDensityMatrix,
    rho2: FockDensityMatrix,
    ancilla: FockDensityMatrix,
    tau1: float = 0.5,
    tau2: float = 0.5,
    gain: float = 1.0,
    n_nodes: int = 64,
) -> tuple[FockDensityMatrix, FockDensityMatrix]:
    """Run the cloner in Fock space with ideal heterodyne detection.

    The outcome integral is a tensor Gauss-Hermite rule centred on the
    measured mode's heterodyne statistics. Returns ``(clone1, clone2)``.
    """
    d = rho1.cutoff
    mixed = fock_beamsplitter(tau1, d).apply(fock_tensor(rho1, rho2))
    weights, vecs = mixed.spectral()

    marg_mean, marg_cov = fock_moments(fock_partial_trace(mixed, 1))
    # heterodyne outcome z has Re/Im variance (Var(x) + 1/2)/2
    center = (marg_mean[0] + 1j * marg_mean[1]) / np.sqrt(2.0)
    scale = np.sqrt(np.diag(marg_cov) + 0.5)
    t, w = np.polynomial.hermite.hermgauss(n_nodes)

    displaced = np.zeros((d, d), dtype=complex)
    kets = [vecs[:, j].reshape(d, d) for j in range(len(weights))]
    for i, ti in enumerate(t):
        for j, tj in enumerate(t):
            z = center + scale[0] * ti + 1j * scale[1] * tj
            jac = w[i] * w[j] * np.exp(ti**2 + tj**2) * scale[0] * scale[1] / np.pi
            c = coherent_ket(z, d).conj()
            dmat = displacement(gain * z, d)
            for lam, psi in zip(weights, kets):
                v = dmat @ (psi @ c)
                displaced += (jac * lam) * np.outer(v, v.conj())
    rho_d = FockDensityMatrix(displaced, d)
    out = fock_beamsplitter(tau2, d).apply(fock_tensor(rho_d, ancilla))
    return fock_partial_trace(out, 0), fock_partial_trace(out, 1)
