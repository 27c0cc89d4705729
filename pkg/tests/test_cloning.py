import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussclone import gaussian as gc
from gaussclone.cloning import (
    ClonerConfig,
    clone_moments_closed_form,
    feedforward_factors,
    gain_select,
    phase_flip,
    run_averaged,
    run_single_shot,
    single_shot_means,
)
from gaussclone.errors import DimensionError, RangeError
from gaussclone.fidelity import gaussian_fidelity

from conftest import random_measurement, random_state


def test_symmetric_coherent_clone():
    rho = gc.coherent(1.0)
    res = run_averaged(rho, gc.vacuum(), ClonerConfig.symmetric(gain=1.0, eta=1.0))
    for clone in (res.clone1, res.clone2):
        np.testing.assert_allclose(clone.mean, [np.sqrt(2), 0], atol=1e-14)
        np.testing.assert_allclose(clone.cov, np.eye(2), atol=1e-14)
        assert gaussian_fidelity(rho, clone).fidelity == pytest.approx(2 / 3, abs=1e-12)
    assert (res.f1, res.f2) == pytest.approx((np.sqrt(2), 0.0), abs=1e-15)


def test_selective_gain_clones_second_input():
    a, b = 0.4 - 0.3j, -1.0 + 0.5j
    res = run_averaged(gc.coherent(a), gc.coherent(b), ClonerConfig.symmetric(gain=-1.0))
    for clone in (res.clone1, res.clone2):
        np.testing.assert_allclose(clone.mean, -np.sqrt(2) * np.array([b.real, b.imag]), atol=1e-14)
        assert gaussian_fidelity(phase_flip(clone), gc.coherent(b)).fidelity == pytest.approx(2 / 3, abs=1e-12)


def test_gain_select():
    assert gain_select(1, 0.25) == pytest.approx(np.sqrt(3), rel=1e-15)
    assert gain_select(2, 0.25) == pytest.approx(-1 / np.sqrt(3), rel=1e-15)
    assert gain_select(1, 0.5) == pytest.approx(1.0)
    assert gain_select(2, 0.5) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        gain_select(3, 0.5)
    with pytest.raises(RangeError):
        gain_select(1, 0.0)


@given(st.floats(0.01, 0.99))
def test_gain_select_cancels_other_input(tau1):
    assert abs(feedforward_factors(tau1, gain_select(1, tau1))[1]) <= 1e-12
    assert abs(feedforward_factors(tau1, gain_select(2, tau1))[0]) <= 1e-12


def test_config_validation():
    with pytest.raises(RangeError):
        ClonerConfig(tau1=0.0)
    with pytest.raises(RangeError):
        ClonerConfig(tau2=1.0)
    with pytest.raises(RangeError):
        ClonerConfig(gain=np.inf)
    with pytest.raises(DimensionError):
        ClonerConfig(ancilla=gc.tensor(gc.vacuum(), gc.vacuum()))
    with pytest.raises(DimensionError):
        run_averaged(gc.tensor(gc.vacuum(), gc.vacuum()), gc.vacuum(), ClonerConfig())


def test_phase_flip():
    s = gc.squeezed_coherent(0.5 + 0.2j, 0.3)
    f = phase_flip(s)
    np.testing.assert_array_equal(f.mean, -s.mean)
    np.testing.assert_array_equal(f.cov, s.cov)
    assert phase_flip(f).allclose(s, atol=0)


def _random_config(rng):
    return ClonerConfig(
        tau1=rng.uniform(0.05, 0.95),
        tau2=rng.uniform(0.05, 0.95),
        gain=rng.uniform(-3, 3),
        meas=random_measurement(rng),
        ancilla=random_state(rng),
    )


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_closed_form_matches_pipeline(seed):
    rng = np.random.default_rng(seed)
    r1, r2, cfg = random_state(rng), random_state(rng), _random_config(rng)
    res = run_averaged(r1, r2, cfg)
    m1, m2, c1, c2 = clone_moments_closed_form(
        r1.cov, r2.cov, cfg.ancilla.cov, r1.mean, r2.mean, cfg.ancilla.mean, cfg
    )
    np.testing.assert_allclose(res.clone1.mean, m1, atol=1e-10)
    np.testing.assert_allclose(res.clone2.mean, m2, atol=1e-10)
    np.testing.assert_allclose(res.clone1.cov, c1, atol=1e-10)
    np.testing.assert_allclose(res.clone2.cov, c2, atol=1e-10)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_single_shot_vectorised_matches_loop(seed):
    rng = np.random.default_rng(seed)
    r1, r2, cfg = random_state(rng), random_state(rng), _random_config(rng)
    zs = rng.normal(size=5) + 1j * rng.normal(size=5)
    m1, m2, c1, c2 = single_shot_means(r1, r2, cfg, zs)
    for i, z in enumerate(zs):
        res, dens = run_single_shot(r1, r2, cfg, z)
        assert dens > 0
        np.testing.assert_allclose(res.clone1.mean, m1[i], atol=1e-10)
        np.testing.assert_allclose(res.clone2.mean, m2[i], atol=1e-10)
        np.testing.assert_allclose(res.clone1.cov, c1, atol=1e-12)
        np.testing.assert_allclose(res.clone2.cov, c2, atol=1e-12)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_clones_are_physical(seed):
    rng = np.random.default_rng(seed)
    res = run_averaged(random_state(rng), random_state(rng), _random_config(rng))
    for clone in (res.clone1, res.clone2):
        assert clone.symplectic_eigenvalues()[0] >= 0.5 - 1e-10


def test_single_shot_balanced_equal_inputs():
    """For equal coherent inputs the conditional clones only depend on z through g z."""
    alpha = 0.6 - 0.2j
    rho = gc.coherent(alpha)
    cfg = ClonerConfig.symmetric(gain=1.0)
    z = 0.3 + 0.9j
    res, dens = run_single_shot(rho, rho, cfg, z)
    expected = np.sqrt(2) * np.array([z.real, z.imag]) / np.sqrt(2)
    np.testing.assert_allclose(res.clone1.mean, expected, atol=1e-14)
    np.testing.assert_allclose(res.clone2.mean, expected, atol=1e-14)
    assert dens == pytest.approx(np.exp(-abs(z - np.sqrt(2) * alpha) ** 2) / np.pi, rel=1e-12)
