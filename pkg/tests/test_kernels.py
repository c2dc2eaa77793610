"""The compiled and NumPy kernel lanes must agree on every operation."""

import numpy as np
import pytest

from holoforge import _kernels_np, kernels

HAVE_EXT = kernels.BACKEND == "compiled"

pytestmark = pytest.mark.skipif(
    not HAVE_EXT, reason="compiled extension not built; single-lane run")


def _rand_complex(shape, seed):
    rng = np.random.default_rng(seed)
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)).astype(np.complex128)


@pytest.mark.parametrize("shape,z", [((64, 64), 300.0), ((48, 96), -75.0),
                                     ((128, 128), 15.0), ((64, 64), 0.0)])
def test_transfer_function_lanes_match(shape, z):
    a = kernels.transfer_function(shape[0], shape[1], 1.12, 0.53, z)
    b = _kernels_np.transfer_function(shape[0], shape[1], 1.12, 0.53, z)
    assert np.allclose(a, b, atol=1e-14, rtol=0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_amplitude_update_lanes_match(seed):
    u1 = _rand_complex((40, 56), seed)
    u1[0, 0] = 0.0  # exercise the zero-amplitude branch
    u2 = u1.copy()
    target = np.abs(_rand_complex((40, 56), seed + 100)).astype(np.float64)
    kernels.amplitude_update(u1, target)
    _kernels_np.amplitude_update(u2, target)
    assert np.allclose(u1, u2, atol=1e-14, rtol=0)


def test_rms_and_magnitude_lanes_match():
    u = _rand_complex((64, 64), 3)
    v = _rand_complex((64, 64), 4)
    t = np.abs(_rand_complex((64, 64), 5)).astype(np.float64)
    assert kernels.rms_amplitude_mismatch(u, t) == pytest.approx(
        _kernels_np.rms_amplitude_mismatch(u, t), rel=1e-12)
    assert kernels.magnitude_differential(u, v) == pytest.approx(
        _kernels_np.magnitude_differential(u, v), rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_block_mean_lanes_match(k):
    rng = np.random.default_rng(k)
    img = rng.normal(size=(24, 36)).astype(np.float64)
    assert np.allclose(kernels.block_mean(img, k),
                       _kernels_np.block_mean(img, k), atol=1e-13, rtol=0)


@pytest.mark.parametrize("off", [(0, 0), (1, 2), (2, 0)])
def test_psr_accumulate_lanes_match(off):
    rng = np.random.default_rng(9)
    frame = rng.normal(size=(16, 16)).astype(np.float64)
    acc1 = np.zeros((48, 48)); w1 = np.zeros((48, 48))
    acc2 = np.zeros((48, 48)); w2 = np.zeros((48, 48))
    kernels.psr_accumulate(acc1, w1, frame, off[0], off[1], 3)
    _kernels_np.psr_accumulate(acc2, w2, frame, off[0], off[1], 3)
    assert np.array_equal(acc1, acc2)
    assert np.array_equal(w1, w2)


def test_amplitude_update_keeps_phase():
    u = _rand_complex((32, 32), 6)
    target = np.abs(_rand_complex((32, 32), 7)).astype(np.float64)
    before = np.angle(u.copy())
    kernels.amplitude_update(u, target)
    assert np.allclose(np.angle(u), before, atol=1e-12)


def test_amplitude_update_sets_mean_amplitude():
    u = 2.0 * np.exp(1j * 0.7) * np.ones((16, 16), dtype=np.complex128)
    target = np.full((16, 16), 4.0)
    kernels.amplitude_update(u, target)
    assert np.allclose(np.abs(u), 3.0, atol=1e-12)
