import numpy as np
import pytest

from holoforge import OpticalConfig, make_phantom, default_heights

WL = 0.53
PITCH = 1.12
Z2 = 300.0


Z2_SMALL = 100.0  # keeps the full height schedule inside a 128^2 window


@pytest.fixture(scope="session")
def cfg():
    return OpticalConfig(wavelength_um=WL, z2_um=Z2, n0=1.0)


@pytest.fixture(scope="session")
def heights(cfg):
    return default_heights(cfg.z2_um)


@pytest.fixture(scope="session")
def small_cfg():
    """Geometry for 128^2 unit tests: the diffraction cone must stay inside the
    window at every height (z <= ~2 N pitch), hence the shorter z2."""
    return OpticalConfig(wavelength_um=WL, z2_um=Z2_SMALL, n0=1.0)


@pytest.fixture(scope="session")
def small_heights(small_cfg):
    return default_heights(small_cfg.z2_um)


@pytest.fixture(scope="session")
def dense_phantom():
    """Dense strongly-scattering specimen (R = 0.30), 128^2 for unit tests."""
    return make_phantom("cells", 128, PITCH, seed=7, target_scattering=0.30,
                        num_cells=40)


@pytest.fixture(scope="session")
def absorbing_phantom():
    """Absorption-dominated specimen suited to the magnitude-differential focus metric."""
    return make_phantom("cells", 128, PITCH, seed=11,
                        phase_rad=(0.0, 0.3), absorption=(0.4, 0.8))


def bandlimited_field(shape, pitch_um, seed, fraction=0.5):
    """Random complex field low-passed to `fraction` of Nyquist."""
    rng = np.random.default_rng(seed)
    f = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    spec = np.fft.fft2(f)
    fy = np.fft.fftfreq(shape[0], d=pitch_um)[:, None]
    fx = np.fft.fftfreq(shape[1], d=pitch_um)[None, :]
    nyquist = 0.5 / pitch_um
    spec[np.sqrt(fx**2 + fy**2) > fraction * nyquist] = 0.0
    out = np.fft.ifft2(spec)
    return out / np.sqrt(np.mean(np.abs(out) ** 2))
