"""Forward model: interference identity, stacks, sensor shifts and downsampling."""

import numpy as np
import pytest

from holoforge import (ComplexField, Phantom, make_phantom, default_heights,
                       scattering_rms, sensor_downsample, synthesize_hologram,
                       synthesize_stack)
from holoforge.field import propagate_array
from holoforge.forward import apply_sensor_noise

from conftest import PITCH, WL, Z2


def unit_phantom(n=64):
    return Phantom(ComplexField(np.ones((n, n), dtype=np.complex128), PITCH))


class TestSynthesizeHologram:
    def test_empty_field_gives_unit_intensity(self, cfg):
        intensity = synthesize_hologram(unit_phantom(), Z2, cfg)
        assert np.allclose(intensity, 1.0, atol=1e-6)

    def test_interference_term_identity(self, cfg, dense_phantom):
        """I == |A|^2 + |a|^2 + 2 Re(A* a) with a the propagated scattered wave."""
        z = Z2
        intensity = synthesize_hologram(dense_phantom, z, cfg)
        t = dense_phantom.transmission.data.astype(np.complex128)
        a = propagate_array(t - 1.0, z, PITCH, WL)
        expected = 1.0 + np.abs(a) ** 2 + 2.0 * a.real
        rel = np.linalg.norm(intensity - expected) / np.linalg.norm(expected)
        assert rel < 1e-5

    def test_weak_phase_disk_mean_is_unity(self, cfg):
        n = 128
        yy, xx = np.mgrid[0:n, 0:n].astype(np.float64)
        disk = ((yy - 64) ** 2 + (xx - 64) ** 2) < (8.0 / PITCH) ** 2
        t = np.exp(1j * 0.2 * disk)
        phantom = Phantom(ComplexField(t, PITCH))
        intensity = synthesize_hologram(phantom, Z2, cfg)
        assert abs(intensity.mean() - 1.0) < 0.01

    def test_rejects_nonpositive_distance(self, cfg):
        with pytest.raises(ValueError):
            synthesize_hologram(unit_phantom(), 0.0, cfg)
        with pytest.raises(ValueError):
            synthesize_hologram(unit_phantom(), -10.0, cfg)

    def test_intensity_nonnegative(self, cfg, dense_phantom):
        intensity = synthesize_hologram(dense_phantom, 411.0, cfg)
        assert intensity.min() >= 0.0


class TestSynthesizeStack:
    def test_paper_schedule_gives_eight_planes(self, cfg, dense_phantom, heights):
        stack = synthesize_stack(dense_phantom, heights, cfg)
        assert len(stack.planes) == 8
        assert stack.z_um == [Z2 + h for h in
                              (0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0, 180.0)]

    def test_zero_shift_matches_per_height_synthesis(self, cfg, dense_phantom, heights):
        stack = synthesize_stack(dense_phantom, heights, cfg, shift_um=(0.0, 0.0))
        for (img, z) in stack.planes:
            assert np.array_equal(img, synthesize_hologram(dense_phantom, z, cfg))

    def test_full_pixel_shift_is_one_pixel_translation(self, cfg, dense_phantom, heights):
        plain = synthesize_stack(dense_phantom, heights[:2], cfg)
        shifted = synthesize_stack(dense_phantom, heights[:2], cfg,
                                   shift_um=(PITCH, 0.0))
        for (img_s, _), (img_p, _) in zip(shifted.planes, plain.planes):
            # sensor moved +x by one pitch: content appears shifted one column
            assert np.allclose(img_s, np.roll(img_p, -1, axis=1), atol=1e-8)

    def test_rejects_duplicate_heights(self, cfg, dense_phantom):
        with pytest.raises(ValueError):
            synthesize_stack(dense_phantom, [Z2, Z2], cfg)

    def test_noise_is_seeded_and_optional(self, cfg, dense_phantom, heights):
        rng1 = np.random.default_rng(42)
        rng2 = np.random.default_rng(42)
        a = synthesize_stack(dense_phantom, heights[:2], cfg, photons=1e4, rng=rng1)
        b = synthesize_stack(dense_phantom, heights[:2], cfg, photons=1e4, rng=rng2)
        for (ia, _), (ib, _) in zip(a.planes, b.planes):
            assert np.array_equal(ia, ib)
            assert ia.min() >= 0.0


class TestSensorDownsample:
    def test_identity_factor(self):
        img = np.arange(64.0).reshape(8, 8)
        assert np.array_equal(sensor_downsample(img, 1), img)

    def test_constant_image(self):
        img = np.full((12, 12), 3.5)
        assert np.allclose(sensor_downsample(img, 3), 3.5)

    def test_checkerboard_averages_to_mean(self):
        img = np.indices((8, 8)).sum(axis=0) % 2
        out = sensor_downsample(img.astype(np.float64), 2)
        assert np.allclose(out, 0.5)

    def test_rejects_nondivisible(self):
        with pytest.raises(ValueError):
            sensor_downsample(np.ones((9, 9)), 2)


class TestScatteringRegime:
    def test_hologram_contrast_linear_in_weak_scattering(self, cfg, dense_phantom):
        """First-order Born: contrast std/mean scales linearly with epsilon."""
        t = dense_phantom.transmission.data.astype(np.complex128)
        contrasts = []
        for eps in (1e-3, 1e-2):
            weak = Phantom(ComplexField(1.0 + eps * (t - 1.0), PITCH))
            intensity = synthesize_hologram(weak, Z2, cfg)
            contrasts.append(intensity.std() / intensity.mean())
        ratio = contrasts[1] / contrasts[0]
        assert ratio == pytest.approx(10.0, rel=0.05)

    def test_sensor_field_scattering_matches_phantom(self, cfg, dense_phantom):
        """RMS of A + a at the sensor equals the phantom's scattering strength."""
        t = dense_phantom.transmission.data.astype(np.complex128)
        u_sensor = propagate_array(t, Z2, PITCH, WL)
        r_sensor = scattering_rms(u_sensor)
        r_sample = scattering_rms(t)
        assert r_sensor == pytest.approx(r_sample, rel=0.05)

    def test_phantom_hits_target_scattering(self, dense_phantom):
        assert scattering_rms(dense_phantom.transmission.data) == pytest.approx(
            0.30, abs=0.005)


class TestPhantoms:
    @pytest.mark.parametrize("kind,label", [("cells", "cell-like"),
                                            ("tissue", "tissue-like"),
                                            ("text", "text")])
    def test_kinds_and_labels(self, kind, label):
        p = make_phantom(kind, 64, PITCH, seed=1)
        assert p.label == label
        assert np.abs(p.transmission.data).max() <= 1.0 + 1e-5

    def test_seed_reproducibility(self):
        a = make_phantom("cells", 64, PITCH, seed=5)
        b = make_phantom("cells", 64, PITCH, seed=5)
        assert np.array_equal(a.transmission.data, b.transmission.data)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            make_phantom("plasma", 64, PITCH)

    def test_noise_helper_clips_nonnegative(self):
        rng = np.random.default_rng(0)
        out = apply_sensor_noise(np.full((8, 8), 0.01), rng, photons=None,
                                 read_noise=0.5)
        assert out.min() >= 0.0
