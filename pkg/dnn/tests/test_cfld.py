"""CFLD interop: byte-level agreement with the documented wire format."""

import struct

import numpy as np
import pytest

from holonet import cfld


def reference_bytes(field: np.ndarray) -> bytes:
    """Build a CFLD file by hand from the format description."""
    h, w = field.shape
    out = struct.pack("<4sIII", b"CFLD", w, h, 0)
    c = field.astype(np.complex64)
    for row in range(h):
        for col in range(w):
            out += struct.pack("<ff", float(c[row, col].real),
                               float(c[row, col].imag))
    return out


class TestCfld:
    def test_read_hand_built_file(self, tmp_path):
        rng = np.random.default_rng(0)
        field = (rng.normal(size=(5, 7)) + 1j * rng.normal(size=(5, 7))).astype(np.complex64)
        path = tmp_path / "ref.cfld"
        path.write_bytes(reference_bytes(field))
        assert np.array_equal(cfld.read(path), field)

    def test_write_matches_hand_built_bytes(self, tmp_path):
        rng = np.random.default_rng(1)
        field = (rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))).astype(np.complex64)
        path = tmp_path / "out.cfld"
        cfld.write(path, field)
        assert path.read_bytes() == reference_bytes(field)

    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(2)
        field = (rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))).astype(np.complex64)
        cfld.write(tmp_path / "x.cfld", field)
        again = cfld.read(tmp_path / "x.cfld")
        assert np.array_equal(again, field)
        cfld.write(tmp_path / "y.cfld", again)
        assert (tmp_path / "x.cfld").read_bytes() == (tmp_path / "y.cfld").read_bytes()

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "bad.cfld"
        path.write_bytes(b"NOPE" + b"\x00" * 28)
        with pytest.raises(ValueError):
            cfld.read(path)

    def test_rejects_truncated_payload(self, tmp_path):
        rng = np.random.default_rng(3)
        field = rng.normal(size=(4, 4)).astype(np.complex64)
        full = reference_bytes(field)
        path = tmp_path / "short.cfld"
        path.write_bytes(full[:-8])
        with pytest.raises(ValueError):
            cfld.read(path)

    def test_channel_conversion_round_trip(self):
        rng = np.random.default_rng(4)
        field = (rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))).astype(np.complex64)
        assert np.array_equal(cfld.from_channels(cfld.to_channels(field)), field)
