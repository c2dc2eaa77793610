"""CFLD complex-field files, as written by the holoforge toolkit.

Independent implementation of the wire format: 16-byte header (magic "CFLD",
u32 little-endian width M, u32 height N, u32 reserved), then N rows of M
interleaved (re, im) float32 little-endian pairs.
"""

import struct

import numpy as np

MAGIC = b"CFLD"
_HEADER = struct.Struct("<4sIII")


def read(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, width, height, _ = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != MAGIC:
            raise ValueError(f"{path}: not a CFLD file")
        raw = np.frombuffer(fh.read(8 * width * height), dtype="<f4")
    if raw.size != 2 * width * height:
        raise ValueError(f"{path}: truncated payload")
    pairs = raw.reshape(height, width, 2)
    return (pairs[..., 0] + 1j * pairs[..., 1]).astype(np.complex64)


def write(path, data: np.ndarray) -> None:
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise ValueError("CFLD stores 2-D arrays")
    c = arr.astype(np.complex64)
    pairs = np.empty((arr.shape[0], arr.shape[1], 2), dtype="<f4")
    pairs[..., 0] = c.real
    pairs[..., 1] = c.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, arr.shape[1], arr.shape[0], 0))
        fh.write(pairs.tobytes())


def to_channels(field: np.ndarray) -> np.ndarray:
    """Complex (H, W) array -> float32 (2, H, W) with real/imag channels."""
    return np.stack([field.real, field.imag]).astype(np.float32)


def from_channels(channels: np.ndarray) -> np.ndarray:
    """Float (2, H, W) real/imag channels -> complex64 (H, W) array."""
    return (channels[0] + 1j * channels[1]).astype(np.complex64)
