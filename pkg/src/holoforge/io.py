"""File formats: CFLD complex fields, PGM images, RFC-4180 CSV, JSON manifests.

CFLD layout: 16-byte header (magic "CFLD", u32 little-endian width M, u32
height N, u32 reserved = 0), then N rows of M interleaved (re, im) float32
little-endian pairs.  Real images reuse the container with im = 0.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from pathlib import Path

import numpy as np

CFLD_MAGIC = b"CFLD"
_HEADER = struct.Struct("<4sIII")


def write_cfld(path, data: np.ndarray) -> None:
    """Write a 2-D complex (or real) array as CFLD."""
    arr = np.ascontiguousarray(data)
    if arr.ndim != 2:
        raise ValueError("CFLD stores 2-D arrays")
    inter = np.empty((arr.shape[0], arr.shape[1], 2), dtype="<f4")
    c = arr.astype(np.complex64)
    inter[..., 0] = c.real
    inter[..., 1] = c.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CFLD_MAGIC, arr.shape[1], arr.shape[0], 0))
        fh.write(inter.tobytes())


def read_cfld(path) -> np.ndarray:
    """Read a CFLD file into a complex64 array of shape (N, M)."""
    with open(path, "rb") as fh:
        magic, m, n, _ = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != CFLD_MAGIC:
            raise ValueError(f"{path}: not a CFLD file")
        raw = np.frombuffer(fh.read(8 * m * n), dtype="<f4")
    if raw.size != 2 * m * n:
        raise ValueError(f"{path}: truncated CFLD payload")
    inter = raw.reshape(n, m, 2)
    return (inter[..., 0] + 1j * inter[..., 1]).astype(np.complex64)


def write_pgm(path, img: np.ndarray, maxval: int = 255) -> None:
    """Write a P5 PGM; 16-bit samples are big-endian per the format."""
    if img.dtype not in (np.uint8, np.uint16):
        raise ValueError("write_pgm expects uint8 or uint16 data")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode())
        if maxval > 255:
            fh.write(img.astype(">u2").tobytes())
        else:
            fh.write(img.astype(np.uint8).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:  # magic, width, height, maxval
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    pos += 1
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    dtype = ">u2" if maxval > 255 else np.uint8
    return np.frombuffer(data[pos:], dtype=dtype, count=w * h).reshape(h, w).astype(
        np.uint16 if maxval > 255 else np.uint8)


def write_csv(path, header: list[str], rows) -> None:
    """RFC-4180 CSV with mandatory header row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(rows)


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_json(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
