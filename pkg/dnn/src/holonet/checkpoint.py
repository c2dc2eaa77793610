"""Single-file model checkpoints: JSON header plus raw little-endian blobs.

Layout: magic "HFNC", u32 format version, u64 header length, UTF-8 JSON
header, then the tensor payload.  The header holds the network spec and a
tensor index [{name, shape, dtype, offset, nbytes}] with offsets relative to
the payload start; all tensors are float32 little-endian, C order.  Any
framework can load the file from this description.
"""

from __future__ import annotations

import json
import struct

import numpy as np
import torch

from .model import NetworkSpec, PhaseRecoveryNet

MAGIC = b"HFNC"
VERSION = 1
_PREFIX = struct.Struct("<4sIQ")


def save(path, model: PhaseRecoveryNet, extra: dict | None = None) -> None:
    tensors = []
    blobs = []
    offset = 0
    for name, tensor in model.state_dict().items():
        blob = tensor.detach().cpu().numpy().astype("<f4").tobytes(order="C")
        tensors.append({
            "name": name,
            "shape": list(tensor.shape),
            "dtype": "f4",
            "offset": offset,
            "nbytes": len(blob),
        })
        blobs.append(blob)
        offset += len(blob)
    header = {"spec": model.spec.to_dict(), "tensors": tensors}
    if extra:
        header["extra"] = extra
    raw = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_PREFIX.pack(MAGIC, VERSION, len(raw)))
        fh.write(raw)
        for blob in blobs:
            fh.write(blob)


def load(path, spec: NetworkSpec | None = None) -> PhaseRecoveryNet:
    """Rebuild the model; a provided spec must match the stored one."""
    with open(path, "rb") as fh:
        magic, version, header_len = _PREFIX.unpack(fh.read(_PREFIX.size))
        if magic != MAGIC or version != VERSION:
            raise ValueError(f"{path}: not a holonet checkpoint")
        header = json.loads(fh.read(header_len).decode())
        payload = fh.read()
    stored_spec = NetworkSpec.from_dict(header["spec"])
    if spec is not None and spec != stored_spec:
        raise ValueError(
            f"checkpoint spec {stored_spec} does not match requested {spec}")
    model = PhaseRecoveryNet(stored_spec)
    state = {}
    for entry in header["tensors"]:
        chunk = payload[entry["offset"]:entry["offset"] + entry["nbytes"]]
        arr = np.frombuffer(chunk, dtype="<f4").reshape(entry["shape"]).copy()
        state[entry["name"]] = torch.from_numpy(arr)
    missing = set(model.state_dict()) ^ set(state)
    if missing:
        raise ValueError(f"checkpoint tensors do not match the model: {missing}")
    model.load_state_dict(state)
    model.eval()
    return model
