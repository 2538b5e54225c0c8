"""Versioned binary checkpoints with an embedded architecture descriptor.

Layout: magic, version, u32 header length, JSON header, then raw
little-endian float32 tensor bytes in the header's key order.  The byte
stream is a pure function of the descriptor and tensor values, so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
import torch

_MAGIC = b"ASCK"
_VERSION = 1


def save_checkpoint(path: str | Path, descriptor: dict, state: dict[str, torch.Tensor]) -> None:
    keys = sorted(state.keys())
    header = {
        "descriptor": descriptor,
        "tensors": [
            {"name": k, "shape": list(state[k].shape), "dtype": "float32"} for k in keys
        ],
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _VERSION, len(blob)))
        f.write(blob)
        for k in keys:
            f.write(state[k].detach().cpu().numpy().astype("<f4").tobytes())


def load_checkpoint(path: str | Path) -> tuple[dict, dict[str, torch.Tensor]]:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad checkpoint magic {magic!r}")
        version, hlen = struct.unpack("<II", f.read(8))
        if version != _VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        header = json.loads(f.read(hlen))
        state = {}
        for entry in header["tensors"]:
            shape = entry["shape"]
            n = int(np.prod(shape)) if shape else 1
            raw = np.frombuffer(f.read(4 * n), dtype="<f4").reshape(shape)
            state[entry["name"]] = torch.from_numpy(raw.copy())
    return header["descriptor"], state
