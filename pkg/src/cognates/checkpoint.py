"""Self-describing parameter files.

Layout: one ASCII line ``COGCKPT <version> <header-bytes>``, a UTF-8 JSON header
(config, ordered (name, shape) list, metadata), then little-endian float32 payloads
in header order.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .model import CognateModel, ModelConfig

MAGIC = "COGCKPT"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def save_params(model: CognateModel, path: str | Path, metadata: dict | None = None) -> None:
    state = model.state_dict()
    header = {
        "format_version": FORMAT_VERSION,
        "config": model.config.to_dict(),
        "params": [[name, list(t.shape)] for name, t in state.items()],
        "metadata": metadata or {},
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(f"{MAGIC} {FORMAT_VERSION} {len(blob)}\n".encode("ascii"))
        f.write(blob)
        for t in state.values():
            f.write(t.detach().cpu().numpy().astype("<f4").tobytes())


def read_header(path: str | Path) -> tuple[dict, bytes]:
    data = Path(path).read_bytes()
    first, _, rest = data.partition(b"\n")
    try:
        magic, version, size = first.decode("ascii").split()
        version, size = int(version), int(size)
    except (UnicodeDecodeError, ValueError):
        raise CheckpointError(f"{path}: not a checkpoint file") from None
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version {version}")
    try:
        header = json.loads(rest[:size].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: corrupted header ({e})") from None
    return header, rest[size:]


def load_params(path: str | Path, expected: ModelConfig | None = None) -> tuple[CognateModel, dict]:
    header, payload = read_header(path)
    config = ModelConfig(**header["config"])
    if expected is not None and expected != config:
        raise CheckpointError(f"{path}: checkpoint config {config} does not match {expected}")
    model = CognateModel(config)
    state = model.state_dict()
    names = [n for n, _ in header["params"]]
    if names != list(state):
        raise CheckpointError(f"{path}: parameter names do not match the model layout")
    total = sum(int(np.prod(s)) for _, s in header["params"])
    if len(payload) != 4 * total:
        raise CheckpointError(f"{path}: payload has {len(payload)} bytes, expected {4 * total}")
    flat = np.frombuffer(payload, dtype="<f4")
    offset = 0
    loaded = {}
    for name, shape in header["params"]:
        if tuple(shape) != tuple(state[name].shape):
            raise CheckpointError(f"{path}: {name} has shape {shape}, model expects {list(state[name].shape)}")
        n = int(np.prod(shape))
        loaded[name] = torch.from_numpy(flat[offset:offset + n].reshape(shape).copy())
        offset += n
    model.load_state_dict(loaded)
    return model, header["metadata"]
