"""Named-tensor container: the on-disk format for checkpoints and corpora.

Layout: 4-byte magic, 8-byte little-endian index length, a JSON index
(format version, metadata, tensor name -> shape/offset), then one
contiguous little-endian float32 payload. Writing is canonical (sorted
names, compact JSON), so identical tensors produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CheckpointTruncatedError,
    CheckpointVersionError,
    DataShapeError,
    UnknownTensorError,
)

MAGIC = b"NTC1"
FORMAT_VERSION = 1


def save_tensors(path, tensors: dict[str, np.ndarray], meta: dict | None = None) -> None:
    """Write a dict of arrays (cast to float32) plus JSON-able metadata."""
    path = Path(path)
    names = sorted(tensors)
    index: dict[str, object] = {"format_version": FORMAT_VERSION, "meta": meta or {}}
    entries = {}
    blobs = []
    offset = 0
    for name in names:
        arr = np.ascontiguousarray(np.asarray(tensors[name], dtype="<f4"))
        entries[name] = {"shape": list(arr.shape), "offset": offset}
        blob = arr.tobytes()
        blobs.append(blob)
        offset += len(blob)
    index["tensors"] = entries
    header = json.dumps(index, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(len(header).to_bytes(8, "little"))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)


def load_tensors(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read a container; returns (tensors, meta). No partial loads: any
    structural problem raises before tensors are returned."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 12 or raw[:4] != MAGIC:
        raise CheckpointVersionError(f"{path}: not a tensor container (bad magic)")
    header_len = int.from_bytes(raw[4:12], "little")
    if len(raw) < 12 + header_len:
        raise CheckpointTruncatedError(f"{path}: truncated index")
    try:
        index = json.loads(raw[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointVersionError(f"{path}: unparseable index ({exc})") from exc
    version = index.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(
            f"{path}: format version {version!r}, expected {FORMAT_VERSION}"
        )
    payload = raw[12 + header_len :]
    tensors = {}
    for name, entry in index["tensors"].items():
        shape = tuple(entry["shape"])
        nbytes = int(np.prod(shape, dtype=np.int64)) * 4
        start = entry["offset"]
        if start + nbytes > len(payload):
            raise CheckpointTruncatedError(f"{path}: payload truncated at tensor '{name}'")
        tensors[name] = np.frombuffer(
            payload, dtype="<f4", count=nbytes // 4, offset=start
        ).reshape(shape).copy()
    return tensors, index.get("meta", {})


@dataclass
class Checkpoint:
    """Named-tensor snapshot of model parameters plus a config echo."""

    tensors: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def save(self, path) -> None:
        save_tensors(path, self.tensors, self.meta)

    @classmethod
    def load(cls, path) -> "Checkpoint":
        tensors, meta = load_tensors(path)
        return cls(tensors=tensors, meta=meta)

    @classmethod
    def from_modules(cls, meta: dict | None = None, **modules) -> "Checkpoint":
        """Collect state dicts of torch modules under name prefixes."""
        tensors = {}
        for prefix, module in modules.items():
            if module is None:
                continue
            for key, value in module.state_dict().items():
                tensors[f"{prefix}.{key}"] = value.detach().cpu().numpy().astype("<f4")
        return cls(tensors=tensors, meta=dict(meta or {}))

    def subset(self, prefix: str) -> dict[str, np.ndarray]:
        """Tensors under `prefix.`, with the prefix stripped."""
        head = prefix + "."
        found = {k[len(head):]: v for k, v in self.tensors.items() if k.startswith(head)}
        if not found:
            raise UnknownTensorError(f"checkpoint has no tensors under '{prefix}.'")
        return found

    def load_into(self, module, prefix: str) -> None:
        """Copy tensors into a torch module, validating names and shapes."""
        import torch

        state = module.state_dict()
        stored = self.subset(prefix)
        missing = sorted(set(state) - set(stored))
        if missing:
            raise UnknownTensorError(f"checkpoint missing tensor '{prefix}.{missing[0]}'")
        extra = sorted(set(stored) - set(state))
        if extra:
            raise UnknownTensorError(f"checkpoint has unexpected tensor '{prefix}.{extra[0]}'")
        converted = {}
        for key, value in stored.items():
            expected = tuple(state[key].shape)
            if tuple(value.shape) != expected:
                raise DataShapeError(
                    f"tensor '{prefix}.{key}' has shape {tuple(value.shape)}, "
                    f"expected {expected}"
                )
            converted[key] = torch.from_numpy(np.ascontiguousarray(value))
        module.load_state_dict(converted)


def save_checkpoint(checkpoint: Checkpoint, path) -> None:
    checkpoint.save(path)


def load_checkpoint(path) -> Checkpoint:
    return Checkpoint.load(path)
