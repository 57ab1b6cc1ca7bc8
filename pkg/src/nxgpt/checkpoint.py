"""Checkpoint directory format.

A checkpoint is a directory holding ``manifest.json`` plus one blob file per
tensor. Blob layout (all little-endian):

    8 bytes  magic ``NXGPTBLB``
    u32      rank
    u32*rank dims
    f32*     payload (row-major)

The manifest records, for every tensor: name, owning module, shape, dtype,
role (frozen/trainable) and its blob filename, plus a config snapshot and the
stage provenance trail. Loading verifies byte lengths exactly, so truncated or
padded blobs are rejected rather than silently misread.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
import torch

from .errors import CheckpointVersionError, CorruptCheckpointError

MAGIC = b"NXGPTBLB"
FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"


def write_blob(path: str | Path, array) -> None:
    """Serialize a float32 array (or torch tensor) into the blob format."""
    if isinstance(array, torch.Tensor):
        array = array.detach().cpu().numpy()
    arr = np.ascontiguousarray(array, dtype="<f4")
    header = MAGIC + struct.pack("<I", arr.ndim)
    if arr.ndim:
        header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    Path(path).write_bytes(header + arr.tobytes())


def read_blob(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 4:
        raise CorruptCheckpointError(f"{path}: blob shorter than header")
    if raw[: len(MAGIC)] != MAGIC:
        raise CorruptCheckpointError(f"{path}: bad magic {raw[:8]!r}")
    (rank,) = struct.unpack_from("<I", raw, len(MAGIC))
    offset = len(MAGIC) + 4
    if rank > 16:
        raise CorruptCheckpointError(f"{path}: implausible rank {rank}")
    if len(raw) < offset + 4 * rank:
        raise CorruptCheckpointError(f"{path}: truncated dim header")
    dims = struct.unpack_from(f"<{rank}I", raw, offset) if rank else ()
    offset += 4 * rank
    expected = 4 * int(np.prod(dims, dtype=np.int64)) if rank else 4
    if len(raw) - offset != expected:
        raise CorruptCheckpointError(
            f"{path}: payload is {len(raw) - offset} bytes, expected {expected}"
        )
    flat = np.frombuffer(raw, dtype="<f4", offset=offset)
    return flat.reshape(dims).copy()


@dataclass
class TensorRecord:
    name: str
    module: str
    shape: tuple[int, ...]
    dtype: str
    role: str
    blob: str


@dataclass
class CheckpointManifest:
    format_version: int
    tensors: list[TensorRecord]
    config: dict
    provenance: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "config": self.config,
            "provenance": self.provenance,
            "tensors": [
                {
                    "name": t.name,
                    "module": t.module,
                    "shape": list(t.shape),
                    "dtype": t.dtype,
                    "role": t.role,
                    "blob": t.blob,
                }
                for t in self.tensors
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CheckpointManifest":
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise CheckpointVersionError(f"unsupported format_version {version!r}")
        tensors = [
            TensorRecord(
                name=t["name"],
                module=t["module"],
                shape=tuple(int(s) for s in t["shape"]),
                dtype=t["dtype"],
                role=t["role"],
                blob=t["blob"],
            )
            for t in data.get("tensors", [])
        ]
        names = [t.name for t in tensors]
        if len(set(names)) != len(names):
            raise CorruptCheckpointError("duplicate tensor names in manifest")
        return cls(
            format_version=version,
            tensors=tensors,
            config=dict(data.get("config", {})),
            provenance=list(data.get("provenance", [])),
        )


def _blob_filename(name: str) -> str:
    return name.replace(".", "__") + ".bin"


def save_checkpoint(
    directory: str | Path,
    tensors: Mapping[str, torch.Tensor],
    roles: Mapping[str, str],
    config: dict,
    provenance: list[dict],
) -> Path:
    """Write every tensor as a blob plus a deterministic manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records = []
    for name in sorted(tensors):
        tensor = tensors[name]
        blob = _blob_filename(name)
        write_blob(directory / blob, tensor)
        records.append(
            TensorRecord(
                name=name,
                module=name.split(".", 1)[0],
                shape=tuple(tensor.shape),
                dtype="float32",
                role=roles[name],
                blob=blob,
            )
        )
    manifest = CheckpointManifest(FORMAT_VERSION, records, config, provenance)
    (directory / MANIFEST_NAME).write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    return directory


def load_checkpoint(directory: str | Path) -> tuple[dict[str, torch.Tensor], CheckpointManifest]:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise CorruptCheckpointError(f"no {MANIFEST_NAME} in {directory}")
    try:
        data = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptCheckpointError(f"manifest is not valid JSON: {exc}") from exc
    manifest = CheckpointManifest.from_dict(data)
    tensors: dict[str, torch.Tensor] = {}
    for rec in manifest.tensors:
        if rec.dtype != "float32":
            raise CorruptCheckpointError(f"{rec.name}: unsupported dtype {rec.dtype}")
        blob_path = directory / rec.blob
        if not blob_path.exists():
            raise CorruptCheckpointError(f"{rec.name}: missing blob {rec.blob}")
        arr = read_blob(blob_path)
        if tuple(arr.shape) != rec.shape:
            raise CorruptCheckpointError(
                f"{rec.name}: blob shape {tuple(arr.shape)} != manifest {rec.shape}"
            )
        tensors[rec.name] = torch.from_numpy(arr)
    return tensors, manifest
