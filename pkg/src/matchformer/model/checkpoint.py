"""Bit-exact checkpoint serialization.

A checkpoint is a directory holding ``manifest.json`` (format version,
model configuration, named array index with offsets) and ``arrays.bin``
(the raw little-endian array bytes concatenated in manifest order). See
docs/file_formats.md.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from ..errors import IntegrityError
from ..numcore import Tensor
from .config import ModelConfig
from .network import param_count

FORMAT_NAME = "model-checkpoint"
FORMAT_VERSION = 1

MANIFEST_FILE = "manifest.json"
ARRAYS_FILE = "arrays.bin"


def _little_endian(arr: np.ndarray) -> np.ndarray:
    if arr.dtype.byteorder == ">" or (
        arr.dtype.byteorder == "=" and sys.byteorder == "big"
    ):
        return arr.astype(arr.dtype.newbyteorder("<"))
    return np.ascontiguousarray(arr)


def save_checkpoint(params: dict, config: ModelConfig, path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    index = []
    offset = 0
    with open(path / ARRAYS_FILE, "wb") as fh:
        for name, tensor in params.items():
            arr = _little_endian(tensor.data)
            raw = arr.tobytes(order="C")
            fh.write(raw)
            index.append(
                {
                    "name": name,
                    "dtype": str(np.dtype(arr.dtype).str),
                    "shape": list(arr.shape),
                    "offset": offset,
                    "nbytes": len(raw),
                }
            )
            offset += len(raw)
    manifest = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "config": config.to_dict(),
        "param_count": param_count(params),
        "arrays": index,
        "total_nbytes": offset,
    }
    with open(path / MANIFEST_FILE, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def load_checkpoint(path) -> tuple:
    """Load ``(params, config)``; any manifest/data mismatch is an error."""
    path = Path(path)
    try:
        with open(path / MANIFEST_FILE, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise IntegrityError(f"{path}: no checkpoint manifest found") from None
    if manifest.get("format") != FORMAT_NAME:
        raise IntegrityError(f"{path}: not a {FORMAT_NAME}")
    if manifest.get("version") != FORMAT_VERSION:
        raise IntegrityError(
            f"{path}: unsupported checkpoint version {manifest.get('version')}"
        )
    blob = (path / ARRAYS_FILE).read_bytes()
    if len(blob) != manifest["total_nbytes"]:
        raise IntegrityError(
            f"{path}: array file holds {len(blob)} bytes, manifest expects "
            f"{manifest['total_nbytes']}"
        )
    params = {}
    for entry in manifest["arrays"]:
        start, nbytes = entry["offset"], entry["nbytes"]
        if start + nbytes > len(blob):
            raise IntegrityError(f"{path}: array {entry['name']} is truncated")
        arr = np.frombuffer(blob, dtype=np.dtype(entry["dtype"]),
                            count=int(np.prod(entry["shape"], dtype=np.int64)),
                            offset=start)
        arr = arr.reshape(entry["shape"]).copy()
        params[entry["name"]] = Tensor(arr, requires_grad=True, name=entry["name"])
    config = ModelConfig.from_dict(manifest["config"])
    if param_count(params) != manifest["param_count"]:
        raise IntegrityError(
            f"{path}: manifest parameter count {manifest['param_count']} does "
            f"not match arrays ({param_count(params)})"
        )
    return params, config
