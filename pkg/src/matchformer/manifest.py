"""Run manifests: config snapshot, input digests and produced artifacts."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

MANIFEST_FILENAME = "manifest.json"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def tree_digest(path) -> str:
    """Digest of a directory: file names and contents, order-independent."""
    path = Path(path)
    if path.is_file():
        return file_digest(path)
    h = hashlib.sha256()
    for child in sorted(p for p in path.rglob("*") if p.is_file()):
        h.update(str(child.relative_to(path)).encode())
        h.update(bytes.fromhex(file_digest(child)))
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    seed: int
    config: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)  # label -> {path, digest}
    artifacts: dict = field(default_factory=dict)  # label -> {path, digest}
    version: str = __version__

    def add_input(self, label: str, path) -> None:
        self.inputs[label] = {"path": str(path), "digest": tree_digest(path)}

    def add_artifact(self, label: str, path) -> None:
        self.artifacts[label] = {"path": str(path), "digest": tree_digest(path)}

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        out = directory / MANIFEST_FILENAME
        payload = {
            "command": self.command,
            "seed": self.seed,
            "version": self.version,
            "config": self.config,
            "inputs": self.inputs,
            "artifacts": self.artifacts,
        }
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        return out
