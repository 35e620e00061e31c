"""Run manifests: a reproducibility record for every CLI invocation.

The digest covers command, config snapshot, input digests and toolkit
version; it deliberately excludes the timestamp and output list so that
rerunning on identical inputs yields an identical digest. Every emitted
report carries the digest (JSON field, CSV/SVG trailing comment).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path


def file_digest(path) -> str:
    hasher = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict[str, str]
    version: str
    timestamp: str = ""
    outputs: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    @property
    def digest(self) -> str:
        payload = json.dumps(
            {
                "command": self.command,
                "config": self.config,
                "inputs": self.inputs,
                "version": self.version,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def record_output(self, path) -> None:
        self.outputs.append(str(path))

    def write(self, path) -> None:
        from .io import atomic_write

        payload = {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "version": self.version,
            "timestamp": self.timestamp,
            "outputs": sorted(self.outputs),
            "digest": self.digest,
        }
        atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
