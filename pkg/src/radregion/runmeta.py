"""Run manifests: what a CLI run produced, with content hashes."""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    run_id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    command: str = ""
    config: dict = field(default_factory=dict)
    artifacts: dict[str, dict] = field(default_factory=dict)
    incomplete: bool = False

    def add_artifact(self, name: str, path: str | Path) -> None:
        path = Path(path)
        self.artifacts[name] = {
            "path": str(path),
            "sha256": sha256_file(path) if path.is_file() else None,
        }

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        payload = {
            "run_id": self.run_id,
            "command": self.command,
            "config": self.config,
            "incomplete": self.incomplete,
            "artifacts": self.artifacts,
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path

    @classmethod
    def read(cls, path: str | Path) -> "RunManifest":
        data = json.loads(Path(path).read_text())
        return cls(run_id=data["run_id"], command=data.get("command", ""),
                   config=data.get("config", {}),
                   artifacts=data.get("artifacts", {}),
                   incomplete=data.get("incomplete", False))

    def verify(self) -> list[str]:
        """Names of artifacts that are missing or whose hash changed."""
        bad = []
        for name, info in self.artifacts.items():
            p = Path(info["path"])
            if not p.is_file() or (info["sha256"]
                                   and sha256_file(p) != info["sha256"]):
                bad.append(name)
        return bad
