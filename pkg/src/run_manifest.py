"""
Manifest uruchomienia (jeden manifest.json na komendę) i wspólny zapis JSON.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from src import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def _json_default(obj: Any) -> Any:
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "value"):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError("Object of type %s is not JSON serializable" % type(obj).__name__)


def save_json(data: Any, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, default=_json_default)
    logger.info("Saved to %s", path)
    return path


@dataclass
class RunManifest:
    command: str
    parameters: dict[str, Any]
    artifact_paths: list[str] = field(default_factory=list)
    tool_version: str = __version__
    wall_time: float = 0.0
    failures: list[dict[str, Any]] = field(default_factory=list)

    def add_artifact(self, path: Path | str) -> None:
        self.artifact_paths.append(Path(path).name)

    def write(self, out_dir: Path | str) -> Path:
        return save_json(asdict(self), Path(out_dir) / MANIFEST_NAME)
