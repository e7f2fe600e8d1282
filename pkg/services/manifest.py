# services/manifest.py - Run manifests: everything needed to reproduce an output file
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from config import TOOL_VERSION
from errors import ConfigurationError
from models.schemas import RunManifestModel
from pydantic import ValidationError

logger = logging.getLogger("replicator.manifest")

MANIFEST_SUFFIX = ".manifest.json"


@dataclass
class RunManifest:
    command: str
    game: Dict[str, Any]
    config: Dict[str, Any]
    game_file: Optional[str] = None
    seeds: List[int] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    tool_version: str = TOOL_VERSION
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def manifest_path(output: Union[str, Path]) -> Path:
    """The manifest travels next to its output: out.csv -> out.csv.manifest.json."""
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, output: Union[str, Path]) -> Path:
    path = manifest_path(output)
    path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    logger.info("manifest written: %s", path)
    return path


def read_manifest(path: Union[str, Path]) -> RunManifest:
    try:
        data = json.loads(Path(path).read_text())
        RunManifestModel.model_validate(data)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigurationError(f"unreadable manifest {path}: {e}")
    return RunManifest(**data)
