"""YAML configuration for fuel, search budgets and the strictness chain."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import jsonschema
import yaml

from .errors import CorpusError

ROOT = Path(__file__).resolve().parents[1]
DEFAULT_CONFIG = ROOT / "configs" / "progression.yaml"
SCHEMA_DIR = ROOT / "schema"


@dataclass(frozen=True)
class ProgressionConfig:
    fuel: int = 1_000_000
    search_budget: int = 10_000
    strictness_chain: Tuple[str, ...] = ("0", "1", "2", "w", "w + 1", "w*2", "w^2", "w^w")
    top_level: str = "w^w + 1"
    soundness_inputs: int = 100
    seed: int = 1937
    frontier_width: int = 4
    corpus: Path = field(default=ROOT / "corpus" / "manifest.yaml")


def load_yaml(path: Path):
    try:
        with path.open("r", encoding="utf-8") as handle:
            return yaml.safe_load(handle)
    except (OSError, yaml.YAMLError) as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc


def validate_against(data, schema_name: str, source: Path) -> None:
    """Validate ``data`` against ``schema/<schema_name>`` when the schema is available."""
    schema_path = SCHEMA_DIR / schema_name
    if not schema_path.exists():
        return
    schema = json.loads(schema_path.read_text(encoding="utf-8"))
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CorpusError(f"{source}: {where}: {exc.message}") from exc


def load_config(path: str | Path | None = None) -> ProgressionConfig:
    source = Path(path) if path is not None else DEFAULT_CONFIG
    if path is None and not source.exists():
        return ProgressionConfig()
    data = load_yaml(source) or {}
    validate_against(data, "config.schema.json", source)
    if "strictness_chain" in data:
        data["strictness_chain"] = tuple(data["strictness_chain"])
    if "corpus" in data:
        data["corpus"] = (source.parent / data["corpus"]).resolve()
    return ProgressionConfig(**data)
