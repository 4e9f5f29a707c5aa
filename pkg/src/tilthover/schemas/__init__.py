"""JSON Schemas for the tool's JSON outputs, one file per subcommand."""

from __future__ import annotations

import json
from importlib import resources
from typing import Any

__all__ = ["schema_names", "load_schema"]


def schema_names() -> list[str]:
    root = resources.files(__name__)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_schema(name: str) -> dict[str, Any]:
    """Schema dict for a subcommand name, e.g. 'analyze' or 'hover-map'."""
    path = resources.files(__name__) / f"{name}.json"
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise KeyError(f"no schema named {name!r}; available: {', '.join(schema_names())}") from None
