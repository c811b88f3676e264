"""Service configuration, loadable from a JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass
class ServiceConfig:
    backend: str = "mock"  # mock | remote
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4"
    prompts_dir: str = "prompts"
    catalog_dir: str = "catalog"
    default_seed: int = 0
    static_dir: Optional[str] = None

    @staticmethod
    def load(path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f for f in ServiceConfig.__dataclass_fields__}
        return ServiceConfig(**{k: v for k, v in data.items() if k in known})
