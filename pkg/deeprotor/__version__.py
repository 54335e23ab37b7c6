# keep in sync with pyproject.toml
from __future__ import annotations

VERSION = "0.3.0"
