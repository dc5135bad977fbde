"""Frozen constants from the one-time calibration run, read from data/constants.json."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

from .errors import ConfigError

DEFAULT_PATH = Path(__file__).parent / "data" / "constants.json"
_override: Path | None = None


def set_constants_path(path: str | Path | None) -> None:
    global _override
    _override = Path(path) if path is not None else None
    _load.cache_clear()


@lru_cache(maxsize=None)
def _load(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"constants file {p} not found; run `twistsum calibrate`")
    return json.loads(p.read_text())


def constants() -> dict:
    return _load(str(_override or DEFAULT_PATH))


def frozen(name: str, key: str | None = None) -> float:
    """frozen("x_min", "12") -> calibrated value; raises ConfigError when absent."""
    table = constants().get("frozen", {})
    if name not in table:
        raise ConfigError(f"no frozen constant {name!r}")
    val = table[name]
    if key is None:
        return val
    if isinstance(val, dict) and key in val:
        return val[key]
    raise ConfigError(f"no frozen constant {name!r}[{key!r}]")


def save(data: dict, path: str | Path | None = None) -> Path:
    p = Path(path) if path is not None else DEFAULT_PATH
    p.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    _load.cache_clear()
    return p
