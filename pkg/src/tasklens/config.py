"""Analysis configuration: a small YAML file of key/value pairs and lists.

Every key is optional; absent keys fall back to defaults.  A missing file
means "all defaults", so a bare `tasklens analyze` needs no setup.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .events import DEDUP_WINDOW_SECONDS
from .taskparse import DEFAULT_DIRECTIVE_KEYS


class BadConfig(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


@dataclass(frozen=True)
class Config:
    directive_keys: tuple[str, ...] = DEFAULT_DIRECTIVE_KEYS
    similar_modules: tuple[frozenset[str], ...] = ()
    dedup_window_seconds: float = DEDUP_WINDOW_SECONDS
    minor_major_threshold: float = 0.5
    rename_match_floor: float = 0.3
    retention_horizon: int = 30

    def __post_init__(self):
        if not 0.0 < self.minor_major_threshold < 1.0:
            raise BadConfig("minor_major_threshold", "must be strictly between 0 and 1")
        if not 0.0 <= self.rename_match_floor <= 1.0:
            raise BadConfig("rename_match_floor", "must be within [0, 1]")
        if self.dedup_window_seconds < 0:
            raise BadConfig("dedup_window_seconds", "must be non-negative")
        if self.retention_horizon < 1:
            raise BadConfig("retention_horizon", "must be at least 1")


_KNOWN_KEYS = {
    "directive_keys",
    "similar_modules",
    "dedup_window_seconds",
    "minor_major_threshold",
    "rename_match_floor",
    "retention_horizon",
}


def load_config(path: str | Path | None) -> Config:
    """Load a config file; a None path or absent file yields pure defaults."""
    if path is None:
        return Config()
    path = Path(path)
    if not path.exists():
        return Config()
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise BadConfig("<file>", f"not parseable: {exc}") from None
    if raw is None:
        return Config()
    if not isinstance(raw, dict):
        raise BadConfig("<file>", "top level must be a mapping")

    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise BadConfig(sorted(unknown)[0], "unknown key")

    kwargs = {}
    if "directive_keys" in raw:
        kwargs["directive_keys"] = tuple(
            _str_list(raw["directive_keys"], "directive_keys")
        )
    if "similar_modules" in raw:
        classes = raw["similar_modules"]
        if not isinstance(classes, list):
            raise BadConfig("similar_modules", "must be a list of lists")
        kwargs["similar_modules"] = tuple(
            frozenset(_str_list(cls, f"similar_modules[{i}]")) for i, cls in enumerate(classes)
        )
    for key, kind in (
        ("dedup_window_seconds", float),
        ("minor_major_threshold", float),
        ("rename_match_floor", float),
        ("retention_horizon", int),
    ):
        if key in raw:
            value = raw[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise BadConfig(key, "must be a number")
            if kind is int and int(value) != value:
                raise BadConfig(key, "must be an integer")
            kwargs[key] = kind(value)

    return Config(**kwargs)


def _str_list(value, key: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
        raise BadConfig(key, "must be a list of non-empty strings")
    return value
