"""Run configuration: a YAML file of defaults with per-flag overrides.

Precedence is command-line flags, then the config file, then built-in
defaults.  Keys mirror the long flag names with dashes replaced by
underscores.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .errors import LoadError, ValidationError

__all__ = ["load_config_file", "ConfigResolver"]


def load_config_file(path: str | Path | None) -> dict:
    if path is None:
        return {}
    path = Path(path)
    if not path.exists():
        raise LoadError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise LoadError(f"{path}: invalid YAML: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: config must be a mapping")
    return data


class ConfigResolver:
    """flags > config file > defaults, with basic type coercion."""

    def __init__(self, args_namespace, config: dict):
        self._args = vars(args_namespace)
        self._config = config

    def get(self, key: str, default=None, cast=None):
        value = self._args.get(key)
        if value is None:
            value = self._config.get(key)
        if value is None:
            value = default
        if value is not None and cast is not None:
            try:
                value = cast(value)
            except (TypeError, ValueError):
                raise ValidationError(f"config key {key!r}: cannot interpret {value!r}")
        return value

    def require(self, key: str, cast=None):
        value = self.get(key, cast=cast)
        if value is None:
            raise ValidationError(f"missing required option --{key.replace('_', '-')}")
        return value
