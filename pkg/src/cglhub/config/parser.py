# -*- coding: utf-8 -*-
"""Strict TOML reader for RunConfig."""

from __future__ import annotations

import dataclasses
import re
import tomllib
import typing
from pathlib import Path
from typing import Any

from cglhub.core.exceptions import ConfigError
from .defaultconfig import RunConfig

_SKIP = {"name"}


def _key_line(text: str, key: str) -> int | None:
    pat = re.compile(r'^\s*(["\']?)' + re.escape(key) + r'\1\s*=')
    for i, line in enumerate(text.splitlines(), start=1):
        if pat.match(line):
            return i
    return None


def _coerce(key: str, value: Any, annotation) -> tuple[Any, str | None]:
    if annotation is bool:
        return value, None if isinstance(value, bool) else f"'{key}' must be a boolean"
    if isinstance(value, bool):
        return value, f"'{key}' must be {annotation.__name__}, got a boolean"
    if annotation is float:
        if isinstance(value, (int, float)):
            return float(value), None
        return value, f"'{key}' must be a real number"
    if annotation is int:
        if isinstance(value, int):
            return value, None
        return value, f"'{key}' must be an integer"
    if annotation is str:
        return value, None if isinstance(value, str) else f"'{key}' must be a string"
    return value, None


def config_overrides(data: dict[str, Any], text: str = "") -> tuple[dict[str, Any], list[str]]:
    """Check raw key/value pairs against RunConfig; return (values, violations)."""
    hints = typing.get_type_hints(RunConfig)
    known = {f.name for f in dataclasses.fields(RunConfig)} - _SKIP
    values: dict[str, Any] = {}
    errs: list[str] = []
    for key, value in data.items():
        where = _key_line(text, key) if text else None
        prefix = f"line {where}: " if where else ""
        if isinstance(value, dict):
            errs.append(f"{prefix}table '{key}' is not allowed; the config is flat key = value")
            continue
        if key not in known:
            errs.append(f"{prefix}unknown key '{key}'")
            continue
        coerced, err = _coerce(key, value, hints[key])
        if err:
            errs.append(prefix + err)
        else:
            values[key] = coerced
    return values, errs


def parse_config(path: str | Path, **overrides) -> RunConfig:
    """Read a flat TOML run file into a validated RunConfig.

    Unknown keys, nested tables, wrongly typed values and failed validation
    are all collected and raised together as one ConfigError.
    """
    path = Path(path).expanduser()
    if not path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    text = path.read_text()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"{path}: {e}"]) from e

    values, errs = config_overrides(data, text)
    values.update(overrides)
    cfg = RunConfig(**values)
    errs += cfg.validate()
    if errs:
        raise ConfigError([f"{path}: {e}" for e in errs])
    return cfg
