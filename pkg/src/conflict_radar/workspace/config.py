"""Workspace configuration: defaults, config file, env, CLI overrides.

The config file lives at <root>/.conflict-radar/config.toml and uses
plain key=value lines (a toml subset: no sections, no inline comments).
Precedence, lowest to highest: built-in defaults, config file, the
CONFLICT_RADAR_SERVER environment variable, explicit overrides.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..sync.server import DEFAULT_PORT

CONFIG_RELPATH = Path(".conflict-radar") / "config.toml"
SERVER_ENV_VAR = "CONFLICT_RADAR_SERVER"

_KNOWN_KEYS = {
    "projectName",
    "author",
    "serverAddress",
    "include",
    "debounceMillis",
    "revisionProvider",
}


@dataclass(frozen=True)
class WorkspaceConfig:
    project_name: str
    root_dir: Path
    author: str
    include: tuple[str, ...] = ("**/*.java",)
    server_host: str = "127.0.0.1"
    server_port: int = DEFAULT_PORT
    debounce_millis: int = 300
    revision_provider: str = "file"

    def __post_init__(self):
        if not self.author:
            raise ValueError("author must be non-empty")
        if self.debounce_millis < 0:
            raise ValueError("debounce must be >= 0")
        if self.revision_provider not in ("file", "git"):
            raise ValueError(f"unknown revision provider {self.revision_provider!r}")


class ConfigError(ValueError):
    """A config file line or value that cannot be used."""


def parse_config_text(text: str) -> dict[str, str]:
    """Parse key=value lines; blank lines and #-comment lines skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_server_address(text: str, default_port: int = DEFAULT_PORT) -> tuple[str, int]:
    """Accepts "host", "host:port", or ":port"."""
    host, sep, port = text.rpartition(":")
    if not sep:
        return text, default_port
    if not port.isdigit():
        raise ConfigError(f"bad server port in {text!r}")
    return host or "127.0.0.1", int(port)


def load_config(
    root: Path,
    *,
    project: Optional[str] = None,
    author: Optional[str] = None,
    server: Optional[str] = None,
    port: Optional[int] = None,
    debounce_millis: Optional[int] = None,
    revision_provider: Optional[str] = None,
    include: Optional[tuple[str, ...]] = None,
    env: Optional[dict] = None,
) -> WorkspaceConfig:
    """Assemble the effective config for a workspace root."""
    root = Path(root).resolve()
    environ = os.environ if env is None else env

    file_values: dict[str, str] = {}
    config_path = root / CONFIG_RELPATH
    if config_path.is_file():
        file_values = parse_config_text(config_path.read_text(encoding="utf-8"))

    host, resolved_port = "127.0.0.1", DEFAULT_PORT
    if "serverAddress" in file_values:
        host, resolved_port = parse_server_address(file_values["serverAddress"])
    if environ.get(SERVER_ENV_VAR):
        host, resolved_port = parse_server_address(environ[SERVER_ENV_VAR])
    if server is not None:
        host, resolved_port = parse_server_address(server)
    if port is not None:
        resolved_port = port

    resolved_include = include
    if resolved_include is None and "include" in file_values:
        resolved_include = tuple(
            glob.strip() for glob in file_values["include"].split(",") if glob.strip()
        )
    if resolved_include is None:
        resolved_include = ("**/*.java",)

    debounce = debounce_millis
    if debounce is None and "debounceMillis" in file_values:
        try:
            debounce = int(file_values["debounceMillis"])
        except ValueError:
            raise ConfigError(f"debounceMillis must be an integer, got {file_values['debounceMillis']!r}")
    if debounce is None:
        debounce = 300

    return WorkspaceConfig(
        project_name=project or file_values.get("projectName") or root.name,
        root_dir=root,
        author=author or file_values.get("author") or "",
        include=resolved_include,
        server_host=host,
        server_port=resolved_port,
        debounce_millis=debounce,
        revision_provider=revision_provider or file_values.get("revisionProvider") or "file",
    )
