"""Workspace side: config, revision providers, the watching agent, and
the scripted demo/bench harnesses."""

from .agent import POLL_INTERVAL, ScanOutcome, WorkspaceAgent
from .bench import measure_detect, scaling_rows, synthetic_change_set
from .demo import DemoRun, TimelineEvent, default_script, run_demo
from .figures import write_scaling, write_timeline
from .config import (
    CONFIG_RELPATH,
    SERVER_ENV_VAR,
    ConfigError,
    WorkspaceConfig,
    load_config,
    parse_config_text,
    parse_server_address,
)
from .revision import (
    BASELINE_RELDIR,
    REVISION_RELPATH,
    FileRevisionProvider,
    GitRevisionProvider,
    detect_revert,
    make_provider,
)

__all__ = [
    "BASELINE_RELDIR",
    "CONFIG_RELPATH",
    "ConfigError",
    "DemoRun",
    "FileRevisionProvider",
    "GitRevisionProvider",
    "POLL_INTERVAL",
    "REVISION_RELPATH",
    "SERVER_ENV_VAR",
    "ScanOutcome",
    "TimelineEvent",
    "WorkspaceAgent",
    "WorkspaceConfig",
    "default_script",
    "detect_revert",
    "load_config",
    "make_provider",
    "measure_detect",
    "parse_config_text",
    "parse_server_address",
    "run_demo",
    "scaling_rows",
    "synthetic_change_set",
    "write_scaling",
    "write_timeline",
]
