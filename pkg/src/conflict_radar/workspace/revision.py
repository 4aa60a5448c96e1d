"""SCM revision stamps, baseline content, and revert detection.

Two providers map onto one totally ordered integer stamp: the file
provider reads `.conflict-radar/REVISION`, the git provider counts
first-parent commits back from HEAD. Baseline bytes are what a file
looked like at the current base revision; a revert is byte equality
with that baseline, nothing fuzzier.
"""

from __future__ import annotations

import logging
import subprocess
from pathlib import Path
from typing import Optional

log = logging.getLogger("conflict_radar.revision")

REVISION_RELPATH = Path(".conflict-radar") / "REVISION"
BASELINE_RELDIR = Path(".conflict-radar") / "baseline"


class FileRevisionProvider:
    """Reads an integer stamp from .conflict-radar/REVISION and baseline
    content from .conflict-radar/baseline/<relpath>."""

    def __init__(self, root: Path):
        self.root = Path(root)

    def current_revision(self) -> int:
        path = self.root / REVISION_RELPATH
        try:
            return int(path.read_text(encoding="utf-8").strip())
        except FileNotFoundError:
            log.warning("no REVISION file at %s; assuming revision 0", path)
            return 0
        except ValueError:
            log.warning("REVISION file at %s is not an integer; assuming 0", path)
            return 0

    def baseline_bytes(self, rel_path: str) -> Optional[bytes]:
        path = self.root / BASELINE_RELDIR / rel_path
        try:
            return path.read_bytes()
        except OSError:
            return None


class GitRevisionProvider:
    """Stamp = first-parent commit count of HEAD; baseline = HEAD:<path>."""

    def __init__(self, root: Path):
        self.root = Path(root)

    def _git(self, *args: str) -> Optional[bytes]:
        try:
            done = subprocess.run(
                ["git", *args], cwd=self.root,
                capture_output=True, timeout=30,
            )
        except (OSError, subprocess.TimeoutExpired):
            return None
        if done.returncode != 0:
            return None
        return done.stdout

    def current_revision(self) -> int:
        out = self._git("rev-list", "--first-parent", "--count", "HEAD")
        if out is None:
            log.warning("not a usable git repository at %s; assuming revision 0", self.root)
            return 0
        try:
            return int(out.strip())
        except ValueError:
            return 0

    def baseline_bytes(self, rel_path: str) -> Optional[bytes]:
        return self._git("show", f"HEAD:{rel_path}")


def make_provider(kind: str, root: Path):
    if kind == "file":
        return FileRevisionProvider(root)
    if kind == "git":
        return GitRevisionProvider(root)
    raise ValueError(f"unknown revision provider {kind!r}")


def detect_revert(provider, root: Path, rel_path: str) -> bool:
    """True iff the working file byte-equals its base-revision content."""
    baseline = provider.baseline_bytes(rel_path)
    if baseline is None:
        log.warning("no baseline for %s; cannot detect a revert", rel_path)
        return False
    try:
        current = (Path(root) / rel_path).read_bytes()
    except OSError:
        return False
    return current == baseline
