"""Scripted multi-agent rehearsal over real sockets and workspaces.

Each scripted member gets a throwaway workspace directory, a live relay
client, and a watching agent thread; steps then edit files exactly as a
developer would and assert what every member's radar shows, within a
bounded settle time. The run produces a timeline suitable for plotting.
"""

from __future__ import annotations

import shutil
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..model import Severity
from ..sync import ClientCore, RelayClient, RelayServer
from .agent import WorkspaceAgent
from .config import WorkspaceConfig

DEFAULT_SETTLE_SECONDS = 2.0


@dataclass
class TimelineEvent:
    at_millis: int
    member: str
    kind: str  # edit | revert | sync | reports | rejected | status | expect
    detail: str


@dataclass
class DemoRun:
    ok: bool
    failed_step: Optional[int]
    message: str
    timeline: list[TimelineEvent] = field(default_factory=list)
    duration_millis: int = 0


_DEMO_FILE = """class CommentChecks {
    int maxLength = 80;

    void checkComment() {
        int i = 0;
        while (i < maxLength) {
            i = i + 1;
        }
    }

    void checkParamTags() {
        int count = 0;
    }

    void checkReturnTag() {
        int seen = 0;
    }

    void checkThrowsTag() {
        int thrown = 0;
    }
}
"""

_PATH = "CommentChecks.java"
_ID = "Checks/CommentChecks.java/CommentChecks"

_EDIT_COMMENT_1 = _DEMO_FILE.replace("int i = 0;", "int i = 1;")
_EDIT_COMMENT_2 = _DEMO_FILE.replace("i = i + 1;", "i = i + 2;")
_EDIT_RETURN = _EDIT_COMMENT_2.replace("int seen = 0;", "int seen = 1;")
_EDIT_PARAM = _DEMO_FILE.replace("int count = 0;", "int count = 9;")
_EDIT_THROWS = _EDIT_RETURN.replace("int thrown = 0;", "int thrown = 3;")


def default_script() -> dict:
    """Two developers around one checker class: awareness, escalation,
    revert, then the version gate and recovery."""
    return {
        "project": "Checks",
        "baseRevision": 1,
        "debounceMillis": 60,
        "files": {_PATH: _DEMO_FILE},
        "members": ["dev1", "dev2"],
        "steps": [
            {
                "member": "dev1", "delayMillis": 80,
                "edit": {"filePath": _PATH, "newContent": _EDIT_COMMENT_1},
                "expect": [
                    {"member": "dev2", "pathId": f"{_ID}/checkComment",
                     "severity": "Awareness"},
                    {"member": "dev2", "reports": 1},
                ],
            },
            {
                "member": "dev2", "delayMillis": 80,
                "edit": {"filePath": _PATH, "newContent": _EDIT_COMMENT_2},
                "expect": [
                    {"member": "dev2", "pathId": f"{_ID}/checkComment",
                     "severity": "Conflict"},
                    {"member": "dev1", "pathId": f"{_ID}/checkComment",
                     "severity": "Conflict"},
                ],
            },
            {
                "member": "dev2", "delayMillis": 80,
                "edit": {"filePath": _PATH, "newContent": _EDIT_RETURN},
                "expect": [
                    {"member": "dev1", "pathId": f"{_ID}/checkReturnTag",
                     "severity": "Awareness"},
                    {"member": "dev1", "reports": 2},
                ],
            },
            {
                "member": "dev1", "delayMillis": 80,
                "revert": _PATH,
                "expect": [
                    {"member": "dev2", "reports": 0},
                    {"member": "dev1", "pathId": f"{_ID}/checkComment",
                     "severity": "Awareness"},
                    {"member": "dev1", "reports": 2},
                ],
            },
            {"member": "dev1", "delayMillis": 80, "setRevision": 2, "expect": []},
            {
                "member": "dev1", "delayMillis": 80,
                "edit": {"filePath": _PATH, "newContent": _EDIT_PARAM},
                "expect": [
                    {"member": "dev2", "pathId": f"{_ID}/checkParamTags",
                     "severity": "Awareness"},
                ],
            },
            {
                "member": "dev2", "delayMillis": 80,
                "edit": {"filePath": _PATH, "newContent": _EDIT_THROWS},
                "expect": [
                    {"member": "dev2", "rejectedAtLeast": 1},
                ],
            },
            {
                "member": "dev2", "delayMillis": 80, "setRevision": 2,
                "expect": [
                    {"member": "dev1", "reports": 3},
                    {"member": "dev1", "pathId": f"{_ID}/checkThrowsTag",
                     "severity": "Awareness"},
                    {"member": "dev2", "pathId": f"{_ID}/checkParamTags",
                     "severity": "Awareness"},
                    {"member": "dev2", "reports": 1},
                ],
            },
        ],
    }


class _Member:
    """One scripted developer: workspace dir, client, agent thread."""

    def __init__(self, name: str, script: dict, workdir: Path,
                 port: int, record: Callable[[str, str, str], None]):
        self.name = name
        self.workdir = workdir
        self.record = record
        self.rejections = []

        base = int(script.get("baseRevision", 1))
        self._seed(script["files"], base)
        self.config = WorkspaceConfig(
            project_name=script["project"],
            root_dir=workdir,
            author=name,
            debounce_millis=int(script.get("debounceMillis", 60)),
        )
        core = ClientCore(name, base_revision=base)
        self.client = RelayClient(
            core, script["project"], "127.0.0.1", port,
            on_reports=lambda reports: record(
                name, "reports", f"{len(reports)} reports"
            ),
        )
        self.agent = WorkspaceAgent(
            self.config, self.client, poll_interval=0.05,
            on_status=lambda line: record(name, "status", line),
        )
        agent_rejected = self.client.on_rejected

        def on_rejected(msg):
            self.rejections.append(msg)
            record(name, "rejected", f"base {msg.incoming_base} < {msg.required_base}")
            agent_rejected(msg)

        self.client.on_rejected = on_rejected
        self.stop_event = threading.Event()
        self.thread = threading.Thread(
            target=self.agent.run, args=(self.stop_event,),
            name=f"demo-{name}", daemon=True,
        )

    def _seed(self, files: dict, revision: int) -> None:
        meta = self.workdir / ".conflict-radar"
        (meta / "baseline").mkdir(parents=True)
        (meta / "REVISION").write_text(str(revision), encoding="utf-8")
        for rel, text in files.items():
            for target in (self.workdir / rel, meta / "baseline" / rel):
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(text, encoding="utf-8")

    def start(self) -> None:
        if not self.client.connect(timeout=5):
            raise RuntimeError(f"{self.name} never received a welcome")
        self.thread.start()

    def shutdown(self) -> None:
        self.stop_event.set()
        self.thread.join(timeout=3)
        self.client.close()

    # -- step actions --------------------------------------------------

    def edit(self, rel: str, content: str) -> None:
        path = self.workdir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")

    def revert(self, rel: str) -> None:
        baseline = self.workdir / ".conflict-radar" / "baseline" / rel
        (self.workdir / rel).write_bytes(baseline.read_bytes())

    def set_revision(self, revision: int, new_baselines: Optional[dict]) -> None:
        meta = self.workdir / ".conflict-radar"
        for rel, text in (new_baselines or {}).items():
            target = meta / "baseline" / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
        (meta / "REVISION").write_text(str(revision), encoding="utf-8")


def _expectation_met(exp: dict, members: dict[str, _Member]) -> bool:
    member = members[exp["member"]]
    if "pathId" in exp:
        wanted = Severity(exp["severity"])
        return any(
            r.path_id == exp["pathId"] and r.severity == wanted
            for r in member.client.reports
        )
    if "reports" in exp:
        return len(member.client.reports) == int(exp["reports"])
    if "rejectedAtLeast" in exp:
        return len(member.rejections) >= int(exp["rejectedAtLeast"])
    raise ValueError(f"unintelligible expectation {exp!r}")


def _describe(exp: dict) -> str:
    if "pathId" in exp:
        return f"{exp['member']} sees {exp['severity']} at {exp['pathId']}"
    if "reports" in exp:
        return f"{exp['member']} settles at {exp['reports']} reports"
    return f"{exp['member']} rejected at least {exp['rejectedAtLeast']} times"


def run_demo(script: Optional[dict] = None, *,
             settle_seconds: float = DEFAULT_SETTLE_SECONDS,
             on_event: Optional[Callable[[TimelineEvent], None]] = None) -> DemoRun:
    """Run a script end to end; ok=False names the first failed step."""
    script = default_script() if script is None else script
    for key in ("project", "files", "members", "steps"):
        if key not in script:
            raise ValueError(f"script is missing {key!r}")
    if not script["members"]:
        raise ValueError("script needs at least one member")

    started = time.monotonic()
    timeline: list[TimelineEvent] = []
    lock = threading.Lock()

    def record(member: str, kind: str, detail: str) -> None:
        event = TimelineEvent(
            at_millis=int((time.monotonic() - started) * 1000),
            member=member, kind=kind, detail=detail,
        )
        with lock:
            timeline.append(event)
        if on_event is not None:
            on_event(event)

    server = RelayServer(port=0)
    port = server.start()
    tmp = Path(tempfile.mkdtemp(prefix="radar-demo-"))
    members: dict[str, _Member] = {}
    try:
        for name in script["members"]:
            workdir = tmp / name
            workdir.mkdir()
            members[name] = _Member(name, script, workdir, port, record)
        for member in members.values():
            member.start()

        for idx, step in enumerate(script["steps"]):
            time.sleep(int(step.get("delayMillis", 0)) / 1000.0)
            actor = members[step["member"]]
            if "edit" in step:
                actor.edit(step["edit"]["filePath"], step["edit"]["newContent"])
                record(actor.name, "edit", step["edit"]["filePath"])
            elif "revert" in step:
                actor.revert(step["revert"])
                record(actor.name, "revert", step["revert"])
            elif "setRevision" in step:
                actor.set_revision(int(step["setRevision"]), step.get("newBaselines"))
                record(actor.name, "sync", f"revision {step['setRevision']}")
            else:
                raise ValueError(f"step {idx} has no action")

            for exp in step.get("expect", ()):
                deadline = time.monotonic() + settle_seconds
                while not _expectation_met(exp, members):
                    if time.monotonic() >= deadline:
                        message = (
                            f"step {idx} ({actor.name}): expected "
                            f"{_describe(exp)} within {settle_seconds:.1f} s"
                        )
                        record(exp["member"], "expect", f"FAILED: {_describe(exp)}")
                        return DemoRun(
                            ok=False, failed_step=idx, message=message,
                            timeline=timeline,
                            duration_millis=int((time.monotonic() - started) * 1000),
                        )
                    time.sleep(0.02)
                record(exp["member"], "expect", _describe(exp))

        return DemoRun(
            ok=True, failed_step=None, message="all steps met",
            timeline=timeline,
            duration_millis=int((time.monotonic() - started) * 1000),
        )
    finally:
        for member in members.values():
            member.shutdown()
        server.stop()
        shutil.rmtree(tmp, ignore_errors=True)
