"""Wire protocol for the relay: newline-delimited canonical JSON.

Every message travels as exactly one line (json escapes embedded
newlines, so framing by "\\n" is safe). Decoding reads only the fields
it knows about; peers may add fields without breaking older builds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from ..model import ChangeSet, ConflictReport, canonical_json


class ProtocolDecodeError(ValueError):
    """A line that cannot be understood as a wire message."""


@dataclass(frozen=True)
class MemberSnapshot:
    """One member's consolidated state as carried inside WELCOME.

    max_seq is the highest wire sequence number the server has folded
    for this author; receivers use it to drop duplicate deltas.
    """

    change_set: ChangeSet
    max_seq: int

    @property
    def author(self) -> str:
        return self.change_set.author

    def to_json(self) -> dict:
        obj = self.change_set.to_json()
        obj["maxSeq"] = self.max_seq
        return obj

    @staticmethod
    def from_json(obj: dict) -> "MemberSnapshot":
        return MemberSnapshot(ChangeSet.from_json(obj), int(obj["maxSeq"]))


@dataclass(frozen=True)
class Hello:
    """Client introduction; the author string is the member identity."""

    author: str
    project: str
    base_revision: int

    TYPE = "HELLO"

    def payload(self) -> dict:
        return {
            "author": self.author,
            "project": self.project,
            "baseRevision": self.base_revision,
        }

    @staticmethod
    def from_json(obj: dict) -> "Hello":
        return Hello(obj["author"], obj["project"], int(obj["baseRevision"]))


@dataclass(frozen=True)
class Welcome:
    """Server reply to HELLO: session id plus every member's state."""

    session_id: str
    snapshot: tuple[MemberSnapshot, ...]

    TYPE = "WELCOME"

    def payload(self) -> dict:
        return {
            "sessionId": self.session_id,
            "snapshot": [m.to_json() for m in self.snapshot],
        }

    @staticmethod
    def from_json(obj: dict) -> "Welcome":
        snap = tuple(MemberSnapshot.from_json(m) for m in obj["snapshot"])
        return Welcome(obj["sessionId"], snap)


@dataclass(frozen=True)
class Publish:
    """A member's freshly consolidated delta since their last publish."""

    delta: ChangeSet

    TYPE = "PUBLISH"

    def payload(self) -> dict:
        return {"changeSetDelta": self.delta.to_json()}

    @staticmethod
    def from_json(obj: dict) -> "Publish":
        return Publish(ChangeSet.from_json(obj["changeSetDelta"]))


@dataclass(frozen=True)
class Broadcast:
    """Server fan-out of an accepted delta to the other members."""

    author: str
    delta: ChangeSet

    TYPE = "BROADCAST"

    def payload(self) -> dict:
        return {"author": self.author, "changeSetDelta": self.delta.to_json()}

    @staticmethod
    def from_json(obj: dict) -> "Broadcast":
        return Broadcast(obj["author"], ChangeSet.from_json(obj["changeSetDelta"]))


@dataclass(frozen=True)
class Revert:
    """A file went back to its base-revision content; drop its changes."""

    author: str
    file_path: str

    TYPE = "REVERT"

    def payload(self) -> dict:
        return {"author": self.author, "filePath": self.file_path}

    @staticmethod
    def from_json(obj: dict) -> "Revert":
        return Revert(obj["author"], obj["filePath"])


@dataclass(frozen=True)
class Bye:
    """Polite disconnect; the member's stored set stays in the session."""

    author: str

    TYPE = "BYE"

    def payload(self) -> dict:
        return {"author": self.author}

    @staticmethod
    def from_json(obj: dict) -> "Bye":
        return Bye(obj["author"])


@dataclass(frozen=True)
class Conflicts:
    """Dashboard feed: the server's current reports, keyed by member."""

    reports: dict[str, tuple[ConflictReport, ...]] = field(default_factory=dict)

    TYPE = "CONFLICTS"

    def payload(self) -> dict:
        return {
            "reports": {
                member: [r.to_json() for r in items]
                for member, items in sorted(self.reports.items())
            }
        }

    @staticmethod
    def from_json(obj: dict) -> "Conflicts":
        return Conflicts(
            {
                member: tuple(ConflictReport.from_json(r) for r in items)
                for member, items in obj["reports"].items()
            }
        )


@dataclass(frozen=True)
class Rejected:
    """Sent only to a publisher whose delta failed the version gate."""

    reason: str
    incoming_base: int
    required_base: int

    TYPE = "REJECTED"

    def payload(self) -> dict:
        return {
            "reason": self.reason,
            "incomingBase": self.incoming_base,
            "requiredBase": self.required_base,
        }

    @staticmethod
    def from_json(obj: dict) -> "Rejected":
        return Rejected(obj["reason"], int(obj["incomingBase"]), int(obj["requiredBase"]))


@dataclass(frozen=True)
class ProtocolError:
    """Last message before the server closes a misbehaving connection."""

    reason: str

    TYPE = "ERROR"

    def payload(self) -> dict:
        return {"reason": self.reason}

    @staticmethod
    def from_json(obj: dict) -> "ProtocolError":
        return ProtocolError(obj["reason"])


WireMessage = Union[
    Hello, Welcome, Publish, Broadcast, Revert, Bye, Conflicts, Rejected, ProtocolError
]

_DECODERS = {
    cls.TYPE: cls.from_json
    for cls in (Hello, Welcome, Publish, Broadcast, Revert, Bye, Conflicts, Rejected, ProtocolError)
}


def encode_message(msg: WireMessage) -> str:
    """Render a message as its single-line wire form (no trailing newline)."""
    obj = {"type": msg.TYPE}
    obj.update(msg.payload())
    return canonical_json(obj)


def decode_message(line: str) -> WireMessage:
    """Parse one wire line; raises ProtocolDecodeError on anything unusable."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolDecodeError(f"not JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ProtocolDecodeError("message must be a JSON object")
    mtype = obj.get("type")
    decoder = _DECODERS.get(mtype)
    if decoder is None:
        raise ProtocolDecodeError(f"unknown message type: {mtype!r}")
    try:
        return decoder(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolDecodeError(f"bad {mtype} payload: {exc}") from None
