"""Synthetic detection benchmarks.

Change sets are built directly on the model (no parsing) so the numbers
isolate matching cost. Authors collide on a shared pool of files and
methods, which keeps the overlap rate realistic rather than zero.
"""

from __future__ import annotations

import statistics
import time

from ..detect import DetectOptions, detect
from ..distill import rename_aliases
from ..model import ChangeKind, ChangeSet, MemberRef, SemanticChange, SemanticPath
from ..syntax.lexer import Span

_SPAN = Span(0, 1, 1, 0, 1, 1)


def synthetic_change_set(author: str, n_changes: int, *, base: int = 1,
                         salt: int = 0) -> ChangeSet:
    changes = []
    for i in range(n_changes):
        k = i + salt
        path = SemanticPath(
            project="Bench",
            file=f"pkg/File{k % 97}.java",
            class_chain=(f"C{k % 97}",),
            member=MemberRef("method", f"m{k % 13}", arity=k % 3),
        )
        changes.append(
            SemanticChange(
                kind=ChangeKind.METHOD_BODY_CHANGED,
                path=path,
                old_value=None,
                new_value=None,
                author=author,
                base_revision=base,
                seq=i + 1,
                at_millis=0,
                decoration_span=_SPAN,
                old_fingerprint=k,
                new_fingerprint=k + 1 + salt,  # differs per author
            )
        )
    return ChangeSet(author=author, base_revision=base, changes=tuple(changes))


def measure_detect(n_members: int, changes_each: int, *, repeats: int = 5) -> float:
    """Median wall time in ms for one full detection pass."""
    sets = [
        synthetic_change_set(f"dev{i}", changes_each, salt=i * 7919)
        for i in range(n_members)
    ]
    local, remotes = sets[0], sets[1:]
    options = DetectOptions()
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        aliases = [a for s in sets for a in rename_aliases(s)]
        detect(local, remotes, aliases=aliases, options=options)
        samples.append((time.perf_counter() - started) * 1000.0)
    return statistics.median(samples)


def scaling_rows(*, n_members: int = 10, totals=(1_000, 10_000),
                 repeats: int = 3) -> list[tuple[int, int, float]]:
    """(total_changes, n_members, millis) for each requested volume."""
    rows = []
    for total in totals:
        millis = measure_detect(n_members, total // n_members, repeats=repeats)
        rows.append((total, n_members, millis))
    return rows
