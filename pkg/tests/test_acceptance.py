"""Product acceptance gate: eight criteria, one test and one verdict line each.

Every scale and tolerance is pinned here on purpose. Loosening one is a
product decision, not a test fix. `pytest -v` shows one pass/fail line
per criterion via the test names; run with -s for the verdict prints.
"""

import random
from collections import Counter
from contextlib import contextmanager

from conflict_radar.cli import main as cli_main
from conflict_radar.detect import GateResult, version_gate
from conflict_radar.distill import extract_changes
from conflict_radar.model import ChangeKind, MemberRef, SemanticPath, Severity, render_path_id
from conflict_radar.sync import Broadcast, ClientCore, Hello, Rejected, RelaySession, Revert
from conflict_radar.syntax.lexer import LexError
from conflict_radar.syntax.parser import ParseError, parse_unit
from conflict_radar.workspace import WorkspaceAgent, WorkspaceConfig
from conflict_radar.workspace.bench import measure_detect, scaling_rows

import treegen
from golden import TAXONOMY_PAIRS
from test_properties import check_against_brute_force


@contextmanager
def verdict(label):
    """Print exactly one PASS/FAIL line for a criterion."""
    try:
        yield
    except BaseException:
        print(f"[acceptance] {label}: FAIL")
        raise
    print(f"[acceptance] {label}: PASS")


def _diff(old_src, new_src, *, project="Demo", file_path="C.java", author="ada", base=1, seq_start=1):
    old = parse_unit(old_src, file_path)
    new = parse_unit(new_src, file_path)
    return extract_changes(old, new, author, base, project=project, seq_start=seq_start)


def test_c1_taxonomy_coverage():
    with verdict("C1 taxonomy coverage 12/12"):
        assert len({p.kind for p in TAXONOMY_PAIRS}) == 12
        for pair in TAXONOMY_PAIRS:
            cs = _diff(pair.old_src, pair.new_src)
            assert [c.kind for c in cs.changes] == [pair.kind], pair.kind
            change = cs.changes[0]
            assert change.old_value == pair.old_value, pair.kind
            assert change.new_value == pair.new_value, pair.kind
            span = change.decoration_span
            assert pair.new_src[span.start_byte : span.end_byte] == pair.span_text, pair.kind


def test_c2_path_id_reproduction():
    with verdict("C2 path id byte-exact"):
        path = SemanticPath(
            "Zoo", "Zebra.java", ("Zebra",), member=MemberRef("field", "stripeCount")
        )
        assert render_path_id(path) == "Zoo/Zebra.java/Zebra/stripeCount"
        # The same id must come out of the full pipeline, not just the renderer.
        cs = _diff(
            "class Zebra { int stripeCount = 12; }",
            "class Zebra { int stripeCount = 13; }",
            project="Zoo",
            file_path="Zebra.java",
        )
        assert [render_path_id(c.path) for c in cs.changes] == [
            "Zoo/Zebra.java/Zebra/stripeCount"
        ]


def test_c3_self_diff_and_single_mutation_completeness():
    with verdict("C3 self-diff over 1000 trees, 100 cases x 15 kinds"):
        for seed in range(1000):
            src = treegen.render(treegen.gen_model(seed))
            tree = parse_unit(src, "G.java")
            assert extract_changes(tree, tree, "ada", 1, project="Gen").changes == ()

        kinds = list(treegen.MUTATORS)
        assert len(kinds) == 15
        for kind in kinds:
            for seed in range(100):
                old_src, new_src = treegen.mutated_pair(seed, kind)
                found = [c.kind for c in _diff(old_src, new_src, project="Gen", file_path="G.java").changes]
                assert found and set(found) == {kind}, f"{kind} seed {seed}: {found}"


def test_c4_detection_matches_brute_force():
    with verdict("C4 detect == brute force on 500 instances"):
        for seed in range(500):
            check_against_brute_force(seed)


def test_c5_version_gating():
    with verdict("C5 version gating, unit and simulation"):
        assert version_gate(1, 2) is GateResult.REJECTED
        assert version_gate(2, 2) is GateResult.ACCEPTED
        assert version_gate(3, 2) is GateResult.ACCEPTED

        base_src = "class C { int x = 0; int y = 0; }"
        session = RelaySession(session_id="gate")
        session.hello(Hello("ana", "Demo", 1))
        session.hello(Hello("bo", "Demo", 1))
        session.publish("ana", _diff(base_src, base_src.replace("x = 0", "x = 1"), author="ana", base=5))

        stale = session.publish("bo", _diff(base_src, base_src.replace("y = 0", "y = 9"), author="bo", base=3))
        assert isinstance(stale, Rejected)
        assert stale.incoming_base == 3 and stale.required_base == 5
        assert not session.members["bo"].change_set.changes

        equal = session.publish("bo", _diff(base_src, base_src.replace("y = 0", "y = 9"), author="bo", base=5))
        assert isinstance(equal, Broadcast)
        higher = session.publish(
            "ana", _diff(base_src, base_src.replace("x = 0", "x = 2"), author="ana", base=7, seq_start=9)
        )
        assert isinstance(higher, Broadcast)
        assert session.highest_revision == 7

        # The client-side mirror applies the same rule to broadcasts.
        core = ClientCore("cy", base_revision=5)
        low = Broadcast("ana", _diff(base_src, base_src.replace("x = 0", "x = 1"), author="ana", base=3))
        assert core.apply_broadcast(low) is False
        assert "ana" not in core.remotes


def test_c6_severity_transitions_and_demo_exit(tmp_path):
    with verdict("C6 awareness -> conflict -> revert purge, demo exit 0"):
        base_src = "class C { int x = 0; void m() { int a = 0; } }"
        session = RelaySession(session_id="sev")
        bo = ClientCore("bo", base_revision=1)
        session.hello(Hello("ana", "Demo", 1))
        bo.adopt_snapshot(session.hello(Hello("bo", "Demo", 1)))

        # Remote-only edit decorates as awareness.
        out = session.publish(
            "ana", _diff(base_src, base_src.replace("int a = 0;", "int a = 1;"), author="ana")
        )
        bo.apply_broadcast(out)
        (report,) = bo.reports()
        assert report.severity == Severity.AWARENESS
        assert report.path_id == "Demo/C.java/C/m"

        # The same element edited on both sides escalates to conflict.
        bo.set_local(_diff(base_src, base_src.replace("int a = 0;", "int a = 2;"), author="bo"))
        (report,) = bo.reports()
        assert report.severity == Severity.CONFLICT
        assert report.local_kinds == {ChangeKind.METHOD_BODY_CHANGED}
        assert report.remote_authors == {"ana"}

        # The remote revert purges the file's changes and the indication.
        bo.apply_revert(session.revert(Revert("ana", "C.java")))
        assert bo.reports() == []
        assert not session.members["ana"].change_set.changes

        assert cli_main(["demo", "--out", str(tmp_path)]) == 0


def test_c7_desk_scale_latency_and_linearity():
    with verdict("C7 10x1000 under 100 ms, 10^4 within 3x linear"):
        desk_ms = measure_detect(10, 1000, repeats=5)
        assert desk_ms < 100.0, f"{desk_ms:.1f} ms"

        rows = scaling_rows(n_members=10, totals=(1_000, 10_000), repeats=3)
        ms_1k = rows[0][2]
        ms_10k = rows[1][2]
        assert ms_10k <= 3.0 * (ms_1k * 10.0), f"{ms_1k:.2f} ms -> {ms_10k:.2f} ms"


class _CaptureClient:
    """Smallest relay stand-in the agent accepts."""

    def __init__(self, author):
        self.core = ClientCore(author)
        self.published = []
        self.on_rejected = None

    def publish(self, delta):
        if delta.changes:
            self.published.append(delta)

    def revert(self, rel):
        self.core.purge_local(rel)


def _corrupt(rng, src):
    """Mangle source until it genuinely fails to parse."""
    while True:
        roll = rng.randrange(3)
        if roll == 0:
            broken = src[: rng.randrange(1, len(src))]
        elif roll == 1:
            broken = src.replace("{", "", 1)
        else:
            pos = rng.randrange(len(src))
            broken = src[:pos] + "@#$" + src[pos:]
        try:
            parse_unit(broken, "G.java")
        except (LexError, ParseError):
            return broken


def test_c8_gate_soundness_under_fault_injection(tmp_path):
    with verdict("C8 zero publishes across 120 injected faults"):
        rng = random.Random(8)
        model = treegen.gen_model(7)
        good = treegen.render(model)
        (tmp_path / ".conflict-radar/baseline").mkdir(parents=True)
        (tmp_path / ".conflict-radar/REVISION").write_text("1", encoding="utf-8")
        (tmp_path / ".conflict-radar/baseline/G.java").write_text(good, encoding="utf-8")
        (tmp_path / "G.java").write_text(good, encoding="utf-8")

        config = WorkspaceConfig(
            project_name="Gen", root_dir=tmp_path, author="ada", debounce_millis=0
        )
        client = _CaptureClient("ada")
        agent = WorkspaceAgent(config, client)

        faults = 0
        revision = 1
        for segment in range(15):
            baseline = good
            locked = set()
            for _ in range(8):
                if treegen._planned_mutation(model, rng, locked):
                    good = treegen.render(model)
                before = len(client.published)
                (tmp_path / "G.java").write_text(_corrupt(rng, good), encoding="utf-8")
                outcome = agent.scan_now()
                assert outcome.held and outcome.published is None
                assert "G.java" in outcome.hold_errors
                assert len(client.published) == before
                faults += 1

                # Recovery resumes publishing, so the gate is tested mid-stream.
                (tmp_path / "G.java").write_text(good, encoding="utf-8")
                agent.scan_now()

            # At every parse-clean point the stored set must equal a
            # from-scratch diff of the segment's baseline.
            scratch = extract_changes(
                parse_unit(baseline, "G.java"), parse_unit(good, "G.java"),
                "ada", revision, project="Gen",
            )
            assert Counter(c.essence() for c in agent.stored.changes) == Counter(
                c.essence() for c in scratch.changes
            )

            # A sync absorbs the working state, then the next segment starts.
            revision += 1
            (tmp_path / ".conflict-radar/REVISION").write_text(str(revision), encoding="utf-8")
            (tmp_path / ".conflict-radar/baseline/G.java").write_text(good, encoding="utf-8")
            agent.scan_now()
            assert agent.base_revision == revision
            assert not agent.stored.changes
        assert faults >= 100
