"""Severity semantics, alias resolution, gating, and revert purging."""

from conflict_radar.detect import (
    DetectOptions,
    GateResult,
    detect,
    purge_on_revert,
    resolve_base_identity,
    build_alias_map,
    version_gate,
)
from conflict_radar.distill import extract_changes, rename_aliases
from conflict_radar.model import ChangeKind, ChangeSet, Severity
from conflict_radar.syntax.parser import parse_unit


def changes_between(old_src, new_src, author, file_path="C.java", base=1):
    old = parse_unit(old_src, file_path)
    new = parse_unit(new_src, file_path)
    return extract_changes(old, new, author, base, project="Demo")


def empty_set(author="me", base=1):
    return ChangeSet(author=author, base_revision=base, changes=())


BASE = "class C { int x = 1; void m() { int a; } }"


def test_version_gate_rejects_only_lower():
    assert version_gate(3, 5) == GateResult.REJECTED
    assert version_gate(5, 5) == GateResult.ACCEPTED
    assert version_gate(9, 5) == GateResult.ACCEPTED


def test_remote_only_edit_is_awareness():
    remote = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "lin")
    reports = detect(empty_set(), [remote])
    (r,) = reports
    assert r.severity == Severity.AWARENESS
    assert r.path_id == "Demo/C.java/C/x"
    assert r.remote_authors == frozenset({"lin"})
    assert r.local_kinds == frozenset()


def test_both_sides_same_element_is_conflict():
    local = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "me")
    remote = changes_between(BASE, "class C { int x = 3; void m() { int a; } }", "lin")
    (r,) = detect(local, [remote])
    assert r.severity == Severity.CONFLICT
    assert r.local_kinds == frozenset({ChangeKind.FIELD_VALUE_CHANGED})
    assert r.remote_kinds == frozenset({ChangeKind.FIELD_VALUE_CHANGED})


def test_disjoint_elements_stay_awareness():
    local = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "me")
    remote = changes_between(BASE, "class C { int x = 1; void m() { int b; } }", "lin")
    (r,) = detect(local, [remote])
    assert r.severity == Severity.AWARENESS
    assert r.path_id == "Demo/C.java/C/m"


def test_local_rename_remote_edit_conflict_at_base_identity():
    # I renamed x to y; lin changed x's value. Same element, so this is
    # a conflict, reported under the name both sides started from.
    local = changes_between(BASE, "class C { int y = 1; void m() { int a; } }", "me")
    remote = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "lin")
    aliases = rename_aliases(local)
    (r,) = detect(local, [remote], aliases)
    assert r.severity == Severity.CONFLICT
    assert r.path_id == "Demo/C.java/C/x"


def test_remote_rename_local_edit_conflict_at_base_identity():
    local = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "me")
    remote = changes_between(BASE, "class C { int y = 1; void m() { int a; } }", "lin")
    aliases = rename_aliases(remote)
    (r,) = detect(local, [remote], aliases)
    assert r.severity == Severity.CONFLICT
    assert r.path_id == "Demo/C.java/C/x"


def test_alias_chain_resolves_to_base():
    first = changes_between(BASE, "class C { int y = 1; void m() { int a; } }", "me")
    second = changes_between(
        "class C { int y = 1; void m() { int a; } }",
        "class C { int z = 1; void m() { int a; } }",
        "me",
    )
    aliases = rename_aliases(first) + rename_aliases(second)
    new_to_old = build_alias_map(aliases)
    z_path = second.changes[0].path
    assert resolve_base_identity(z_path, new_to_old).member.name == "x"


def test_alias_cycle_terminates():
    # a -> b and b -> a: resolution must stop once a path repeats.
    ab = changes_between("class C { int a; }", "class C { int b; }", "me")
    ba = changes_between("class C { int b; }", "class C { int a; }", "me")
    new_to_old = build_alias_map(rename_aliases(ab) + rename_aliases(ba))
    path = ab.changes[0].path
    resolve_base_identity(path, new_to_old)  # must not hang


def test_method_arity_alias_bridges_member_level_edits():
    # I appended a parameter and touched the body; lin edited the body
    # of the original one-arg method. My body change is recorded against
    # m/2, lin's against m/1; the arity alias reunites them.
    local = changes_between(
        "class C { void m(int a) { } }",
        "class C { void m(int a, int b) { int p; } }",
        "me",
    )
    remote = changes_between(
        "class C { void m(int a) { } }", "class C { void m(int a) { int q; } }", "lin"
    )
    (r,) = detect(local, [remote], rename_aliases(local))
    assert r.severity == Severity.CONFLICT
    assert ChangeKind.METHOD_BODY_CHANGED in r.local_kinds


def test_param_list_edit_alone_does_not_collide_with_body_edit():
    # A parameter is its own element: adding one does not conflict with
    # a remote body edit, which stays an awareness hint.
    local = changes_between(
        "class C { void m(int a) { } }", "class C { void m(int a, int b) { } }", "me"
    )
    remote = changes_between(
        "class C { void m(int a) { } }", "class C { void m(int a) { int q; } }", "lin"
    )
    (r,) = detect(local, [remote], rename_aliases(local))
    assert r.severity == Severity.AWARENESS
    assert r.path_id == "Demo/C.java/C/m"


def test_param_rename_collision_across_arity_drift():
    # Both sides renamed the same parameter; mine happened after I also
    # appended one, so my record carries the wider arity. Aliases chase
    # both back to the same slot.
    local = changes_between(
        "class C { void m(int a) { } }", "class C { void m(int q, int b) { } }", "me"
    )
    remote = changes_between(
        "class C { void m(int a) { } }", "class C { void m(int z) { } }", "lin"
    )
    aliases = rename_aliases(local) + rename_aliases(remote)
    reports = detect(local, [remote], aliases)
    conflict = [r for r in reports if r.severity == Severity.CONFLICT]
    assert len(conflict) == 1
    assert conflict[0].path_id == "Demo/C.java/C/m/a"


def test_remote_removal_of_locally_edited_element_is_conflict():
    local = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "me")
    remote = changes_between(BASE, "class C { void m() { int a; } }", "lin")
    (r,) = detect(local, [remote])
    assert r.severity == Severity.CONFLICT
    assert r.remote_kinds == frozenset({ChangeKind.ELEMENT_REMOVED})


def test_own_change_set_among_remotes_is_ignored():
    mine = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "me")
    assert detect(mine, [mine]) == []


def test_reports_sorted_by_path_id():
    remote = changes_between(
        BASE, "class C { long x = 2; void m() { int b; } }", "lin"
    )
    reports = detect(empty_set(), [remote])
    assert [r.path_id for r in reports] == sorted(r.path_id for r in reports)
    assert len(reports) == 2  # x and m


def test_multiple_remote_authors_accumulate():
    r1 = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "lin")
    r2 = changes_between(BASE, "class C { int x = 3; void m() { int a; } }", "kim")
    (r,) = detect(empty_set(), [r1, r2])
    assert r.remote_authors == frozenset({"lin", "kim"})


def test_suppress_identical_body_edits_downgrades():
    new = "class C { int x = 1; void m() { int z; } }"
    local = changes_between(BASE, new, "me")
    remote = changes_between(BASE, new, "lin")
    (strict,) = detect(local, [remote])
    assert strict.severity == Severity.CONFLICT
    (relaxed,) = detect(local, [remote], options=DetectOptions(suppress_identical=True))
    assert relaxed.severity == Severity.AWARENESS


def test_suppress_identical_leaves_differing_edits_alone():
    local = changes_between(BASE, "class C { int x = 1; void m() { int z; } }", "me")
    remote = changes_between(BASE, "class C { int x = 1; void m() { int w; } }", "lin")
    (r,) = detect(local, [remote], options=DetectOptions(suppress_identical=True))
    assert r.severity == Severity.CONFLICT


def test_awareness_span_prefers_resolver():
    remote = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "lin")
    marker = remote.changes[0].decoration_span
    probe = {}

    def resolver(path):
        probe["path"] = path
        return None  # force fallback

    (r,) = detect(empty_set(), [remote], span_resolver=resolver)
    assert r.decoration_span == marker  # fallback: remote's own span
    assert probe["path"].member.name == "x"


def test_purge_on_revert_drops_only_that_file():
    a = changes_between(BASE, "class C { int x = 2; void m() { int a; } }", "me", "A.java")
    b = changes_between(BASE, "class C { int x = 3; void m() { int a; } }", "me", "B.java")
    merged = ChangeSet(
        author="me",
        base_revision=1,
        changes=tuple(list(a.changes) + [c.with_seq(10 + i) for i, c in enumerate(b.changes)]),
    )
    purged = purge_on_revert(merged, "A.java")
    assert all(c.path.file == "B.java" for c in purged.changes)
    assert len(purged.changes) == len(b.changes)
