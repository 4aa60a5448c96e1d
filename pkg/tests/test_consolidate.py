"""Consolidation: replaying bursts must equal diffing the endpoints."""

from collections import Counter

from conflict_radar.distill import consolidate, extract_changes, fold, rename_aliases
from conflict_radar.model import ChangeKind, ChangeSet, render_path_id
from conflict_radar.syntax.parser import parse_unit


def burst_concat(srcs, author="ada", base=1, file_path="C.java"):
    """Chain extract over successive states, concatenating the bursts."""
    trees = [parse_unit(s, file_path) for s in srcs]
    changes = []
    seq = 1
    for old, new in zip(trees, trees[1:]):
        cs = extract_changes(old, new, author, base, project="Demo", seq_start=seq)
        changes.extend(cs.changes)
        seq += len(cs.changes)
    return ChangeSet(author=author, base_revision=base, changes=tuple(changes))


def combined(srcs, author="ada", base=1, file_path="C.java"):
    old = parse_unit(srcs[0], file_path)
    new = parse_unit(srcs[-1], file_path)
    return extract_changes(old, new, author, base, project="Demo")


def essences(cs):
    return Counter(c.essence() for c in cs.changes)


def assert_burst_equivalence(srcs):
    assert essences(consolidate(burst_concat(srcs))) == essences(combined(srcs))


def test_back_and_forth_value_edit_nets_to_nothing():
    assert_burst_equivalence(
        ["class C { int x = 1; }", "class C { int x = 2; }", "class C { int x = 1; }"]
    )
    assert consolidate(burst_concat(
        ["class C { int x = 1; }", "class C { int x = 2; }", "class C { int x = 1; }"]
    )).changes == ()


def test_chained_value_edits_keep_endpoints():
    srcs = ["class C { int x = 1; }", "class C { int x = 2; }", "class C { int x = 3; }"]
    out = consolidate(burst_concat(srcs))
    (c,) = out.changes
    assert c.kind == ChangeKind.FIELD_VALUE_CHANGED
    assert (c.old_value, c.new_value) == ("1", "3")
    assert_burst_equivalence(srcs)


def test_rename_chain_collapses():
    srcs = ["class C { int count; }", "class C { int total; }", "class C { int sum; }"]
    out = consolidate(burst_concat(srcs))
    (c,) = out.changes
    assert c.kind == ChangeKind.FIELD_RENAMED
    assert (c.old_value, c.new_value) == ("count", "sum")
    assert_burst_equivalence(srcs)


def test_rename_back_nets_to_nothing():
    srcs = ["class C { int count; }", "class C { int total; }", "class C { int count; }"]
    assert consolidate(burst_concat(srcs)).changes == ()
    assert_burst_equivalence(srcs)


def test_edit_after_rename_lands_on_one_element():
    srcs = [
        "class C { int count = 1; }",
        "class C { int total = 1; }",
        "class C { int total = 2; }",
    ]
    out = consolidate(burst_concat(srcs))
    kinds = {c.kind for c in out.changes}
    assert kinds == {ChangeKind.FIELD_RENAMED, ChangeKind.FIELD_VALUE_CHANGED}
    assert {render_path_id(c.path) for c in out.changes} == {"Demo/C.java/C/total"}
    # The endpoints alone cannot see the rename (type + initializer no
    # longer match), so a plain endpoint diff degrades to remove + add.
    # The replayed history is strictly better informed here.
    endpoint_kinds = {c.kind for c in combined(srcs).changes}
    assert endpoint_kinds == {ChangeKind.ELEMENT_REMOVED, ChangeKind.ELEMENT_ADDED}


def test_add_then_remove_nets_to_nothing():
    srcs = ["class C { }", "class C { int x; }", "class C { }"]
    assert consolidate(burst_concat(srcs)).changes == ()
    assert_burst_equivalence(srcs)


def test_add_then_edit_folds_into_the_add():
    srcs = ["class C { }", "class C { int x = 1; }", "class C { int x = 2; }"]
    out = consolidate(burst_concat(srcs))
    (c,) = out.changes
    assert c.kind == ChangeKind.ELEMENT_ADDED
    assert c.attributes["initializer"] == "2"
    assert_burst_equivalence(srcs)


def test_remove_then_readd_synthesizes_the_net_edit():
    srcs = [
        "class C { private int x = 1; }",
        "class C { }",
        "class C { public int x = 1; }",
    ]
    out = consolidate(burst_concat(srcs))
    (c,) = out.changes
    assert c.kind == ChangeKind.FIELD_ACCESSIBILITY_CHANGED
    assert (c.old_value, c.new_value) == ("private", "public")
    assert_burst_equivalence(srcs)


def test_remove_after_rename_reports_the_original_path():
    srcs = [
        "class C { void add(int a) { a++; } }",
        "class C { void plus(int a) { a++; } }",
        "class C { }",
    ]
    out = consolidate(burst_concat(srcs))
    (c,) = out.changes
    assert c.kind == ChangeKind.ELEMENT_REMOVED
    assert render_path_id(c.path) == "Demo/C.java/C/add"
    assert_burst_equivalence(srcs)


def test_param_add_then_remove_nets_to_nothing():
    srcs = [
        "class C { void m(int a) { } }",
        "class C { void m(int a, int b) { } }",
        "class C { void m(int a) { } }",
    ]
    assert consolidate(burst_concat(srcs)).changes == ()
    assert_burst_equivalence(srcs)


def test_body_edit_after_arity_change_tracks_the_method():
    srcs = [
        "class C { void m(int a) { } }",
        "class C { void m(int a, int b) { } }",
        "class C { void m(int a, int b) { int z; } }",
    ]
    out = consolidate(burst_concat(srcs))
    kinds = {c.kind for c in out.changes}
    assert kinds == {ChangeKind.PARAM_ADDED, ChangeKind.METHOD_BODY_CHANGED}
    assert {c.path.member.arity for c in out.changes} == {2}
    assert_burst_equivalence(srcs)


def test_param_rename_then_method_rename():
    srcs = [
        "class C { void add(int count) { } }",
        "class C { void add(int total) { } }",
        "class C { void plus(int total) { } }",
    ]
    out = consolidate(burst_concat(srcs))
    by_kind = {c.kind: c for c in out.changes}
    assert set(by_kind) == {ChangeKind.METHOD_RENAMED, ChangeKind.PARAM_RENAMED}
    assert render_path_id(by_kind[ChangeKind.PARAM_RENAMED].path) == "Demo/C.java/C/plus/total"
    assert_burst_equivalence(srcs)


def test_consolidate_is_idempotent():
    srcs = [
        "class C { int x = 1; void m(int a) { } }",
        "class C { int x = 2; void m(int a, int b) { } }",
        "class C { long x = 2; void m(int a, int b) { int q; } }",
    ]
    once = consolidate(burst_concat(srcs))
    assert consolidate(once) == once


def test_output_is_renumbered_in_first_contribution_order():
    srcs = [
        "class C { int x = 1; void m() { } }",
        "class C { int x = 2; void m() { int a; } }",
        "class C { int x = 3; void m() { int a; } }",
    ]
    out = consolidate(burst_concat(srcs))
    assert [c.seq for c in out.changes] == [1, 2]
    assert [c.kind for c in out.changes] == [
        ChangeKind.FIELD_VALUE_CHANGED,
        ChangeKind.METHOD_BODY_CHANGED,
    ]


def test_fold_matches_consolidating_the_concatenation():
    srcs = [
        "class C { int x = 1; }",
        "class C { int x = 2; }",
        "class C { int y = 2; }",
    ]
    trees = [parse_unit(s, "C.java") for s in srcs]
    d1 = extract_changes(trees[0], trees[1], "ada", 1, project="Demo", seq_start=1)
    d2 = extract_changes(
        trees[1], trees[2], "ada", 1, project="Demo", seq_start=1 + len(d1.changes)
    )
    folded = fold(fold(None, d1), d2)
    assert essences(folded) == essences(consolidate(burst_concat(srcs)))


def test_aliases_compose_through_consolidation():
    srcs = [
        "class C { void add(int a) { a++; } }",
        "class C { void plus(int a) { a++; } }",
        "class C { void plus(int a, int b) { a++; } }",
    ]
    out = consolidate(burst_concat(srcs))
    aliases = rename_aliases(out)
    pairs = {
        (render_path_id(a.old_path), a.old_path.member.arity,
         render_path_id(a.new_path), a.new_path.member.arity)
        for a in aliases
    }
    assert ("Demo/C.java/C/add", 2, "Demo/C.java/C/plus", 2) in pairs
    assert ("Demo/C.java/C/add", 1, "Demo/C.java/C/add", 2) in pairs
