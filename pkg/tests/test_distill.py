"""extract_changes against the golden pairs plus matching-pass behavior."""

import pytest

from conflict_radar.distill import MismatchedFile, extract_changes, rename_aliases
from conflict_radar.model import ChangeKind, render_path_id
from conflict_radar.syntax.parser import parse_unit

from golden import ALL_PAIRS, TAXONOMY_PAIRS


def diff_sources(old_src, new_src, file_path="C.java", author="ada", base=1):
    old = parse_unit(old_src, file_path)
    new = parse_unit(new_src, file_path)
    return extract_changes(old, new, author, base, project="Demo")


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=lambda p: p.kind.value)
def test_golden_pair(pair):
    cs = diff_sources(pair.old_src, pair.new_src)
    assert [c.kind for c in cs.changes] == [pair.kind]
    c = cs.changes[0]
    assert c.old_value == pair.old_value
    assert c.new_value == pair.new_value
    assert render_path_id(c.path) == pair.path_id
    covered = pair.new_src[c.decoration_span.start_byte : c.decoration_span.end_byte]
    assert covered == pair.span_text
    assert c.author == "ada"
    assert c.base_revision == 1
    assert c.seq == 1


def test_taxonomy_covers_twelve_kinds():
    assert len({p.kind for p in TAXONOMY_PAIRS}) == 12


def test_body_change_carries_frozen_fingerprints():
    cs = diff_sources("class C { void m() { int a; } }", "class C { void m() { int b; } }")
    c = cs.changes[0]
    assert c.old_fingerprint == 0x4F5B86A74DE832AA
    assert c.new_fingerprint == 0x23FA289B731F18DF


def test_self_diff_is_empty():
    src = "public class Zoo { int gate = 3; void feed(int pen, String meal) { gate++; } }"
    assert diff_sources(src, src).changes == ()


def test_formatting_only_edit_is_invisible():
    old = "class C { void m() { int x = 1; } }"
    new = "class C {\n  void m() {\n    int x /* note */ = 1;\n  }\n}"
    assert diff_sources(old, new).changes == ()


def test_mismatched_file_paths_raise():
    a = parse_unit("class C { }", "A.java")
    b = parse_unit("class C { }", "B.java")
    with pytest.raises(MismatchedFile):
        extract_changes(a, b, "ada", 1, project="Demo")


def test_rename_does_not_mask_other_edits():
    # Field rename qualifies on identical type and initializer; the
    # accessibility difference rides along as a second change.
    cs = diff_sources(
        "class C { private int count = 1; }",
        "class C { public int total = 1; }",
    )
    kinds = [c.kind for c in cs.changes]
    assert kinds == [ChangeKind.FIELD_RENAMED, ChangeKind.FIELD_ACCESSIBILITY_CHANGED]
    assert all(render_path_id(c.path) == "Demo/C.java/C/total" for c in cs.changes)


def test_field_rename_requires_same_type_and_value():
    # Different initializer: treated as remove + add, not a rename.
    cs = diff_sources("class C { int count = 1; }", "class C { int total = 2; }")
    kinds = {c.kind for c in cs.changes}
    assert kinds == {ChangeKind.ELEMENT_REMOVED, ChangeKind.ELEMENT_ADDED}


def test_method_rename_requires_same_signature_and_body():
    cs = diff_sources(
        "class C { void add(int a) { a++; } }",
        "class C { void plus(int a) { a--; } }",
    )
    kinds = {c.kind for c in cs.changes}
    assert kinds == {ChangeKind.ELEMENT_REMOVED, ChangeKind.ELEMENT_ADDED}


def test_overload_edit_touches_only_matching_arity():
    cs = diff_sources(
        "class C { void m() { } void m(int a) { int x; } }",
        "class C { void m() { } void m(int a) { int y; } }",
    )
    assert [c.kind for c in cs.changes] == [ChangeKind.METHOD_BODY_CHANGED]
    assert cs.changes[0].path.member.arity == 1


def test_arity_change_is_a_param_edit_not_remove_add():
    cs = diff_sources(
        "class C { void m(int a) { } }",
        "class C { void m(int a, int b, int c) { } }",
    )
    kinds = [c.kind for c in cs.changes]
    assert kinds == [ChangeKind.PARAM_ADDED, ChangeKind.PARAM_ADDED]
    assert [c.attributes["paramIndex"] for c in cs.changes] == ["1", "2"]
    assert all(c.attributes["oldArity"] == "1" for c in cs.changes)
    assert all(c.attributes["newArity"] == "3" for c in cs.changes)


def test_param_reorder_reads_as_positional_edits():
    cs = diff_sources(
        "class C { void m(int a, String b) { } }",
        "class C { void m(String b, int a) { } }",
    )
    kinds = sorted(c.kind.value for c in cs.changes)
    assert kinds == sorted(
        [
            ChangeKind.PARAM_RENAMED.value,
            ChangeKind.PARAM_TYPE_CHANGED.value,
            ChangeKind.PARAM_RENAMED.value,
            ChangeKind.PARAM_TYPE_CHANGED.value,
        ]
    )


def test_added_class_cascades_to_members():
    cs = diff_sources(
        "class C { }",
        "class C { } class D { int x; void m() { } }",
        file_path="C.java",
    )
    ids = [render_path_id(c.path) for c in cs.changes]
    assert ids == ["Demo/C.java/D", "Demo/C.java/D/x", "Demo/C.java/D/m"]
    assert all(c.kind == ChangeKind.ELEMENT_ADDED for c in cs.changes)


def test_removed_nested_class_cascades():
    cs = diff_sources(
        "class C { class D { int x; } }",
        "class C { }",
    )
    ids = [render_path_id(c.path) for c in cs.changes]
    assert ids == ["Demo/C.java/C/D", "Demo/C.java/C/D/x"]
    assert all(c.kind == ChangeKind.ELEMENT_REMOVED for c in cs.changes)


def test_added_element_snapshot_attributes():
    cs = diff_sources("class C { }", "class C { private static int x = 5; }")
    (c,) = cs.changes
    assert c.attributes["accessibility"] == "private"
    assert c.attributes["modifiers"] == "static"
    assert c.attributes["type"] == "int"
    assert c.attributes["initializer"] == "5"


def test_seq_numbering_and_start():
    cs = diff_sources("class C { int a; int b; }", "class C { long a; long b; }")
    assert [c.seq for c in cs.changes] == [1, 2]
    old = parse_unit("class C { int a; }", "C.java")
    new = parse_unit("class C { long a; }", "C.java")
    shifted = extract_changes(old, new, "ada", 1, project="Demo", seq_start=10)
    assert [c.seq for c in shifted.changes] == [10]


def test_rename_alias_from_field_rename():
    cs = diff_sources("class C { int count; }", "class C { int total; }")
    (alias,) = rename_aliases(cs)
    assert render_path_id(alias.old_path) == "Demo/C.java/C/count"
    assert render_path_id(alias.new_path) == "Demo/C.java/C/total"
    assert alias.author == "ada"


def test_rename_alias_paths_differ_in_one_segment():
    cs = diff_sources(
        "class C { void add(int a) { a++; } }",
        "class C { void plus(int a) { a++; } }",
    )
    (alias,) = rename_aliases(cs)
    assert alias.old_path.member.name == "add"
    assert alias.new_path.member.name == "plus"
    assert alias.old_path.member.arity == alias.new_path.member.arity == 1
    assert alias.old_path.class_chain == alias.new_path.class_chain


def test_arity_shift_produces_member_alias():
    cs = diff_sources("class C { void m(int a) { } }", "class C { void m(int a, int b) { } }")
    (alias,) = rename_aliases(cs)
    assert alias.old_path.member.arity == 1
    assert alias.new_path.member.arity == 2
    assert alias.old_path.member.name == alias.new_path.member.name == "m"
