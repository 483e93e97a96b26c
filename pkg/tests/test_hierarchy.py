import json

import pytest

from querylearn import bitset
from querylearn.hierarchy import (
    ClassHierarchy,
    HierarchyError,
    ancestors_of,
    leaf_names,
    load_hierarchy,
)

FLAT3 = {"name": "root", "children": [{"name": "a"}, {"name": "b"}, {"name": "c"}]}
BAL4 = {
    "name": "root",
    "children": [
        {"name": "left", "children": [{"name": "a"}, {"name": "b"}]},
        {"name": "right", "children": [{"name": "c"}, {"name": "d"}]},
    ],
}


def masks(h):
    return [sorted(bitset.indices_of(c)) for c in h.composites]


def test_flat_tree_composites():
    h = load_hierarchy(FLAT3)
    assert h.k == 3
    assert h.m == 4
    assert masks(h) == [[0, 1, 2], [0], [1], [2]]
    assert h.names == ("root", "a", "b", "c")


def test_balanced_tree_composites():
    h = load_hierarchy(BAL4)
    assert h.k == 4
    assert h.m == 7
    assert masks(h) == [[0, 1, 2, 3], [0, 1], [0], [1], [2, 3], [2], [3]]


def test_load_from_file(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps(BAL4), encoding="utf-8")
    assert load_hierarchy(p) == load_hierarchy(BAL4)


def test_duplicate_leaf_names_rejected():
    doc = {"name": "root", "children": [{"name": "a"}, {"name": "a"}]}
    with pytest.raises(HierarchyError, match="duplicate leaf"):
        load_hierarchy(doc)


def test_empty_children_rejected():
    doc = {"name": "root", "children": [{"name": "a"}, {"name": "b", "children": []}]}
    with pytest.raises(HierarchyError, match="empty children"):
        load_hierarchy(doc)


def test_malformed_document_rejected(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(HierarchyError):
        load_hierarchy(p)
    with pytest.raises(HierarchyError):
        load_hierarchy({"children": [{"name": "a"}]})


def test_single_child_chain_collapses():
    doc = {
        "name": "root",
        "children": [
            {"name": "wrap", "children": [{"name": "a"}]},
            {"name": "b"},
        ],
    }
    h = load_hierarchy(doc)
    # wrap == {a}: deduplicated, shallower name survives
    assert h.m == 3
    assert masks(h) == [[0, 1], [0], [1]]
    assert h.names == ("root", "wrap", "b")


def test_ancestors_balanced():
    h = load_hierarchy(BAL4)
    path = ancestors_of(h, 0)
    assert [sorted(bitset.indices_of(h.composites[j])) for j in path] == [[0], [0, 1], [0, 1, 2, 3]]


def test_ancestors_flat():
    h = load_hierarchy(FLAT3)
    path = ancestors_of(h, 2)
    assert [sorted(bitset.indices_of(h.composites[j])) for j in path] == [[2], [0, 1, 2]]


def test_ancestors_out_of_range():
    h = load_hierarchy(BAL4)
    with pytest.raises(IndexError):
        ancestors_of(h, 9)


def test_ancestors_nested_and_containing():
    h = load_hierarchy(BAL4)
    for a in range(h.k):
        path = ancestors_of(h, a)
        prev = 0
        for j in path:
            c = h.composites[j]
            assert bitset.contains(c, a)
            assert (prev & ~c) == 0  # each level contains the previous
            prev = c


def test_load_deterministic():
    h1 = load_hierarchy(json.loads(json.dumps(BAL4)))
    h2 = load_hierarchy(json.loads(json.dumps(BAL4)))
    assert h1.composites == h2.composites
    assert h1.names == h2.names
    assert h1.parents == h2.parents


def test_leaf_names():
    assert leaf_names(load_hierarchy(BAL4)) == ["a", "b", "c", "d"]


def test_type_rejects_bad_collections():
    with pytest.raises(HierarchyError):
        ClassHierarchy(k=2, composites=(0b11, 0b11), names=("x", "y"))
    with pytest.raises(HierarchyError):
        ClassHierarchy(k=2, composites=(0b100,), names=("x",))
    with pytest.raises(HierarchyError):
        ClassHierarchy(k=2, composites=(0,), names=("x",))


def test_type_accepts_arbitrary_subsets_without_tree():
    h = ClassHierarchy(k=3, composites=(0b101, 0b011), names=("odd", "low"))
    assert h.m == 2


def test_tree_validation_catches_overlap():
    # children overlap: {0,1} and {1,2} under root {0,1,2}
    with pytest.raises(HierarchyError, match="overlap"):
        ClassHierarchy(
            k=3,
            composites=(0b111, 0b011, 0b110),
            names=("r", "x", "y"),
            parents=(None, 0, 0),
        )


def test_membership_matrix():
    h = load_hierarchy(BAL4)
    mat = h.membership()
    assert mat.shape == (7, 4)
    assert mat[0].all()
    assert list(mat[1]) == [True, True, False, False]
