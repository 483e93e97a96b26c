"""Class hierarchy: atomic classes plus composite (grouped) classes.

A hierarchy is loaded from a nested document of ``{"name": ..., "children":
[...]}`` records (JSON on disk). Leaves, in document order, define the atomic
class indices 0..k-1. Every tree node contributes a composite class: the set
of atomic classes below it. Composites are listed in pre-order (root first),
deduplicated, and include the k atomic singletons, so they form the full
candidate pool of binary questions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from . import bitset


class HierarchyError(ValueError):
    """Malformed hierarchy document or invalid composite structure."""


@dataclass(frozen=True)
class ClassHierarchy:
    """Atomic classes {0..k-1} plus an ordered collection of composite class sets.

    ``composites[j]`` is a bitmask over atomic classes; ``names[j]`` is the
    human-readable label used for question text. ``parents[j]`` is the index
    of the enclosing tree node (None for the root) when the collection came
    from a tree; arbitrary subset collections may leave ``parents`` as None,
    in which case tree-only queries are unavailable.
    """

    k: int
    composites: tuple[int, ...]
    names: tuple[str, ...]
    parents: Optional[tuple[Optional[int], ...]] = None
    _membership: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.k <= 0:
            raise HierarchyError(f"k must be positive, got {self.k}")
        if len(self.composites) != len(self.names):
            raise HierarchyError("composites and names length mismatch")
        full = bitset.full_mask(self.k)
        seen: set[int] = set()
        for j, c in enumerate(self.composites):
            if c == 0:
                raise HierarchyError(f"composite {j} is empty")
            if c & ~full:
                raise HierarchyError(f"composite {j} contains classes outside 0..{self.k - 1}")
            if c in seen:
                raise HierarchyError(f"duplicate composite set at index {j}")
            seen.add(c)
        if self.parents is not None:
            self._validate_tree()

    def _validate_tree(self):
        assert self.parents is not None
        if len(self.parents) != len(self.composites):
            raise HierarchyError("parents and composites length mismatch")
        roots = [j for j, p in enumerate(self.parents) if p is None]
        if len(roots) != 1:
            raise HierarchyError(f"expected exactly one root, found {len(roots)}")
        root = roots[0]
        if self.composites[root] != bitset.full_mask(self.k):
            raise HierarchyError("root composite must cover all atomic classes")
        children: dict[int, list[int]] = {j: [] for j in range(len(self.composites))}
        for j, p in enumerate(self.parents):
            if p is not None:
                if not (0 <= p < len(self.composites)):
                    raise HierarchyError(f"parent index {p} out of range")
                children[p].append(j)
        leaves = []
        for j, kids in children.items():
            cj = self.composites[j]
            if not kids:
                leaves.append(j)
                continue
            covered = 0
            for c in kids:
                ck = self.composites[c]
                if ck & ~cj:
                    raise HierarchyError(f"child {c} not contained in parent {j}")
                if ck & covered:
                    raise HierarchyError(f"children of node {j} overlap")
                covered |= ck
            if covered != cj:
                raise HierarchyError(f"children of node {j} do not cover it")
        if len(leaves) != self.k or any(bitset.size(self.composites[j]) != 1 for j in leaves):
            raise HierarchyError("tree must have exactly k singleton leaves")

    @property
    def m(self) -> int:
        return len(self.composites)

    def membership(self) -> np.ndarray:
        """(m, k) boolean matrix: membership[j, i] iff class i is in composite j.

        Cached; the hierarchy is immutable after construction.
        """
        if self._membership is None:
            mat = np.zeros((self.m, self.k), dtype=bool)
            for j, c in enumerate(self.composites):
                for i in bitset.indices_of(c):
                    mat[j, i] = True
            object.__setattr__(self, "_membership", mat)
        return self._membership

    def leaf_index(self, atomic: int) -> int:
        """Composite index of the singleton {atomic}."""
        if not (0 <= atomic < self.k):
            raise IndexError(f"atomic class {atomic} out of range for k={self.k}")
        target = 1 << atomic
        for j, c in enumerate(self.composites):
            if c == target:
                return j
        raise HierarchyError(f"no singleton composite for class {atomic}")


class _Node:
    __slots__ = ("name", "children", "mask")

    def __init__(self, name: str, children: Optional[list["_Node"]]):
        self.name = name
        self.children = children
        self.mask = 0


def _parse_tree(doc, leaf_names: list[str]) -> _Node:
    if not isinstance(doc, Mapping) or "name" not in doc:
        raise HierarchyError("every node needs a 'name' field")
    name = str(doc["name"])
    kids = doc.get("children")
    if kids is None:
        node = _Node(name, None)
        node.mask = 1 << len(leaf_names)
        leaf_names.append(name)
        return node
    if not isinstance(kids, Sequence) or isinstance(kids, (str, bytes)):
        raise HierarchyError(f"children of {name!r} must be a list")
    if len(kids) == 0:
        raise HierarchyError(f"node {name!r} has an empty children list")
    node = _Node(name, [_parse_tree(kid, leaf_names) for kid in kids])
    for kid in node.children:
        node.mask |= kid.mask
    return node


def load_hierarchy(source: str | Path | Mapping) -> ClassHierarchy:
    """Load and validate a hierarchy from a document or a JSON file path.

    Leaf order in the document defines atomic indices. Composites are emitted
    in pre-order; a node whose set duplicates an already-emitted one (a
    single-child chain) collapses onto the first, shallower occurrence.
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        text = Path(source).read_text(encoding="utf-8")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise HierarchyError(f"invalid hierarchy document: {e}") from e
    if not isinstance(doc, Mapping):
        raise HierarchyError("hierarchy document root must be a node object")

    leaf_names: list[str] = []
    root = _parse_tree(doc, leaf_names)
    if len(leaf_names) != len(set(leaf_names)):
        dupes = sorted({n for n in leaf_names if leaf_names.count(n) > 1})
        raise HierarchyError(f"duplicate leaf names: {dupes}")

    composites: list[int] = []
    names: list[str] = []
    parents: list[Optional[int]] = []
    by_mask: dict[int, int] = {}

    def emit(node: _Node, parent_idx: Optional[int]) -> None:
        idx = by_mask.get(node.mask)
        if idx is None:
            idx = len(composites)
            composites.append(node.mask)
            names.append(node.name)
            parents.append(parent_idx)
            by_mask[node.mask] = idx
        for kid in node.children or ():
            emit(kid, idx)

    emit(root, None)
    return ClassHierarchy(
        k=len(leaf_names),
        composites=tuple(composites),
        names=tuple(names),
        parents=tuple(parents),
    )


def ancestors_of(h: ClassHierarchy, atomic: int) -> list[int]:
    """Composite indices on the root-to-leaf path for one atomic class, leaf first.

    Entry L is the "level-L" coarsening of the exact label; shallow branches
    simply run out before deep ones (callers clip at the last entry, the root).
    """
    if h.parents is None:
        raise HierarchyError("hierarchy has no tree structure")
    if not (0 <= atomic < h.k):
        raise IndexError(f"atomic class {atomic} out of range for k={h.k}")
    path = []
    j: Optional[int] = h.leaf_index(atomic)
    while j is not None:
        path.append(j)
        j = h.parents[j]
    return path


def leaf_names(h: ClassHierarchy) -> list[str]:
    """Names of the atomic singleton composites, in atomic-index order."""
    return [h.names[h.leaf_index(i)] for i in range(h.k)]
