"""Hierarchies, partial labels, and the binary-feedback update.

A composite class groups atomic classes ("dog" covers the dog breeds). Each
yes/no answer about a composite shrinks an example's partial label - the set
of classes not yet ruled out - until one class remains.
"""

from querylearn import PartialLabel, ancestors_of, is_informative, load_hierarchy, update
from querylearn.bitset import indices_of

doc = {
    "name": "everything",
    "children": [
        {
            "name": "animal",
            "children": [
                {"name": "dog", "children": [{"name": "beagle"}, {"name": "bulldog"}]},
                {"name": "cat"},
            ],
        },
        {"name": "vehicle", "children": [{"name": "car"}, {"name": "bicycle"}]},
    ],
}

h = load_hierarchy(doc)
print(f"{h.k} atomic classes, {h.m} composites (questions we can ask):")
for j, (name, c) in enumerate(zip(h.names, h.composites)):
    print(f"  [{j}] {name:<11} covers {indices_of(c)}")

print("\nroot-to-leaf path for 'beagle' (atomic 0), coarsest last:")
for level, j in enumerate(ancestors_of(h, 0)):
    print(f"  level {level}: {h.names[j]}")

print("\nannotating one example whose true class is 'bulldog' (atomic 1):")
pl = PartialLabel.full(h.k)
for name in ("animal", "dog", "beagle"):
    j = h.names.index(name)
    c = h.composites[j]
    answer = 1 if 1 in indices_of(c) else 0
    assert is_informative(pl, c)
    pl = update(pl, c, answer)
    print(f"  'Is it a {name}?' -> {'yes' if answer else 'no'}; potential set now {pl.classes()}")
print(f"exact label reached: class {pl.exact_class()} = {h.names[h.leaf_index(pl.exact_class())]}")

uninformative = h.composites[h.names.index("vehicle")]
print(f"\nasking 'vehicle' now would be uninformative: {is_informative(pl, uninformative)}")
