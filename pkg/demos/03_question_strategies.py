"""What each question score looks at.

For one example with predictive distribution yhat and potential set y, every
informative composite c gets a score: expected information gain (entropy
drop), expected remaining classes, expected decrease in classes, and the
even-split distance used by the passive policy.
"""

import numpy as np

from querylearn import PartialLabel, binary_split_question, edc, eig, erc, is_informative, load_hierarchy
from querylearn.bitset import indices_of

h = load_hierarchy(
    {
        "name": "root",
        "children": [
            {"name": "left", "children": [{"name": "a"}, {"name": "b"}]},
            {"name": "right", "children": [{"name": "c"}, {"name": "d"}]},
        ],
    }
)

yhat = np.array([0.55, 0.25, 0.15, 0.05])
pl = PartialLabel.full(4)
print(f"model prediction {yhat}, potential set {pl.classes()}\n")
print(f"{'composite':<10} {'covers':<10} {'eig':>7} {'erc':>7} {'edc':>7}")
for j, c in enumerate(h.composites):
    if not is_informative(pl, c):
        print(f"{h.names[j]:<10} {str(indices_of(c)):<10} {'(uninformative: answer already known)'}")
        continue
    print(
        f"{h.names[j]:<10} {str(indices_of(c)):<10}"
        f" {eig(yhat, pl, c):7.3f} {erc(yhat, pl, c):7.3f} {edc(yhat, pl, c):7.3f}"
    )

split = binary_split_question(yhat, pl, h.composites)
print(f"\neven-split policy picks '{h.names[split]}' (mass closest to one half)")
print("eig is maximized where the predicted yes-probability is nearest 0.5;")
print("erc chases cheap exact labels, and is lowest when one answer nails the class.")

pair = PartialLabel.of([0, 1])
j = next(j for j, c in enumerate(h.composites) if is_informative(pair, c))
print(f"\nwith only two classes left {pair.classes()}, any informative question")
print(f"guarantees an exact label: erc = {erc(yhat, pair, h.composites[j])}")
