"""Dataset construction: synthetic hierarchical Gaussians, CSV ingestion,
pre-assigned partial labels, and the constant-feature "easy class" perturbation.

The synthetic generator places class means by a recursive random walk down a
balanced tree: each child mean is its parent's mean plus a shrinking random
offset, so classes that share a coarse ancestor are closer together and the
coarse distinctions are easier than the fine ones. Features are the class
mean plus unit Gaussian noise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import hierarchy as hier
from .hierarchy import ClassHierarchy, load_hierarchy
from .labels import PartialLabel


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with hidden true labels and a train/holdout split.

    True labels are consumed only by annotators (to answer questions) and by
    evaluation/diagnostics; the learner itself never reads them.
    """

    features: np.ndarray  # (n, d) float64
    true_labels: np.ndarray  # (n,) int64
    train_indices: np.ndarray
    holdout_indices: np.ndarray
    display: Optional[Sequence[str]] = None  # e.g. image paths for the UI

    def __post_init__(self):
        n = self.features.shape[0]
        if n == 0:
            raise ValueError("dataset is empty")
        if len(self.true_labels) != n:
            raise ValueError("features/labels row counts differ")
        if np.intersect1d(self.train_indices, self.holdout_indices).size:
            raise ValueError("train and holdout splits overlap")

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n_train(self) -> int:
        return len(self.train_indices)

    def train_arrays(self):
        return self.features[self.train_indices], self.true_labels[self.train_indices]

    def holdout_arrays(self):
        return self.features[self.holdout_indices], self.true_labels[self.holdout_indices]


def fraction_count(fraction: float, n: int) -> int:
    """ceil(fraction * n), guarded against float dust (0.05*1000 -> 50, not 51)."""
    return int(math.ceil(fraction * n - 1e-9))


# Named synthetic datasets usable anywhere a data directory is accepted.
# synth16 is the standard desk-scale benchmark: coarse groups easy, sibling
# classes hard but learnable.
PRESETS: dict[str, dict] = {
    "synth4": dict(k=4, d=8, n_train=200, n_holdout=100, scales=(4.0, 2.0)),
    "synth16": dict(k=16, d=32, n_train=2000, n_holdout=1000, scales=(4.0, 2.0, 1.0, 0.75)),
}


def preset_dataset(name: str, data_seed: int = 0):
    """Instantiate a named synthetic dataset (see PRESETS)."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; options: {sorted(PRESETS)}")
    return gen_hierarchical_gaussians(seed=data_seed, **PRESETS[name])


def _balanced_labels(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    counts = np.full(k, n // k)
    counts[: n % k] += 1
    labels = np.repeat(np.arange(k), counts)
    return rng.permutation(labels)


def _build_tree_doc(k: int, branching: int) -> tuple[dict, int]:
    depth = round(math.log(k, branching)) if k > 1 else 0
    if branching < 2 or branching**depth != k:
        raise ValueError(f"k={k} is not a power of branching={branching}")

    leaf_counter = [0]

    def node(level: int) -> dict:
        if level == depth:
            i = leaf_counter[0]
            leaf_counter[0] += 1
            return {"name": f"class-{i:02d}"}
        kids = [node(level + 1) for _ in range(branching)]
        if level == 0:
            return {"name": "all", "children": kids}
        return {"name": f"group-{level}-{leaf_counter[0] // branching ** (depth - level) - 1}", "children": kids}

    return node(0), depth


def gen_hierarchical_gaussians(
    k: int,
    d: int,
    n_train: int,
    n_holdout: int,
    branching: int = 2,
    scales: Optional[Sequence[float]] = None,
    root_scale: float = 4.0,
    scale_decay: float = 0.5,
    seed: int = 0,
) -> tuple[Dataset, ClassHierarchy]:
    """Balanced-tree Gaussian mixture plus the matching class hierarchy.

    ``scales[L]`` is the offset magnitude between a level-L node and its
    children; by default it decays geometrically so coarse composites are
    far apart and siblings nearly overlap.
    """
    doc, depth = _build_tree_doc(k, branching)
    h = load_hierarchy(doc)
    if scales is None:
        scales = [root_scale * scale_decay**i for i in range(depth)]
    if len(scales) != depth:
        raise ValueError(f"need {depth} per-level scales, got {len(scales)}")

    rng = np.random.default_rng(seed)
    means = np.zeros((k, d))

    def place(mean: np.ndarray, level: int, lo: int, hi: int) -> None:
        if level == depth:
            means[lo] = mean
            return
        span = (hi - lo) // branching
        # centered, equal-magnitude sibling offsets: every group at one level
        # is equally separable, so no class is accidentally trivial
        offsets = rng.standard_normal((branching, d))
        offsets -= offsets.mean(axis=0)
        offsets *= scales[level] / np.linalg.norm(offsets, axis=1, keepdims=True)
        for b in range(branching):
            place(mean + offsets[b], level + 1, lo + b * span, lo + (b + 1) * span)

    place(np.zeros(d), 0, 0, k)

    labels = np.concatenate(
        [_balanced_labels(k, n_train, rng), _balanced_labels(k, n_holdout, rng)]
    )
    features = means[labels] + rng.standard_normal((n_train + n_holdout, d))
    ds = Dataset(
        features=features,
        true_labels=labels,
        train_indices=np.arange(n_train),
        holdout_indices=np.arange(n_train, n_train + n_holdout),
    )
    return ds, h


def assign_partial_labels(
    dataset: Dataset,
    h: ClassHierarchy,
    gamma: float,
    level: int,
    seed: int = 0,
) -> list[PartialLabel]:
    """Pre-assigned labels for the train split: a seeded gamma-fraction is
    exact, the rest are the level-th ancestor of their true class (clipped
    at the root for shallow branches)."""
    if not (0.0 <= gamma <= 1.0):
        raise ValueError("gamma must be in [0, 1]")
    if level < 0:
        raise ValueError("level must be >= 0")
    _, y = dataset.train_arrays()
    n = len(y)
    rng = np.random.default_rng(seed)
    exact = np.zeros(n, dtype=bool)
    exact[rng.choice(n, size=fraction_count(gamma, n), replace=False)] = True
    paths = [hier.ancestors_of(h, a) for a in range(h.k)]
    out = []
    for i in range(n):
        path = paths[int(y[i])]
        idx = 0 if exact[i] else min(level, len(path) - 1)
        out.append(PartialLabel(h.composites[path[idx]]))
    return out


def make_adversarial(dataset: Dataset, easy_class_count: int, seed: int = 0) -> Dataset:
    """Replace the features of a few randomly chosen classes by per-class
    constant vectors (spread between the data's max and min magnitude), making
    those classes trivially recognizable."""
    k = int(dataset.true_labels.max()) + 1
    if easy_class_count > k:
        raise ValueError("more easy classes than classes")
    if easy_class_count == 0:
        return dataset
    rng = np.random.default_rng(seed)
    easy = rng.choice(k, size=easy_class_count, replace=False)
    amp = float(np.abs(dataset.features).max())
    values = np.linspace(amp, -amp, easy_class_count)
    features = dataset.features.copy()
    for cls, val in zip(easy, values):
        features[dataset.true_labels == cls] = val
    return replace(dataset, features=features)


def easy_classes(dataset: Dataset, easy_class_count: int, seed: int = 0) -> np.ndarray:
    """The classes make_adversarial(seed) picks, for diagnostics."""
    k = int(dataset.true_labels.max()) + 1
    rng = np.random.default_rng(seed)
    return rng.choice(k, size=easy_class_count, replace=False)


def load_csv(
    features_path: str | Path,
    labels_path: str | Path,
    hierarchy_path: str | Path,
    holdout_fraction: float = 0.0,
    seed: int = 0,
) -> tuple[Dataset, ClassHierarchy]:
    """Read a dataset from disk.

    features: comma-separated floats, one row per example, no header.
    labels: one leaf name per line, aligned with the feature rows.
    """
    h = load_hierarchy(hierarchy_path)
    features = np.loadtxt(features_path, delimiter=",", dtype=np.float64, ndmin=2)
    names = [ln.strip() for ln in Path(labels_path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if len(names) != features.shape[0]:
        raise ValueError(f"{features.shape[0]} feature rows but {len(names)} labels")
    index_of = {name: i for i, name in enumerate(hier.leaf_names(h))}
    unknown = sorted({n for n in names if n not in index_of})
    if unknown:
        raise ValueError(f"label names not in hierarchy: {unknown}")
    labels = np.asarray([index_of[n] for n in names], dtype=np.int64)

    n = len(labels)
    order = np.random.default_rng(seed).permutation(n)
    n_hold = fraction_count(holdout_fraction, n)
    ds = Dataset(
        features=features,
        true_labels=labels,
        train_indices=np.sort(order[n_hold:]),
        holdout_indices=np.sort(order[:n_hold]),
    )
    return ds, h


def save_dataset(dataset: Dataset, h: ClassHierarchy, out_dir: str | Path, meta: Optional[dict] = None) -> None:
    """Write features.csv / labels.csv / hierarchy.json (+ meta.json sidecar)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "features.csv", dataset.features, delimiter=",", fmt="%.17g")
    names = hier.leaf_names(h)
    (out / "labels.csv").write_text(
        "\n".join(names[int(y)] for y in dataset.true_labels) + "\n", encoding="utf-8"
    )
    (out / "hierarchy.json").write_text(
        json.dumps(hierarchy_to_doc(h), indent=2) + "\n", encoding="utf-8"
    )
    sidecar = dict(meta or {})
    sidecar.setdefault("n_train", int(dataset.n_train))
    sidecar.setdefault("n_holdout", int(len(dataset.holdout_indices)))
    (out / "meta.json").write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def load_dir(data_dir: str | Path) -> tuple[Dataset, ClassHierarchy]:
    """Read back a save_dataset directory, restoring the train/holdout split."""
    data_dir = Path(data_dir)
    meta = json.loads((data_dir / "meta.json").read_text(encoding="utf-8"))
    ds, h = load_csv(
        data_dir / "features.csv", data_dir / "labels.csv", data_dir / "hierarchy.json"
    )
    n_train = int(meta["n_train"])
    ds = replace(
        ds,
        train_indices=np.arange(n_train),
        holdout_indices=np.arange(n_train, len(ds.true_labels)),
    )
    return ds, h


def hierarchy_to_doc(h: ClassHierarchy) -> dict:
    """Nested {name, children} document reproducing the hierarchy."""
    if h.parents is None:
        raise ValueError("hierarchy has no tree structure")
    kids: dict[int, list[int]] = {j: [] for j in range(h.m)}
    root = None
    for j, p in enumerate(h.parents):
        if p is None:
            root = j
        else:
            kids[p].append(j)

    def node(j: int) -> dict:
        if not kids[j]:
            return {"name": h.names[j]}
        return {"name": h.names[j], "children": [node(c) for c in sorted(kids[j])]}

    assert root is not None
    return node(root)
