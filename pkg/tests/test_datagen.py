import numpy as np
import pytest

from querylearn.datagen import (
    Dataset,
    assign_partial_labels,
    easy_classes,
    fraction_count,
    gen_hierarchical_gaussians,
    hierarchy_to_doc,
    load_csv,
    load_dir,
    make_adversarial,
    preset_dataset,
    save_dataset,
)
from querylearn.hierarchy import load_hierarchy
from querylearn.labels import PartialLabel
from querylearn.model import TrainConfig, init_classifier, predict_batch, train_arrays


def test_fraction_count_guards_float_dust():
    assert fraction_count(0.05, 1000) == 50
    assert fraction_count(0.051, 100) == 6
    assert fraction_count(0.0, 10) == 0
    assert fraction_count(0.29, 100) == 29


def test_gen_shapes_and_balance():
    ds, h = gen_hierarchical_gaussians(k=4, d=6, n_train=40, n_holdout=20, seed=0)
    assert ds.features.shape == (60, 6)
    assert ds.n_train == 40
    assert h.k == 4
    _, ytr = ds.train_arrays()
    assert [int((ytr == c).sum()) for c in range(4)] == [10, 10, 10, 10]


def test_gen_composite_count_16():
    ds, h = gen_hierarchical_gaussians(k=16, d=8, n_train=32, n_holdout=16, seed=0)
    assert h.m == 31  # full binary tree over 16 leaves


def test_gen_deterministic():
    a, _ = gen_hierarchical_gaussians(k=4, d=6, n_train=30, n_holdout=10, seed=5)
    b, _ = gen_hierarchical_gaussians(k=4, d=6, n_train=30, n_holdout=10, seed=5)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.true_labels, b.true_labels)


def test_gen_rejects_bad_tree_shape():
    with pytest.raises(ValueError):
        gen_hierarchical_gaussians(k=6, d=4, n_train=12, n_holdout=6, branching=2)


def test_gen_two_easy_classes_linearly_learnable():
    ds, h = gen_hierarchical_gaussians(k=2, d=4, n_train=200, n_holdout=100, scales=[8.0], seed=1)
    xs, ys = ds.train_arrays()
    pot = np.zeros((200, 2), dtype=bool)
    pot[np.arange(200), ys] = True
    clf = train_arrays(init_classifier("linear", 2, 4, seed=0), xs, pot, TrainConfig(epochs=30, seed=0))
    xh, yh = ds.holdout_arrays()
    assert (predict_batch(clf, xh).argmax(axis=1) == yh).mean() >= 0.99


class TestAssignPartialLabels:
    def setup_method(self):
        self.ds, self.h = gen_hierarchical_gaussians(k=4, d=6, n_train=40, n_holdout=20, seed=0)

    def test_gamma_one_all_exact(self):
        pls = assign_partial_labels(self.ds, self.h, gamma=1.0, level=2, seed=0)
        assert all(pl.is_exact for pl in pls)

    def test_gamma_zero_deep_level_full_sets(self):
        pls = assign_partial_labels(self.ds, self.h, gamma=0.0, level=99, seed=0)
        assert all(pl.size == 4 for pl in pls)

    def test_level_one_sizes(self):
        pls = assign_partial_labels(self.ds, self.h, gamma=0.2, level=1, seed=0)
        exact = [pl for pl in pls if pl.is_exact]
        partial = [pl for pl in pls if not pl.is_exact]
        assert len(exact) == 8
        assert all(pl.size == 2 for pl in partial)

    def test_contains_truth(self):
        _, y = self.ds.train_arrays()
        for level in (0, 1, 2, 5):
            pls = assign_partial_labels(self.ds, self.h, gamma=0.3, level=level, seed=3)
            assert all(pl.contains(int(y[i])) for i, pl in enumerate(pls))


class TestAdversarial:
    def test_constant_features(self):
        ds, _ = gen_hierarchical_gaussians(k=4, d=6, n_train=40, n_holdout=20, seed=0)
        ads = make_adversarial(ds, 2, seed=9)
        easy = easy_classes(ds, 2, seed=9)
        assert len(set(easy)) == 2
        for cls, value in zip(easy, [1, -1]):
            rows = ads.features[ads.true_labels == cls]
            assert (rows == rows[0, 0]).all()
        # distinct constants per class
        v0 = ads.features[ads.true_labels == easy[0]][0, 0]
        v1 = ads.features[ads.true_labels == easy[1]][0, 0]
        assert v0 != v1
        # untouched elsewhere
        other = ~np.isin(ads.true_labels, easy)
        assert np.array_equal(ads.features[other], ds.features[other])

    def test_zero_is_identity(self):
        ds, _ = gen_hierarchical_gaussians(k=4, d=6, n_train=20, n_holdout=10, seed=0)
        assert make_adversarial(ds, 0) is ds

    def test_too_many_rejected(self):
        ds, _ = gen_hierarchical_gaussians(k=4, d=6, n_train=20, n_holdout=10, seed=0)
        with pytest.raises(ValueError):
            make_adversarial(ds, 5)


class TestCsv:
    def test_round_trip(self, tmp_path):
        ds, h = gen_hierarchical_gaussians(k=4, d=5, n_train=12, n_holdout=6, seed=2)
        save_dataset(ds, h, tmp_path, meta={"origin": "test"})
        back, h2 = load_dir(tmp_path)
        assert np.array_equal(back.features, ds.features)
        assert np.array_equal(back.true_labels, ds.true_labels)
        assert h2.composites == h.composites
        assert back.n_train == ds.n_train

    def test_unknown_label_rejected(self, tmp_path):
        ds, h = gen_hierarchical_gaussians(k=4, d=5, n_train=6, n_holdout=3, seed=2)
        save_dataset(ds, h, tmp_path)
        labels = tmp_path / "labels.csv"
        labels.write_text(labels.read_text().replace("class-00", "mystery"), encoding="utf-8")
        with pytest.raises(ValueError, match="not in hierarchy"):
            load_csv(tmp_path / "features.csv", labels, tmp_path / "hierarchy.json")

    def test_mismatched_rows_rejected(self, tmp_path):
        ds, h = gen_hierarchical_gaussians(k=4, d=5, n_train=6, n_holdout=3, seed=2)
        save_dataset(ds, h, tmp_path)
        labels = tmp_path / "labels.csv"
        lines = labels.read_text().splitlines()
        labels.write_text("\n".join(lines[:-2]) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="labels"):
            load_csv(tmp_path / "features.csv", labels, tmp_path / "hierarchy.json")


def test_hierarchy_doc_round_trip():
    _, h = gen_hierarchical_gaussians(k=8, d=4, n_train=16, n_holdout=8, seed=0)
    doc = hierarchy_to_doc(h)
    again = load_hierarchy(doc)
    assert again.composites == h.composites
    assert again.names == h.names


def test_presets():
    ds, h = preset_dataset("synth4")
    assert h.k == 4 and ds.n_train == 200
    with pytest.raises(ValueError):
        preset_dataset("synth3")


def test_coarse_task_easier_than_atomic():
    # training on parent-level labels yields better parent-level accuracy than
    # the exact-label model's atomic accuracy: the coarse problem is easier
    wins = 0
    for seed in range(3):
        ds, h = gen_hierarchical_gaussians(k=8, d=16, n_train=400, n_holdout=400, seed=seed)
        xs, ys = ds.train_arrays()
        xh, yh = ds.holdout_arrays()
        parent = np.array([y // 2 for y in range(8)])  # level-1 group per class

        exact_pot = np.zeros((400, 8), dtype=bool)
        exact_pot[np.arange(400), ys] = True
        cfg = TrainConfig(epochs=60, seed=seed)
        clf = train_arrays(init_classifier("linear", 8, 16, seed=0), xs, exact_pot, cfg)
        atomic_acc = (predict_batch(clf, xh).argmax(axis=1) == yh).mean()

        coarse_pot = np.zeros((400, 8), dtype=bool)
        for i, y in enumerate(ys):
            coarse_pot[i, 2 * (y // 2)] = True
            coarse_pot[i, 2 * (y // 2) + 1] = True
        clf2 = train_arrays(init_classifier("linear", 8, 16, seed=0), xs, coarse_pot, cfg)
        coarse_pred = parent[predict_batch(clf2, xh).argmax(axis=1)]
        coarse_acc = (coarse_pred == parent[yh]).mean()
        wins += coarse_acc > atomic_acc
    assert wins >= 2
