"""Cheap-first selection and its failure mode.

Two classes are made trivially recognizable (all features replaced by a
per-class constant). A learner that minimizes expected remaining classes
grabs those nearly-free exact labels first and only then works on the rest -
efficient here, but worth watching when easy classes dominate a pool.
"""

import numpy as np

from querylearn import ExperimentConfig, OracleAnnotator, TrainConfig, make_adversarial, run
from querylearn.datagen import easy_classes, preset_dataset

ds, h = preset_dataset("synth16", data_seed=0)
adv = make_adversarial(ds, easy_class_count=2, seed=7)
easy = sorted(int(c) for c in easy_classes(ds, 2, seed=7))
truth = adv.train_arrays()[1]
n_easy = int(np.isin(truth, easy).sum())
print(f"easy classes: {easy} ({n_easy} of {len(truth)} training examples)\n")

cfg = ExperimentConfig(mode="alpf-erc", retrain_interval=250, seed=0, train=TrainConfig(epochs=300))
history, exp = run(cfg, adv, h, OracleAnnotator(truth))

warm = history[0].questions_asked
first = exp.audit[warm : warm + n_easy]
frac = sum(1 for e in first if int(truth[e.example_index]) in easy) / n_easy
print(f"within the first {n_easy} active selections, {frac:.0%} target easy-class examples")

print("\nper-round share of selections on easy classes:")
for rm in history:
    total = sum(rm.selected_class_counts)
    share = sum(rm.selected_class_counts[c] for c in easy) / total if total else 0.0
    bar = "#" * int(40 * share)
    print(f"  round at {rm.questions_asked:>6} questions |{bar:<40}| {share:.2f}")
print("\nthe easy classes are exhausted first, then attention moves on.")
