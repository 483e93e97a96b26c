"""Head-to-head: passive splitting vs active questions vs free pair choice.

Runs the full annotation loop on the synth16 benchmark until every training
example is exactly labeled, then compares total labeling cost and the
accuracy trajectory at a shared checkpoint. Takes a minute or two.
"""

import numpy as np

from querylearn import ExperimentConfig, OracleAnnotator, TrainConfig, run
from querylearn.datagen import preset_dataset

ds, h = preset_dataset("synth16", data_seed=0)
oracle = OracleAnnotator(ds.train_arrays()[1])
train = TrainConfig(epochs=300)


def accuracy_at(history, spend):
    acc = None
    for rm in history:
        if rm.questions_asked <= spend:
            acc = rm.accuracy
    return acc


results = {}
for mode in ("baseline", "al-lc", "aq-erc", "alpf-erc"):
    cfg = ExperimentConfig(mode=mode, retrain_interval=250, seed=1, train=train)
    history, exp = run(cfg, ds, h, oracle)
    results[mode] = (history, exp.questions_asked)
    print(f"{mode:<9} fully labeled after {exp.questions_asked} questions")

base_cost = results["baseline"][1]
checkpoint = int(0.3 * base_cost)
print(f"\naccuracy at a shared spend of {checkpoint} questions (30% of baseline cost):")
for mode, (history, cost) in results.items():
    print(f"  {mode:<9} {accuracy_at(history, checkpoint):.3f}   (total cost {cost / base_cost:.2f}x baseline)")

print("\nfraction of examples exactly labeled per round (alpf-erc):")
hist = results["alpf-erc"][0]
for rm in hist[:: max(1, len(hist) // 8)]:
    bar = "#" * int(40 * rm.fraction_exact)
    print(f"  {rm.questions_asked:>6} questions |{bar:<40}| {rm.fraction_exact:.2f}")
