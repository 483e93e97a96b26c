"""The live annotation loop over HTTP.

Starts the service in-process, creates a session on a small dataset, and
plays the human: fetch the pending question, answer it, repeat. The same
engine drives oracle simulations, so a scripted session reproduces exactly
what `querylearn simulate` would have asked.
"""

import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from querylearn.bitset import contains
from querylearn.cli import main as cli
from querylearn.datagen import load_dir
from querylearn.service import create_app

workdir = Path(tempfile.mkdtemp(prefix="querylearn-demo-"))
data_dir = workdir / "data"
cli(["gen-data", "--k", "4", "--d", "6", "--n", "20", "--n-holdout", "8", "--seed", "1", "--out", str(data_dir)])
ds, h = load_dir(data_dir)
truth = ds.train_arrays()[1]

client = TestClient(create_app(session_dir=workdir / "sessions"))
created = client.post(
    "/sessions",
    json={
        "data": str(data_dir),
        "config": {"mode": "alpf-erc", "warm_start_fraction": 0.1, "retrain_interval": 30, "epochs": 5, "seed": 5},
    },
).json()
sid = created["session_id"]
print(f"session {sid} created; first prompt: {created['question']['prompt']!r}\n")

shown = 0
while True:
    r = client.get(f"/sessions/{sid}/question").json()
    if r["status"] == "retraining":
        time.sleep(0.05)
        continue
    if r["status"] in ("complete", "exhausted"):
        break
    q = r["question"]
    answer = 1 if contains(h.composites[q["composite_index"]], int(truth[q["example_index"]])) else 0
    if shown < 6:
        print(f"  example {q['example_index']:>2}: {q['prompt']:<28} -> {'yes' if answer else 'no'}")
        shown += 1
    elif shown == 6:
        print("  ...")
        shown += 1
    client.post(f"/sessions/{sid}/answer", json={"question_id": q["question_id"], "answer": answer})

metrics = client.get(f"/sessions/{sid}/metrics").json()
live = metrics["live"]
print(f"\nsession {live['status']}: {live['questions_asked']} questions,")
print(f"fraction exact {live['fraction_exact']:.2f}, final holdout accuracy {live['accuracy']:.2f}")
print(f"artifacts persisted under {workdir / 'sessions' / sid}")
