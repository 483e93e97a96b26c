"""Run artifacts: metrics tables, audit logs, and reproduction manifests.

Formatting is deliberately plain and deterministic: identical runs must
produce byte-identical files. Floats use Python's shortest round-trip repr.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Iterable, Sequence

from .engine import AuditEntry, ExperimentConfig, RoundMetrics


def _fmt(x: float) -> str:
    return repr(float(x))


def metrics_csv(history: Sequence[RoundMetrics], k: int) -> str:
    header = ["questions_asked", "accuracy", "fraction_exact", "mean_remaining", "mean_selected_entropy"]
    header += [f"sel_class_{i}" for i in range(k)]
    lines = [",".join(header)]
    for rm in history:
        row = [
            str(rm.questions_asked),
            _fmt(rm.accuracy),
            _fmt(rm.fraction_exact),
            _fmt(rm.mean_remaining),
            _fmt(rm.mean_selected_entropy),
        ]
        row += [str(c) for c in rm.selected_class_counts]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def metrics_json(history: Sequence[RoundMetrics]) -> str:
    rows = []
    for rm in history:
        row = dataclasses.asdict(rm)
        row["selected_class_counts"] = list(rm.selected_class_counts)
        rows.append(row)
    return json.dumps(rows, indent=2, allow_nan=True) + "\n"


def audit_line(entry: AuditEntry) -> str:
    return f"{entry.t},{entry.example_index},{entry.composite_index},{entry.answer}"


def audit_log(entries: Iterable[AuditEntry]) -> str:
    return "".join(audit_line(e) + "\n" for e in entries)


def parse_audit_line(line: str) -> AuditEntry:
    t, ex, comp, ans = (int(p) for p in line.strip().split(","))
    return AuditEntry(t, ex, comp, ans)


def read_audit_log(path: str | Path) -> list[AuditEntry]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [parse_audit_line(ln) for ln in lines if ln.strip()]


def config_dict(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["train"] = dataclasses.asdict(cfg.train)
    return d


def config_from_dict(d: dict) -> ExperimentConfig:
    from .model import TrainConfig

    d = dict(d)
    train = d.pop("train", {})
    return ExperimentConfig(train=TrainConfig(**train), **d)


def build_manifest(cfg: ExperimentConfig, dataset_ref: dict, version: str) -> dict:
    return {"version": version, "dataset": dataset_ref, "config": config_dict(cfg)}


def write_run_artifacts(out_dir: str | Path, history, entries, manifest: dict, k: int) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.csv").write_text(metrics_csv(history, k), encoding="utf-8")
    (out / "metrics.json").write_text(metrics_json(history), encoding="utf-8")
    (out / "audit.log").write_text(audit_log(entries), encoding="utf-8")
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
