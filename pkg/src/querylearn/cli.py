"""Command-line driver: simulation runs, the pre-assigned-label study, data
generation, and the annotation service.

Exit codes: 0 success, 1 usage error, 2 runtime failure. The service binding
(host/port/session dir) can be overridden by QUERYLEARN_HOST, QUERYLEARN_PORT
and QUERYLEARN_SESSION_DIR.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, datagen, reporting
from .annotator import OracleAnnotator
from .engine import MODES, ExperimentConfig, run
from .model import TrainConfig, init_classifier, predict_batch, train_arrays


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we want 1
        raise UsageError(message)


def _load_data(ref: str, data_seed: int):
    """Dataset reference: a preset name (synth4, synth16) or a directory."""
    if ref in datagen.PRESETS:
        ds, h = datagen.preset_dataset(ref, data_seed)
        meta = {"kind": "preset", "name": ref, "data_seed": data_seed}
        return ds, h, meta
    path = Path(ref)
    if not path.is_dir():
        raise UsageError(f"dataset {ref!r} is neither a preset nor a directory")
    ds, h = datagen.load_dir(path)
    return ds, h, {"kind": "dir", "path": str(path.resolve())}


def _experiment_config(args, mode: str) -> ExperimentConfig:
    return ExperimentConfig(
        mode=mode,
        warm_start_fraction=args.warm_start,
        retrain_interval=args.retrain_interval,
        budget=args.budget,
        train=TrainConfig(
            learning_rate=args.learning_rate,
            minibatch_size=args.minibatch,
            epochs=args.epochs,
        ),
        arch=args.arch,
        hidden=args.hidden,
        seed=args.seed,
    )


def _simulate_one(cfg: ExperimentConfig, ds, h, dataset_ref: dict, out_root: Path) -> Path:
    oracle = OracleAnnotator(ds.train_arrays()[1])
    history, exp = run(cfg, ds, h, oracle)
    out_dir = out_root / cfg.mode / str(cfg.seed)
    manifest = reporting.build_manifest(cfg, dataset_ref, __version__)
    reporting.write_run_artifacts(out_dir, history, exp.audit, manifest, h.k)
    print(f"{cfg.mode} seed={cfg.seed}: {exp.status} after {exp.questions_asked} questions -> {out_dir}")
    return out_dir


def cmd_simulate(args) -> int:
    if args.from_manifest:
        doc = json.loads(Path(args.from_manifest).read_text(encoding="utf-8"))
        cfg = reporting.config_from_dict(doc["config"])
        ref = doc["dataset"]
        if ref["kind"] == "preset":
            ds, h, dataset_ref = _load_data(ref["name"], ref["data_seed"])
        else:
            ds, h, dataset_ref = _load_data(ref["path"], 0)
        _simulate_one(cfg, ds, h, dataset_ref, Path(args.out))
        return 0
    if not args.data:
        raise UsageError("--data is required (preset name or data directory)")
    ds, h, dataset_ref = _load_data(args.data, args.data_seed)
    modes = list(MODES) if args.grid else [args.mode]
    if not args.grid and args.mode is None:
        raise UsageError("--mode or --grid is required")
    for mode in modes:
        cfg = _experiment_config(args, mode)
        _simulate_one(cfg, ds, h, dataset_ref, Path(args.out))
    return 0


def cmd_train_partial(args) -> int:
    ds, h, _ = _load_data(args.data, args.data_seed)
    gammas = [float(g) for g in args.gammas.split(",") if g]
    levels = [int(v) for v in args.levels.split(",") if v]
    seeds = list(range(args.seed, args.seed + args.num_seeds))
    xs, _ = ds.train_arrays()
    xh, yh = ds.holdout_arrays()

    def holdout_acc(pot_rows, idx, seed):
        cfg = TrainConfig(
            learning_rate=args.learning_rate,
            minibatch_size=args.minibatch,
            epochs=args.epochs,
            seed=seed,
        )
        tmpl = init_classifier(args.arch, h.k, ds.d, args.hidden, seed=0)
        clf = train_arrays(tmpl, xs[idx], pot_rows[idx], cfg)
        return float((predict_batch(clf, xh).argmax(axis=1) == yh).mean())

    if any(lv < 1 for lv in levels):
        raise UsageError("levels must be >= 1 (level 0 is the exact-only baseline itself)")

    def potential_matrix(pls):
        pot = np.zeros((len(pls), h.k), dtype=bool)
        for i, pl in enumerate(pls):
            pot[i] = [pl.contains(c) for c in range(h.k)]
        return pot

    rows = []
    for gamma in gammas:
        base_accs, deltas = [], {lv: [] for lv in levels}
        for seed in seeds:
            by_level = {lv: datagen.assign_partial_labels(ds, h, gamma, lv, seed=seed) for lv in levels}
            # the seeded gamma fraction: whatever the assignment left exact
            ref = by_level[levels[0]]
            exact_idx = np.array([i for i, pl in enumerate(ref) if pl.is_exact], dtype=int)
            if len(exact_idx) == 0:
                base = float("nan")
            else:
                base = holdout_acc(potential_matrix(ref), exact_idx, seed)
            base_accs.append(base)
            for lv in levels:
                if gamma >= 1.0:
                    continue
                acc = holdout_acc(potential_matrix(by_level[lv]), np.arange(len(ref)), seed)
                deltas[lv].append(acc - base)
        row = {"gamma": gamma, "exact_only": float(np.median(base_accs))}
        for lv in levels:
            row[f"level_{lv}_delta"] = float(np.median(deltas[lv])) if deltas[lv] else None
        rows.append(row)

    header = ["gamma", "exact_only"] + [f"level_{lv}_delta" for lv in levels]
    print("\t".join(header))
    for row in rows:
        cells = [f"{row['gamma']:g}", f"{row['exact_only']:.3f}"]
        for lv in levels:
            v = row[f"level_{lv}_delta"]
            cells.append("-" if v is None else f"{v:+.3f}")
        print("\t".join(cells))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {out}")
    return 0


def cmd_gen_data(args) -> int:
    scales = [float(s) for s in args.scales.split(",")] if args.scales else None
    ds, h = datagen.gen_hierarchical_gaussians(
        k=args.k,
        d=args.d,
        n_train=args.n,
        n_holdout=args.n_holdout,
        branching=args.branching,
        scales=scales,
        root_scale=args.root_scale,
        scale_decay=args.scale_decay,
        seed=args.seed,
    )
    if args.adversarial_easy:
        ds = datagen.make_adversarial(ds, args.adversarial_easy, seed=args.seed)
    meta = {
        "k": args.k,
        "d": args.d,
        "n_train": args.n,
        "n_holdout": args.n_holdout,
        "branching": args.branching,
        "scales": scales,
        "root_scale": args.root_scale,
        "scale_decay": args.scale_decay,
        "seed": args.seed,
        "adversarial_easy": args.adversarial_easy,
        "version": __version__,
    }
    datagen.save_dataset(ds, h, args.out, meta)
    print(f"wrote features.csv, labels.csv, hierarchy.json, meta.json to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host = os.environ.get("QUERYLEARN_HOST", args.host)
    port = int(os.environ.get("QUERYLEARN_PORT", args.port))
    session_dir = os.environ.get("QUERYLEARN_SESSION_DIR", args.session_dir)
    app = create_app(session_dir=session_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="querylearn", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_train_flags(sp):
        sp.add_argument("--epochs", type=int, default=30)
        sp.add_argument("--learning-rate", type=float, default=0.001)
        sp.add_argument("--minibatch", type=int, default=200)
        sp.add_argument("--arch", choices=["linear", "mlp"], default="linear")
        sp.add_argument("--hidden", type=int, default=None)

    sim = sub.add_parser("simulate", help="run oracle-driven experiments")
    sim.add_argument("--mode", choices=MODES, default=None)
    sim.add_argument("--grid", choices=["default"], default=None, help="run every mode")
    sim.add_argument("--data", help="preset name (synth4, synth16) or data directory")
    sim.add_argument("--data-seed", type=int, default=0)
    sim.add_argument("--budget", type=int, default=None)
    sim.add_argument("--retrain-interval", type=int, default=1000)
    sim.add_argument("--warm-start", type=float, default=0.05)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", default="runs")
    sim.add_argument("--from-manifest", default=None, help="reproduce a run from its manifest.json")
    add_train_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    tp = sub.add_parser("train-partial", help="pre-assigned partial-label study")
    tp.add_argument("--data", required=True)
    tp.add_argument("--data-seed", type=int, default=0)
    tp.add_argument("--gammas", default="0.2,0.4,0.6,0.8")
    tp.add_argument("--levels", default="1,2")
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--num-seeds", type=int, default=5)
    tp.add_argument("--out", default=None, help="optional JSON output path")
    add_train_flags(tp)
    tp.set_defaults(func=cmd_train_partial)

    gen = sub.add_parser("gen-data", help="generate a synthetic dataset directory")
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--n", type=int, required=True, help="training examples")
    gen.add_argument("--n-holdout", type=int, default=None)
    gen.add_argument("--branching", type=int, default=2)
    gen.add_argument("--scales", default=None, help="comma-separated per-level offsets")
    gen.add_argument("--root-scale", type=float, default=4.0)
    gen.add_argument("--scale-decay", type=float, default=0.5)
    gen.add_argument("--adversarial-easy", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen_data)

    srv = sub.add_parser("serve", help="run the live annotation service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8080)
    srv.add_argument("--session-dir", default="sessions")
    srv.add_argument("--ui-dir", default=None, help="static UI assets to serve at /")
    srv.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen-data" and args.n_holdout is None:
            args.n_holdout = max(1, args.n // 2)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:  # argparse --version/--help
        code = e.code if isinstance(e.code, int) else 0
        return code
    except KeyboardInterrupt:
        return 2
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
