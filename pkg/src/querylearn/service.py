"""Live annotation service: the engine picks questions, humans answer them.

Each session owns one Experiment. Answers are append-logged to disk before
they are acknowledged, so a killed and restarted service reconstructs every
acknowledged answer by replaying the log through the (deterministic) engine.
Re-training runs on a worker thread; while it runs the session reports
``retraining`` and clients poll.
"""

from __future__ import annotations

import json
import math
import os
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__, datagen, reporting
from .engine import Experiment, ExperimentConfig
from .labels import InconsistentAnswerError
from .model import TrainConfig, save_classifier


class SessionConfig(BaseModel):
    mode: str = "alpf-erc"
    warm_start_fraction: float = 0.05
    retrain_interval: int = 100
    budget: Optional[int] = None
    seed: int = 0
    epochs: int = 30
    learning_rate: float = 0.001
    minibatch_size: int = 200
    arch: str = "linear"
    hidden: Optional[int] = None

    def to_experiment_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            mode=self.mode,
            warm_start_fraction=self.warm_start_fraction,
            retrain_interval=self.retrain_interval,
            budget=self.budget,
            train=TrainConfig(
                learning_rate=self.learning_rate,
                minibatch_size=self.minibatch_size,
                epochs=self.epochs,
            ),
            arch=self.arch,
            hidden=self.hidden,
            seed=self.seed,
        )


class CreateSessionRequest(BaseModel):
    data: str = Field(description="preset name (synth4, synth16) or dataset directory")
    data_seed: int = 0
    config: SessionConfig = Field(default_factory=SessionConfig)


class AnswerRequest(BaseModel):
    question_id: int
    answer: int = Field(ge=0, le=1)


class SessionRuntime:
    """One live session: engine + write-ahead audit log + retrain worker."""

    def __init__(self, session_id: str, exp: Experiment, session_dir: Path):
        self.id = session_id
        self.exp = exp
        self.dir = session_dir
        self.lock = threading.RLock()
        self.retraining = False
        self._audit_fh = open(session_dir / "audit.log", "a", encoding="utf-8")

    @property
    def status(self) -> str:
        if self.retraining:
            return "retraining"
        s = self.exp.status
        if s in ("warmstart", "active"):
            return "active"
        if s == "needs_retrain":
            return "retraining"
        return s  # complete | exhausted

    def progress(self) -> dict:
        exp = self.exp
        latest = exp.history[-1].accuracy if exp.history else None
        return {
            "questions_asked": exp.questions_asked,
            "budget": exp.cfg.budget,
            "fraction_exact": exp.fraction_exact,
            "mean_remaining": exp.mean_remaining,
            "accuracy": latest,
            "rounds_completed": len(exp.history),
            "status": self.status,
        }

    def question_payload(self) -> Optional[dict]:
        q = self.exp.next_question()
        if q is None:
            return None
        i = q.example_index
        h = self.exp.hierarchy
        ds = self.exp.dataset
        if ds.display is not None:
            display = {"kind": "image", "path": ds.display[int(ds.train_indices[i])]}
        else:
            display = {"kind": "features", "values": [float(v) for v in self.exp.x_train[i]]}
        name = h.names[q.composite_index]
        return {
            "question_id": self.exp.questions_asked,
            "example_index": i,
            "composite_index": q.composite_index,
            "composite_name": name,
            "prompt": f"Is this a {name}?",
            "display": display,
        }

    def persist_answer(self) -> None:
        entry = self.exp.audit[-1]
        self._audit_fh.write(reporting.audit_line(entry) + "\n")
        self._audit_fh.flush()
        os.fsync(self._audit_fh.fileno())

    def persist_round(self) -> None:
        (self.dir / "metrics.json").write_text(
            reporting.metrics_json(self.exp.history), encoding="utf-8"
        )
        save_classifier(self.exp.clf, self.dir / "classifier.json")

    def start_retrain_worker(self) -> None:
        self.retraining = True
        threading.Thread(target=self._retrain, daemon=True).start()

    def _retrain(self) -> None:
        with self.lock:
            try:
                self.exp.retrain()
                self.persist_round()
            finally:
                self.retraining = False

    def close(self) -> None:
        self._audit_fh.close()


class SessionStore:
    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, SessionRuntime] = {}
        self._lock = threading.Lock()

    def create(self, req: CreateSessionRequest) -> SessionRuntime:
        ds, h, dataset_ref = _resolve_data(req.data, req.data_seed)
        cfg = req.config.to_experiment_config()
        session_id = uuid.uuid4().hex[:12]
        sdir = self.root / session_id
        sdir.mkdir(parents=True)
        manifest = reporting.build_manifest(cfg, dataset_ref, __version__)
        (sdir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        runtime = SessionRuntime(session_id, Experiment(cfg, ds, h), sdir)
        with self._lock:
            self._sessions[session_id] = runtime
        self._settle(runtime)
        return runtime

    def get(self, session_id: str) -> SessionRuntime:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        runtime = self._load(session_id)
        if runtime is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        with self._lock:
            self._sessions.setdefault(session_id, runtime)
            return self._sessions[session_id]

    def list_ids(self) -> list[str]:
        on_disk = {p.name for p in self.root.iterdir() if (p / "manifest.json").exists()}
        with self._lock:
            return sorted(on_disk | set(self._sessions))

    def _load(self, session_id: str) -> Optional[SessionRuntime]:
        sdir = self.root / session_id
        manifest_path = sdir / "manifest.json"
        if not manifest_path.exists():
            return None
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        cfg = reporting.config_from_dict(manifest["config"])
        ref = manifest["dataset"]
        if ref["kind"] == "preset":
            ds, h = datagen.preset_dataset(ref["name"], ref["data_seed"])
        else:
            ds, h = datagen.load_dir(ref["path"])
        exp = Experiment(cfg, ds, h)
        audit_path = sdir / "audit.log"
        if audit_path.exists():
            for entry in reporting.read_audit_log(audit_path):
                if exp.status == "needs_retrain":
                    exp.retrain()
                q = exp.next_question()
                if q is None or q.example_index != entry.example_index or q.composite_index != entry.composite_index:
                    raise RuntimeError(f"audit log of session {session_id} diverges from replay")
                exp.submit_answer(entry.answer)
        if exp.status == "needs_retrain":
            exp.retrain()  # crashed mid-retrain; finish the round now
        runtime = SessionRuntime(session_id, exp, sdir)
        if exp.history:
            runtime.persist_round()
        return runtime

    def _settle(self, runtime: SessionRuntime) -> None:
        """Run any immediately-due re-training (fresh or replayed sessions)."""
        with runtime.lock:
            if runtime.exp.status == "needs_retrain":
                runtime.start_retrain_worker()


def _resolve_data(ref: str, data_seed: int):
    if ref in datagen.PRESETS:
        ds, h = datagen.preset_dataset(ref, data_seed)
        return ds, h, {"kind": "preset", "name": ref, "data_seed": data_seed}
    path = Path(ref)
    if not path.is_dir():
        raise HTTPException(status_code=400, detail=f"dataset {ref!r} is neither a preset nor a directory")
    ds, h = datagen.load_dir(path)
    return ds, h, {"kind": "dir", "path": str(path.resolve())}


def create_app(session_dir: str | Path = "sessions", ui_dir: Optional[str] = None, cors_origin: str = "*") -> FastAPI:
    app = FastAPI(title="querylearn annotation service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(Path(session_dir))
    app.state.store = store

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__}

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": store.list_ids()}

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            runtime = store.create(req)
        except (ValueError, FileNotFoundError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        with runtime.lock:
            return {
                "session_id": runtime.id,
                "status": runtime.status,
                "progress": runtime.progress(),
                "question": None if runtime.status != "active" else runtime.question_payload(),
            }

    @app.get("/sessions/{session_id}/question")
    def next_question(session_id: str):
        runtime = store.get(session_id)
        if runtime.status == "retraining":
            return {"status": "retraining", "question": None, "progress": runtime.progress()}
        with runtime.lock:
            payload = runtime.question_payload() if runtime.status == "active" else None
            return {"status": runtime.status, "question": payload, "progress": runtime.progress()}

    @app.post("/sessions/{session_id}/answer")
    def submit_answer(session_id: str, req: AnswerRequest):
        runtime = store.get(session_id)
        if runtime.status == "retraining":
            raise HTTPException(status_code=409, detail="re-training in progress; poll the question endpoint")
        with runtime.lock:
            exp = runtime.exp
            if runtime.status in ("complete", "exhausted"):
                raise HTTPException(status_code=409, detail=f"session is {runtime.status}")
            if req.question_id != exp.questions_asked:
                raise HTTPException(
                    status_code=409,
                    detail=f"question {req.question_id} is not pending (current is {exp.questions_asked})",
                )
            if exp.next_question() is None:
                raise HTTPException(status_code=409, detail="no pending question")
            try:
                exp.submit_answer(req.answer)
            except InconsistentAnswerError as e:
                raise HTTPException(status_code=400, detail=f"contradictory answer: {e}")
            runtime.persist_answer()
            if exp.status == "needs_retrain":
                runtime.start_retrain_worker()
            return {"status": runtime.status, "progress": runtime.progress()}

    @app.get("/sessions/{session_id}/metrics")
    def session_metrics(session_id: str):
        runtime = store.get(session_id)
        rounds = [
            {
                "questions_asked": rm.questions_asked,
                "accuracy": rm.accuracy,
                "fraction_exact": rm.fraction_exact,
                "mean_remaining": rm.mean_remaining,
                # NaN (warm-start round) is not valid JSON
                "mean_selected_entropy": None if math.isnan(rm.mean_selected_entropy) else rm.mean_selected_entropy,
                "selected_class_counts": list(rm.selected_class_counts),
            }
            for rm in runtime.exp.history
        ]
        return {"rounds": rounds, "live": runtime.progress()}

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
