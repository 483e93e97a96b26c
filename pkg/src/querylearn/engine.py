"""Experiment engine: batched question selection, feedback, re-training.

The engine is a resumable state machine so the same code path serves both
oracle simulation and the live annotation service: ``next_question()`` hands
out the single pending question (idempotently, until it is answered) and
``submit_answer()`` applies the feedback. Re-training is a separate explicit
step the caller runs whenever ``status`` says ``needs_retrain``: the
simulation loop does it inline, the service does it on a worker thread.

A run proceeds in rounds: warm-start (a seeded i.i.d. sample driven to exact
labels with uniform even-split questions, charged to the budget), then
active rounds of ``retrain_interval`` questions each, re-training the
classifier from scratch at every boundary. Four selection families:

  baseline  random not-exact example, even-split questions, uniform prior
  al        most-uncertain example (me/lc), even-split questions, model prior
  aq        random example, scored questions (eig/edc/erc), to completion
  alpf      best (example, question) pair anywhere, scored, may hop between
            examples leaving them partially labeled

Within a round the model is fixed; after an answer changes one example's
potential set, only that example's candidate scores are recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import acquisition, bitset, labels, model
from .acquisition import Question
from .datagen import Dataset, fraction_count
from .hierarchy import ClassHierarchy
from .labels import PartialLabel
from .model import TrainConfig

MODES = (
    "baseline",
    "al-me",
    "al-lc",
    "aq-eig",
    "aq-edc",
    "aq-erc",
    "alpf-eig",
    "alpf-edc",
    "alpf-erc",
)


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "baseline"
    warm_start_fraction: float = 0.05
    retrain_interval: int = 1000
    budget: Optional[int] = None  # None: run until fully labeled
    train: TrainConfig = field(default_factory=TrainConfig)
    arch: str = "linear"
    hidden: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose one of {MODES}")
        if not (0.0 <= self.warm_start_fraction < 1.0):
            raise ValueError("warm_start_fraction must be in [0, 1)")
        if self.retrain_interval < 1:
            raise ValueError("retrain_interval must be >= 1")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be >= 0")

    @property
    def family(self) -> str:
        return self.mode.split("-")[0]

    @property
    def strategy(self) -> Optional[str]:
        parts = self.mode.split("-")
        return parts[1] if len(parts) > 1 else None


@dataclass(frozen=True)
class RoundMetrics:
    """Snapshot taken right after one re-training.

    ``mean_selected_entropy`` averages, over the questions of the finished
    round, the entropy of the model's restricted predictive distribution on
    the selected example at selection time; NaN for the warm-start round
    (those selections don't consult the model). ``selected_class_counts``
    counts the same selection events by the example's true class.
    """

    questions_asked: int
    accuracy: float
    fraction_exact: float
    mean_remaining: float
    mean_selected_entropy: float
    selected_class_counts: tuple[int, ...]


@dataclass(frozen=True)
class AuditEntry:
    t: int
    example_index: int
    composite_index: int
    answer: int


class Experiment:
    """Mutable state of one run. Single-writer; see module docstring."""

    def __init__(self, cfg: ExperimentConfig, dataset: Dataset, h: ClassHierarchy):
        if h.k < 2:
            raise ValueError("need at least 2 atomic classes")
        if int(dataset.true_labels.max()) >= h.k:
            raise ValueError("dataset labels exceed hierarchy classes")
        self.cfg = cfg
        self.dataset = dataset
        self.hierarchy = h
        self.x_train, self.y_train = dataset.train_arrays()
        self.x_hold, self.y_hold = dataset.holdout_arrays()
        n = len(self.x_train)
        k = h.k

        self.pls: list[PartialLabel] = [PartialLabel.full(k) for _ in range(n)]
        self.potential = np.ones((n, k), dtype=bool)
        self.questions_asked = 0
        self.audit: list[AuditEntry] = []
        self.history: list[RoundMetrics] = []
        self.warm_start_aborted = False
        self.done_reason: Optional[str] = None  # "complete" | "exhausted"

        ss = np.random.SeedSequence(cfg.seed)
        warm_ss, select_ss, self._train_ss = ss.spawn(3)
        self._select_rng = np.random.default_rng(select_ss)
        self._membership = h.membership()
        self._uniform_prior = np.full(k, 1.0 / k)

        self.clf = model.init_classifier(cfg.arch, k, dataset.d, cfg.hidden, seed=self._next_train_seed())
        self._yhat = model.predict_batch(self.clf, self.x_train)

        warm_count = fraction_count(cfg.warm_start_fraction, n)
        warm_rng = np.random.default_rng(warm_ss)
        self._warm_queue = [int(i) for i in warm_rng.choice(n, size=warm_count, replace=False)] if warm_count else []
        self._warm_pos = 0
        self._phase = "warm" if self._warm_queue else "active"

        self._pending: Optional[Question] = None
        self._retrain_flag = False
        self._after_retrain: Optional[str] = None
        self._q_since_retrain = 0
        self._n_exact = 0
        self._current_example: Optional[int] = None
        self._round_entropy_sum = 0.0
        self._round_entropy_count = 0
        self._round_class_counts = np.zeros(k, dtype=np.int64)
        self._best_comp: Optional[np.ndarray] = None
        self._best_val: Optional[np.ndarray] = None
        self._ex_scores: Optional[np.ndarray] = None
        self._refresh_selection_caches()

        if self._phase == "warm" and not self._can_ask():
            self.warm_start_aborted = True
            self._begin_retrain("exhausted")
        elif self._phase == "active" and not self._can_ask():
            self.done_reason = "exhausted"  # nothing asked, nothing trained

    # ------------------------------------------------------------------ state

    @property
    def status(self) -> str:
        if self.done_reason:
            return self.done_reason
        if self._retrain_flag:
            return "needs_retrain"
        return "warmstart" if self._phase == "warm" else "active"

    @property
    def n_train(self) -> int:
        return len(self.pls)

    @property
    def fraction_exact(self) -> float:
        return self._n_exact / self.n_train

    @property
    def mean_remaining(self) -> float:
        return float(self.potential.sum() / self.n_train)

    def _can_ask(self) -> bool:
        return self.cfg.budget is None or self.questions_asked < self.cfg.budget

    def _all_exact(self) -> bool:
        return self._n_exact == self.n_train

    def _next_train_seed(self) -> int:
        child = self._train_ss.spawn(1)[0]
        return int(child.generate_state(1)[0])

    def _begin_retrain(self, after: Optional[str]) -> None:
        self._retrain_flag = True
        self._after_retrain = after

    # -------------------------------------------------------------- selection

    def _refresh_selection_caches(self) -> None:
        fam = self.cfg.family
        if fam == "alpf":
            self._best_comp, self._best_val = acquisition.best_questions(
                self._yhat, self.potential, self._membership, self.cfg.strategy
            )
        elif fam == "al":
            self._ex_scores = self._example_scores()

    def _example_scores(self) -> np.ndarray:
        """me or lc per example; NaN for exact examples."""
        qr = np.where(self.potential, self._yhat, 0.0)
        totals = qr.sum(axis=1)
        massless = totals <= 0.0
        if massless.any():
            sizes = self.potential.sum(axis=1)
            qr[massless] = self.potential[massless] / sizes[massless, None]
            totals = qr.sum(axis=1)
        qr = qr / totals[:, None]
        if self.cfg.strategy == "me":
            scores = -acquisition._xlogx(qr).sum(axis=1)
        else:
            scores = qr.max(axis=1)
        exact = self.potential.sum(axis=1) == 1
        return np.where(exact, np.nan, scores)

    def _restricted_row(self, i: int) -> np.ndarray:
        q = np.where(self.potential[i], self._yhat[i], 0.0)
        total = q.sum()
        if total <= 0.0:
            return self.potential[i] / self.potential[i].sum()
        return q / total

    def _split_question(self, i: int, prior: np.ndarray) -> int:
        dist, informative = acquisition.split_distances(
            prior[None, :], self.potential[i : i + 1], self._membership
        )
        masked = np.where(informative[0], dist[0], np.inf)
        j = int(masked.argmin())
        if not informative[0, j]:
            raise RuntimeError("no informative composite for example")
        return j

    def _select_warm(self) -> Question:
        i = self._warm_queue[self._warm_pos]
        return Question(i, self._split_question(i, self._uniform_prior))

    def _select_active(self) -> Question:
        fam = self.cfg.family
        if fam == "alpf":
            sign = acquisition.ORIENTATION[self.cfg.strategy]
            vals = np.where(np.isnan(self._best_val), -np.inf, sign * self._best_val)
            i = int(vals.argmax())
            if not np.isfinite(vals[i]):
                raise RuntimeError("no informative question exists")
            return Question(i, int(self._best_comp[i]))
        i = self._current_example
        if i is None or self.pls[i].is_exact:
            i = self._pick_example()
            self._current_example = i
        if fam == "baseline":
            return Question(i, self._split_question(i, self._uniform_prior))
        if fam == "al":
            return Question(i, self._split_question(i, self._yhat[i]))
        comp, _ = acquisition.best_questions(
            self._yhat[i : i + 1], self.potential[i : i + 1], self._membership, self.cfg.strategy
        )
        return Question(i, int(comp[0]))

    def _pick_example(self) -> int:
        fam = self.cfg.family
        if fam == "al":
            sign = acquisition.ORIENTATION[self.cfg.strategy]
            vals = np.where(np.isnan(self._ex_scores), -np.inf, sign * self._ex_scores)
            i = int(vals.argmax())
            if not np.isfinite(vals[i]):
                raise RuntimeError("all examples exactly labeled")
            return i
        candidates = [i for i, pl in enumerate(self.pls) if not pl.is_exact]
        if not candidates:
            raise RuntimeError("all examples exactly labeled")
        return candidates[int(self._select_rng.integers(len(candidates)))]

    def _note_selection(self, q: Question) -> None:
        self._round_class_counts[int(self.y_train[q.example_index])] += 1
        if self._phase == "active":
            self._round_entropy_sum += model.entropy(self._restricted_row(q.example_index))
            self._round_entropy_count += 1

    # ---------------------------------------------------------------- driving

    def next_question(self) -> Optional[Question]:
        """The pending question, selecting one if needed; idempotent until
        answered. None while re-training is required or the run is over."""
        if self.done_reason or self._retrain_flag:
            return None
        if self._pending is not None:
            return self._pending
        if not self._can_ask():  # defensive; submit_answer normally catches this
            if self._q_since_retrain > 0:
                self._begin_retrain("exhausted")
            else:
                self.done_reason = "exhausted"
            return None
        q = self._select_warm() if self._phase == "warm" else self._select_active()
        self._note_selection(q)
        self._pending = q
        return q

    def submit_answer(self, answer: int) -> None:
        """Apply feedback to the pending question; may flag a re-training."""
        if self._pending is None:
            raise RuntimeError("no pending question to answer")
        q = self._pending
        i = q.example_index
        c = self.hierarchy.composites[q.composite_index]
        new_pl = labels.update(self.pls[i], c, answer)
        self.pls[i] = new_pl
        self.potential[i] = bitset.bool_array(new_pl.bits, self.hierarchy.k)
        if new_pl.is_exact:
            self._n_exact += 1
            if self._current_example == i:
                self._current_example = None
        self.audit.append(AuditEntry(self.questions_asked, i, q.composite_index, answer))
        self.questions_asked += 1
        self._pending = None

        fam = self.cfg.family
        if fam == "alpf":
            comp, val = acquisition.best_questions(
                self._yhat[i : i + 1], self.potential[i : i + 1], self._membership, self.cfg.strategy
            )
            self._best_comp[i] = comp[0]
            self._best_val[i] = val[0]
        elif fam == "al" and new_pl.is_exact:
            self._ex_scores[i] = np.nan

        if self._phase == "warm":
            while self._warm_pos < len(self._warm_queue) and self.pls[self._warm_queue[self._warm_pos]].is_exact:
                self._warm_pos += 1
            if self._warm_pos >= len(self._warm_queue):
                self._begin_retrain("exhausted" if not self._can_ask() and not self._all_exact() else None)
            elif not self._can_ask():
                self.warm_start_aborted = True
                self._begin_retrain("exhausted")
            return

        self._q_since_retrain += 1
        if self._all_exact():
            self._begin_retrain("complete")
        elif not self._can_ask():
            self._begin_retrain("exhausted")
        elif self._q_since_retrain >= self.cfg.retrain_interval:
            self._begin_retrain(None)

    def retrain(self) -> RoundMetrics:
        """Re-train from scratch on all non-trivial partial labels, evaluate,
        and append this round's metrics."""
        if not self._retrain_flag:
            raise RuntimeError("no re-training is due")
        cfg = replace(self.cfg.train, seed=self._next_train_seed())
        self.clf = model.train_arrays(self.clf, self.x_train, self.potential, cfg)
        self._yhat = model.predict_batch(self.clf, self.x_train)
        pred = model.predict_batch(self.clf, self.x_hold).argmax(axis=1)
        metrics = RoundMetrics(
            questions_asked=self.questions_asked,
            accuracy=float((pred == self.y_hold).mean()),
            fraction_exact=self.fraction_exact,
            mean_remaining=self.mean_remaining,
            mean_selected_entropy=(
                self._round_entropy_sum / self._round_entropy_count
                if self._round_entropy_count
                else float("nan")
            ),
            selected_class_counts=tuple(int(x) for x in self._round_class_counts),
        )
        self.history.append(metrics)
        self._round_entropy_sum = 0.0
        self._round_entropy_count = 0
        self._round_class_counts[:] = 0
        self._q_since_retrain = 0
        self._retrain_flag = False
        if self._phase == "warm":
            self._phase = "active"
        after, self._after_retrain = self._after_retrain, None
        if after is not None:
            self.done_reason = after
        elif self._all_exact():
            self.done_reason = "complete"
        else:
            self._refresh_selection_caches()
        return metrics


def warm_start(exp: Experiment, annotator) -> Experiment:
    """Drive the warm-start phase (and its round-0 re-training) to the end."""
    while exp.status == "warmstart":
        q = exp.next_question()
        if q is None:
            break
        exp.submit_answer(annotator.answer(q, exp.hierarchy.composites[q.composite_index]))
    if exp.status == "needs_retrain":
        exp.retrain()
    return exp


def run(cfg: ExperimentConfig, dataset: Dataset, h: ClassHierarchy, annotator):
    """Execute a full experiment against an annotator.

    Returns (metrics history, final Experiment state).
    """
    exp = Experiment(cfg, dataset, h)
    while exp.status not in ("complete", "exhausted"):
        if exp.status == "needs_retrain":
            exp.retrain()
            continue
        q = exp.next_question()
        if q is None:
            continue
        exp.submit_answer(annotator.answer(q, h.composites[q.composite_index]))
    return exp.history, exp
