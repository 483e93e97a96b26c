"""Softmax classifiers trained on partial labels.

The predictive model is a softmax over the k atomic classes, either directly
on the features (linear) or through one rectified hidden layer (mlp). The
training objective is the mean negative log of the probability mass the
model places inside each example's partial label; with exact labels this is
ordinary cross-entropy, and a full-set label contributes nothing.

Gradients are analytic. For logits z with softmax s and potential-set mask r,
the per-example gradient of -log(sum_r s) w.r.t. z is s - t, where t is s
restricted to r and renormalized. Everything else is standard backprop.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bitset
from .labels import PartialLabel

PROB_FLOOR = 1e-12  # clamp under the log; keeps gradients finite
# Fan-in Gaussian init, tempered: desk-scale optimization budgets are a few
# hundred Adam steps, and Adam moves each weight by roughly lr per step, so
# the init noise must sit well below that total travel.
INIT_SCALE = 0.1
SNAPSHOT_FORMAT = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    minibatch_size: int = 200
    epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1/beta2 must be in [0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.minibatch_size < 1:
            raise ValueError("minibatch_size must be >= 1")


@dataclass(frozen=True)
class Classifier:
    """Flat parameter vector plus enough shape information to unpack it."""

    arch: str  # "linear" | "mlp"
    k: int
    d: int
    hidden: int | None
    theta: np.ndarray

    def __post_init__(self):
        if self.arch not in ("linear", "mlp"):
            raise ValueError(f"unknown arch {self.arch!r}")
        if self.arch == "mlp" and not self.hidden:
            raise ValueError("mlp needs a hidden width")
        expected = param_count(self.arch, self.k, self.d, self.hidden)
        if self.theta.shape != (expected,):
            raise ValueError(f"theta has shape {self.theta.shape}, expected ({expected},)")


def param_count(arch: str, k: int, d: int, hidden: int | None) -> int:
    if arch == "linear":
        return k * d + k
    h = int(hidden or 0)
    return h * d + h + k * h + k


def init_classifier(arch: str, k: int, d: int, hidden: int | None = None, seed: int = 0) -> Classifier:
    """Fresh parameters: Gaussian weights scaled by 1/sqrt(fan_in), zero biases."""
    rng = np.random.default_rng(seed)
    if arch == "linear":
        w = INIT_SCALE * rng.standard_normal((k, d)) / np.sqrt(d)
        theta = np.concatenate([w.ravel(), np.zeros(k)])
    elif arch == "mlp":
        h = int(hidden or 0)
        if h <= 0:
            raise ValueError("mlp needs a positive hidden width")
        w1 = INIT_SCALE * rng.standard_normal((h, d)) / np.sqrt(d)
        w2 = INIT_SCALE * rng.standard_normal((k, h)) / np.sqrt(h)
        theta = np.concatenate([w1.ravel(), np.zeros(h), w2.ravel(), np.zeros(k)])
    else:
        raise ValueError(f"unknown arch {arch!r}")
    return Classifier(arch=arch, k=k, d=d, hidden=hidden if arch == "mlp" else None, theta=theta)


def _unpack(clf: Classifier):
    t = clf.theta
    if clf.arch == "linear":
        w = t[: clf.k * clf.d].reshape(clf.k, clf.d)
        b = t[clf.k * clf.d :]
        return w, b
    h = int(clf.hidden or 0)
    o = 0
    w1 = t[o : o + h * clf.d].reshape(h, clf.d)
    o += h * clf.d
    b1 = t[o : o + h]
    o += h
    w2 = t[o : o + clf.k * h].reshape(clf.k, h)
    o += clf.k * h
    b2 = t[o : o + clf.k]
    return w1, b1, w2, b2


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward(clf: Classifier, x: np.ndarray):
    """Returns (softmax rows, hidden activations or None)."""
    if clf.arch == "linear":
        w, b = _unpack(clf)
        return _softmax(x @ w.T + b), None
    w1, b1, w2, b2 = _unpack(clf)
    a = np.maximum(x @ w1.T + b1, 0.0)
    return _softmax(a @ w2.T + b2), a


def predict(clf: Classifier, x: np.ndarray) -> np.ndarray:
    """Probability vector over the k atomic classes for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (clf.d,):
        raise ValueError(f"feature vector has shape {x.shape}, expected ({clf.d},)")
    s, _ = _forward(clf, x[None, :])
    return s[0]


def predict_batch(clf: Classifier, xs: np.ndarray) -> np.ndarray:
    """(n, k) probability matrix for an (n, d) feature matrix."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != clf.d:
        raise ValueError(f"feature matrix has shape {xs.shape}, expected (n, {clf.d})")
    s, _ = _forward(clf, xs)
    return s


def partial_prob(clf: Classifier, x: np.ndarray, pl: PartialLabel) -> float:
    """Probability mass the model puts on the partial label's classes."""
    yhat = predict(clf, x)
    return float(yhat[bitset.indices_of(pl.bits)].sum())


def entropy(p: Sequence[float] | np.ndarray) -> float:
    """Shannon entropy in nats, with 0*log(0) taken as 0."""
    p = np.asarray(p, dtype=np.float64)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def _label_matrix(k: int, pls: Sequence[PartialLabel]) -> np.ndarray:
    r = np.zeros((len(pls), k), dtype=bool)
    for i, pl in enumerate(pls):
        if pl.bits == 0:
            raise ValueError("empty partial label")
        r[i] = bitset.bool_array(pl.bits, k)
    return r


def _loss_grad_arrays(clf: Classifier, xs: np.ndarray, r: np.ndarray):
    """Mean clamped loss and flat gradient over (n, d) features + (n, k) masks.

    Rows whose mask covers every class are no-ops: their marginal mass is 1
    by normalization, so they contribute exactly zero loss and gradient.
    """
    n = xs.shape[0]
    active = ~r.all(axis=1)
    loss = 0.0
    grad = np.zeros_like(clf.theta)
    if not active.any():
        return loss, grad
    xa, ra = xs[active], r[active]
    s, hidden = _forward(clf, xa)
    mass = np.where(ra, s, 0.0).sum(axis=1)
    clamped = mass < PROB_FLOOR
    loss = float(-np.log(np.maximum(mass, PROB_FLOOR)).sum() / n)
    # d(-log mass)/dz = s - restricted renormalized s; zero where the clamp is active
    t = np.where(ra, s, 0.0) / np.maximum(mass, PROB_FLOOR)[:, None]
    dz = s - t
    dz[clamped] = 0.0
    dz /= n
    if clf.arch == "linear":
        gw = dz.T @ xa
        gb = dz.sum(axis=0)
        grad = np.concatenate([gw.ravel(), gb])
    else:
        w1, b1, w2, b2 = _unpack(clf)
        gw2 = dz.T @ hidden
        gb2 = dz.sum(axis=0)
        da = dz @ w2
        da[hidden <= 0] = 0.0
        gw1 = da.T @ xa
        gb1 = da.sum(axis=0)
        grad = np.concatenate([gw1.ravel(), gb1, gw2.ravel(), gb2])
    return loss, grad


def partial_loss(clf: Classifier, batch: Sequence[tuple[np.ndarray, PartialLabel]]):
    """Mean negative log marginal probability over a batch, with its gradient."""
    xs = np.asarray([np.asarray(x, dtype=np.float64) for x, _ in batch])
    r = _label_matrix(clf.k, [pl for _, pl in batch])
    return _loss_grad_arrays(clf, xs, r)


def train(clf: Classifier, data: Sequence[tuple[np.ndarray, PartialLabel]], cfg: TrainConfig) -> Classifier:
    """Re-train from scratch: fresh seeded init, shuffled minibatch Adam.

    Full-set labels are dropped up front (their gradient is identically
    zero); if nothing remains, the fresh initialization is returned as-is.
    Bit-identical output for identical data, config, and seed.
    """
    if len(data) == 0:
        raise ValueError("training data is empty")
    xs = np.asarray([np.asarray(x, dtype=np.float64) for x, _ in data])
    r = _label_matrix(clf.k, [pl for _, pl in data])
    return train_arrays(clf, xs, r, cfg)


def train_arrays(clf: Classifier, xs: np.ndarray, r: np.ndarray, cfg: TrainConfig) -> Classifier:
    """Array-based training path; ``r`` is the (n, k) potential-set mask matrix."""
    rng = np.random.default_rng(cfg.seed)
    fresh = init_classifier(clf.arch, clf.k, clf.d, clf.hidden, seed=int(rng.integers(2**31)))
    keep = ~r.all(axis=1)
    if not keep.any():
        return fresh
    xs, r = xs[keep], r[keep]
    n = xs.shape[0]

    theta = fresh.theta.copy()
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    step = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.minibatch_size):
            idx = order[start : start + cfg.minibatch_size]
            cur = replace(fresh, theta=theta)
            _, g = _loss_grad_arrays(cur, xs[idx], r[idx])
            step += 1
            m = cfg.beta1 * m + (1 - cfg.beta1) * g
            v = cfg.beta2 * v + (1 - cfg.beta2) * (g * g)
            mhat = m / (1 - cfg.beta1**step)
            vhat = v / (1 - cfg.beta2**step)
            theta = theta - cfg.learning_rate * mhat / (np.sqrt(vhat) + cfg.epsilon)
    return replace(fresh, theta=theta)


def save_classifier(clf: Classifier, path: str | Path) -> None:
    """Versioned JSON snapshot; floats round-trip exactly."""
    doc = {
        "format": SNAPSHOT_FORMAT,
        "arch": clf.arch,
        "k": clf.k,
        "d": clf.d,
        "hidden": clf.hidden,
        "theta": clf.theta.tolist(),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_classifier(path: str | Path) -> Classifier:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"unsupported snapshot format {doc.get('format')!r}")
    return Classifier(
        arch=doc["arch"],
        k=int(doc["k"]),
        d=int(doc["d"]),
        hidden=doc["hidden"],
        theta=np.asarray(doc["theta"], dtype=np.float64),
    )
