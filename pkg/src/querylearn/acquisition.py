"""Scoring of candidate questions and candidate examples.

Question strategies score an (example, composite) pair by what one binary
answer is expected to do: EIG is the expected entropy drop of the predictive
distribution (maximize), ERC the expected number of classes left afterwards
(minimize), EDC the expected number eliminated (maximize). Example-level
heuristics ME (entropy, maximize) and LC (confidence, minimize) rank whole
examples for the classic active-learning baselines, and ``binary_split``
implements the passive question policy of halving the probability mass.

All scores see the predictive distribution restricted to the example's
current potential set and renormalized, so classes that feedback already
eliminated cannot influence selection. When the model puts zero mass on the
whole potential set (or on one answer's branch), that distribution falls
back to uniform over the classes involved; a zero-mass branch carries zero
weight, so the fallback never adds spurious information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bitset
from .labels import PartialLabel, is_informative
from .model import entropy

STRATEGIES = ("eig", "erc", "edc")
# orientation per strategy/heuristic: +1 maximize, -1 minimize
ORIENTATION = {"eig": +1, "erc": -1, "edc": +1, "me": +1, "lc": -1, "split": -1}


@dataclass(frozen=True)
class Question:
    example_index: int
    composite_index: int


@dataclass(frozen=True)
class QuestionScore:
    question: Question
    strategy: str
    value: float

    @property
    def orientation(self) -> int:
        return ORIENTATION[self.strategy]


def _restricted(yhat: np.ndarray, bits: int) -> np.ndarray:
    """yhat masked to the potential set and renormalized; uniform if massless."""
    member = bitset.bool_array(bits, len(yhat))
    q = np.where(member, yhat, 0.0)
    total = q.sum()
    if total <= 0.0:
        return member / member.sum()
    return q / total


def conditional_distributions(yhat: np.ndarray, pl: PartialLabel, c: int):
    """Split the restricted predictive distribution by the answer to c.

    Returns (p, y1, y0): p is the predicted probability of a yes; y1/y0 are
    full-length probability vectors conditioned on yes/no, renormalized
    within their branch. A branch with zero predicted mass gets the uniform
    distribution over its classes and, through p, zero weight.
    """
    yhat = np.asarray(yhat, dtype=np.float64)
    if not is_informative(pl, c):
        raise ValueError("question is uninformative for this partial label")
    q = _restricted(yhat, pl.bits)
    in_member = bitset.bool_array(pl.bits & c, len(yhat))
    out_member = bitset.bool_array(pl.bits & ~c, len(yhat))
    p = float(q[in_member].sum())
    y1 = np.where(in_member, q, 0.0)
    y1 = y1 / p if p > 0 else in_member / in_member.sum()
    q0 = float(q[out_member].sum())
    y0 = np.where(out_member, q, 0.0)
    y0 = y0 / q0 if q0 > 0 else out_member / out_member.sum()
    return p, y1, y0


def eig(yhat: np.ndarray, pl: PartialLabel, c: int) -> float:
    """Expected entropy reduction from asking c: S(y) - [p S(y1) + (1-p) S(y0)]."""
    p, y1, y0 = conditional_distributions(yhat, pl, c)
    before = entropy(_restricted(np.asarray(yhat, dtype=np.float64), pl.bits))
    return before - (p * entropy(y1) + (1.0 - p) * entropy(y0))


def erc(yhat: np.ndarray, pl: PartialLabel, c: int) -> float:
    """Expected number of classes remaining after the answer to c."""
    p, _, _ = conditional_distributions(yhat, pl, c)
    n1 = bitset.size(pl.bits & c)
    n0 = pl.size - n1
    # n0 + p*(n1-n0) == p*n1 + (1-p)*n0, and is exactly 1.0 when n1 == n0 == 1
    return n0 + p * (n1 - n0)


def edc(yhat: np.ndarray, pl: PartialLabel, c: int) -> float:
    """Expected number of classes eliminated by the answer to c."""
    return pl.size - erc(yhat, pl, c)


def example_scores_me_lc(yhat: np.ndarray, pl: PartialLabel) -> tuple[float, float]:
    """Uncertainty of one example: (entropy, top-class probability).

    ME ranks descending by the first, LC ascending by the second. Exact
    examples are out of the candidate pool and rejected here.
    """
    if pl.is_exact:
        raise ValueError("example is already exactly labeled")
    q = _restricted(np.asarray(yhat, dtype=np.float64), pl.bits)
    return entropy(q), float(q.max())


def binary_split_question(prior: np.ndarray, pl: PartialLabel, composites) -> int:
    """Index of the informative composite whose mass is closest to one half.

    ``prior`` is a weight vector over atomic classes; only its mass inside
    the potential set matters. Ties go to the lowest composite index.
    """
    if pl.is_exact:
        raise ValueError("example is already exactly labeled")
    prior = np.asarray(prior, dtype=np.float64)
    q = _restricted(prior, pl.bits)
    best_j = -1
    best_dist = np.inf
    for j, c in enumerate(composites):
        if not is_informative(pl, c):
            continue
        mass = float(q[bitset.bool_array(pl.bits & c, len(prior))].sum())
        dist = abs(mass - 0.5)
        if dist < best_dist:
            best_dist = dist
            best_j = j
    if best_j < 0:
        raise ValueError("no informative composite exists")
    return best_j


# ---------------------------------------------------------------------------
# Vectorized scoring used by the engine's selection loop. Same math as the
# scalar operations above, evaluated for whole (example x composite) blocks.
# ---------------------------------------------------------------------------


def _xlogx(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    nz = a > 0
    out[nz] = a[nz] * np.log(a[nz])
    return out


def score_matrix(yhat: np.ndarray, potential: np.ndarray, membership: np.ndarray, strategy: str):
    """Score every (example row, composite) pair under one question strategy.

    yhat: (n, k) predictive rows; potential: (n, k) boolean potential sets;
    membership: (m, k) boolean composite membership. Returns (values,
    informative) of shape (n, m); values are meaningless where a pair is
    uninformative.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown question strategy {strategy!r}")
    r = potential.astype(np.float64)
    mf = membership.astype(np.float64).T  # (k, m)
    sizes = r.sum(axis=1)  # |potential| per example
    n_in = r @ mf  # (n, m) = |potential ∩ c|
    informative = (n_in > 0) & (n_in < sizes[:, None])

    qr = np.where(potential, yhat, 0.0)
    totals = qr.sum(axis=1)
    massless = totals <= 0.0
    if massless.any():
        qr[massless] = r[massless] / sizes[massless, None]
        totals = qr.sum(axis=1)
    qr = qr / totals[:, None]  # restricted + renormalized rows
    mass_in = qr @ mf
    np.clip(mass_in, 0.0, 1.0, out=mass_in)

    if strategy == "erc":
        n_out = sizes[:, None] - n_in
        values = n_out + mass_in * (n_in - n_out)
    elif strategy == "edc":
        n_out = sizes[:, None] - n_in
        values = sizes[:, None] - (n_out + mass_in * (n_in - n_out))
    else:  # eig; branch terms with zero mass carry zero weight
        mass_out = np.clip(1.0 - mass_in, 0.0, 1.0)
        values = -(_xlogx(mass_in) + _xlogx(mass_out))
    return values, informative


def best_questions(yhat: np.ndarray, potential: np.ndarray, membership: np.ndarray, strategy: str):
    """Per-example best composite and value; exactness-masked rows get comp -1.

    Within a row, ties resolve to the lowest composite index; values for
    rows with no informative composite (exact examples) are NaN.
    """
    values, informative = score_matrix(yhat, potential, membership, strategy)
    sign = ORIENTATION[strategy]
    masked = np.where(informative, sign * values, -np.inf)
    comp = masked.argmax(axis=1)
    has = informative.any(axis=1)
    best_val = np.where(has, values[np.arange(len(comp)), comp], np.nan)
    return np.where(has, comp, -1), best_val


def split_distances(prior: np.ndarray, potential: np.ndarray, membership: np.ndarray):
    """|mass(c)-1/2| for every pair, for the even-split question policy."""
    r = potential.astype(np.float64)
    mf = membership.astype(np.float64).T
    sizes = r.sum(axis=1)
    n_in = r @ mf
    informative = (n_in > 0) & (n_in < sizes[:, None])
    qr = np.where(potential, prior, 0.0)
    totals = qr.sum(axis=1)
    massless = totals <= 0.0
    if massless.any():
        qr[massless] = r[massless] / sizes[massless, None]
        totals = qr.sum(axis=1)
    mass_in = (qr / totals[:, None]) @ mf
    return np.abs(mass_in - 0.5), informative
