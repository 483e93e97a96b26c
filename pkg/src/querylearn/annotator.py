"""Answer sources for binary questions.

Anything with an ``answer(question, class_set) -> 0|1`` method can annotate;
the simulation uses ground-truth labels, the annotation service forwards the
pending question to a human instead.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from . import bitset
from .acquisition import Question


class AnnotatorPort(Protocol):
    """Behavioral contract: answers must stay consistent with one fixed
    atomic label per example."""

    def answer(self, question: Question, class_set: int) -> int: ...


class OracleAnnotator:
    """Answers from hidden ground-truth labels."""

    def __init__(self, true_labels: np.ndarray):
        self.true_labels = np.asarray(true_labels, dtype=np.int64)
        if self.true_labels.ndim != 1:
            raise ValueError("true_labels must be a 1-d array of class indices")

    def answer(self, question: Question, class_set: int) -> int:
        return oracle_answer(self, question, class_set)


def oracle_answer(oracle: OracleAnnotator, question: Question, class_set: int) -> int:
    """1 iff the example's true class is inside the queried composite."""
    if not (0 <= question.example_index < len(oracle.true_labels)):
        raise IndexError(f"example index {question.example_index} out of range")
    true = int(oracle.true_labels[question.example_index])
    return 1 if bitset.contains(class_set, true) else 0
