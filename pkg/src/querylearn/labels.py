"""Partial labels and the binary-feedback update rule.

A partial label is the set of atomic classes not yet eliminated for one
example. A yes answer to "is it in composite c?" intersects the set with c;
a no answer subtracts c. Both branches strictly shrink an informative
question's set and can never empty it under truthful answers.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import bitset


class UninformativeQuestionError(ValueError):
    """The question's answer is already implied by the current partial label."""


class InconsistentAnswerError(ValueError):
    """The answer would eliminate every remaining class.

    Under a truthful annotator this cannot happen; it signals contradictory
    feedback and is surfaced rather than repaired.
    """


@dataclass(frozen=True)
class PartialLabel:
    """Bitmask of the not-yet-eliminated atomic classes. Never empty."""

    bits: int

    def __post_init__(self):
        object.__setattr__(self, "bits", int(self.bits))  # reject numpy ints
        if self.bits == 0:
            raise ValueError("partial label cannot be empty")

    @classmethod
    def full(cls, k: int) -> "PartialLabel":
        return cls(bitset.full_mask(k))

    @classmethod
    def of(cls, indices) -> "PartialLabel":
        return cls(bitset.mask_of(indices))

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    @property
    def is_exact(self) -> bool:
        return self.size == 1

    def exact_class(self) -> int:
        if not self.is_exact:
            raise ValueError("partial label is not exact")
        return self.bits.bit_length() - 1

    def contains(self, atomic: int) -> bool:
        return bitset.contains(self.bits, atomic)

    def classes(self) -> list[int]:
        return bitset.indices_of(self.bits)


def is_informative(pl: PartialLabel, c: int) -> bool:
    """True iff both possible answers would strictly shrink the partial label.

    Equivalently: c intersects the set, and the set is not contained in c.
    A rational learner never asks anything else.
    """
    return (pl.bits & c) != 0 and (pl.bits & ~c) != 0


def update(pl: PartialLabel, c: int, answer: int) -> PartialLabel:
    """Apply one binary answer about composite c.

    answer=1 keeps only classes inside c; answer=0 removes them. The result
    is strictly smaller and nonempty for any informative question.
    """
    if answer not in (0, 1):
        raise ValueError(f"answer must be 0 or 1, got {answer!r}")
    new_bits = (pl.bits & c) if answer == 1 else (pl.bits & ~c)
    if new_bits == 0:
        # the question's answer was implied and the annotator gave the opposite
        raise InconsistentAnswerError(
            f"answer {answer} on {bitset.indices_of(c)} would eliminate every class"
        )
    if not is_informative(pl, c):
        raise UninformativeQuestionError(
            f"question {bitset.indices_of(c)} is uninformative for {pl.classes()}"
        )
    return PartialLabel(new_bits)
