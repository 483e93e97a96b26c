"""Bitmask helpers for class sets.

Class sets (composite classes, partial labels) are plain Python ints used
as bitmasks over atomic class indices 0..k-1. Bit i set means class i is a
member. Python ints are arbitrary precision, so k is unbounded in practice;
set algebra (&, |, &~) is what the feedback update and candidate filtering
spend their time on.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np


def mask_of(indices: Iterable[int]) -> int:
    """Build a mask with the given class indices set."""
    m = 0
    for i in indices:
        i = int(i)  # numpy ints would overflow at 64 classes and lack bit ops
        if i < 0:
            raise ValueError(f"negative class index {i}")
        m |= 1 << i
    return m


def full_mask(k: int) -> int:
    """Mask with all k classes set."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    return (1 << k) - 1


def size(mask: int) -> int:
    return mask.bit_count()


def contains(mask: int, index: int) -> bool:
    return (mask >> index) & 1 == 1


def indices_of(mask: int) -> list[int]:
    """Set bit positions, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def bool_array(mask: int, k: int) -> np.ndarray:
    """Dense boolean view of a mask, for vectorized scoring paths."""
    arr = np.zeros(k, dtype=bool)
    for i in indices_of(mask):
        arr[i] = True
    return arr
