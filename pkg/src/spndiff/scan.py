"""Exact block-level differential distributions over the full 16-bit domain.

For a fixed key the cipher is a 65536-entry codebook; every count here is an
exact enumeration over all 2^16 inputs. A full scan covers all 2^16 - 1
nonzero input differences (2^32 input pairs).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .cipher import BLOCK_SIZE, CipherDescription, KeyAssignment, evaluate_all


@dataclass(frozen=True)
class Characteristic:
    """An (input difference, output difference) pair with its exact count."""

    input_diff: int
    output_diff: int
    count: int

    def __post_init__(self):
        if self.input_diff == 0:
            raise ValueError("input difference must be nonzero")

    @property
    def probability(self) -> Fraction:
        return Fraction(self.count, BLOCK_SIZE)


@dataclass(frozen=True)
class DiffDistribution:
    """Result of a full scan: the global maximum count and its argmax set."""

    max_count: int
    argmax: tuple[Characteristic, ...]
    full_table: dict | None = None  # (a, b) -> count, counts >= export floor


def _codebook(
    desc: CipherDescription, key: KeyAssignment, rounds_override: int | None
) -> np.ndarray:
    if rounds_override is not None:
        desc = desc.with_rounds(rounds_override)
    return evaluate_all(desc, key)


def diff_count(
    desc: CipherDescription, key: KeyAssignment, a: int, b: int
) -> int:
    """#{x : E(x ^ a) ^ E(x) = b}, by exact enumeration of all 2^16 inputs."""
    table = _codebook(desc, key, None)
    return kernels.count_pair(table, a, b)


def scan_max(
    desc: CipherDescription,
    key: KeyAssignment,
    rounds_override: int | None = None,
    jobs: int | None = None,
    full_table_floor: int | None = None,
) -> DiffDistribution:
    """Global maximum of D(a, b) over all a != 0, with the full argmax list.

    The a-axis is split across workers; each row is computed independently and
    the result is identical for any worker count. ``full_table_floor`` also
    collects the sparse table of all counts >= floor.
    """
    table = _codebook(desc, key, rounds_override)
    row_max = kernels.row_maxima(table, jobs=jobs)
    max_count = int(row_max.max())
    a_hit = np.nonzero(row_max == max_count)[0]
    a_arr, b_arr, c_arr = kernels.rows_pairs_at_least(
        table, a_hit, max_count, jobs=jobs
    )
    argmax = tuple(
        Characteristic(int(a), int(b), int(c))
        for a, b, c in zip(a_arr, b_arr, c_arr)
    )
    full_table = None
    if full_table_floor is not None:
        a_all = np.nonzero(row_max >= full_table_floor)[0]
        fa, fb, fc = kernels.rows_pairs_at_least(
            table, a_all, full_table_floor, jobs=jobs
        )
        full_table = {
            (int(a), int(b)): int(c) for a, b, c in zip(fa, fb, fc)
        }
    return DiffDistribution(
        max_count=max_count, argmax=argmax, full_table=full_table
    )


def top_characteristics(
    desc: CipherDescription,
    key: KeyAssignment,
    threshold: int | None = None,
    rounds_override: int | None = None,
    jobs: int | None = None,
) -> list[Characteristic]:
    """All (a, b) with count >= threshold, lexicographically ordered.

    Default threshold is the global maximum, i.e. the argmax set.
    """
    if threshold is not None and threshold < 1:
        raise ValueError("threshold must be >= 1")
    table = _codebook(desc, key, rounds_override)
    row_max = kernels.row_maxima(table, jobs=jobs)
    if threshold is None:
        threshold = int(row_max.max())
    a_hit = np.nonzero(row_max >= threshold)[0]
    a_arr, b_arr, c_arr = kernels.rows_pairs_at_least(
        table, a_hit, threshold, jobs=jobs
    )
    return [
        Characteristic(int(a), int(b), int(c))
        for a, b, c in zip(a_arr, b_arr, c_arr)
    ]
