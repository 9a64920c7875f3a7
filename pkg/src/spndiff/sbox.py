"""Difference distribution tables and uniformity statistics for 4-bit S-boxes.

All probabilities are exact rationals (count/16); downstream bound arithmetic
stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cipher import SBox4


@dataclass(frozen=True)
class DDT:
    """16x16 table: counts[a][b] = #{x : S(x ^ a) ^ S(x) = b}."""

    counts: tuple[tuple[int, ...], ...]

    def __getitem__(self, a: int) -> tuple[int, ...]:
        return self.counts[a]

    @property
    def uniformity(self) -> int:
        """Maximum entry over nonzero input differences."""
        return max(self.counts[a][b] for a in range(1, 16) for b in range(16))


def compute_ddt(s: SBox4) -> DDT:
    """Exact DDT by enumerating all 16 inputs per input difference."""
    counts = [[0] * 16 for _ in range(16)]
    for a in range(16):
        for x in range(16):
            counts[a][s.table[x ^ a] ^ s.table[x]] += 1
    return DDT(counts=tuple(tuple(row) for row in counts))


def max_diff_prob(ddt: DDT) -> Fraction:
    """Maximum differential probability: max over a != 0 of counts[a][b]/16."""
    return Fraction(ddt.uniformity, 16)


@dataclass(frozen=True)
class SBoxReportRow:
    id: str
    uniformity: int
    max_entries: int
    bijective: bool


def diff_uniformity_report(sboxes: list[SBox4]) -> list[SBoxReportRow]:
    """One row per S-box, ordered by id: uniformity, number of maximal DDT
    entries over nonzero input differences, and bijectivity."""
    if not sboxes:
        raise ValueError("need at least one s-box")
    rows = []
    for s in sorted(sboxes, key=lambda s: s.id):
        ddt = compute_ddt(s)
        u = ddt.uniformity
        n_max = sum(
            1 for a in range(1, 16) for b in range(16) if ddt.counts[a][b] == u
        )
        rows.append(
            SBoxReportRow(
                id=s.id,
                uniformity=u,
                max_entries=n_max,
                bijective=sorted(s.table) == list(range(16)),
            )
        )
    return rows
