"""Exact branch-and-bound search over concrete difference trails.

The search operates on concrete 16-bit differences: linear layers propagate a
difference deterministically, only S-box layers branch (over DDT-compatible
output differences, visited in decreasing count order). Pruning uses the
standard condition against best-known results for fewer rounds, computed
incrementally from one round upward.

Probabilities are exact: partial trail weights are integer products of DDT
counts (16 for an inactive nibble), so an r-round trail with weight N has
probability N / 16^(4r).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cipher import (
    CipherDescription,
    linear_difference_table,
    split_round_at_sbox,
)
from .sbox import compute_ddt

NIBBLE_SHIFTS = (12, 8, 4, 0)


@dataclass(frozen=True)
class Trail:
    """A concrete per-round difference trail.

    ``round_diffs`` holds the block difference at each round boundary (length
    rounds+1); ``per_round_sbox_probs`` holds one transition probability per
    nibble per round (1 for inactive nibbles).
    """

    round_diffs: tuple[int, ...]
    per_round_sbox_probs: tuple[tuple[Fraction, ...], ...]
    active_count: int
    probability: Fraction

    @property
    def rounds(self) -> int:
        return len(self.round_diffs) - 1


@dataclass(frozen=True)
class BoundReport:
    rounds: int
    min_active: int
    best_trail_prob: Fraction
    theorem_lower_bound: int | None = None


@dataclass(frozen=True)
class TheoremBound:
    """Case decompositions for the structural active-S-box lower bound."""

    i: int
    case_decompositions: tuple[tuple[int, int, int, int], ...]
    total: int


class _RoundStructure:
    """Per-description tables shared by all searches."""

    def __init__(self, desc: CipherDescription):
        pre_layers, sub, post_layers = split_round_at_sbox(desc)
        self.pre = linear_difference_table(desc, pre_layers)
        self.post = linear_difference_table(desc, post_layers)
        self.sboxes = [desc.sbox(sid) for sid in sub.ids]
        self.ddts = [compute_ddt(s) for s in self.sboxes]
        # compatible outputs per (position, input nibble), count desc then value asc
        self.compat = [
            [
                tuple(
                    sorted(
                        ((b, d.counts[a][b]) for b in range(16) if d.counts[a][b]),
                        key=lambda t: (-t[1], t[0]),
                    )
                )
                for a in range(16)
            ]
            for d in self.ddts
        ]
        self.maxc = [
            [row[0][1] for row in pos_rows] for pos_rows in self.compat
        ]
        # incremental exact bounds, grown on demand
        self._min_active: list[int] = [0]
        self._best_numer: list[int] = [1]  # scale: 16^(4k) for k rounds
        self._best_seq: list[tuple | None] = [None]
        self._post_inv = None

    @property
    def post_inv(self) -> np.ndarray:
        if self._post_inv is None:
            inv = np.empty(65536, np.uint16)
            inv[self.post] = np.arange(65536, dtype=np.uint16)
            self._post_inv = inv
        return self._post_inv

    def nibbles(self, u: int) -> tuple[int, int, int, int]:
        return ((u >> 12) & 15, (u >> 8) & 15, (u >> 4) & 15, u & 15)

    def round_best_numer(self, u: int) -> int:
        n = self.nibbles(u)
        return (
            self.maxc[0][n[0]]
            * self.maxc[1][n[1]]
            * self.maxc[2][n[2]]
            * self.maxc[3][n[3]]
        )


_structures: dict = {}


def _structure(desc: CipherDescription) -> _RoundStructure:
    key = (desc.sboxes, desc.round_template)
    st = _structures.get(key)
    if st is None:
        st = _structures[key] = _RoundStructure(desc)
    return st


def _active(nibs) -> int:
    return (nibs[0] != 0) + (nibs[1] != 0) + (nibs[2] != 0) + (nibs[3] != 0)


# ---------------------------------------------------------------------------
# minimum active S-boxes


def _grow_min_active(st: _RoundStructure, rounds: int) -> None:
    pre = st.pre
    post = st.post
    compat = st.compat
    bact = st._min_active
    while len(bact) <= rounds:
        r = len(bact)
        incumbent = 4 * r + 1

        def search(d: int, i: int, acc: int) -> None:
            nonlocal incumbent
            nibs = st.nibbles(int(pre[d]))
            acc += _active(nibs)
            if acc + bact[r - i] >= incumbent:
                return
            if i == r:
                incumbent = acc
                return
            for b0, _ in compat[0][nibs[0]]:
                w0 = b0 << 12
                for b1, _ in compat[1][nibs[1]]:
                    w1 = w0 | (b1 << 8)
                    for b2, _ in compat[2][nibs[2]]:
                        w2 = w1 | (b2 << 4)
                        for b3, _ in compat[3][nibs[3]]:
                            search(int(post[w2 | b3]), i + 1, acc)

        # visit sparse first-round differences first: strong incumbents early
        firsts = sorted(range(1, 65536), key=lambda d: _active(st.nibbles(int(pre[d]))))
        for d in firsts:
            if _active(st.nibbles(int(pre[d]))) + bact[r - 1] >= incumbent:
                break  # sorted by first-round actives: nothing better follows
            search(d, 1, 0)
        bact.append(incumbent)


def min_active_sboxes(desc: CipherDescription, rounds: int) -> int:
    """Exact minimum number of active S-boxes over all nonzero-input trails."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    st = _structure(desc)
    _grow_min_active(st, rounds)
    return st._min_active[rounds]


# ---------------------------------------------------------------------------
# best trail (maximum probability)


def _grow_best_numer(st: _RoundStructure, rounds: int) -> None:
    """Extend exact best-numerator bounds (and their lexicographically
    smallest optimal sequences) up to ``rounds``."""
    pre = st.pre
    post = st.post
    compat = st.compat
    bnum = st._best_numer
    while len(bnum) <= rounds:
        r = len(bnum)
        incumbent = 0
        inc_seq = None

        def search(d: int, i: int, acc: int, seq: tuple) -> None:
            nonlocal incumbent, inc_seq
            nibs = st.nibbles(int(pre[d]))
            if acc * st.round_best_numer(int(pre[d])) * bnum[r - i] < incumbent:
                return
            if i == r:
                # last round: per-nibble maxima are independently attainable;
                # pick the lexicographically smallest next difference among them
                best_next = None
                for b0, c0 in compat[0][nibs[0]]:
                    if c0 != st.maxc[0][nibs[0]]:
                        break
                    w0 = b0 << 12
                    for b1, c1 in compat[1][nibs[1]]:
                        if c1 != st.maxc[1][nibs[1]]:
                            break
                        w1 = w0 | (b1 << 8)
                        for b2, c2 in compat[2][nibs[2]]:
                            if c2 != st.maxc[2][nibs[2]]:
                                break
                            w2 = w1 | (b2 << 4)
                            for b3, c3 in compat[3][nibs[3]]:
                                if c3 != st.maxc[3][nibs[3]]:
                                    break
                                nd = int(post[w2 | b3])
                                if best_next is None or nd < best_next:
                                    best_next = nd
                p = acc * st.round_best_numer(int(pre[d]))
                full = seq + (best_next,)
                if p > incumbent or (p == incumbent and full < inc_seq):
                    incumbent = p
                    inc_seq = full
                return
            for b0, c0 in compat[0][nibs[0]]:
                w0 = b0 << 12
                for b1, c1 in compat[1][nibs[1]]:
                    w1 = w0 | (b1 << 8)
                    c01 = c0 * c1
                    for b2, c2 in compat[2][nibs[2]]:
                        w2 = w1 | (b2 << 4)
                        c012 = c01 * c2
                        for b3, c3 in compat[3][nibs[3]]:
                            nd = int(post[w2 | b3])
                            search(nd, i + 1, acc * c012 * c3, seq + (nd,))

        firsts = sorted(
            range(1, 65536),
            key=lambda d: (-st.round_best_numer(int(pre[d])), d),
        )
        for d in firsts:
            if st.round_best_numer(int(pre[d])) * bnum[r - 1] < incumbent:
                break  # sorted by that very quantity: nothing better follows
            search(d, 1, 1, (d,))
        bnum.append(incumbent)
        st._best_seq.append(inc_seq)


def _trail_from_sequence(
    st: _RoundStructure, seq: tuple[int, ...]
) -> Trail:
    """Build a Trail (exact probabilities) from a boundary-difference sequence."""
    post_inv = st.post_inv
    probs = []
    active = 0
    total = Fraction(1)
    for i in range(len(seq) - 1):
        u = int(st.pre[seq[i]])
        v = int(post_inv[seq[i + 1]])
        row = []
        for pos, shift in enumerate(NIBBLE_SHIFTS):
            a = (u >> shift) & 15
            b = (v >> shift) & 15
            c = st.ddts[pos].counts[a][b]
            if c == 0:
                raise ValueError(
                    f"impossible transition {a:X}->{b:X} at round {i + 1}, nibble {pos}"
                )
            if a != 0:
                active += 1
            p = Fraction(c, 16)
            row.append(p)
            total *= p
        probs.append(tuple(row))
    return Trail(
        round_diffs=tuple(int(d) for d in seq),
        per_round_sbox_probs=tuple(probs),
        active_count=active,
        probability=total,
    )


def best_trail(desc: CipherDescription, rounds: int) -> Trail:
    """Maximum-probability trail; ties broken by lexicographic order of the
    boundary-difference sequence."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    st = _structure(desc)
    _grow_best_numer(st, rounds)
    return _trail_from_sequence(st, st._best_seq[rounds])


# ---------------------------------------------------------------------------
# exhaustive enumeration of all optimal trails


def optimal_trails(
    desc: CipherDescription, rounds: int, objective: str = "best-prob"
) -> list[Trail]:
    """All optimal trails for the given objective, lexicographically ordered."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if objective not in ("best-prob", "min-active"):
        raise ValueError(f"unknown objective {objective!r}")
    st = _structure(desc)
    results: list[tuple] = []

    if objective == "min-active":
        target = min_active_sboxes(desc, rounds)
        bact = st._min_active

        def search(d, i, acc, seq):
            nibs = st.nibbles(int(st.pre[d]))
            acc += _active(nibs)
            if acc + bact[rounds - i] > target:
                return
            if i == rounds:
                for nd in _successors(st, nibs):
                    results.append(seq + (nd,))
                return
            for nd in _successors(st, nibs):
                search(nd, i + 1, acc, seq + (nd,))

        for d in range(1, 65536):
            search(d, 1, 0, (d,))
    else:
        best = best_trail(desc, rounds)
        target_numer = (
            best.probability.numerator
            * (16 ** (4 * rounds) // best.probability.denominator)
        )
        bnum = st._best_numer

        def search(d, i, acc, seq):
            if acc * st.round_best_numer(int(st.pre[d])) * bnum[rounds - i] < target_numer:
                return
            nibs = st.nibbles(int(st.pre[d]))
            if i == rounds:
                for nd, c in _successors_with_counts(st, nibs):
                    if acc * c == target_numer:
                        results.append(seq + (nd,))
                return
            for nd, c in _successors_with_counts(st, nibs):
                search(nd, i + 1, acc * c, seq + (nd,))

        for d in range(1, 65536):
            search(d, 1, 1, (d,))

    results.sort()
    return [_trail_from_sequence(st, seq) for seq in results]


def _successors(st, nibs):
    for b0, _ in st.compat[0][nibs[0]]:
        w0 = b0 << 12
        for b1, _ in st.compat[1][nibs[1]]:
            w1 = w0 | (b1 << 8)
            for b2, _ in st.compat[2][nibs[2]]:
                w2 = w1 | (b2 << 4)
                for b3, _ in st.compat[3][nibs[3]]:
                    yield int(st.post[w2 | b3])


def _successors_with_counts(st, nibs):
    for b0, c0 in st.compat[0][nibs[0]]:
        w0 = b0 << 12
        for b1, c1 in st.compat[1][nibs[1]]:
            w1 = w0 | (b1 << 8)
            c01 = c0 * c1
            for b2, c2 in st.compat[2][nibs[2]]:
                w2 = w1 | (b2 << 4)
                c012 = c01 * c2
                for b3, c3 in st.compat[3][nibs[3]]:
                    yield int(st.post[w2 | b3]), c012 * c3


# ---------------------------------------------------------------------------
# structural bound arithmetic


_THEOREM_CASES = {
    3: ((3, 2, 1, 4), (3, 1, 2, 4)),
    4: ((3, 2, 2, 4), (3, 1, 3, 4), (3, 3, 1, 4)),
    5: (),  # stated without explicit decompositions
}


def theorem_lower_bound(i: int) -> TheoremBound:
    """Per-unit active-S-box lower bound 7+i with its case decompositions."""
    if i not in _THEOREM_CASES:
        raise ValueError(f"i must be in 3..5, got {i}")
    cases = _THEOREM_CASES[i]
    total = 7 + i
    for case in cases:
        assert sum(case) == total
    return TheoremBound(i=i, case_decompositions=cases, total=total)


def cipher_bound(
    min_active_per_unit: int, units: int, max_sbox_prob: Fraction
) -> Fraction:
    """Probability bound for a chained construction:
    max_sbox_prob ** (min_active_per_unit * units)."""
    if min_active_per_unit < 1 or units < 1:
        raise ValueError("active count and unit count must be positive")
    max_sbox_prob = Fraction(max_sbox_prob)
    if not 0 < max_sbox_prob <= 1:
        raise ValueError("max_sbox_prob must be in (0, 1]")
    return max_sbox_prob ** (min_active_per_unit * units)


def bound_report(
    desc: CipherDescription,
    rounds: int,
    theorem_bound: int | None = None,
) -> BoundReport:
    """Measured minimum actives and best trail probability for one description."""
    return BoundReport(
        rounds=rounds,
        min_active=min_active_sboxes(desc, rounds),
        best_trail_prob=best_trail(desc, rounds).probability,
        theorem_lower_bound=theorem_bound,
    )
