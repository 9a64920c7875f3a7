"""Report assembly: per-round scan rows, published-value comparison, and the
full report bundle behind the ``report`` CLI subcommand.

Published reference values for the SEPAR Enc-block (per-round differential
maxima, the seven high-probability characteristics, and the active-S-box
bound cases) are kept here as comparison targets. Measured values from the
bundled reconstruction are compared against them and a structured
match/mismatch verdict is emitted; see the reconstruction notes in
``separ-encblock-ref.cd``.
"""

from __future__ import annotations

from fractions import Fraction

from . import __version__
from .cipher import CipherDescription, KeyAssignment, zero_key
from .sbox import compute_ddt, diff_uniformity_report, max_diff_prob
from .scan import DiffDistribution, scan_max
from .trails import (
    best_trail,
    cipher_bound,
    min_active_sboxes,
    theorem_lower_bound,
)

# Published per-round maxima max_{a!=0,b} D(a,b) for the SEPAR Enc-block,
# by number of chained b16 units. The 0-unit entry is not the identity, so
# the Enc-block contains components beyond the b16 chain that this model
# does not reproduce; it is excluded from comparisons.
PUBLISHED_MAX_COUNTS = {0: 16370, 1: 1016, 2: 84, 3: 22, 4: 22}

# Published high-probability characteristics for the 4-unit Enc-block.
PUBLISHED_CHARACTERISTICS = (
    (0x0424, 0x2A5A),
    (0x0494, 0x2A5A),
    (0x0704, 0x5D93),
    (0x0B24, 0x2A5A),
    (0x0B94, 0x2A5A),
    (0x0E04, 0x5D93),
    (0xCC80, 0x61E6),
)

# Published structural bound: at least 7+i active S-boxes per 4-unit chain,
# at least 10 x 8 = 80 over the eight chained units of the full cipher.
PUBLISHED_MIN_ACTIVE_PER_UNIT = 10
PUBLISHED_UNITS = 8
MAX_SBOX_PROB = Fraction(1, 4)


def emit_scan_rows(
    desc: CipherDescription,
    max_rounds: int,
    key: KeyAssignment | None = None,
    jobs: int | None = None,
) -> list[tuple[int, DiffDistribution]]:
    """Full scan for every round count 1..max_rounds, in ascending order."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if key is None:
        key = zero_key(desc)
    return [
        (r, scan_max(desc, key, rounds_override=r, jobs=jobs))
        for r in range(1, max_rounds + 1)
    ]


def saturation_round(max_counts: list[int]) -> int | None:
    """First round r (1-based) with count[r] == count[r+1], else None."""
    for i in range(len(max_counts) - 1):
        if max_counts[i] == max_counts[i + 1]:
            return i + 1
    return None


def hexw(v: int) -> str:
    return f"0x{v:04X}"


def _prob_str(count: int) -> str:
    return f"{count}/65536"


def _fraction_parts(f: Fraction) -> dict:
    import math

    return {
        "fraction": f"{f.numerator}/{f.denominator}",
        "log2": math.log2(f.numerator) - math.log2(f.denominator),
    }


def scan_comparison(measured: list[tuple[int, int]]) -> dict:
    """Structured match/mismatch verdict against the published per-round maxima."""
    per_round = []
    all_match = True
    for rounds, count in measured:
        published = PUBLISHED_MAX_COUNTS.get(rounds)
        match = published is not None and count == published
        all_match = all_match and match
        per_round.append(
            {
                "rounds": rounds,
                "measured": count,
                "published": published,
                "match": match,
            }
        )
    return {"perRound": per_round, "match": all_match}


def characteristics_comparison(
    entries: list, counts_by_pair: dict[tuple[int, int], int]
) -> dict:
    """Compare a measured characteristic set against the published pairs."""
    measured_pairs = sorted((c.input_diff, c.output_diff) for c in entries)
    pairs = []
    for a, b in PUBLISHED_CHARACTERISTICS:
        pairs.append(
            {
                "a_hex": hexw(a),
                "b_hex": hexw(b),
                "inMeasuredSet": (a, b) in set(measured_pairs),
                "measuredCount": counts_by_pair.get((a, b)),
            }
        )
    return {
        "pairs": pairs,
        "match": measured_pairs == sorted(PUBLISHED_CHARACTERISTICS),
    }


def build_report(
    desc: CipherDescription,
    max_rounds: int = 4,
    key: KeyAssignment | None = None,
    jobs: int | None = None,
) -> dict:
    """Deterministic report bundle; regeneration is byte-identical for fixed
    inputs (no timestamps, stable ordering everywhere)."""
    from .scan import diff_count

    if key is None:
        key = zero_key(desc)

    sbox_rows = []
    for row in diff_uniformity_report(list(desc.sboxes)):
        prob = max_diff_prob(compute_ddt(desc.sbox(row.id)))
        sbox_rows.append(
            {
                "id": row.id,
                "uniformity": row.uniformity,
                "maxProbability": f"{prob.numerator}/{prob.denominator}",
                "maxEntries": row.max_entries,
                "bijective": row.bijective,
            }
        )

    rows = emit_scan_rows(desc, max_rounds, key=key, jobs=jobs)
    counts = [dist.max_count for _, dist in rows]
    scan_rows = [
        {"rounds": r, "maxCount": dist.max_count, "probability": _prob_str(dist.max_count)}
        for r, dist in rows
    ]
    non_increasing = all(a >= b for a, b in zip(counts, counts[1:]))

    top = rows[-1][1].argmax
    counts_by_pair = {
        (a, b): diff_count(desc.with_rounds(max_rounds), key, a, b)
        for a, b in PUBLISHED_CHARACTERISTICS
    }
    char_entries = [
        {
            "a_hex": hexw(c.input_diff),
            "b_hex": hexw(c.output_diff),
            "count": c.count,
            "probability": _prob_str(c.count),
        }
        for c in top
    ]

    trail_rows = []
    for r in range(1, max_rounds + 1):
        mina = min_active_sboxes(desc, r)
        bt = best_trail(desc, r)
        trail_rows.append(
            {
                "rounds": r,
                "minActive": mina,
                "bestTrailProbability": _fraction_parts(bt.probability),
                "probabilityBound": _fraction_parts(MAX_SBOX_PROB**mina),
            }
        )

    theorem_cases = []
    for i in (3, 4, 5):
        tb = theorem_lower_bound(i)
        theorem_cases.append(
            {
                "i": i,
                "decompositions": [list(c) for c in tb.case_decompositions],
                "total": tb.total,
            }
        )
    full_bound = cipher_bound(
        PUBLISHED_MIN_ACTIVE_PER_UNIT, PUBLISHED_UNITS, MAX_SBOX_PROB
    )
    present_analogy = cipher_bound(PUBLISHED_MIN_ACTIVE_PER_UNIT, 5, MAX_SBOX_PROB)

    return {
        "tool": {"name": "spndiff", "version": __version__},
        "description": {
            "name": desc.name,
            "rounds": desc.rounds,
            "keySlots": desc.key_slots,
        },
        "sboxSummaries": sbox_rows,
        "scan": {
            "rows": scan_rows,
            "nonIncreasing": non_increasing,
            "saturationRound": saturation_round(counts),
            "publishedComparison": scan_comparison(
                [(r, dist.max_count) for r, dist in rows]
            ),
        },
        "characteristics": {
            "rounds": max_rounds,
            "threshold": rows[-1][1].max_count,
            "entries": char_entries,
            "publishedComparison": characteristics_comparison(top, counts_by_pair),
        },
        "trailBounds": {
            "rows": trail_rows,
            "theorem": {
                "perUnitCases": theorem_cases,
                "fullCipher": {
                    "minActivePerUnit": PUBLISHED_MIN_ACTIVE_PER_UNIT,
                    "units": PUBLISHED_UNITS,
                    "bound": _fraction_parts(full_bound),
                },
                "presentAnalogy": {
                    "minActivePerUnit": PUBLISHED_MIN_ACTIVE_PER_UNIT,
                    "units": 5,
                    "bound": _fraction_parts(present_analogy),
                },
            },
        },
    }
