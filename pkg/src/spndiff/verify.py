"""Independent verification of claimed characteristics by direct encryption.

Two modes: exhaustive over all 2^16 plaintexts at a fixed key, and a keyed
average over random keys. Keys are drawn from a splitmix64 stream so keyed
results are bit-identical across implementations in any language: one 64-bit
draw per key word, low 16 bits kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .cipher import CipherDescription, KeyAssignment, evaluate_all, zero_key

MASK64 = (1 << 64) - 1

EXHAUSTIVE = "exhaustive-fixed-key"
KEYED = "keyed-average"


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (next_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def draw_key_words(seed: int, keys: int, slots: int) -> list[tuple[int, ...]]:
    """Deterministic key schedule for keyed verification.

    Key i uses draws [i*slots, (i+1)*slots) of the stream seeded by ``seed``.
    """
    state = seed & MASK64
    out = []
    for _ in range(keys):
        words = []
        for _ in range(slots):
            state, z = splitmix64(state)
            words.append(z & 0xFFFF)
        out.append(tuple(words))
    return out


@dataclass(frozen=True)
class VerificationResult:
    input_diff: int
    output_diff: int
    mode: str
    count: int | None = None  # exhaustive mode
    mean: float | None = None  # keyed mode
    stderr: float | None = None
    keys_tested: int = 1
    seed: int | None = None


def verify_exhaustive(
    desc: CipherDescription, key: KeyAssignment, a: int, b: int
) -> VerificationResult:
    """Exact pair count over all 2^16 plaintexts at a fixed key."""
    if a == 0:
        raise ValueError("input difference must be nonzero")
    table = evaluate_all(desc, key)
    count = kernels.count_pair(table, a, b)
    return VerificationResult(
        input_diff=a, output_diff=b, mode=EXHAUSTIVE, count=count
    )


def verify_keyed(
    desc: CipherDescription, a: int, b: int, keys: int, seed: int
) -> VerificationResult:
    """Mean exhaustive count over ``keys`` splitmix64-drawn key assignments.

    Reproducible given (seed, keys); results are aggregated in key order.
    """
    if a == 0:
        raise ValueError("input difference must be nonzero")
    if keys < 1:
        raise ValueError("keys must be >= 1")
    slots = desc.key_slots
    counts = []
    for words in draw_key_words(seed, keys, slots):
        table = evaluate_all(desc, words)
        counts.append(kernels.count_pair(table, a, b))
    mean = sum(counts) / keys
    if keys > 1:
        var = sum((c - mean) ** 2 for c in counts) / (keys - 1)
        stderr = math.sqrt(var / keys)
    else:
        stderr = 0.0
    return VerificationResult(
        input_diff=a,
        output_diff=b,
        mode=KEYED,
        mean=mean,
        stderr=stderr,
        keys_tested=keys,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# difference notation


def parse_difference(text: str) -> int:
    """Parse a 16-bit difference from hex or comma-separated nibble notation.

    Accepts ``0x0424``, ``0424``, or ``"0000, 0100, 0010, 0100"`` (four binary
    nibbles, most significant first).
    """
    text = text.strip()
    if "," in text:
        groups = [g.strip() for g in text.split(",")]
        if len(groups) != 4:
            raise ValueError(f"nibble notation needs 4 groups, got {len(groups)}")
        value = 0
        for g in groups:
            if len(g) != 4 or any(c not in "01" for c in g):
                raise ValueError(f"bad binary nibble {g!r}")
            value = (value << 4) | int(g, 2)
        return value
    if text.lower().startswith("0x"):
        text = text[2:]
    value = int(text, 16)
    if not 0 <= value <= 0xFFFF:
        raise ValueError(f"difference {value:#x} out of 16-bit range")
    return value


def format_difference_nibbles(value: int) -> str:
    """Render a 16-bit difference in comma-separated binary nibble notation."""
    if not 0 <= value <= 0xFFFF:
        raise ValueError(f"difference {value:#x} out of 16-bit range")
    return ", ".join(f"{(value >> s) & 15:04b}" for s in (12, 8, 4, 0))


def default_verification_key(desc: CipherDescription) -> tuple[int, ...]:
    return zero_key(desc)
