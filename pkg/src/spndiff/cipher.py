"""Declarative model of small-block SPN ciphers.

A cipher is described in a line-oriented text format and compiled into an
immutable :class:`CipherDescription`: a set of 4-bit S-boxes plus an ordered
round template of layers (S-box substitution, bit permutation, rotation,
constant XOR, key XOR) applied ``rounds`` times to a 16-bit word.

Nibble 0 is the most significant nibble (bits 15..12); bit 15 is the most
significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

BLOCK_BITS = 16
BLOCK_SIZE = 1 << BLOCK_BITS
BLOCK_MASK = BLOCK_SIZE - 1


class DescriptionError(ValueError):
    """Raised for syntax or validation errors in a cipher description."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class SBox4:
    """A bijective 4-bit S-box with a short identifier."""

    id: str
    table: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.table) != list(range(16)):
            raise DescriptionError(
                f"s-box {self.id!r} table is not a permutation of 0..15"
            )

    def inverse_table(self) -> tuple[int, ...]:
        inv = [0] * 16
        for x, y in enumerate(self.table):
            inv[y] = x
        return tuple(inv)

    def __call__(self, x: int) -> int:
        return self.table[x]


@dataclass(frozen=True)
class Sub:
    """S-box layer: one S-box id per nibble, nibble 0 = most significant."""

    ids: tuple[str, str, str, str]


@dataclass(frozen=True)
class Perm:
    """Bit permutation: output bit i takes input bit p[i]."""

    p: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.p) != list(range(16)):
            raise DescriptionError("bit map is not a permutation of 0..15")


@dataclass(frozen=True)
class RotL:
    """Left rotation of the 16-bit word by r bits."""

    r: int

    def __post_init__(self):
        if not 0 <= self.r <= 15:
            raise DescriptionError(f"rotation {self.r} out of range 0..15")


@dataclass(frozen=True)
class XorConst:
    c: int

    def __post_init__(self):
        if not 0 <= self.c <= BLOCK_MASK:
            raise DescriptionError(f"constant {self.c:#x} out of 16-bit range")


@dataclass(frozen=True)
class KeyXor:
    slot: int

    def __post_init__(self):
        if self.slot < 0:
            raise DescriptionError(f"key slot {self.slot} must be >= 0")


LayerSpec = Union[Sub, Perm, RotL, XorConst, KeyXor]

KeyAssignment = Sequence[int]


@dataclass(frozen=True, eq=True)
class CipherDescription:
    """A validated, immutable SPN description.

    ``round_template`` is applied ``rounds`` times in order; ``key_slots`` is
    the number of distinct KeyXor slots (numbered consecutively from 0).
    """

    name: str
    sboxes: tuple[SBox4, ...]
    round_template: tuple[LayerSpec, ...]
    rounds: int
    block_bits: int = BLOCK_BITS
    _sbox_by_id: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.block_bits != BLOCK_BITS:
            raise DescriptionError(f"blockbits must be {BLOCK_BITS}")
        if self.rounds < 0:
            raise DescriptionError("rounds must be >= 0")
        by_id = {}
        for s in self.sboxes:
            if s.id in by_id:
                raise DescriptionError(f"duplicate s-box id {s.id!r}")
            by_id[s.id] = s
        slots = set()
        for layer in self.round_template:
            if isinstance(layer, Sub):
                for sid in layer.ids:
                    if sid not in by_id:
                        raise DescriptionError(f"undeclared s-box id {sid!r}")
            elif isinstance(layer, KeyXor):
                slots.add(layer.slot)
        if slots and sorted(slots) != list(range(len(slots))):
            raise DescriptionError(
                "key slots must be numbered consecutively from 0"
            )
        object.__setattr__(self, "_sbox_by_id", by_id)

    @property
    def key_slots(self) -> int:
        return len({l.slot for l in self.round_template if isinstance(l, KeyXor)})

    def sbox(self, sid: str) -> SBox4:
        return self._sbox_by_id[sid]

    def with_rounds(self, rounds: int) -> "CipherDescription":
        return CipherDescription(
            name=self.name,
            sboxes=self.sboxes,
            round_template=self.round_template,
            rounds=rounds,
        )

    def check_key(self, key: KeyAssignment) -> None:
        if len(key) != self.key_slots:
            raise ValueError(
                f"key has {len(key)} words, description needs {self.key_slots}"
            )


def zero_key(desc: CipherDescription) -> tuple[int, ...]:
    return (0,) * desc.key_slots


# ---------------------------------------------------------------------------
# description file format


def parse_description(text: str) -> CipherDescription:
    """Parse the line-oriented description format.

    Grammar (``#`` starts a comment)::

        name <identifier>
        blockbits 16
        sbox <id> <16 hex digits>     # digit j = image of input j
        rounds <n>
        round
          sub <id> <id> <id> <id>
          perm <16 space-separated ints>
          rotl <r>
          xorconst <4 hex digits>
          key <slot>
        end
    """
    name = None
    block_bits = None
    sboxes: list[SBox4] = []
    sbox_ids: set[str] = set()
    rounds = None
    template: list[LayerSpec] = []
    in_round = False
    saw_round = False

    def err(msg: str, ln: int):
        raise DescriptionError(msg, line=ln)

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kw = tok[0].lower()

        if in_round:
            if kw == "end":
                in_round = False
            elif kw == "sub":
                if len(tok) != 5:
                    err("sub needs exactly 4 s-box ids", ln)
                for sid in tok[1:]:
                    if sid not in sbox_ids:
                        err(f"undeclared s-box id {sid!r}", ln)
                template.append(Sub(ids=tuple(tok[1:])))
            elif kw == "perm":
                if len(tok) != 17:
                    err("perm needs exactly 16 bit indices", ln)
                try:
                    p = tuple(int(t) for t in tok[1:])
                except ValueError:
                    err("perm indices must be integers", ln)
                try:
                    template.append(Perm(p=p))
                except DescriptionError as e:
                    err(str(e), ln)
            elif kw == "rotl":
                if len(tok) != 2:
                    err("rotl needs one argument", ln)
                try:
                    r = int(tok[1])
                except ValueError:
                    err("rotl amount must be an integer", ln)
                try:
                    template.append(RotL(r=r))
                except DescriptionError as e:
                    err(str(e), ln)
            elif kw == "xorconst":
                if len(tok) != 2 or len(tok[1]) != 4:
                    err("xorconst needs 4 hex digits", ln)
                try:
                    c = int(tok[1], 16)
                except ValueError:
                    err(f"bad hex constant {tok[1]!r}", ln)
                template.append(XorConst(c=c))
            elif kw == "key":
                if len(tok) != 2:
                    err("key needs one slot number", ln)
                try:
                    slot = int(tok[1])
                except ValueError:
                    err("key slot must be an integer", ln)
                try:
                    template.append(KeyXor(slot=slot))
                except DescriptionError as e:
                    err(str(e), ln)
            else:
                err(f"unknown layer {kw!r}", ln)
            continue

        if kw == "name":
            if len(tok) != 2:
                err("name needs one identifier", ln)
            name = tok[1]
        elif kw == "blockbits":
            if len(tok) != 2 or tok[1] != "16":
                err("blockbits must be 16", ln)
            block_bits = 16
        elif kw == "sbox":
            if len(tok) != 3:
                err("sbox needs an id and 16 hex digits", ln)
            sid, digits = tok[1], tok[2]
            if len(digits) != 16:
                err(f"s-box {sid!r} needs exactly 16 hex digits", ln)
            try:
                table = tuple(int(c, 16) for c in digits)
            except ValueError:
                err(f"bad hex digit in s-box {sid!r}", ln)
            if sid in sbox_ids:
                err(f"duplicate s-box id {sid!r}", ln)
            try:
                sboxes.append(SBox4(id=sid, table=table))
            except DescriptionError as e:
                err(str(e), ln)
            sbox_ids.add(sid)
        elif kw == "rounds":
            if len(tok) != 2:
                err("rounds needs one integer", ln)
            try:
                rounds = int(tok[1])
            except ValueError:
                err("rounds must be an integer", ln)
            if rounds < 0:
                err("rounds must be >= 0", ln)
        elif kw == "round":
            if saw_round:
                err("only one round block is allowed", ln)
            saw_round = True
            in_round = True
        elif kw == "end":
            err("end outside a round block", ln)
        else:
            err(f"unknown directive {kw!r}", ln)

    if in_round:
        raise DescriptionError("round block not closed with end")
    if name is None:
        raise DescriptionError("missing name directive")
    if block_bits is None:
        raise DescriptionError("missing blockbits directive")
    if rounds is None:
        raise DescriptionError("missing rounds directive")

    return CipherDescription(
        name=name,
        sboxes=tuple(sboxes),
        round_template=tuple(template),
        rounds=rounds,
    )


def format_description(desc: CipherDescription) -> str:
    """Serialize a description; parsing the output yields an equal structure."""
    lines = [f"name {desc.name}", f"blockbits {desc.block_bits}"]
    for s in desc.sboxes:
        digits = "".join(f"{v:X}" for v in s.table)
        lines.append(f"sbox {s.id} {digits}")
    lines.append(f"rounds {desc.rounds}")
    lines.append("round")
    for layer in desc.round_template:
        if isinstance(layer, Sub):
            lines.append("  sub " + " ".join(layer.ids))
        elif isinstance(layer, Perm):
            lines.append("  perm " + " ".join(str(i) for i in layer.p))
        elif isinstance(layer, RotL):
            lines.append(f"  rotl {layer.r}")
        elif isinstance(layer, XorConst):
            lines.append(f"  xorconst {layer.c:04X}")
        elif isinstance(layer, KeyXor):
            lines.append(f"  key {layer.slot}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# evaluation


def _apply_layer(layer: LayerSpec, desc: CipherDescription, key: KeyAssignment, x: int) -> int:
    if isinstance(layer, Sub):
        out = 0
        for pos, sid in enumerate(layer.ids):
            shift = 12 - 4 * pos
            out |= desc.sbox(sid).table[(x >> shift) & 0xF] << shift
        return out
    if isinstance(layer, Perm):
        out = 0
        for i, src in enumerate(layer.p):
            out |= ((x >> src) & 1) << i
        return out
    if isinstance(layer, RotL):
        return ((x << layer.r) | (x >> (16 - layer.r))) & BLOCK_MASK
    if isinstance(layer, XorConst):
        return x ^ layer.c
    if isinstance(layer, KeyXor):
        return x ^ (key[layer.slot] & BLOCK_MASK)
    raise TypeError(f"unknown layer {layer!r}")


def _apply_layer_inverse(layer: LayerSpec, desc: CipherDescription, key: KeyAssignment, y: int) -> int:
    if isinstance(layer, Sub):
        out = 0
        for pos, sid in enumerate(layer.ids):
            shift = 12 - 4 * pos
            out |= desc.sbox(sid).inverse_table()[(y >> shift) & 0xF] << shift
        return out
    if isinstance(layer, Perm):
        out = 0
        for i, src in enumerate(layer.p):
            out |= ((y >> i) & 1) << src
        return out
    if isinstance(layer, RotL):
        r = layer.r
        return ((y >> r) | (y << (16 - r))) & BLOCK_MASK
    # XOR layers are involutions
    return _apply_layer(layer, desc, key, y)


def evaluate(desc: CipherDescription, key: KeyAssignment, x: int) -> int:
    """Run the cipher forward on one 16-bit word."""
    desc.check_key(key)
    if not 0 <= x <= BLOCK_MASK:
        raise ValueError(f"input {x:#x} out of 16-bit range")
    for _ in range(desc.rounds):
        for layer in desc.round_template:
            x = _apply_layer(layer, desc, key, x)
    return x


def evaluate_inverse(desc: CipherDescription, key: KeyAssignment, y: int) -> int:
    """Invert the cipher on one 16-bit word: evaluate_inverse(evaluate(x)) = x."""
    desc.check_key(key)
    if not 0 <= y <= BLOCK_MASK:
        raise ValueError(f"input {y:#x} out of 16-bit range")
    for _ in range(desc.rounds):
        for layer in reversed(desc.round_template):
            y = _apply_layer_inverse(layer, desc, key, y)
    return y


def _layer_table(layer: LayerSpec, desc: CipherDescription, key: KeyAssignment) -> np.ndarray:
    """16-bit lookup table for one layer (vectorized batch evaluation)."""
    i = np.arange(BLOCK_SIZE, dtype=np.uint32)
    if isinstance(layer, Sub):
        out = np.zeros(BLOCK_SIZE, np.uint32)
        for pos, sid in enumerate(layer.ids):
            shift = 12 - 4 * pos
            tab = np.array(desc.sbox(sid).table, np.uint32)
            out |= tab[(i >> shift) & 0xF] << shift
        return out.astype(np.uint16)
    if isinstance(layer, Perm):
        out = np.zeros(BLOCK_SIZE, np.uint32)
        for bit, src in enumerate(layer.p):
            out |= ((i >> src) & 1) << bit
        return out.astype(np.uint16)
    if isinstance(layer, RotL):
        r = layer.r
        return (((i << r) | (i >> (16 - r))) & BLOCK_MASK).astype(np.uint16)
    if isinstance(layer, XorConst):
        return (i ^ layer.c).astype(np.uint16)
    if isinstance(layer, KeyXor):
        return (i ^ (key[layer.slot] & BLOCK_MASK)).astype(np.uint16)
    raise TypeError(f"unknown layer {layer!r}")


def evaluate_all(desc: CipherDescription, key: KeyAssignment) -> np.ndarray:
    """Full codebook: uint16 array t with t[x] = evaluate(desc, key, x)."""
    desc.check_key(key)
    cur = np.arange(BLOCK_SIZE, dtype=np.uint16)
    tables = [_layer_table(layer, desc, key) for layer in desc.round_template]
    for _ in range(desc.rounds):
        for tab in tables:
            cur = tab[cur]
    return cur


def invert_codebook(table: np.ndarray) -> np.ndarray:
    """Invert a 65536-entry permutation table."""
    inv = np.empty(BLOCK_SIZE, np.uint16)
    inv[table] = np.arange(BLOCK_SIZE, dtype=np.uint16)
    return inv


# ---------------------------------------------------------------------------
# difference propagation through linear layers


def propagate_linear(
    desc: CipherDescription,
    layer_range: tuple[int, int],
    delta: int,
) -> int:
    """Push a difference through template layers [start, stop).

    XOR layers (key or constant) act as the identity on differences; the range
    must not contain an S-box layer.
    """
    start, stop = layer_range
    layers = desc.round_template[start:stop]
    for layer in layers:
        if isinstance(layer, Sub):
            raise ValueError("layer range includes an S-box layer")
    for layer in layers:
        if isinstance(layer, (KeyXor, XorConst)):
            continue
        delta = _apply_layer(layer, desc, (), delta)
    return delta


def linear_difference_table(
    desc: CipherDescription, layers: Sequence[LayerSpec]
) -> np.ndarray:
    """Difference-propagation table for a run of linear layers.

    XOR layers drop out (constants cancel in differences); Perm and RotL act
    exactly as on values.
    """
    cur = np.arange(BLOCK_SIZE, dtype=np.uint16)
    for layer in layers:
        if isinstance(layer, Sub):
            raise ValueError("layer run includes an S-box layer")
        if isinstance(layer, (KeyXor, XorConst)):
            continue
        cur = _layer_table(layer, desc, ())[cur]
    return cur


def split_round_at_sbox(
    desc: CipherDescription,
) -> tuple[tuple[LayerSpec, ...], Sub, tuple[LayerSpec, ...]]:
    """Split the round template into (pre-linear, Sub, post-linear).

    Trail search supports templates with exactly one S-box layer per round.
    """
    subs = [i for i, l in enumerate(desc.round_template) if isinstance(l, Sub)]
    if len(subs) != 1:
        raise ValueError(
            f"trail search needs exactly one S-box layer per round, found {len(subs)}"
        )
    i = subs[0]
    return (
        desc.round_template[:i],
        desc.round_template[i],
        desc.round_template[i + 1 :],
    )
