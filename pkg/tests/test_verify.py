import pytest

from spndiff import (
    diff_count,
    format_difference_nibbles,
    parse_difference,
    splitmix64,
    verify_exhaustive,
    verify_keyed,
)
from spndiff.verify import draw_key_words

KEYED_IDENTITY = """\
name keyed-identity
blockbits 16
rounds 1
round
  key 0
end
"""

NIBBLE_ROWS = [
    ("0000, 0100, 0010, 0100", 0x0424),
    ("0000, 0100, 1001, 0100", 0x0494),
    ("0000, 0111, 0000, 0100", 0x0704),
    ("0000, 1011, 0010, 0100", 0x0B24),
    ("0000, 1011, 1001, 0100", 0x0B94),
    ("0000, 1110, 0000, 0100", 0x0E04),
    ("1100, 1100, 1000, 0000", 0xCC80),
]


class TestSplitmix64:
    def test_reference_vectors_seed_zero(self):
        state, outs = 0, []
        for _ in range(3):
            state, z = splitmix64(state)
            outs.append(z)
        assert outs == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
        ]

    def test_key_words_low_16_bits(self):
        # successive draws, one per key word, low 16 bits kept
        state, expect = 1, []
        for _ in range(4):
            state, z = splitmix64(state)
            expect.append(z & 0xFFFF)
        assert draw_key_words(seed=1, keys=2, slots=2) == [
            (expect[0], expect[1]),
            (expect[2], expect[3]),
        ]


class TestVerifyExhaustive:
    def test_identity(self, identity_desc):
        res = verify_exhaustive(identity_desc, (), 0x0424, 0x0424)
        assert res.count == 65536

    def test_zero_difference_rejected(self, toy, toy_key):
        with pytest.raises(ValueError):
            verify_exhaustive(toy, toy_key, 0, 0)

    def test_matches_diff_count(self, toy, toy_key):
        import numpy as np

        rng = np.random.default_rng(21)
        for _ in range(3):
            a = int(rng.integers(1, 65536))
            b = int(rng.integers(0, 65536))
            res = verify_exhaustive(toy, toy_key, a, b)
            assert res.count == diff_count(toy, toy_key, a, b)

    def test_count_range_and_parity(self, ref, ref_key):
        res = verify_exhaustive(ref, ref_key, 0x0424, 0x2A5A)
        assert 0 <= res.count <= 65536 and res.count % 2 == 0


class TestVerifyKeyed:
    def test_xor_layers_preserve_differences(self):
        from spndiff import parse_description

        desc = parse_description(KEYED_IDENTITY)
        res = verify_keyed(desc, 0x0424, 0x0424, keys=8, seed=99)
        assert res.mean == 65536 and res.stderr == 0.0

    def test_reproducible(self, toy):
        r1 = verify_keyed(toy, 0x0007, 0x0011, keys=8, seed=5)
        r2 = verify_keyed(toy, 0x0007, 0x0011, keys=8, seed=5)
        assert (r1.mean, r1.stderr) == (r2.mean, r2.stderr)
        r3 = verify_keyed(toy, 0x0007, 0x0011, keys=8, seed=6)
        assert (r1.mean, r1.stderr) != (r3.mean, r3.stderr)

    def test_ref_golden(self, ref):
        # frozen from the first computation on the shipped description
        res = verify_keyed(ref, 0xCC80, 0x61E6, keys=16, seed=1)
        assert res.mean == 0.875
        assert res.stderr == pytest.approx(0.3637192140465866)

    def test_keys_validation(self, toy):
        with pytest.raises(ValueError):
            verify_keyed(toy, 1, 1, keys=0, seed=1)


class TestDifferenceNotation:
    @pytest.mark.parametrize("text,value", NIBBLE_ROWS)
    def test_nibble_rows_round_trip(self, text, value):
        assert parse_difference(text) == value
        assert format_difference_nibbles(value) == text
        assert parse_difference(format_difference_nibbles(value)) == value

    def test_hex_forms(self):
        assert parse_difference("0x0424") == 0x0424
        assert parse_difference("0424") == 0x0424
        assert parse_difference("CC80") == 0xCC80

    @pytest.mark.parametrize("bad", ["0000, 0100", "0000, 0102, 0000, 0000", "12345"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            parse_difference(bad)
