from fractions import Fraction

import pytest

from spndiff import SBox4, compute_ddt, diff_uniformity_report, max_diff_prob

from oracles import REF_BOXES, sbox_table

IDENTITY = SBox4(id="ident", table=tuple(range(16)))


def oracle_ddt(table):
    """Independent pairwise enumeration over all (x, x') input pairs."""
    counts = [[0] * 16 for _ in range(16)]
    for x in range(16):
        for xp in range(16):
            counts[x ^ xp][table[x] ^ table[xp]] += 1
    return counts


@pytest.fixture(scope="module")
def ref_sboxes(ref):
    return [ref.sbox(sid) for sid in ("s1", "s2", "s3", "s4")]


class TestComputeDDT:
    def test_zero_difference_preserved(self, ref_sboxes):
        assert compute_ddt(ref_sboxes[0])[0][0] == 16

    def test_full_tables_match_pairwise_oracle(self, ref_sboxes, toy):
        for s in ref_sboxes + [toy.sbox("s")]:
            assert [list(r) for r in compute_ddt(s).counts] == oracle_ddt(s.table)

    def test_uniformity_four_for_all_selected_sboxes(self, ref_sboxes):
        for s in ref_sboxes:
            assert compute_ddt(s).uniformity == 4

    def test_s1_single_entry(self, ref_sboxes):
        # pair (0, 1) maps through s1 to outputs (1, F), difference E
        assert compute_ddt(ref_sboxes[0])[1][0xE] == 2


class TestMaxDiffProb:
    def test_identity_sbox(self):
        assert max_diff_prob(compute_ddt(IDENTITY)) == 1

    def test_s1(self, ref_sboxes):
        assert max_diff_prob(compute_ddt(ref_sboxes[0])) == Fraction(1, 4)

    def test_s4_matches_oracle(self, ref_sboxes):
        oracle = oracle_ddt(sbox_table(REF_BOXES[3]))
        u = max(oracle[a][b] for a in range(1, 16) for b in range(16))
        assert max_diff_prob(compute_ddt(ref_sboxes[3])) == Fraction(u, 16)


class TestReport:
    def test_selected_sboxes(self, ref_sboxes):
        rows = diff_uniformity_report(ref_sboxes)
        assert [r.id for r in rows] == ["s1", "s2", "s3", "s4"]
        assert all(r.uniformity == 4 and r.bijective for r in rows)

    def test_identity_row(self):
        (row,) = diff_uniformity_report([IDENTITY])
        assert row.uniformity == 16

    def test_s2_max_entries_matches_oracle(self, ref_sboxes):
        oracle = oracle_ddt(sbox_table(REF_BOXES[1]))
        u = max(oracle[a][b] for a in range(1, 16) for b in range(16))
        n = sum(1 for a in range(1, 16) for b in range(16) if oracle[a][b] == u)
        (row,) = diff_uniformity_report([ref_sboxes[1]])
        assert (row.uniformity, row.max_entries) == (u, n)

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            diff_uniformity_report([])


class TestInvariants:
    def test_row_and_column_sums(self, ref_sboxes):
        for s in ref_sboxes:
            ddt = compute_ddt(s)
            for a in range(16):
                assert sum(ddt[a]) == 16
            for b in range(16):
                assert sum(ddt[a][b] for a in range(16)) == 16

    def test_parity(self, ref_sboxes):
        for s in ref_sboxes:
            ddt = compute_ddt(s)
            assert all(ddt[a][b] % 2 == 0 for a in range(16) for b in range(16))

    def test_inverse_symmetry(self, ref_sboxes):
        for s in ref_sboxes:
            inv = SBox4(id=s.id + "-inv", table=s.inverse_table())
            fwd, bwd = compute_ddt(s), compute_ddt(inv)
            assert all(
                bwd[b][a] == fwd[a][b] for a in range(16) for b in range(16)
            )

    def test_affine_key_invariance(self, ref_sboxes):
        s = ref_sboxes[0]
        base = compute_ddt(s)
        for k in range(16):
            for c in range(16):
                shifted = SBox4(
                    id="t", table=tuple(s.table[x ^ k] ^ c for x in range(16))
                )
                assert compute_ddt(shifted).counts == base.counts
