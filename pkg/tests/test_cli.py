import json

import pytest

from spndiff.cli import run
from spndiff.reports import (
    PUBLISHED_MAX_COUNTS,
    emit_scan_rows,
    saturation_round,
    scan_comparison,
)

from conftest import IDENTITY_TEXT


@pytest.fixture
def identity_file(tmp_path):
    p = tmp_path / "identity.cd"
    p.write_text(IDENTITY_TEXT)
    return str(p)


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, _ = run_capture(capsys, ["frobnicate"])
        assert code == 2

    def test_missing_required_flag_is_usage_error(self, capsys):
        code, _, _ = run_capture(capsys, ["ddt", "--sbox", "s1"])
        assert code == 2

    def test_unreadable_description_is_validation_error(self, capsys):
        code, _, err = run_capture(
            capsys, ["ddt", "--desc", "/nonexistent.cd", "--sbox", "s1"]
        )
        assert code == 1
        assert "error:" in err

    def test_zero_input_difference_is_validation_error(self, capsys):
        code, _, err = run_capture(
            capsys,
            ["verify", "--desc", "toy-heys", "--a", "0000", "--b", "0011"],
        )
        assert code == 1

    def test_bad_description_content(self, capsys, tmp_path):
        p = tmp_path / "bad.cd"
        p.write_text("name x\nblockbits 16\nsbox s 1FB2035869C7DAE1\nrounds 1\nround\nend\n")
        code, _, err = run_capture(capsys, ["ddt", "--desc", str(p), "--sbox", "s"])
        assert code == 1 and "error:" in err

    def test_help_exits_zero(self, capsys):
        code, out, _ = run_capture(capsys, ["--help"])
        assert code == 0


class TestDdt:
    def test_json_schema(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["ddt", "--desc", "separ-encblock-ref", "--sbox", "s1", "--out", "json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["sbox"] == "s1"
        assert payload["uniformity"] == 4
        assert len(payload["counts"]) == 16
        assert all(len(row) == 16 for row in payload["counts"])
        assert payload["counts"][0][0] == 16

    def test_text_table(self, capsys):
        code, out, _ = run_capture(
            capsys, ["ddt", "--desc", "separ-encblock-ref", "--sbox", "s1"]
        )
        assert code == 0
        assert "uniformity 4" in out

    def test_all_sboxes(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["ddt", "--desc", "separ-encblock-ref", "--sbox", "all", "--out", "json"],
        )
        rows = json.loads(out)
        assert [r["sbox"] for r in rows] == ["s1", "s2", "s3", "s4"]
        assert all(r["uniformity"] == 4 and r["bijective"] for r in rows)


class TestScan:
    def test_identity_zero_rounds(self, capsys, identity_file):
        code, out, _ = run_capture(
            capsys,
            ["scan", "--desc", identity_file, "--rounds", "0", "--out", "json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["maxCount"] == 65536
        assert payload["probability"] == "65536/65536"
        assert len(payload["characteristics"]) == 65535

    def test_json_hex_format(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["scan", "--desc", "toy-heys", "--rounds", "1", "--out", "json"],
        )
        payload = json.loads(out)
        first = payload["characteristics"][0]
        assert first["a_hex"].startswith("0x") and len(first["a_hex"]) == 6
        assert first["a_hex"][2:] == first["a_hex"][2:].upper()

    def test_csv_columns(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["scan", "--desc", "toy-heys", "--rounds", "1", "--out", "csv"],
        )
        lines = out.strip().splitlines()
        assert lines[0] == "a_hex,b_hex,count"
        a_hex, b_hex, count = lines[1].split(",")
        assert len(a_hex) == 4 and "0X" not in a_hex.upper()
        assert count == "16384"

    def test_threshold(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["scan", "--desc", "toy-heys", "--rounds", "1",
             "--threshold", "16384", "--out", "json"],
        )
        payload = json.loads(out)
        assert all(c["count"] >= 16384 for c in payload["characteristics"])

    def test_full_table_export(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["scan", "--desc", "toy-heys", "--rounds", "1",
             "--full-table", "--floor", "8192", "--out", "json"],
        )
        payload = json.loads(out)
        assert payload["fullTable"]
        assert all(e["count"] >= 8192 for e in payload["fullTable"])


class TestTrails:
    def test_json_schema(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["trails", "--desc", "toy-heys", "--rounds", "2", "--out", "json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["rounds"] == 2
        assert payload["minActive"] == 2
        assert payload["bestTrail"]["diffs_hex"] == ["0x0007", "0x0001", "0x0011"]
        assert payload["bestTrail"]["probability"] == "1/16"
        assert payload["bound"] == "1/16"

    def test_enumerate_all_optimal(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["trails", "--desc", "toy-heys", "--rounds", "1",
             "--objective", "best-prob", "--enumerate-all-optimal", "--out", "json"],
        )
        payload = json.loads(out)
        assert payload["allOptimal"]
        assert payload["bestTrail"] in payload["allOptimal"]

    def test_rounds_required(self, capsys):
        code, _, _ = run_capture(capsys, ["trails", "--desc", "toy-heys"])
        assert code == 2

    def test_enumerate_min_active(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["trails", "--desc", "toy-heys", "--rounds", "1",
             "--objective", "min-active", "--enumerate-all-optimal",
             "--out", "json"],
        )
        payload = json.loads(out)
        assert payload["allOptimal"]
        assert all(t["activeCount"] == 1 for t in payload["allOptimal"])


class TestVerifyCommand:
    def test_nibble_notation_accepted(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["verify", "--desc", "separ-encblock-ref",
             "--a", "0000, 0100, 0010, 0100", "--b", "0010, 1010, 0101, 1010",
             "--out", "json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["a_hex"] == "0x0424"
        assert payload["b_hex"] == "0x2A5A"
        assert payload["mode"] == "exhaustive-fixed-key"
        assert payload["count"] % 2 == 0

    def test_keyed_mode(self, capsys):
        code, out, _ = run_capture(
            capsys,
            ["verify", "--desc", "toy-heys", "--a", "0007", "--b", "0011",
             "--keys", "4", "--seed", "1", "--out", "json"],
        )
        payload = json.loads(out)
        assert payload["mode"] == "keyed-average"
        assert payload["keysTested"] == 4 and payload["seed"] == 1


class TestReport:
    def test_json_bundle_and_determinism(self, capsys):
        argv = ["report", "--desc", "toy-heys", "--max-rounds", "1", "--out", "json"]
        code, out1, _ = run_capture(capsys, argv)
        assert code == 0
        bundle = json.loads(out1)
        assert bundle["tool"] == {"name": "spndiff", "version": "0.1.0"}
        assert bundle["scan"]["rows"] == [
            {"rounds": 1, "maxCount": 16384, "probability": "16384/65536"}
        ]
        assert bundle["trailBounds"]["rows"][0]["minActive"] == 1
        th = bundle["trailBounds"]["theorem"]
        assert [c["total"] for c in th["perUnitCases"]] == [10, 11, 12]
        assert th["fullCipher"]["bound"]["log2"] == -160.0
        assert th["presentAnalogy"]["bound"]["log2"] == -100.0
        assert "publishedComparison" in bundle["scan"]

        code, out2, _ = run_capture(capsys, argv)
        assert out2 == out1  # byte-identical regeneration

    def test_text_output(self, capsys):
        code, out, _ = run_capture(
            capsys, ["report", "--desc", "toy-heys", "--max-rounds", "1"]
        )
        assert code == 0
        assert "differential scan" in out and "trail bounds" in out


class TestReportHelpers:
    def test_saturation_detection(self):
        assert saturation_round([1016, 84, 22, 22]) == 3
        assert saturation_round([16384, 4096, 896, 132]) is None
        assert saturation_round([5, 5, 4]) == 1

    def test_scan_comparison_published(self):
        cmp = scan_comparison([(1, 1016), (2, 84), (3, 22), (4, 22)])
        assert cmp["match"] is True
        cmp2 = scan_comparison([(1, 1016), (2, 85), (3, 22), (4, 22)])
        assert cmp2["match"] is False
        assert [r["match"] for r in cmp2["perRound"]] == [True, False, True, True]

    def test_published_row_zero_excluded_from_rows(self):
        assert PUBLISHED_MAX_COUNTS[0] == 16370  # informational only
        cmp = scan_comparison([(1, 1016)])
        assert all(r["rounds"] >= 1 for r in cmp["perRound"])

    def test_emit_scan_rows_identity(self, identity_desc):
        rows = emit_scan_rows(identity_desc.with_rounds(0), 2)
        assert [(r, d.max_count) for r, d in rows] == [(1, 65536), (2, 65536)]

    @pytest.mark.parametrize("name", ["toy-heys", "separ-encblock-onesbox"])
    def test_scan_rows_non_increasing(self, name):
        # the reference description is covered by the acceptance suite
        from spndiff import resolve_description

        _, desc = resolve_description(name)
        counts = [d.max_count for _, d in emit_scan_rows(desc, 4)]
        assert counts == sorted(counts, reverse=True)
