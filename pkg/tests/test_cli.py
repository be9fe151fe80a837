"""Command-surface tests: argument handling, exit codes, output shapes, and
the audit command's plumbing (partial runs, cache flags, determinism)."""

import json

import pytest

from adicgaps.cli import (
    AUDIT_CHECKS,
    DISCREPANCY_KNOWN,
    EXIT_OK,
    EXIT_USAGE,
    GAP_STILDE,
    PASS,
    REFERENCE_STRONG_TABLE,
    main,
)
from adicgaps.gaps import critical_record_gap
from adicgaps.breaking import record_three_gap


@pytest.fixture
def gap_file(tmp_path):
    def write(name, spec):
        path = tmp_path / name
        path.write_text(json.dumps(spec.to_json()))
        return str(path)

    return write


class TestTypesEnum:
    def test_dyadic_listing(self, capsys):
        assert main(["types", "enum", "--n", "2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "record types over the 2-letter alphabet: 8" in out
        assert "[u1 l0 l1]" in out
        assert out.count("top-comb") == 4

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 8), (3, 61)])
    def test_json_counts(self, capsys, n, count):
        assert main(["types", "enum", "--n", str(n), "--json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["alphabet"] == n
        assert payload["count"] == count
        assert len(payload["types"]) == count
        assert payload["types"][0]["text"] == "[l0]"

    def test_out_of_range_exits_2(self, capsys):
        assert main(["types", "enum", "--n", "9"]) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_missing_argument_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["types", "enum"])
        assert exc.value.code == 2


class TestEnumStrong:
    def test_dyadic_classes(self, capsys):
        assert main(["gaps", "enum-strong", "--n", "2", "--no-cache"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "strong 2-gap candidates: 9" in out
        assert "minimal classes (mutual order): 6" in out
        assert out.count("class ") == 6

    def test_upto_perm(self, capsys):
        assert (
            main(["gaps", "enum-strong", "--n", "2", "--upto-perm", "--no-cache"])
            == EXIT_OK
        )
        out = capsys.readouterr().out
        assert "alphabet convention): 4" in out
        assert "side permutation only: 6" in out

    def test_json_shape(self, capsys):
        assert main(["gaps", "enum-strong", "--n", "2", "--json", "--no-cache"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["candidates"] == 9
        assert len(payload["classes"]) == 6
        assert payload["quotients"] == {"alphabet": 4, "sides_only": 6}
        assert payload["mode"] == "exact"

    def test_out_of_range_exits_2(self, capsys):
        assert main(["gaps", "enum-strong", "--n", "4"]) == EXIT_USAGE
        assert "desk-scale" in capsys.readouterr().err

    def test_cache_roundtrip_preserves_output(self, capsys, tmp_path):
        argv = ["gaps", "enum-strong", "--n", "2", "--json", "--cache-dir", str(tmp_path)]
        assert main(argv) == EXIT_OK
        cold = capsys.readouterr().out
        cached_files = list(tmp_path.rglob("*.json"))
        assert cached_files, "first run should populate the cache"
        assert main(argv) == EXIT_OK
        warm = capsys.readouterr().out
        assert warm == cold


class TestGapsOrder:
    def test_witnessed_relation(self, capsys, gap_file):
        left = gap_file("left.json", REFERENCE_STRONG_TABLE["4*"])
        right = gap_file("right.json", GAP_STILDE)
        assert main(["gaps", "order", "--left", left, "--right", right]) == EXIT_OK
        out = capsys.readouterr().out
        assert "verdict: LE_witnessed" in out
        assert "witness: efamily" in out
        assert "revalidated: True" in out

    def test_exact_refutation(self, capsys, gap_file):
        left = gap_file("left.json", REFERENCE_STRONG_TABLE["3"])
        right = gap_file("right.json", REFERENCE_STRONG_TABLE["4"])
        assert main(["gaps", "order", "--left", left, "--right", right]) == EXIT_OK
        out = capsys.readouterr().out
        assert "verdict: NOT_LE_refuted_exact" in out
        assert "(exact)" in out

    def test_json_shape(self, capsys, gap_file):
        left = gap_file("left.json", REFERENCE_STRONG_TABLE["4*"])
        right = gap_file("right.json", GAP_STILDE)
        assert (
            main(["gaps", "order", "--left", left, "--right", right, "--json"])
            == EXIT_OK
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "LE_witnessed"
        assert payload["revalidated"] is True
        assert payload["witness"]["kind"] == "efamily"
        assert payload["searched"] == 20

    def test_malformed_file_exits_2(self, capsys, tmp_path, gap_file):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        right = gap_file("right.json", GAP_STILDE)
        assert (
            main(["gaps", "order", "--left", str(bad), "--right", right])
            == EXIT_USAGE
        )
        assert "not valid JSON" in capsys.readouterr().err

    def test_missing_file_exits_2(self, capsys, gap_file):
        right = gap_file("right.json", GAP_STILDE)
        assert (
            main(["gaps", "order", "--left", "/nonexistent.json", "--right", right])
            == EXIT_USAGE
        )
        assert "cannot read" in capsys.readouterr().err

    def test_layer_mismatch_exits_2(self, capsys, gap_file):
        left = gap_file("left.json", REFERENCE_STRONG_TABLE["4*"])
        right = gap_file("right.json", record_three_gap())
        assert (
            main(["gaps", "order", "--left", left, "--right", right]) == EXIT_USAGE
        )
        assert "layer mismatch" in capsys.readouterr().err


class TestBreakingCheck:
    def test_broken_side_pair(self, capsys, gap_file):
        gap = gap_file("c3.json", critical_record_gap(3))
        assert main(["breaking", "check", "--gap", gap, "--set", "0,1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "verdict: BROKEN_witnessed" in out
        assert "subalphabet iota=0,1" in out
        assert "revalidated: True" in out

    def test_bounded_negative_is_not_an_error(self, capsys, gap_file):
        gap = gap_file("three.json", record_three_gap())
        assert main(["breaking", "check", "--gap", gap, "--set", "0,1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "verdict: NOT_BROKEN_bounded" in out
        assert "searched: 86" in out

    def test_json_shape(self, capsys, gap_file):
        gap = gap_file("three.json", record_three_gap())
        assert (
            main(["breaking", "check", "--gap", gap, "--set", "0,2", "--json"])
            == EXIT_OK
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "BROKEN_witnessed"
        assert payload["witness"]["label"] == "blocks=00,010"
        assert payload["broken_sides"] == [0, 2]
        assert payload["revalidated"] is True

    def test_side_out_of_range_exits_2(self, capsys, gap_file):
        gap = gap_file("c3.json", critical_record_gap(3))
        assert main(["breaking", "check", "--gap", gap, "--set", "5"]) == EXIT_USAGE
        assert "not a subset" in capsys.readouterr().err

    def test_garbage_set_exits_2(self, capsys, gap_file):
        gap = gap_file("c3.json", critical_record_gap(3))
        assert main(["breaking", "check", "--gap", gap, "--set", "a,b"]) == EXIT_USAGE

    def test_strong_gap_rejected(self, capsys, gap_file):
        gap = gap_file("strong.json", REFERENCE_STRONG_TABLE["2"])
        assert main(["breaking", "check", "--gap", gap, "--set", "0"]) == EXIT_USAGE
        assert "record-layer" in capsys.readouterr().err


class TestAuditCommand:
    def test_check_names_are_unique_and_ordered(self):
        names = [name for name, _ in AUDIT_CHECKS]
        assert len(names) == len(set(names)) == 11
        assert names[-2:] == [
            "known-discrepancy-worked-family-print",
            "known-discrepancy-dominating-teeth",
        ]

    def test_partial_run_writes_report(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code = main(
            [
                "audit",
                "paper-tables",
                "--only",
                "type-catalogue,strong-two-gap-table",
                "--json-out",
                str(out),
                "--no-cache",
            ]
        )
        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        assert "[PASS] type-catalogue" in stdout
        assert "audit: 2 pass, 0 fail, 0 known discrepancies" in stdout
        report = json.loads(out.read_text())
        assert report["partial"] is True
        assert [e["check"] for e in report["entries"]] == [
            "type-catalogue",
            "strong-two-gap-table",
        ]
        assert all(e["status"] == PASS for e in report["entries"])
        assert len(report["content_hash"]) == 64
        assert report["seed"] == 0

    def test_partial_run_deterministic(self, capsys, tmp_path):
        def run(name):
            out = tmp_path / name
            assert (
                main(
                    [
                        "audit",
                        "paper-tables",
                        "--only",
                        "type-catalogue",
                        "--json-out",
                        str(out),
                        "--no-cache",
                    ]
                )
                == EXIT_OK
            )
            capsys.readouterr()
            report = json.loads(out.read_text())
            report.pop("generated_at")
            return json.dumps(report, sort_keys=True)

        assert run("a.json") == run("b.json")

    def test_known_discrepancy_does_not_fail(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code = main(
            [
                "audit",
                "paper-tables",
                "--only",
                "known-discrepancy-dominating-teeth",
                "--json-out",
                str(out),
                "--no-cache",
            ]
        )
        assert code == EXIT_OK
        report = json.loads(out.read_text())
        assert report["summary"] == {"pass": 0, "fail": 0, "discrepancy_known": 1}
        assert report["entries"][0]["status"] == DISCREPANCY_KNOWN

    def test_unknown_check_exits_2(self, capsys):
        assert (
            main(["audit", "paper-tables", "--only", "bogus", "--no-cache"])
            == EXIT_USAGE
        )
        err = capsys.readouterr().err
        assert "unknown audit check" in err
        assert "type-catalogue" in err

    def test_report_metadata(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        main(
            [
                "audit",
                "paper-tables",
                "--only",
                "type-catalogue",
                "--seed",
                "7",
                "--json-out",
                str(out),
                "--no-cache",
            ]
        )
        capsys.readouterr()
        report = json.loads(out.read_text())
        assert report["seed"] == 7
        assert report["schema"] == 1
        assert report["package"].startswith("adicgaps ")
        assert set(report["toolchain"]) == {"python", "platform"}
        assert set(report["budgets"]) == {"order", "breaking", "probe"}
        assert report["generated_at"].endswith("+00:00")
