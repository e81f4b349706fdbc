import csv
import io
import json
import math
import subprocess
import sys

import pytest

from defect_forge.cli import main
from defect_forge.cover import CASE2, CoverSet


@pytest.fixture(scope="module")
def table_file(tmp_path_factory, table):
    path = tmp_path_factory.mktemp("tables") / "t.ict"
    table.save(path)
    return path


@pytest.fixture(scope="module")
def small_file(tmp_path_factory, small_table):
    path = tmp_path_factory.mktemp("tables") / "small.ict"
    small_table.save(path)
    return path


@pytest.fixture(autouse=True)
def _no_env_table(monkeypatch):
    monkeypatch.delenv("DEFECT_FORGE_TABLE", raising=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_build_writes_cache(tmp_path, capsys, table):
    out = tmp_path / "t.ict"
    code, text, _ = run(capsys, "build", "--limit", 1000000, "--out", out)
    assert code == 0
    assert out.stat().st_size == 1_000_000 + 13
    assert table.checksum() in text


def test_build_is_reproducible(tmp_path, capsys):
    sums = []
    for name in ("a.ict", "b.ict"):
        code, text, _ = run(capsys, "build", "--limit", 30000, "--out", tmp_path / name, "--format", "json")
        assert code == 0
        sums.append(json.loads(text)["sha256"])
    assert sums[0] == sums[1]
    assert (tmp_path / "a.ict").read_bytes() == (tmp_path / "b.ict").read_bytes()


@pytest.mark.parametrize("argv", [["build", "--limit", "0"], ["query"], ["frobnicate"], ["build", "--threads", "0"]])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_build_io_failure(tmp_path, capsys):
    code, _, err = run(capsys, "build", "--limit", 100, "--out", tmp_path / "missing" / "t.ict")
    assert code == 1 and "defect-forge" in err


def test_query_examples(capsys, table_file):
    code, text, _ = run(capsys, "query", 11, 1, 107, "--table", table_file, "--format", "json")
    assert code == 0
    eleven, one, q107 = (json.loads(line) for line in text.splitlines())
    assert eleven["complexity"] == 8
    assert one["defect"] == "1.000000" and one["class"] == "Excluded"
    expect = q107["complexity"] - 3 * math.log(107) / math.log(3)
    assert q107["defect"] == f"{expect:.6f}"
    assert q107["class"] == q107["complexity"] % 3
    assert set(q107["stability"]) == {"verdict", "k_checked", "witness"}


def test_query_text(capsys, table_file):
    code, text, _ = run(capsys, "query", 11, "--table", table_file)
    assert code == 0 and "complexity=8" in text and "defect=1.452025" in text


def test_query_out_of_range(capsys, table_file):
    code, _, err = run(capsys, "query", 2_000_000, "--table", table_file)
    assert code == 3 and "range" in err


def test_missing_table(tmp_path, capsys):
    code, _, err = run(capsys, "query", 5, "--table", tmp_path / "nope.ict")
    assert code == 1 and err


def test_env_overrides_table_flag(monkeypatch, capsys, small_file, tmp_path):
    monkeypatch.setenv("DEFECT_FORGE_TABLE", str(small_file))
    code, text, _ = run(capsys, "query", 6, "--table", tmp_path / "nope.ict")
    assert code == 0 and "complexity=5" in text


def test_defects_csv(capsys, small_file):
    code, text, _ = run(capsys, "defects", "--table", small_file, "--bound", 1000, "--max-defect", "1/2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["n", "complexity", "defect_float", "class", "stable_status"]
    assert [r[0] for r in rows[1:]] == ["3", "2", "4", "8", "16"]


def test_defects_filters(capsys, small_file):
    code, text, _ = run(capsys, "defects", "--table", small_file, "--bound", 2000, "--class", 1, "--stable", "--format", "json")
    rows = json.loads(text)
    assert code == 0 and rows
    assert all(r["class"] == 1 and r["stable_status"] == "StableWithinHorizon" for r in rows)


def test_leaders(capsys, small_file):
    code, text, _ = run(capsys, "leaders", "--table", small_file, "--max-defect", "1/2", "--bound", 100)
    assert code == 0 and text.split() == ["2", "3", "4", "8", "16"]
    code, text, _ = run(capsys, "leaders", "--all", "--table", small_file, "--max-defect", "1/100", "--bound", 30)
    assert text.split() == ["3", "9", "27"]


def test_cover_round_trip(tmp_path, capsys, table_file):
    s1 = tmp_path / "s1.json"
    assert run(capsys, "cover", "--table", table_file, "--r", 1, "--out", s1)[0] == 0
    code, text, _ = run(capsys, "verify-cover", "--table", table_file, "--cover", s1, "--bound", 100000)
    report = json.loads(text)
    assert code == 0 and report["failures"] == []
    assert {"checked", "covered", "failures", "extraneous_hits"} <= set(report)


def test_tampered_cover_exits_nonzero(tmp_path, capsys, table_file):
    s1 = tmp_path / "s1.json"
    run(capsys, "cover", "--table", table_file, "--r", 1, "--out", s1)
    obj = json.loads(s1.read_text())
    obj["pairs"] = [p for p in obj["pairs"] if p["provenance"] != CASE2]
    s1.write_text(json.dumps(obj))
    code, text, _ = run(capsys, "verify-cover", "--table", table_file, "--cover", s1, "--bound", 100000)
    assert code == 1 and json.loads(text)["failures"]


def test_half_cover_is_constants(capsys, table_file):
    code, text, _ = run(capsys, "cover", "--table", table_file, "--r", "1/2")
    cover = CoverSet.loads(text)
    assert code == 0 and cover.max_degree == 0 and len(cover) == 5


POLY = '{"kind":"extend","base":{"kind":"extend","base":{"kind":"const","value":2},"addend":1},"addend":1}'
PAIR16 = '{"poly":{"kind":"extend","base":{"kind":"const","value":16},"addend":1},"base_complexity":9}'


def test_poly_commands(capsys, small_file):
    assert run(capsys, "poly", "eval", "--poly", POLY, "--at", "1,2")[1].strip() == "64"
    assert run(capsys, "poly", "eval", "--poly", '{"kind":"const","value":2}', "--at", "3", "--augmented")[1].strip() == "54"
    code, text, _ = run(capsys, "poly", "represent", "--poly", POLY, "--n", 64, "--format", "json")
    assert code == 0 and json.loads(text)["representations"] == [[1, 2]]
    code, text, _ = run(capsys, "poly", "represent", "--poly", PAIR16, "--n", 17, "--efficient",
                        "--table", small_file, "--format", "json")
    assert json.loads(text)["efficient"] is True
    assert run(capsys, "poly", "eval", "--poly", "{nope", "--at", "")[0] == 2
    assert run(capsys, "poly", "eval", "--poly", POLY, "--at", "1")[0] == 2


def test_ordinal_commands(capsys):
    assert run(capsys, "ordinal", "sum", "ω + 2", "ω·2 + 1")[1].strip() == "ω·3 + 3"
    assert run(capsys, "ordinal", "prod", "w + 1", "w + 1")[1].strip() == "ω^2 + ω·2 + 1"
    assert run(capsys, "ordinal", "cmp", "ω", "1000000")[1].strip() == "1"
    assert run(capsys, "ordinal", "cmp", "ω^ω", "1")[0] == 2


def test_selftest_quick_passes(capsys, small_file):
    code, text, _ = run(capsys, "selftest", "--quick", "--table", small_file, "--format", "json")
    summary = json.loads(text)
    assert code == 0
    assert (summary["checks_run"], summary["passed"], summary["failed"]) == (9, 9, 0)


def test_selftest_catches_corrupted_byte(tmp_path, capsys, small_file):
    data = bytearray(small_file.read_bytes())
    data[13 + 499] += 1  # entry 500
    bad = tmp_path / "bad.ict"
    bad.write_bytes(bytes(data))
    code, text, _ = run(capsys, "selftest", "--quick", "--table", bad, "--format", "json")
    summary = json.loads(text)
    assert code == 1 and summary["failed"] >= 1
    failed = {r["name"] for r in summary["results"] if not r["passed"]}
    assert "oracle equivalence" in failed


def test_console_script_entry_point(small_file):
    proc = subprocess.run(
        [sys.executable, "-m", "defect_forge.cli", "query", "11", "--table", str(small_file)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "complexity=8" in proc.stdout
