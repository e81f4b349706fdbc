"""Acceptance gate: one test per criterion, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script; a
pass/fail line per criterion is printed either way.
"""

import time

import pytest

from defect_forge import build_S_r, build_table
from defect_forge.checks import (
    AcceptanceConfig,
    check_covers,
    check_determinism,
    check_integer_defects,
    check_known_values,
    check_oracle,
    check_ordinals,
    check_pair_properties,
    check_selfridge,
    check_stable_defects,
    run_checks,
)

LIMIT = 1_200_000
CFG = AcceptanceConfig()


@pytest.fixture(scope="module")
def timed_table():
    t0 = time.perf_counter()
    table = build_table(LIMIT)
    return table, time.perf_counter() - t0


def _record(log, result, extra=""):
    line = result.line() + extra
    log.append(line)
    print(line)
    return result


def test_criterion_1_oracle_equivalence(timed_table, acceptance_log):
    table, _ = timed_table
    res = _record(acceptance_log, check_oracle(table, CFG))
    assert res.passed, res.detail
    assert res.seconds < 60


def test_criterion_2_known_values(timed_table, acceptance_log):
    table, build_seconds = timed_table
    res = check_known_values(table, CFG)
    total = build_seconds + res.seconds
    _record(acceptance_log, res, f" [with build: {total:.2f}s]")
    assert res.passed, res.detail
    assert total < 30


def test_criterion_3_selfridge(timed_table, acceptance_log):
    res = _record(acceptance_log, check_selfridge(timed_table[0], CFG))
    assert res.passed, res.detail


def test_criterion_4_integer_defects(timed_table, acceptance_log):
    res = _record(acceptance_log, check_integer_defects(timed_table[0], CFG))
    assert res.passed, res.detail


def test_criterion_5_covering_sets(timed_table, acceptance_log):
    res = _record(acceptance_log, check_covers(timed_table[0], CFG))
    assert res.passed, res.detail
    assert res.seconds < 300


def test_criterion_6_defect_functional(timed_table, acceptance_log):
    res = _record(acceptance_log, check_pair_properties(timed_table[0], CFG))
    assert res.passed, res.detail


def test_criterion_7_stable_defects(timed_table, acceptance_log):
    res = _record(acceptance_log, check_stable_defects(timed_table[0], CFG))
    assert res.passed, res.detail


def test_criterion_8_ordinals(timed_table, acceptance_log):
    res = _record(acceptance_log, check_ordinals(timed_table[0], CFG))
    assert res.passed, res.detail
    assert res.seconds < 5


def test_criterion_9_determinism(timed_table, acceptance_log, tmp_path):
    table, _ = timed_table
    res = check_determinism(table, CFG)
    # and through the on-disk artifacts of a second, independent build
    again = build_table(LIMIT)
    again.save(tmp_path / "a.ict")
    table.save(tmp_path / "b.ict")
    same_files = (tmp_path / "a.ict").read_bytes() == (tmp_path / "b.ict").read_bytes()
    for r in ("1/2", "1", "3/2"):
        (tmp_path / "a.json").write_text(build_S_r(again, r).dumps(), encoding="utf-8")
        (tmp_path / "b.json").write_text(build_S_r(table, r).dumps(), encoding="utf-8")
        same_files &= (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    _record(acceptance_log, res, f" [files identical: {same_files}]")
    assert res.passed, res.detail
    assert same_files


if __name__ == "__main__":
    t = build_table(LIMIT)
    results = run_checks(t, CFG, log=print)
    raise SystemExit(0 if all(r.passed for r in results) else 1)
