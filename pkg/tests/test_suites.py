import pytest

from app.cli.suites import SUITES, Cases, run_suite
from app.cli.verify import format_table, summarize

HEAVY = {"doubling", "sync", "line-growth", "sort", "matmul", "tm", "circuits", "kinetics"}


@pytest.mark.parametrize("name", [
    pytest.param(name, marks=pytest.mark.slow) if name in HEAVY else name for name in SUITES
])
def test_suite_passes(name):
    results = run_suite(name, seed=1)
    assert results
    failures = [f"{r.case}: {r.detail}" for r in results if not r.passed]
    assert failures == []


def test_crashing_case_is_a_failure():
    cases = Cases("demo")
    cases.expect("fine", lambda: None)
    cases.expect("wrong", lambda: "got 3")
    cases.expect("crash", lambda: 1 // 0)
    passed = {r.case: r.passed for r in cases.results}
    assert passed == {"fine": True, "wrong": False, "crash": False}
    assert cases.results[2].detail.startswith("ZeroDivisionError")


def test_table_lists_failures():
    cases = Cases("demo")
    cases.expect("fine", lambda: None)
    cases.expect("wrong", lambda: "got 3")
    summary = summarize("demo", cases.results)
    assert (summary.passed, summary.failed, summary.ok) == (1, 1, False)
    table = format_table([summary])
    assert "FAIL" in table
    assert "  !! wrong: got 3" in table
    assert "fine" not in table
