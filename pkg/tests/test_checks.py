import json

import pytest

from steinerlab.checks import (
    CHECKS,
    CheckResult,
    check_dend,
    check_findir,
    check_idem,
    check_monotone,
    check_oracle,
    check_reduce,
    check_steinsum,
    check_volume,
    findir_cases,
    run_checks,
)


def test_result_line_and_dict():
    r = CheckResult("volume", "area kept", True, 3, 0.25, {"max_rel": 1.5e-16})
    assert r.line().startswith("[PASS] volume: area kept (3 trials")
    assert "max_rel=1.5e-16" in r.line()
    assert json.loads(json.dumps(r.to_dict()))["passed"] is True
    assert CheckResult("x", "t", False, 1, 0.0, {}).line().startswith("[FAIL]")


@pytest.mark.parametrize("fn", [check_volume, check_monotone, check_steinsum, check_reduce])
def test_single_step_suites_small(fn):
    r = fn(seed=123, trials=25)
    assert r.passed and r.trials == 25


def test_dend_small():
    r = check_dend(seed=5, trials=20)
    assert r.passed
    assert r.details["equal_cases"] >= 1


def test_oracle_small():
    assert check_oracle(seed=1, trials=2, resolution=512).trials == 2


def test_findir_reports_unconverged_runs():
    cases = findir_cases(seed=5, trials=3, max_iters=3)
    r = check_findir(cases)
    assert not r.passed and r.details["not_converged"] == [0, 1, 2]
    assert not check_idem(cases, trials=3).passed


def test_findir_and_idem_on_short_runs():
    cases = [c for c in findir_cases(seed=5, trials=4, max_iters=3000) if c.trace.converged]
    assert cases
    assert check_findir(cases).passed
    assert check_idem(cases, trials=len(cases)).passed


def test_run_checks_filters_and_rejects():
    out = run_checks(["counterexample", "discontinuity"])
    assert [r.key for r in out] == ["counterexample", "discontinuity"]
    with pytest.raises(KeyError):
        run_checks(["nope"])
    assert {"volume", "findir", "oracle", "determinism"} <= set(CHECKS)
