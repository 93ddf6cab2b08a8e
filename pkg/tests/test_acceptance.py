"""The eleven acceptance criteria, one test each, at their stated tolerances.

Each test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary. Criteria 5 and 6 share the same converged runs.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from steinerlab import checks


@pytest.fixture(scope="module")
def random_processes():
    return checks.findir_cases()


def _report(n, *results):
    ok = all(r.passed for r in results)
    detail = "; ".join(r.line() for r in results)
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c01_volume():
    _report(1, checks.check_volume())


def test_c02_monotone_functionals():
    _report(2, checks.check_monotone())


def test_c03_superadditivity_and_mixed_area():
    _report(3, checks.check_steinsum(), checks.check_reduce())


def test_c04_layering_function():
    _report(4, checks.check_dend())


@pytest.mark.slow
def test_c05_random_processes_converge(random_processes):
    _report(5, checks.check_findir(random_processes))


@pytest.mark.slow
def test_c06_limits_are_idempotent(random_processes):
    _report(6, checks.check_idem(random_processes))


def test_c07_irrational_pair_gives_disk():
    _report(7, checks.check_irrat())


def test_c08_counterexample():
    _report(8, checks.check_counterexample())


def test_c09_grid_oracle():
    _report(9, checks.check_oracle())


def test_c10_discontinuity():
    _report(10, checks.check_discontinuity())


def test_c11_determinism():
    _report(11, checks.check_determinism())
