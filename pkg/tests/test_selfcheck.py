import numpy as np
import pytest

from entangle.numeric import TolerancePolicy
from entangle.selfcheck import SUITES, run_selfcheck, run_suite


@pytest.mark.parametrize("dims", [(1, 1), (1, 4), (4, 1), (2, 2), (3, 5)])
def test_all_suites_pass(dims):
    results, _ = run_selfcheck([dims], trials=8, seed=3)
    assert len(results) == len(SUITES)
    bad = [(r.name, r.max_residual, r.error) for r in results if not r.passed]
    assert not bad


def test_suite_errors_are_reported():
    def broken(rng, dim_a, dim_b, tol):
        raise RuntimeError("boom")

    r = run_suite("broken", broken, (2, 2), 3, np.random.default_rng(0), TolerancePolicy())
    assert not r.passed and "boom" in r.error


def test_suite_threshold_applies():
    r = run_suite("big", lambda *a: 1e-3, (2, 2), 2, np.random.default_rng(0), TolerancePolicy())
    assert not r.passed and r.max_residual == 1e-3


def test_same_seed_same_residuals():
    a, _ = run_selfcheck([(2, 3)], trials=5, seed=11)
    b, _ = run_selfcheck([(2, 3)], trials=5, seed=11)
    assert [r.max_residual for r in a] == [r.max_residual for r in b]


def test_rejects_nonpositive_dims():
    with pytest.raises(ValueError):
        run_selfcheck([(0, 2)], trials=1)
