import pytest

from entrobound.verify import SUITES, Check, run_suite, theorem_grid


@pytest.mark.parametrize("suite,samples", [("integrals", 12), ("lemmas", 60), ("bounds", 60)])
def test_suites_pass(suite, samples):
    checks = run_suite(suite, seed=3, samples=samples)
    assert checks and all(c.suite == suite for c in checks)
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, failed


def test_integral_suite_names():
    names = {c.name for c in run_suite("integrals", seed=1, samples=5)}
    assert "T_A(A) = I, closed form" in names
    assert "path-integral vs spectral relative entropy" in names


def test_deterministic():
    a = run_suite("lemmas", seed=1, samples=50)
    b = run_suite("lemmas", seed=1, samples=50)
    assert [c.line() for c in a] == [c.line() for c in b]


def test_all_and_unknown():
    assert set(SUITES) == {"integrals", "lemmas", "bounds"}
    with pytest.raises(ValueError):
        run_suite("everything")


def test_check_line():
    line = Check("s", "n", 2e-3, 1e-3, False, "first failure at index 4").line()
    assert line.startswith("[FAIL] s: n") and "index 4" in line


def test_grid_is_feasible():
    grid = theorem_grid()
    assert grid and all(p.T >= abs(p.alpha - p.beta) for p in grid)
