"""Acceptance checks: one test per shipped guarantee.

Each test runs the corresponding library check at the default seed, prints a
single pass/fail line with the measured value against its threshold, and
fails if the guarantee does not hold.  The three expensive sweeps also
enforce their wall-clock budgets.
"""

import time

from strassennet.verification import (DEFAULT_SEED, check_exact_gadget_equivalence,
                                      check_growth_properties, check_inversion,
                                      check_layer_count_formula,
                                      check_multiplication_error,
                                      check_neumann_identities,
                                      check_neumann_sum_error,
                                      check_norm_domination,
                                      check_rect_square_bounds,
                                      check_squaring_error,
                                      check_weight_count_formula)


def _report(number, res, elapsed=None, budget=None):
    status = "PASS" if res.passed else "FAIL"
    line = (f"[criterion {number:02d}] {res.name}: {status} "
            f"(measured={res.measured:.6g}, threshold={res.threshold}, "
            f"cases={res.cases})")
    if elapsed is not None:
        line += f" [{elapsed:.1f}s of {budget:.0f}s budget]"
    print(line)
    assert res.passed, line
    if elapsed is not None:
        assert elapsed < budget, f"criterion {number} overran: {line}"


def _timed(check):
    start = time.perf_counter()
    res = check(DEFAULT_SEED)
    return res, time.perf_counter() - start


def test_01_weight_count_formula_is_exact():
    # depths 0..4, both gadget factories, integer equality; < 30 s
    res, elapsed = _timed(check_weight_count_formula)
    _report(1, res, elapsed, 30.0)


def test_02_layer_count_formula_is_exact():
    res = check_layer_count_formula(DEFAULT_SEED)
    _report(2, res)


def test_03_multiplication_error_within_budget():
    # relu factory, K=1, eps in {1e-1, 1e-2, 1e-3}, depths 1..3,
    # 100 random pairs each; < 2 min
    res, elapsed = _timed(check_multiplication_error)
    _report(3, res, elapsed, 120.0)


def test_04_squared_activation_multiplication_is_exact():
    # relu2 factory, n in {2, 4, 8} plus non-powers {3, 6}, 200 pairs,
    # absolute deviation from the reference product within 1e-9
    res = check_exact_gadget_equivalence(DEFAULT_SEED)
    _report(4, res)


def test_05_rectangular_counts_within_bounds():
    # (m, n, p) in {(2,3,2), (3,3,3), (5,6,4)}; measured M, L against the
    # closed-form bounds evaluated with measured gadget sizes
    res = check_rect_square_bounds(DEFAULT_SEED)
    _report(5, res)


def test_06_factored_series_identities_hold():
    # oracle-only: the doubling product equals the partial sum, in both the
    # plain and the rescaled-factor form, to relative deviation 1e-10
    res = check_neumann_identities(DEFAULT_SEED)
    _report(6, res)


def test_07_repeated_squaring_error_within_budget():
    # N in {1,2,3}, n in {2,4}, eps in {0.2, 0.05}, 50 seeds, ||A||_2 <= 1/2
    res = check_squaring_error(DEFAULT_SEED)
    _report(7, res)


def test_08_truncated_series_error_and_base_counts():
    # N in {2,3}, n in {2,4}, eps in {0.1, 0.05}, 50 seeds; plus the exact
    # (n^2 + n, 1) counts of the single-stage network
    res = check_neumann_sum_error(DEFAULT_SEED)
    _report(8, res)


def test_09_inversion_error_and_counts():
    # alpha in {1,2}, delta=0.5, eps in {0.1, 0.01}, n in {2,4,8},
    # 25 contractions each, plus count checks for both branches; < 5 min
    res, elapsed = _timed(check_inversion)
    _report(9, res, elapsed, 300.0)


def test_10_growth_recursion_and_gadget_fit():
    # exact seven-fold recursion identity for depths 0..3 and an affine
    # gadget-size fit in log2(1/eps) with R^2 >= 0.98
    res = check_growth_properties(DEFAULT_SEED)
    _report(10, res)


def test_11_spectral_norm_dominated_by_max_entry():
    # 1000 random matrices, n in {1,2,4,8}, margin 1e-9
    res = check_norm_domination(DEFAULT_SEED)
    _report(11, res)
