import math
import warnings

import numpy as np
import pytest

from eewf.errors import InvalidInputError, NonpositiveMultiplierWarning
from eewf.multiplier import (
    LN2,
    alpha_coefficients,
    bisect_roots,
    bisection_iterations,
    compare_root_rules,
    g_bracket,
    mu_from_root,
    mu_polynomial_coefficients,
    polynomial_real_roots,
    solve_mu_root,
)


def test_alpha_single_channel():
    assert alpha_coefficients([1.0], 1.0, 1.0, 1.0)[0] == pytest.approx(2 * math.log(2), rel=1e-15)


def test_alpha_inverse_in_lambda():
    a = alpha_coefficients([1.0, 3.0], 2.0, 0.5, 1.0)
    b = alpha_coefficients([2.0, 6.0], 2.0, 0.5, 1.0)
    np.testing.assert_allclose(b, a / 2, rtol=1e-15)


def test_alpha_equal_for_equal_eigenvalues():
    a = alpha_coefficients([4.0] * 4, 5.15, 1.0, 1.0)
    assert np.ptp(a) == 0.0


def test_alpha_rejects_zero_eigenvalue():
    with pytest.raises(InvalidInputError):
        alpha_coefficients([1.0, 0.0], 1.0, 1.0, 1.0)


def test_polynomial_n1():
    np.testing.assert_allclose(mu_polynomial_coefficients([3.5]), [1 - 3.5, 1.0])


def test_polynomial_equal_pair():
    a = 1.7
    np.testing.assert_allclose(mu_polynomial_coefficients([a, a]), [a * a - 2 * a, 2 - 2 * a, 1.0], rtol=1e-14)


def test_polynomial_evaluates_product_form():
    c = mu_polynomial_coefficients([2.0, 3.0])
    assert np.polynomial.polynomial.polyval(1.0, c) == pytest.approx(-1.0, abs=1e-14)
    assert c[-1] == 1.0


def test_root_single_channel():
    assert solve_mu_root([4.25]) == pytest.approx(3.25, abs=1e-12)


def test_root_equal_pair_is_flagged():
    with pytest.warns(NonpositiveMultiplierWarning):
        x = solve_mu_root([2.0, 2.0])
    assert x == pytest.approx(0.0, abs=1e-12)


def test_root_two_channels_against_quadratic():
    # x^2 - 3x + 1 = 0; the branch below min alpha is (3 - sqrt 5) / 2
    x = solve_mu_root([2.0, 3.0])
    assert x == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-10)
    roots = polynomial_real_roots([2.0, 3.0])
    np.testing.assert_allclose(np.sort(roots), [(3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2], rtol=1e-12)


def test_largest_positive_root_is_infeasible():
    cmp = compare_root_rules([2.0, 3.0])
    assert cmp.largest_positive == pytest.approx((3 + math.sqrt(5)) / 2)
    assert not cmp.largest_positive_feasible
    assert cmp.rel_error < 1e-12


def test_bracket_function_is_increasing_below_min_alpha():
    a = np.array([1.5, 2.0, 7.0])
    xs = np.linspace(a.min() - 5, a.min() - 1e-3, 50)
    g = [g_bracket(a, x) for x in xs]
    assert np.all(np.diff(g) > 0)


def test_bisect_rows_are_independent_of_batch():
    rng = np.random.default_rng(0)
    alphas = rng.uniform(1, 10, (6, 4))
    mask = rng.random((6, 4)) < 0.8
    mask[:, 0] = True
    full = bisect_roots(alphas, mask)
    for i in range(6):
        assert bisect_roots(alphas[i : i + 1], mask[i : i + 1])[0] == full[i]


def test_bisection_iterations_grow_with_precision():
    assert bisection_iterations(8, 1e-12) > bisection_iterations(8, 1e-6)


def test_mu_from_root():
    assert mu_from_root(0.0, 1.0, 1.0, 1.0, 2) == 0.0
    m1 = mu_from_root(0.7, 1.0, 1.0, 1.0, 2)
    m2 = mu_from_root(0.7, 2.0, 1.0, 1.0, 2)
    assert m2 == pytest.approx(m1 / 2, rel=1e-15)
    assert m2 * 2.0 == pytest.approx(m1 * 1.0, rel=1e-15)


@pytest.mark.filterwarnings("ignore::eewf.errors.NonpositiveMultiplierWarning")
def test_siso_root_gives_channel_inversion():
    lam, sigma2, p_r, eta = 2.5, 0.7, 1.3, 1.0
    a = alpha_coefficients([lam], eta, sigma2, p_r)
    x = solve_mu_root(a)
    q = (sigma2 + p_r) / (a[0] - x) - sigma2
    assert q / lam == pytest.approx(p_r / lam, rel=1e-12)


def test_root_rules_agree_up_to_eight():
    rng = np.random.default_rng(42)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonpositiveMultiplierWarning)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            assert compare_root_rules(rng.uniform(0.2, 20, n)).rel_error < 1e-8


def test_ln2_constant():
    assert LN2 == math.log(2)
