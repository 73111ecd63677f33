import math

import numpy as np
import pytest

from eewf.errors import DegenerateChannelError, InvalidInputError
from eewf.waterfilling import ergodic_capacity, solve_wf, solve_wf_batch

# e * E1(1) / ln 2, the mean of log2(1 + X) for X ~ Exp(1), by quadrature
ERGODIC_SISO_0DB = 0.8603473822708868


def test_isotropic_pair():
    w = solve_wf(np.array([2.0, 2.0]), 1.0, 1.0)
    np.testing.assert_allclose(w.p, [0.5, 0.5], rtol=1e-12)
    assert w.capacity == pytest.approx(2.0, rel=1e-12)


def test_rank_one_takes_all_power():
    w = solve_wf(np.array([4.0, 0.0]), 1.0, 1.0)
    np.testing.assert_allclose(w.p, [1.0, 0.0], atol=1e-14)
    assert w.capacity == pytest.approx(math.log2(5), rel=1e-12)


def test_two_active_channels():
    w = solve_wf(np.array([3.0, 1.0]), 1.0, 1.0)
    assert w.water_level == pytest.approx(7 / 6, rel=1e-12)
    np.testing.assert_allclose(w.p, [5 / 6, 1 / 6], rtol=1e-12)
    assert w.capacity == pytest.approx(math.log2(3.5) + math.log2(7 / 6), rel=1e-12)
    assert w.capacity == pytest.approx(2.02975, abs=1e-5)


def test_weak_channel_stays_off():
    w = solve_wf(np.array([10.0, 0.1]), 0.5, 1.0)
    assert w.p[1] == 0.0
    assert w.active == 1
    assert w.ptx == pytest.approx(0.5, rel=1e-14)


def test_batch_with_per_row_budget():
    lam = np.array([[3.0, 1.0], [2.0, 2.0]])
    b = solve_wf_batch(lam, np.array([1.0, 2.0]), 1.0)
    np.testing.assert_allclose(b.ptx, [1.0, 2.0], rtol=1e-14)


def test_bad_input():
    with pytest.raises(InvalidInputError):
        solve_wf(np.array([1.0]), 0.0, 1.0)
    with pytest.raises(InvalidInputError):
        solve_wf(np.array([1.0]), 1.0, -1.0)
    with pytest.raises(DegenerateChannelError):
        solve_wf(np.zeros(2), 1.0, 1.0)


def test_ergodic_siso_against_quadrature():
    assert ergodic_capacity(1, 1.0, 1.0, 100_000, 2012) == pytest.approx(ERGODIC_SISO_0DB, abs=0.02)


def test_ergodic_low_snr_is_linear():
    p_t = 1e-4
    c = ergodic_capacity(1, p_t, 1.0, 20_000, 1)
    assert c == pytest.approx(p_t / math.log(2), rel=0.05)


def test_ergodic_is_deterministic():
    assert ergodic_capacity(2, 1.0, 1.0, 500, 9) == ergodic_capacity(2, 1.0, 1.0, 500, 9)
