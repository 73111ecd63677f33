import warnings

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eewf import closed_forms as cf
from eewf.channel import ChannelMatrix, eigen_spectrum, sample_rayleigh
from eewf.errors import NonpositiveMultiplierWarning
from eewf.multiplier import compare_root_rules, g_bracket, solve_mu_root
from eewf.solver import SolveSettings, kkt_residual, rate, solve_eewf
from eewf.waterfilling import solve_wf

gain = st.floats(0.05, 50.0, allow_nan=False)
spectra = st.lists(gain, min_size=1, max_size=16).map(lambda v: np.sort(np.array(v))[::-1])
noise = st.floats(1e-3, 1e2)
power = st.floats(0.1, 10.0)


@given(spectra, noise, power)
def test_solution_is_feasible_and_certified(lam, sigma2, p_r):
    s = SolveSettings(sigma2=sigma2, p_r=p_r)
    sol = solve_eewf(lam, s)
    assert np.all(sol.p >= 0)
    assert abs(float(lam @ sol.p) - p_r) <= 1e-9 * p_r
    assert kkt_residual(sol, lam, s) <= 1e-8


@given(spectra, noise, st.integers(0, 2**32 - 1))
def test_beats_random_feasible_allocations(lam, sigma2, seed):
    s = SolveSettings(sigma2=sigma2)
    sol = solve_eewf(lam, s)
    rng = np.random.default_rng(seed)
    for _ in range(20):
        q = rng.dirichlet(np.ones(lam.size)) * s.p_r
        p = q / lam
        assert rate(lam, p, sigma2) / p.sum() <= sol.eta * (1 + 1e-10)


@given(spectra, noise, st.floats(0.1, 10.0))
def test_scale_consistency(lam, sigma2, c):
    # scaling P_r and sigma^2 together scales p and P_t, leaves the rate alone
    a = solve_eewf(lam, SolveSettings(sigma2=sigma2))
    b = solve_eewf(lam, SolveSettings(sigma2=c * sigma2, p_r=c))
    np.testing.assert_allclose(b.p, c * a.p, rtol=1e-7, atol=1e-12 * c * a.p.max())
    assert abs(b.rate - a.rate) <= 1e-8 * max(a.rate, 1.0)


@given(spectra, noise)
def test_rate_never_exceeds_capacity_at_equal_power(lam, sigma2):
    ee = solve_eewf(lam, SolveSettings(sigma2=sigma2))
    wf = solve_wf(lam, ee.ptx, sigma2)
    assert ee.rate <= wf.capacity * (1 + 1e-10)


@given(spectra, noise, power)
def test_wf_complementary_slackness(lam, sigma2, p_t):
    w = solve_wf(lam, p_t, sigma2)
    floor = sigma2 / lam
    act = w.p > 0
    scale = max(w.water_level, 1.0)
    assert np.all(np.abs(w.p[act] + floor[act] - w.water_level) <= 1e-9 * scale)
    assert np.all(floor[~act] >= w.water_level - 1e-9 * scale)
    assert abs(w.ptx - p_t) <= 1e-12 * p_t * lam.size


@given(st.lists(st.floats(0.2, 20.0), min_size=1, max_size=8))
def test_bracket_root_below_min_alpha(alphas):
    a = np.array(alphas)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonpositiveMultiplierWarning)
        x = solve_mu_root(a)
    assert a.min() - a.size <= x <= a.min() - 1
    assert abs(g_bracket(a, x)) < 1e-8 * max(1.0, float(np.sum(1.0 / np.abs(x - a))))
    assert compare_root_rules(a).rel_error <= 1e-8


@given(st.lists(st.floats(0.2, 20.0), min_size=2, max_size=6), st.floats(-10.0, 0.0), st.floats(-10.0, 0.0))
def test_bracket_function_monotone(alphas, u, v):
    a = np.array(alphas)
    lo, hi = a.min() - 1e-6 + min(u, v), a.min() - 1e-6 + max(u, v)
    assume(hi - lo > 1e-9)
    assert g_bracket(a, lo) < g_bracket(a, hi)


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=32), st.floats(1e-4, 1e4))
def test_inequality_chain(lam, gamma):
    lam = np.array(lam)
    lam = lam / lam.mean()
    hm = cf.check_hm_logsum_inequality(lam, gamma)
    bj = cf.check_bernoulli_jensen_bounds(lam, gamma)
    assert hm.holds and bj.holds
    assert hm.slack >= -1e-12 * max(1.0, np.log2(1 + gamma * lam.max()))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.integers(0, 10**6))
def test_spectrum_unitary_invariance(n, seed, trial):
    h = sample_rayleigh(n, seed, trial)
    rng = np.random.default_rng(seed ^ trial)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    u, _ = np.linalg.qr(z)
    rotated = ChannelMatrix(n, u @ h.entries @ u.conj().T)
    a, b = eigen_spectrum(h).lambdas, eigen_spectrum(rotated).lambdas
    np.testing.assert_allclose(b, a, rtol=1e-10, atol=1e-12 * a.max())


@given(st.integers(1, 8), st.integers(0, 2**64 - 1), st.integers(0, 2**31))
def test_sampling_is_pure(n, seed, trial):
    assert np.array_equal(sample_rayleigh(n, seed, trial).entries, sample_rayleigh(n, seed, trial).entries)


@given(spectra, noise)
def test_active_count_bounded(lam, sigma2):
    sol = solve_eewf(lam, SolveSettings(sigma2=sigma2))
    assert 1 <= sol.active <= lam.size
    assert np.count_nonzero(sol.p) == sol.active
    # the strongest eigenmode is always used
    assert sol.p[0] > 0
