import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import kstwo

from distgrade.distributions import (
    EXACT_MAX_N,
    NormalParams,
    _durbin_cdf,
    _smirnov_upper,
    exact_dn_cdf,
    exact_dn_sf,
    kolmogorov_q,
    mc_null_pvalue,
    normal_cdf,
)
from distgrade.exceptions import ExactMethodUnavailable


def _quad_phi(z):
    dens = lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi)  # noqa: E731
    val, _ = quad(dens, -math.inf, z, epsabs=1e-14, epsrel=1e-13)
    return val


class TestNormalParams:
    @pytest.mark.parametrize("sigma", [0.0, -1.0, math.nan, math.inf])
    def test_rejects_bad_sigma(self, sigma):
        with pytest.raises(ValueError):
            NormalParams(0.0, sigma)

    @pytest.mark.parametrize("mu", [math.nan, math.inf, -math.inf])
    def test_rejects_nonfinite_mu(self, mu):
        with pytest.raises(ValueError):
            NormalParams(mu, 1.0)


class TestNormalCdf:
    def test_center(self):
        assert normal_cdf(0.0, NormalParams(0, 1)) == 0.5

    @pytest.mark.parametrize("mu,sigma", [(0, 1), (34787.0, 187.34), (-3.5, 0.01)])
    def test_location_invariance(self, mu, sigma):
        assert normal_cdf(mu, NormalParams(mu, sigma)) == 0.5

    def test_upper_975_against_quadrature(self):
        expected = _quad_phi(1.959964)
        assert expected == pytest.approx(0.975, abs=1e-6)
        assert normal_cdf(1.959964) == pytest.approx(expected, abs=1e-6)

    def test_accuracy_over_eight_sigmas(self):
        mpmath.mp.dps = 40
        for z in np.linspace(-8, 8, 321):
            ref = float(mpmath.ncdf(mpmath.mpf(float(z))))
            assert abs(normal_cdf(z) - ref) <= 1e-10

    def test_quadrature_spot_checks(self):
        for z in (-6.0, -3.0, -1.0, -0.25, 0.7, 2.5, 5.0):
            assert normal_cdf(z) == pytest.approx(_quad_phi(z), abs=1e-10)

    def test_saturation_without_nan(self):
        out = normal_cdf(np.array([-1e300, -50.0, 50.0, 1e300]))
        assert not np.any(np.isnan(out))
        assert out[0] == 0.0 and out[-1] == 1.0

    def test_strictly_increasing_in_range(self):
        # above z ~ 7 neighbouring values of 1 - Phi fall under one ulp of 1.0
        f = normal_cdf(np.linspace(-8, 7, 2001))
        assert np.all(np.diff(f) > 0)
        assert np.all(np.diff(normal_cdf(np.linspace(-40, 40, 4001))) >= 0)

    @given(
        x=st.floats(-1e4, 1e4),
        mu=st.floats(-1e3, 1e3),
        sigma=st.floats(1e-2, 1e3),
    )
    def test_reflection_symmetry(self, x, mu, sigma):
        p = NormalParams(mu, sigma)
        assert normal_cdf(x, p) + normal_cdf(2 * mu - x, p) == pytest.approx(1.0, abs=1e-12)


class TestKolmogorovQ:
    def test_origin(self):
        assert kolmogorov_q(0.0) == 1.0

    def test_five_percent_point(self):
        mpmath.mp.dps = 50
        lam = mpmath.mpf("1.358")
        ref = 2 * mpmath.fsum((-1) ** (k - 1) * mpmath.exp(-2 * k * k * lam**2) for k in range(1, 101))
        assert kolmogorov_q(1.358) == pytest.approx(0.05, abs=5e-4)
        assert kolmogorov_q(1.358) == pytest.approx(float(ref), abs=1e-12)

    def test_far_tail_underflows(self):
        assert kolmogorov_q(1e6) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            kolmogorov_q(-0.1)

    def test_nonincreasing_grid(self):
        q = np.array([kolmogorov_q(x) for x in np.linspace(0, 5, 1000)])
        assert np.all(np.diff(q) <= 0)
        assert np.all((q >= 0) & (q <= 1))

    def test_strictly_decreasing_where_resolvable(self):
        q = np.array([kolmogorov_q(x) for x in np.linspace(0.2, 5, 500)])
        assert np.all(np.diff(q) < 0)

    @pytest.mark.parametrize("lam", [0.3, 0.6, 0.95, 1.0, 1.05, 1.5, 2.5])
    def test_small_lambda_form_matches_series(self, lam):
        # the theta-function branch against a long direct sum in extended precision
        mpmath.mp.dps = 50
        lam_mp = mpmath.mpf(lam)
        ref = 2 * mpmath.nsum(lambda k: (-1) ** (k - 1) * mpmath.exp(-2 * k * k * lam_mp**2), [1, mpmath.inf])
        assert kolmogorov_q(lam) == pytest.approx(float(ref), abs=1e-12)


class TestExactDn:
    @pytest.mark.parametrize("d", np.linspace(0.5, 1.0, 51))
    def test_n1_closed_form(self, d):
        assert exact_dn_cdf(1, d) == pytest.approx(2 * d - 1, abs=1e-12)

    def test_n1_example(self):
        assert exact_dn_cdf(1, 0.75) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 7, 50, 1000])
    def test_support_bounds(self, n):
        assert exact_dn_cdf(n, 1.0) == 1.0
        assert exact_dn_cdf(n, 1.7) == 1.0
        assert exact_dn_cdf(n, 0.499 / n) == 0.0
        assert exact_dn_cdf(n, 0.0) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 5, 10, 20, 25, 60, 140])
    def test_against_scipy_kstwo(self, n):
        # scipy evaluates kstwo exactly for n <= 140
        for d in np.linspace(0.5 / n + 1e-6, 0.999, 80):
            assert exact_dn_cdf(n, d) == pytest.approx(kstwo.cdf(d, n), abs=1e-11)
            sf = kstwo.sf(d, n)
            if sf > 1e-250:
                assert exact_dn_sf(n, d) == pytest.approx(sf, rel=1e-9, abs=1e-14)

    @pytest.mark.parametrize("n", [3, 10, 40])
    def test_matrix_and_smirnov_branches_agree(self, n):
        for d in (0.5, 0.6, 0.75, 0.9):
            assert _durbin_cdf(n, d) == pytest.approx(1 - 2 * _smirnov_upper(n, d), abs=1e-12)

    def test_matrix_against_high_precision(self):
        # same recursion in 40-digit arithmetic
        mpmath.mp.dps = 40
        n, d = 60, mpmath.mpf("0.1")
        k = int(n * d) + 1
        m = 2 * k - 1
        h = k - n * d
        H = mpmath.matrix(m, m)
        for i in range(m):
            for j in range(m):
                H[i, j] = 1 if i - j + 1 >= 0 else 0
        for i in range(m):
            H[i, 0] -= h ** (i + 1)
            H[m - 1, i] -= h ** (m - i)
        if 2 * h - 1 > 0:
            H[m - 1, 0] += (2 * h - 1) ** m
        for i in range(m):
            for j in range(m):
                if i - j + 1 > 0:
                    H[i, j] /= mpmath.factorial(i - j + 1)
        ref = (H**n)[k - 1, k - 1] * mpmath.factorial(n) / mpmath.mpf(n) ** n
        assert exact_dn_cdf(n, 0.1) == pytest.approx(float(ref), abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 5, 25, 300, 1000])
    def test_nondecreasing(self, n):
        c = np.array([exact_dn_cdf(n, d) for d in np.linspace(0, 1.1, 1500)])
        assert np.all(np.diff(c) >= 0)
        assert np.all((c >= 0) & (c <= 1))

    @pytest.mark.parametrize("lam", [0.5, 1.5, 2.0])
    def test_large_n_approaches_kolmogorov(self, lam):
        n = 1000
        assert abs((1 - exact_dn_cdf(n, lam / math.sqrt(n))) - kolmogorov_q(lam)) <= 0.005

    def test_large_n_at_lambda_one(self):
        # 30-digit evaluation of the matrix recursion gives 0.2644092676966475;
        # the O(1/sqrt(n)) gap to Q(1) = 0.26999967 is still 0.0056 at n = 1000
        sf = 1 - exact_dn_cdf(1000, 1 / math.sqrt(1000))
        assert sf == pytest.approx(0.2644092676966475, abs=1e-10)
        assert 0.005 < kolmogorov_q(1.0) - sf < 0.006

    def test_sf_complements_cdf(self):
        for n in (4, 33, 500):
            for d in np.linspace(0.01, 0.99, 30):
                assert exact_dn_sf(n, d) + exact_dn_cdf(n, d) == pytest.approx(1.0, abs=1e-15)

    def test_cap(self):
        exact_dn_cdf(EXACT_MAX_N, 0.01)
        with pytest.raises(ExactMethodUnavailable):
            exact_dn_cdf(EXACT_MAX_N + 1, 0.01)

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            exact_dn_cdf(n, 0.3)


class TestMonteCarlo:
    def test_zero_statistic(self):
        assert mc_null_pvalue(5, 0.0, 1000, 7).p_hat == 1.0

    def test_statistic_at_one(self):
        assert mc_null_pvalue(5, 1.0, 1000, 7).p_hat == 0.0

    def test_too_few_reps(self):
        with pytest.raises(ValueError):
            mc_null_pvalue(5, 0.3, 99, 1)

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
    def test_bad_seed(self, seed):
        with pytest.raises(ValueError):
            mc_null_pvalue(5, 0.3, 100, seed)

    def test_std_err_formula(self):
        est = mc_null_pvalue(12, 0.3, 5000, 3)
        assert est.std_err == pytest.approx(math.sqrt(est.p_hat * (1 - est.p_hat) / est.reps))
        assert est.reps == 5000 and est.seed == 3

    def test_agrees_with_exact(self):
        est = mc_null_pvalue(20, 0.294, 100_000, 42)
        exact = 1 - exact_dn_cdf(20, 0.294)
        assert abs(est.p_hat - exact) <= 3 * est.std_err

    @pytest.mark.parametrize("estimated", [False, True])
    def test_bit_identical(self, estimated):
        a = mc_null_pvalue(15, 0.2, 3000, 2**63 + 5, estimated)
        b = mc_null_pvalue(15, 0.2, 3000, 2**63 + 5, estimated)
        assert a == b

    def test_frozen_stream(self):
        # pins the Philox stream; changes here mean results are no longer reproducible
        assert mc_null_pvalue(10, 0.25, 1000, 42).p_hat == 0.497
        rng = np.random.Generator(np.random.Philox(42))
        assert rng.random() == 0.08607763073528474

    def test_estimated_null_is_smaller(self):
        # re-estimating mu and sigma shrinks D, so the Lilliefors p-value is below the classic one
        d = 0.2
        lil = mc_null_pvalue(20, d, 20_000, 11, estimated_params=True).p_hat
        classic = 1 - exact_dn_cdf(20, d)
        assert lil < classic

    def test_lilliefors_critical_value(self):
        # Lilliefors' tabulated 5% critical value for n = 20 is 0.190
        est = mc_null_pvalue(20, 0.190, 40_000, 5, estimated_params=True)
        assert abs(est.p_hat - 0.05) < 0.01

    @settings(max_examples=20, deadline=None)
    @given(n=st.integers(1, 30), d=st.floats(0, 1), seed=st.integers(0, 2**64 - 1))
    def test_probability_range(self, n, d, seed):
        est = mc_null_pvalue(n, d, 100, seed)
        assert 0.0 <= est.p_hat <= 1.0
