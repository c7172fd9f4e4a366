import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from marsrank.errors import DomainError, UnsupportedAlpha, UnsupportedK
from marsrank.kernel import chi2_sf, inverse_normal_cdf, nemenyi_q, normal_cdf, normal_sf


def chi2_sf_closed_form(x, df):
    """Even df: Poisson tail sum; df=1: erfc."""
    if df == 1:
        return math.erfc(math.sqrt(x / 2))
    assert df % 2 == 0
    h = x / 2
    return math.exp(-h) * sum(h**i / math.factorial(i) for i in range(df // 2))


class TestChi2:
    def test_zero(self):
        assert chi2_sf(0, 2) == 1.0

    @pytest.mark.parametrize("x, expected", [(60, math.exp(-30)), (35, math.exp(-17.5))])
    def test_df2_closed_form(self, x, expected):
        assert chi2_sf(x, 2) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("df", [1, 2, 4, 6, 10, 20, 40])
    def test_against_closed_forms(self, df):
        for x in np.linspace(0, 200, 401):
            assert abs(chi2_sf(x, df) - chi2_sf_closed_form(x, df)) <= 1e-10

    def test_against_scipy(self):
        worst = 0.0
        for df in range(1, 41):
            for x in np.linspace(0, 200, 201):
                worst = max(worst, abs(chi2_sf(x, df) - special.chdtrc(df, x)))
        assert worst <= 1e-10

    def test_monotone(self):
        for df in (1, 2, 5, 19):
            values = [chi2_sf(x, df) for x in np.linspace(0, 150, 600)]
            assert all(b <= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("x, df", [(-1.0, 2), (1.0, 0), (1.0, 1.5), (float("nan"), 2)])
    def test_domain(self, x, df):
        with pytest.raises(DomainError):
            chi2_sf(x, df)


class TestNormal:
    def test_median(self):
        assert normal_sf(0) == 0.5

    @given(st.floats(-30, 30))
    def test_symmetry(self, z):
        assert normal_sf(z) + normal_sf(-z) == pytest.approx(1.0, abs=1e-15)

    def test_tail_value(self):
        # continued-fraction oracle for the upper tail, independent of erfc
        def tail(z):
            f = 0.0
            for n in range(200, 0, -1):
                f = n / (z + f)
            return math.exp(-z * z / 2) / math.sqrt(2 * math.pi) / (z + f)

        assert normal_sf(5.6774) == pytest.approx(tail(5.6774), rel=1e-12)
        assert normal_sf(5.6774) == pytest.approx(6.84e-9, rel=1e-3)

    def test_against_scipy(self):
        z = np.linspace(-9, 9, 2001)
        got = np.array([normal_sf(v) for v in z])
        assert np.max(np.abs(got - stats.norm.sf(z))) <= 1e-12

    def test_monotone(self):
        z = np.linspace(-8, 8, 1001)
        got = np.array([normal_sf(v) for v in z])
        assert np.all(np.diff(got) <= 0)
        assert np.all((got > 0) & (got <= 1))


def bisect_quantile(u):
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if normal_sf(mid) > 1 - u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestInverseNormal:
    def test_median(self):
        assert inverse_normal_cdf(0.5) == 0.0

    def test_975(self):
        assert inverse_normal_cdf(0.975) == pytest.approx(bisect_quantile(0.975), abs=1e-9)
        assert inverse_normal_cdf(0.975) == pytest.approx(1.959964, abs=1e-6)

    @given(st.floats(0.5, 1 - 1e-12))
    def test_symmetry(self, u):
        # 1 - u is exact for u in [0.5, 1)
        assert inverse_normal_cdf(u) == pytest.approx(-inverse_normal_cdf(1 - u), abs=1e-9)

    def test_round_trip_grid(self):
        for u in np.linspace(0.001, 0.999, 999):
            assert normal_cdf(inverse_normal_cdf(u)) == pytest.approx(u, abs=1e-8)

    def test_against_scipy(self):
        u = np.concatenate([np.logspace(-300, -1, 300), np.linspace(0.01, 0.99, 999), 1 - np.logspace(-15, -2, 50)])
        got = np.array([inverse_normal_cdf(v) for v in u])
        assert np.max(np.abs(got - stats.norm.ppf(u))) <= 1e-9

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5, float("nan")])
    def test_domain(self, u):
        with pytest.raises(DomainError):
            inverse_normal_cdf(u)


class TestNemenyiQ:
    PUBLISHED_005 = {2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164}
    PUBLISHED_010 = {2: 1.645, 3: 2.052, 4: 2.291, 5: 2.459, 6: 2.589, 7: 2.693, 8: 2.780, 9: 2.855, 10: 2.920}

    def test_published_table(self):
        for k, q in self.PUBLISHED_005.items():
            assert nemenyi_q(k, 0.05) == q
        for k, q in self.PUBLISHED_010.items():
            assert nemenyi_q(k, 0.10) == q

    @pytest.mark.parametrize("alpha", [0.05, 0.10])
    def test_large_k_against_studentized_range(self, alpha):
        for k in range(11, 21):
            exact = stats.studentized_range.ppf(1 - alpha, k, np.inf) / math.sqrt(2)
            assert nemenyi_q(k, alpha) == pytest.approx(exact, abs=6e-4)

    @pytest.mark.parametrize("alpha", [0.05, 0.10])
    def test_increasing_in_k(self, alpha):
        q = [nemenyi_q(k, alpha) for k in range(2, 21)]
        assert all(b > a for a, b in zip(q, q[1:]))

    @pytest.mark.parametrize("k", [1, 21, 0, 2.5])
    def test_unsupported_k(self, k):
        with pytest.raises(UnsupportedK):
            nemenyi_q(k, 0.05)

    @pytest.mark.parametrize("alpha", [0.01, 0.2, 0.5])
    def test_unsupported_alpha(self, alpha):
        with pytest.raises(UnsupportedAlpha):
            nemenyi_q(3, alpha)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.05])
    def test_alpha_outside_unit_interval(self, alpha):
        with pytest.raises(DomainError):
            nemenyi_q(3, alpha)
