"""
Tests for the special-function kernels.

Tests cover:
- Regularized incomplete gamma (closed form vs independent oracles)
- Nakagami CCDF/CDF and sampler consistency
- dB/dBm conversions
"""

import math

import numpy as np
import pytest
from scipy import special, stats
from scipy.integrate import quad

from core.exceptions import ValidationError
from services.special_functions import (
    NakagamiParams,
    db_to_linear,
    dbm_to_watt,
    linear_to_db,
    nakagami_ccdf,
    nakagami_cdf,
    nakagami_sample,
    regularized_lower_gamma,
    regularized_upper_gamma,
    watt_to_dbm,
)


class TestIncompleteGamma:
    """Erlang closed form of the regularized incomplete gamma."""

    def test_zero_argument(self) -> None:
        """gamma(m, 0) = 0."""
        assert regularized_lower_gamma(1, 0.0) == 0.0
        assert regularized_upper_gamma(3, 0.0) == 1.0

    def test_exponential_case(self) -> None:
        """m = 1 reduces to 1 - e^-x."""
        assert regularized_lower_gamma(1, math.log(2)) == pytest.approx(0.5, abs=1e-15)

    def test_known_value(self) -> None:
        """1 - e^-2 (1 + 2 + 2)."""
        assert regularized_lower_gamma(3, 2.0) == pytest.approx(0.323324, abs=1e-6)

    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("x", [0.01, 0.1, 1.0, 5.0, 20.0])
    def test_matches_numerical_integration(self, m: int, x: float) -> None:
        """Closed form agrees with direct integration of t^(m-1) e^-t / (m-1)!."""
        value, _ = quad(lambda t: t ** (m - 1) * math.exp(-t) / math.factorial(m - 1), 0.0, x, epsabs=1e-13)
        assert regularized_lower_gamma(m, x) == pytest.approx(value, abs=1e-9)

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
    def test_matches_scipy(self, m: int) -> None:
        """Both tails agree with scipy's gammainc/gammaincc."""
        for x in np.geomspace(1e-6, 200.0, 60):
            assert regularized_lower_gamma(m, float(x)) == pytest.approx(special.gammainc(m, x), rel=1e-10)
            expected_upper = special.gammaincc(m, x)
            assert regularized_upper_gamma(m, float(x)) == pytest.approx(expected_upper, rel=1e-10, abs=1e-300)

    def test_monotone_and_saturates(self) -> None:
        """Nondecreasing in x and above 1 - 1e-12 at x = 50."""
        values = [regularized_lower_gamma(3, x) for x in np.linspace(0.0, 50.0, 501)]
        assert all(b >= a for a, b in zip(values, values[1:], strict=False))
        assert regularized_lower_gamma(3, 50.0) > 1.0 - 1e-12

    @pytest.mark.parametrize("m", [0, -1, 2.5, True, float("nan")])
    def test_rejects_bad_shape(self, m: object) -> None:
        """Shape must be an integer >= 1."""
        with pytest.raises(ValidationError):
            regularized_lower_gamma(m, 1.0)  # type: ignore[arg-type]

    @pytest.mark.parametrize("x", [-1.0, float("inf"), float("nan")])
    def test_rejects_bad_argument(self, x: float) -> None:
        """Argument must be finite and nonnegative."""
        with pytest.raises(ValidationError):
            regularized_lower_gamma(2, x)


class TestNakagami:
    """Nakagami-m amplitude distribution."""

    def test_params_validation(self) -> None:
        """Integral floats are accepted; bad spreads are not."""
        assert NakagamiParams(3.0, 1.0).m == 3
        with pytest.raises(ValidationError):
            NakagamiParams(2, 0.0)
        with pytest.raises(ValidationError):
            NakagamiParams(1.5)

    def test_ccdf_at_zero(self) -> None:
        """CCDF is exactly 1 at the origin."""
        assert nakagami_ccdf(NakagamiParams(3), 0.0) == 1.0

    def test_ccdf_rayleigh(self) -> None:
        """m = 1 gives e^{-x^2}."""
        assert nakagami_ccdf(NakagamiParams(1), math.sqrt(math.log(2))) == pytest.approx(0.5, abs=1e-15)

    def test_ccdf_known_value(self) -> None:
        """e^-2 (1 + 2) for m = 2 at x = 1."""
        assert nakagami_ccdf(NakagamiParams(2), 1.0) == pytest.approx(0.406006, abs=1e-6)

    def test_ccdf_strictly_decreasing(self) -> None:
        """Strictly decreasing while it is still resolvable."""
        params = NakagamiParams(3)
        values = [nakagami_ccdf(params, x) for x in np.linspace(0.01, 3.0, 300)]
        assert all(b < a for a, b in zip(values, values[1:], strict=False))

    def test_cdf_complements_ccdf(self) -> None:
        """CDF + CCDF = 1."""
        params = NakagamiParams(2, 1.5)
        for x in (0.1, 0.7, 1.3, 2.9):
            assert nakagami_cdf(params, x) + nakagami_ccdf(params, x) == pytest.approx(1.0, abs=1e-15)

    def test_matches_scipy_distribution(self) -> None:
        """Same law as scipy's nakagami(nu=m, scale=sqrt(omega))."""
        params = NakagamiParams(3, 2.0)
        oracle = stats.nakagami(3, scale=math.sqrt(2.0))
        for x in (0.2, 0.9, 1.4, 2.5):
            assert nakagami_ccdf(params, x) == pytest.approx(oracle.sf(x), rel=1e-9)

    def test_sample_power_mean(self) -> None:
        """E[g^2] = omega."""
        samples = nakagami_sample(NakagamiParams(3), np.random.default_rng(11), size=1_000_000)
        assert float(np.mean(samples**2)) == pytest.approx(1.0, abs=0.005)

    def test_sample_exceedance(self) -> None:
        """Empirical P[g > 1] matches the CCDF."""
        samples = nakagami_sample(NakagamiParams(2), np.random.default_rng(12), size=1_000_000)
        assert float(np.mean(samples > 1.0)) == pytest.approx(0.406, abs=0.002)

    def test_sample_ks(self) -> None:
        """Samples pass a KS test against the analytic CDF."""
        params = NakagamiParams(3)
        samples = nakagami_sample(params, np.random.default_rng(13), size=100_000)
        cdf = np.vectorize(lambda x: nakagami_cdf(params, float(x)))
        assert stats.kstest(samples, cdf).pvalue > 0.001

    def test_sample_deterministic(self) -> None:
        """Same seed, same draws; scalar draws are floats."""
        params = NakagamiParams(2)
        a = [nakagami_sample(params, np.random.default_rng(5)) for _ in range(3)]
        b = [nakagami_sample(params, np.random.default_rng(5)) for _ in range(3)]
        assert a == b
        assert isinstance(a[0], float)
        assert a[0] >= 0.0


class TestUnitConversions:
    """dB and dBm conversions."""

    def test_db(self) -> None:
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == pytest.approx(10.0)

    def test_dbm(self) -> None:
        """Transmit power and thermal noise of the default scenario."""
        assert dbm_to_watt(20.0) == pytest.approx(0.1, rel=1e-15)
        assert dbm_to_watt(-84.0) == pytest.approx(3.981e-12, rel=1e-3)

    def test_inverses(self) -> None:
        assert linear_to_db(db_to_linear(-5.0)) == pytest.approx(-5.0, abs=1e-12)
        assert watt_to_dbm(dbm_to_watt(-84.0)) == pytest.approx(-84.0, abs=1e-12)

    @pytest.mark.parametrize("value", [float("inf"), float("-inf"), float("nan")])
    def test_rejects_non_finite(self, value: float) -> None:
        with pytest.raises(ValidationError):
            db_to_linear(value)
        with pytest.raises(ValidationError):
            dbm_to_watt(value)

    def test_rejects_non_positive_ratio(self) -> None:
        with pytest.raises(ValidationError):
            linear_to_db(0.0)
        with pytest.raises(ValidationError):
            watt_to_dbm(-1.0)
