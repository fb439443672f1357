import mpmath
import numpy as np
import pytest
from scipy.special import exp1, expi

from twrn.special import EULER_GAMMA, exp_integral_ei, gauss_legendre, scaled_e1


def _series_oracle(x, terms=60):
    # independent summation in extended precision
    mpmath.mp.dps = 40
    x = mpmath.mpf(x)
    total = mpmath.euler + mpmath.log(-x)
    term = mpmath.mpf(1)
    for k in range(1, terms + 1):
        term *= x / k
        total += term / k
    return float(total)


def test_ei_minus_one_matches_series_oracle():
    # series oracle, 60 terms
    assert _series_oracle(-1.0) == pytest.approx(-0.2193839343955203, abs=1e-15)
    assert abs(float(exp_integral_ei(-1.0)) - (-0.2193839344)) <= 1e-10


@pytest.mark.parametrize("x", [-1e-6, -0.01, -0.5, -2.0, -4.999, -5.001, -7.5])
def test_ei_against_series_oracle(x):
    assert float(exp_integral_ei(x)) == pytest.approx(_series_oracle(x, 120), abs=1e-12)


def test_ei_accuracy_over_range():
    x = -np.logspace(-8, np.log10(50), 2000)
    assert np.max(np.abs(exp_integral_ei(x) - expi(x))) <= 1e-10


def test_ei_small_argument_limit():
    for x in (-1e-4, -1e-6, -1e-8):
        assert abs(float(exp_integral_ei(x)) - (EULER_GAMMA + np.log(-x))) <= 2 * abs(x)


def test_ei_deep_tail_bracketed():
    v = float(exp_integral_ei(-50.0))
    bound = np.exp(-50) / 50
    assert -1.1 * bound < v < -bound / 1.1
    assert v == pytest.approx(-3.783264029550459e-24, rel=1e-10)


@pytest.mark.parametrize("bad", [0.0, 1.0, np.nan])
def test_ei_domain(bad):
    with pytest.raises(ValueError):
        exp_integral_ei(bad)


def test_scaled_e1_large_arguments():
    y = np.logspace(-6, 3, 300)
    ref = np.array([float(mpmath.exp(v) * mpmath.e1(v)) for v in y])
    assert np.max(np.abs(scaled_e1(y) / ref - 1)) < 1e-11
    assert np.all(np.isfinite(scaled_e1(np.array([1e5, 1e8]))))
    mid = np.linspace(0.1, 20, 50)
    np.testing.assert_allclose(scaled_e1(mid), np.exp(mid) * exp1(mid), rtol=1e-12)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8, 0.0, np.pi / 2)
    # degree 15 is exact for 8 nodes
    assert np.dot(w, x ** 15) == pytest.approx((np.pi / 2) ** 16 / 16, rel=1e-13)
    assert w.sum() == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        x[0] = 1.0
