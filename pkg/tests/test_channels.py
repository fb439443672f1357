import numpy as np
import pytest
from scipy.special import j0

from twrn.channels import (ChannelStats, FadingKind, FadingProcess, LinkRealization, awgn,
                           compute_beta, sample_jakes, sample_quasi_static, sum_of_sinusoids)
from twrn.rng import substream


def test_quasi_static_variance_and_circularity():
    f, g = sample_quasi_static(ChannelStats(1.0, 1.0), 2, substream(1, 0), size=500_000)
    z = f.ravel()
    assert f.shape == (500_000, 2)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, rel=0.02)
    assert np.var(z.real) == pytest.approx(0.5, rel=0.02)
    se = 1 / np.sqrt(z.size)
    assert abs(np.mean(z)) < 4 * se
    assert abs(np.mean(z ** 2)) < 4 * se
    assert np.mean(np.abs(g) ** 2) == pytest.approx(1.0, rel=0.02)


def test_quasi_static_independent_across_frames():
    f, _ = sample_quasi_static(ChannelStats(), 1, substream(2, 0), size=100_000)
    a, b = f[:-1, 0], f[1:, 0]
    r = np.abs(np.mean(a * np.conj(b))) / np.mean(np.abs(f) ** 2)
    assert r < 0.01


def test_determinism():
    a = sample_quasi_static(ChannelStats(2.0, 3.0), 4, substream(9, 1, 2))
    b = sample_quasi_static(ChannelStats(2.0, 3.0), 4, substream(9, 1, 2))
    c = sample_quasi_static(ChannelStats(2.0, 3.0), 4, substream(9, 1, 3))
    np.testing.assert_array_equal(a[0], b[0])
    assert not np.array_equal(a[0], c[0])


@pytest.mark.parametrize("sf,sg", [(0.0, 1.0), (1.0, -1.0)])
def test_stats_must_be_positive(sf, sg):
    with pytest.raises(ValueError):
        ChannelStats(sf, sg)


def test_jakes_autocorrelation_follows_bessel_profile():
    fd, ts = 75.0, 3.693e-6 * 40  # larger step so the profile falls off within 100 lags
    x = sum_of_sinusoids(1.0, fd, ts, 101, substream(3, 0), shape=20_000)
    lags = np.array([0, 10, 25, 50, 75, 100])
    emp = np.array([np.mean(x[:, 0] * np.conj(x[:, k])).real for k in lags])
    ref = j0(2 * np.pi * fd * lags * ts)
    # 5% of the zero-lag value
    assert np.max(np.abs(emp - ref)) < 0.05


def test_jakes_gsm_lag_100_symbols():
    # Bessel oracle at the GSM parameters
    assert j0(2 * np.pi * 75 * 100 * 3.693e-6) == pytest.approx(0.992443, abs=1e-6)
    x = sum_of_sinusoids(1.0, 75.0, 3.693e-6, 101, substream(4, 0), shape=20_000)
    emp = np.mean(x[:, 0] * np.conj(x[:, 100])).real / np.mean(np.abs(x[:, 0]) ** 2)
    assert emp == pytest.approx(0.992443, abs=0.01)


def test_jakes_variance_and_shape():
    f, g = sample_jakes(ChannelStats(2.0, 0.5), 3, 75.0, 3.693e-6, 50, substream(5, 0), size=2000)
    assert f.shape == (2000, 50, 3)
    assert np.mean(np.abs(f) ** 2) == pytest.approx(2.0, rel=0.03)
    assert np.mean(np.abs(g) ** 2) == pytest.approx(0.5, rel=0.03)


def test_jakes_zero_doppler_is_constant():
    f, _ = sample_jakes(ChannelStats(), 2, 0.0, 1e-3, 20, substream(6, 0), size=5)
    np.testing.assert_allclose(f, np.broadcast_to(f[:, :1], f.shape), atol=1e-14)


def test_jakes_rejects_fast_fading():
    with pytest.raises(ValueError):
        sample_jakes(ChannelStats(), 2, 1000.0, 1e-3, 10, substream(0))
    with pytest.raises(ValueError):
        FadingProcess(FadingKind.JAKES, 1000.0, 1e-3)
    assert FadingProcess("jakes", 75.0).kind is FadingKind.JAKES


def test_awgn():
    assert not np.any(awgn(0.0, (3, 4), substream(0)))
    z = awgn(1.0, 1_000_000, substream(7, 0))
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, rel=0.02)
    with pytest.raises(ValueError):
        awgn(-1.0, 3, substream(0))


def test_beta_examples():
    s = ChannelStats(1.0, 1.0)
    assert compute_beta(1, 1, 1, s, 1) == pytest.approx(0.577350, abs=1e-6)
    assert compute_beta(2, 1, 1, s, 1) == pytest.approx(0.816497, abs=1e-6)
    assert compute_beta(1e-12, 1, 1, s, 1) < 1e-6
    with pytest.raises(ValueError):
        compute_beta(1, -1, 1, s, 1)


def test_link_realization_conjugation_and_noise():
    f = np.array([1 + 2j, 3 - 1j])
    g = np.array([0.5j, 2.0])
    link = LinkRealization.from_draw(f, g, 0.5, np.array([False, True]), n0=0.1)
    np.testing.assert_allclose(link.h12, 0.5 * np.array([f[0] * g[0], np.conj(f[1]) * g[1]]))
    np.testing.assert_allclose(link.h22, 0.5 * np.array([g[0] * g[0], abs(g[1]) ** 2]))
    expected = (0.25 * np.sum(np.abs(g) ** 2) + 1) * 0.1
    assert link.sigma_n2_sq == pytest.approx(expected)
    assert link.sigma_n2_tilde_sq == 2 * link.sigma_n2_sq
    sw = link.swapped(0.1)
    np.testing.assert_allclose(sw.h22, 0.5 * np.array([f[0] ** 2, abs(f[1]) ** 2]))
