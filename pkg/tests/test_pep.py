import numpy as np
import pytest
from scipy.special import ndtr
from scipy.stats import ks_2samp

from twrn.channels import ChannelStats, complex_normal
from twrn.codebooks import Codebook, code_matrix, codebook_by_name, reference_vector
from twrn.pep import (HighSnrConstants, PepParams, bler_union_bound, coding_gain_constants,
                      diversity_slope, double_factorial_ratio, gaussian_integral_check,
                      pair_lambdas, pep_chernoff, pep_mgf, pep_simplified,
                      singular_values_of_difference)
from twrn.protocol import PowerConfig
from twrn.rng import substream


def test_antipodal_alamouti_pair():
    rs, book = codebook_by_name("alamouti-bpsk")
    S = code_matrix(rs, reference_vector(2))
    k, j = 0, 3
    np.testing.assert_allclose(book.entries[k], -book.entries[j])
    lam = singular_values_of_difference(book, k, j, S)
    # direct eigendecomposition oracle
    Sd = (book.entries[k] - book.entries[j]) @ S
    np.testing.assert_allclose(lam, np.sort(np.linalg.eigvals(Sd.conj().T @ Sd).real)[::-1])
    np.testing.assert_allclose(lam, [8.0, 8.0])
    np.testing.assert_allclose(singular_values_of_difference(book, 0, 1, S), [4.0, 4.0])
    with pytest.raises(ValueError):
        singular_values_of_difference(book, 2, 2, S)


@pytest.mark.parametrize("name", ["alamouti-qpsk", "sorc4-bpsk"])
def test_eigenvalues_trace_identity(name):
    rs, book = codebook_by_name(name)
    S = code_matrix(rs, reference_vector(rs.n_relays))
    lam = pair_lambdas(rs, book, S)
    for k in range(book.size):
        for j in range(book.size):
            if k != j:
                Sd = (book.entries[k] - book.entries[j]) @ S
                assert lam[k, j].sum() == pytest.approx(np.linalg.norm(Sd) ** 2)
                assert np.all(lam[k, j] >= 0)
                assert np.all(np.diff(lam[k, j]) <= 1e-12)


def test_m_values_from_link():
    power = PowerConfig.from_snr_db(20.0, 0.3, 0.2, 2)
    stats = ChannelStats(1.5, 0.5)
    p = PepParams.from_link([4.0, 2.0], stats, power)
    beta_sq = power.p_relay / (1.5 * 0.3 + 0.5 * 0.2 + power.n0)
    expect = 0.3 * beta_sq * 1.5 * 0.5 / (8 * (2 * beta_sq * 0.5 + 1) * power.n0)
    np.testing.assert_allclose(p.m_values, expect * np.array([4.0, 2.0]))
    # detection at T1 uses P2 and swaps the link variances
    q = PepParams.from_link([4.0, 2.0], stats, power, terminal=1)
    expect1 = 0.2 * beta_sq * 0.5 * 1.5 / (8 * (2 * beta_sq * 1.5 + 1) * power.n0)
    np.testing.assert_allclose(q.m_values, expect1 * np.array([4.0, 2.0]))
    with pytest.raises(ValueError):
        PepParams.from_link([1.0], stats, power, terminal=3)
    with pytest.raises(ValueError):
        PepParams.from_m([-1.0, 2.0])


def test_closed_forms_at_m_100():
    p = PepParams.from_m([100.0, 100.0])
    assert pep_simplified(p) == pytest.approx(0.5 * 3 / 8 * (np.log(100) / 100) ** 2, rel=1e-14)
    assert pep_simplified(p) == pytest.approx(3.976e-4, rel=1e-3)
    assert pep_chernoff(p) == pytest.approx(1.0603796e-3, rel=1e-6)
    assert pep_simplified(p) / pep_chernoff(p) == pytest.approx(3 / 8, rel=1e-15)
    mgf = pep_mgf(p)
    assert abs(pep_simplified(p) - mgf) / mgf <= 0.35
    assert mgf == pytest.approx(3.4692815897906546e-4, rel=1e-9)


def test_double_factorial_ratio():
    assert [double_factorial_ratio(n) for n in (1, 2, 3, 4)] == pytest.approx(
        [1 / 2, 3 / 8, 15 / 48, 105 / 384])


def test_out_of_regime_and_degenerate_pairs():
    with pytest.raises(ValueError, match=r"mode\(s\) \[1\]"):
        pep_chernoff(PepParams.from_m([10.0, 2.0]))
    with pytest.raises(ValueError):
        pep_simplified(PepParams.from_m([np.e, 50.0]))
    with pytest.raises(ValueError, match="indistinguishable"):
        pep_mgf(PepParams.from_m([5.0, 0.0]))
    assert pep_mgf(PepParams.from_m([1e-9, 1e-9])) == pytest.approx(0.5, abs=1e-4)


def test_mgf_monotone_and_convergent():
    for n in (1, 2, 4):
        vals = [pep_mgf(PepParams.from_m([m] * n)) for m in np.logspace(-1, 4, 30)]
        assert np.all(np.diff(vals) < 0)
        assert 0 < vals[-1] < vals[0] <= 0.5
    p = PepParams.from_m([3.0, 40.0, 200.0, 1000.0])
    assert abs(pep_mgf(p, 256) / pep_mgf(p) - 1) < 1e-10
    # raising one mode only
    assert pep_mgf(PepParams.from_m([10.0, 50.0])) < pep_mgf(PepParams.from_m([10.0, 20.0]))


def test_chernoff_dominates_on_grid():
    grid = (20.0, 50.0, 100.0, 1000.0)
    for a in grid:
        for b in grid:
            p = PepParams.from_m([a, b])
            assert pep_chernoff(p) >= pep_mgf(p)
            assert pep_chernoff(p) == pytest.approx(pep_simplified(p) * 8 / 3, rel=1e-14)


def _q_form_oracle(m_values, draws, rng):
    # E[Q(sqrt(2 sum M_i a_i b_i))] with a_i, b_i ~ Exp(1): the conditional
    # Q-form PEP averaged over normalized |f_i|^2 and |g_i|^2. Deep fades
    # dominate, so a_i, b_i are drawn from Gamma(1/2) and reweighted.
    m = np.asarray(m_values)
    a = rng.gamma(0.5, size=(draws, m.size))
    b = rng.gamma(0.5, size=(draws, m.size))
    w = np.prod(np.pi * np.sqrt(a * b), axis=1)
    return np.mean(w * ndtr(-np.sqrt(2 * np.sum(m * a * b, axis=1))))


@pytest.mark.parametrize("m", [(10.0, 10.0), (10.0, 40.0), (12.0, 12.0, 30.0, 100.0), (50.0,) * 4])
def test_mgf_matches_q_form_monte_carlo(m):
    mc = _q_form_oracle(m, 1_000_000, substream(21, len(m)))
    assert pep_mgf(PepParams.from_m(m)) == pytest.approx(mc, rel=0.05)


def _codebook_oracle(name, k, j, stats, power, draws, seed, conjugate=True):
    # full link-level Q-form with the sum |g_i|^2 replaced by its mean
    rs, book = codebook_by_name(name)
    n = rs.n_relays
    rng = substream(seed)
    f = complex_normal(stats.sigma_f_sq, (draws, n), rng)
    g = complex_normal(stats.sigma_g_sq, (draws, n), rng)
    beta = power.beta(stats)
    f_hat = np.where(rs.conjugated, np.conj(f), f) if conjugate else f
    h12 = beta * f_hat * g
    Sd = (book.entries[k] - book.entries[j]) @ code_matrix(rs, reference_vector(n))
    dist = np.sum(np.abs(h12 @ Sd.T) ** 2, axis=1)
    var = (n * beta ** 2 * stats.sigma_g_sq + 1) * power.n0
    return ndtr(-np.sqrt(power.p1 * dist / (2 * 2 * var)))


@pytest.mark.parametrize("name,k,j,snr", [("alamouti-bpsk", 0, 1, 27.0), ("alamouti-qpsk", 0, 5, 30.0),
                                          ("sorc4-bpsk", 0, 1, 27.0)])
def test_mgf_matches_link_level_monte_carlo(name, k, j, snr):
    rs, book = codebook_by_name(name)
    stats = ChannelStats(1.0, 2.0)
    power = PowerConfig.from_snr_db(snr, 0.3, 0.2, rs.n_relays)
    lam = pair_lambdas(rs, book)[k, j]
    p = PepParams.from_link(lam, stats, power)
    assert p.m_values.min() >= 10
    q = _codebook_oracle(name, k, j, stats, power, 1_000_000, 22)
    assert pep_mgf(p) == pytest.approx(q.mean(), rel=0.05)


def test_conjugating_channels_leaves_pep_distribution_unchanged():
    stats = ChannelStats()
    power = PowerConfig.from_snr_db(25.0, 0.25, 0.25, 2)
    a = _codebook_oracle("alamouti-bpsk", 0, 1, stats, power, 20_000, 31, conjugate=True)
    b = _codebook_oracle("alamouti-bpsk", 0, 1, stats, power, 20_000, 32, conjugate=False)
    assert ks_2samp(a, b).pvalue > 0.01


def test_union_bound_two_codewords_equals_pair_pep():
    rs, _ = codebook_by_name("alamouti-bpsk")
    book = Codebook(np.stack([np.eye(2), -np.eye(2)]), "antipodal")
    stats = ChannelStats()
    power = PowerConfig.from_snr_db(20.0, 0.25, 0.25, 2)
    lam = pair_lambdas(rs, book)[0, 1]
    assert bler_union_bound(rs, book, stats, power) == pytest.approx(
        pep_mgf(PepParams.from_link(lam, stats, power)), rel=1e-14)
    with pytest.raises(ValueError):
        bler_union_bound(rs, Codebook(np.eye(2)[None], "single"), stats, power)


def test_union_bound_decreases_with_snr():
    rs, book = codebook_by_name("alamouti-qpsk")
    vals = [bler_union_bound(rs, book, ChannelStats(), PowerConfig.from_snr_db(s, 0.25, 0.25, 2))
            for s in (16, 19, 22, 25, 28, 31)]
    assert np.all(np.diff(vals) < 0) and vals[0] <= 1.0


def test_diversity_slope():
    snr_db = np.arange(20, 31, 1.0)
    g = 10 ** (snr_db / 10)
    assert diversity_slope(snr_db, g ** -2.0) == pytest.approx(2.0, abs=1e-12)
    # local slope of (ln g)^2 g^-2 is 2 - 2/ln g; midrange oracle at 25 dB
    oracle = 2 - 2 / np.log(10 ** 2.5)
    assert diversity_slope(snr_db, np.log(g) ** 2 * g ** -2.0) == pytest.approx(oracle, abs=0.01)
    assert diversity_slope([10, 20, 30], [1e-1, 0.0, 1e-3]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        diversity_slope([10.0], [1e-2])


def test_high_snr_constants_match_m_values():
    stats = ChannelStats(1.0, 10.0)
    a1, a2, n = 0.38, 0.12, 4
    lam = np.full(n, 4.0)
    hc = HighSnrConstants.compute(a1, a2, stats, lam)
    power = PowerConfig.from_snr_db(90.0, a1, a2, n)
    m = PepParams.from_link(lam, stats, power).m_values
    np.testing.assert_allclose(m / (lam * power.snr), hc.c_t2, rtol=1e-6)
    m1 = PepParams.from_link(lam, stats, power, terminal=1).m_values
    np.testing.assert_allclose(m1 / (lam * power.snr), hc.c_t1, rtol=1e-6)
    assert hc.c > 0 and hc.c_prime > 0


def test_symmetric_constants_closed_form():
    for alpha in (0.1, 0.25, 0.4):
        for n in (2, 4):
            c1, c2 = coding_gain_constants(alpha, alpha, 2.0, 2.0, n)
            assert c1 == pytest.approx(c2)
            assert c1 == pytest.approx(2 * alpha * (1 - 2 * alpha) * 2.0 / (16 * n))


def test_gaussian_integral_closed_form():
    rng = substream(41)
    mc, closed = gaussian_integral_check(np.eye(2), 10_000, rng)
    assert closed == pytest.approx(np.pi ** 2)
    mc, closed = gaussian_integral_check(np.diag([2.0, 3.0]), 1_000_000, rng)
    assert closed == pytest.approx(np.pi ** 2 / 6)
    assert mc == pytest.approx(closed, rel=0.02)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = a @ a.conj().T + 0.5 * np.eye(2)
    mc, closed = gaussian_integral_check(b, 10_000_000, rng)
    assert mc == pytest.approx(closed, rel=0.02)
    with pytest.raises(ValueError):
        gaussian_integral_check(np.diag([1.0, -1.0]), 10, rng)
    with pytest.raises(ValueError):
        gaussian_integral_check(np.array([[1.0, 2.0], [0.0, 1.0]]), 10, rng)
