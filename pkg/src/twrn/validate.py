"""Self-checks of the algebra, the link model and the numerical kernels.

Each check returns a ``Check`` with a pass flag and a one-line detail. The
whole suite runs in a few seconds and backs the ``validate`` subcommand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import expi

from .channels import ChannelStats, LinkRealization, awgn, sample_quasi_static
from .codebooks import (CODEBOOK_NAMES, code_matrix, codebook_by_name, reference_vector,
                        verify_relay_and_code_properties)
from .pep import PepParams, double_factorial_ratio, gaussian_integral_check, pep_chernoff, \
    pep_mgf, pep_simplified
from .power import solve_opa
from .protocol import PowerConfig, differential_encode, relay_process, simulate_block
from .rng import substream
from .special import exp_integral_ei


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<28} {self.detail}"


def check_codebooks():
    out = []
    for name in CODEBOOK_NAMES:
        rep = verify_relay_and_code_properties(*codebook_by_name(name))
        worst = max(rep.unitarity, rep.commutation, rep.trace_orthogonality)
        out.append(Check(f"algebra[{name}]", rep.passed,
                         f"unitarity/commutation/trace max {worst:.1e}, "
                         f"factorization {rep.factorization:.1e}"))
    return out


def _link(name, snr_db, rng):
    rs, book = codebook_by_name(name)
    power = PowerConfig.from_snr_db(snr_db, 0.25, 0.25, rs.n_relays)
    stats = ChannelStats()
    f, g = sample_quasi_static(stats, rs.n_relays, rng)
    link = LinkRealization.from_draw(f, g, power.beta(stats), rs.conjugated, power.n0)
    return rs, book, power, link


def check_model_equivalence(seed):
    worst = 0.0
    for name in CODEBOOK_NAMES:
        rng = substream(seed, 1)
        rs, book, power, link = _link(name, 15.0, rng)
        n = rs.n_relays
        s = book.entries[rng.integers(book.size)] @ reference_vector(n)
        d = book.entries[rng.integers(book.size)] @ reference_vector(n)
        v = awgn(power.n0, (n, n), rng)
        w = (awgn(power.n0, n, rng), awgn(power.n0, n, rng))
        obs = simulate_block(rs, s, d, link, power, rng, relay_noise=v, receiver_noise=w)
        # independent per-relay noise path
        n2 = w[1].copy()
        for i in range(n):
            n2 += link.g[i] * relay_process(v[i], rs.matrices[i], rs.cases[i], link.beta)
        ref = (np.sqrt(power.p1) * code_matrix(rs, s) @ link.h12
               + np.sqrt(power.p2) * code_matrix(rs, d) @ link.h22 + n2)
        worst = max(worst, np.abs(obs.y2 - ref).max())
    return Check("model-equivalence", worst <= 1e-9, f"max |y2 - closed form| {worst:.1e}")


def check_norm_and_identity(seed):
    rng = substream(seed, 2)
    rs, book, power, link = _link("alamouti-qpsk", np.inf, rng)
    n = rs.n_relays
    s = d = reference_vector(n)
    y_prev = None
    norm_err = ident_err = 0.0
    for _ in range(200):
        U = book.entries[rng.integers(book.size)]
        s = differential_encode(U, s)
        d = differential_encode(book.entries[rng.integers(book.size)], d)
        norm_err = max(norm_err, abs(np.vdot(s, s).real - n))
        obs = simulate_block(rs, s, d, link, power, rng)
        clean = obs.y2 - obs.self2
        if y_prev is not None:
            ident_err = max(ident_err, np.abs(clean - U @ y_prev).max())
        y_prev = clean
    return [Check("norm-preservation", norm_err <= 1e-9, f"max | ||s||^2 - N | {norm_err:.1e}"),
            Check("differential-identity", ident_err <= 1e-9, f"max residual {ident_err:.1e}")]


def check_noise_doubling(seed, draws=100_000):
    rng = substream(seed, 3)
    rs, book, power, link = _link("alamouti-bpsk", 10.0, rng)
    n = rs.n_relays
    zeros = np.zeros((draws, n))
    U = book.entries[rng.integers(book.size, size=draws)]
    n_prev = simulate_block(rs, zeros, zeros, link, power, rng).noise2
    n_now = simulate_block(rs, zeros, zeros, link, power, rng).noise2
    diff = n_now - np.einsum("bij,bj->bi", U, n_prev)
    emp = np.mean(np.abs(diff) ** 2)
    rel = abs(emp / link.sigma_n2_tilde_sq - 1)
    return Check("noise-doubling", rel <= 0.02,
                 f"empirical/predicted variance {emp / link.sigma_n2_tilde_sq:.4f}")


def check_estimator(seed, blocks=100_000):
    rng = substream(seed, 4)
    rs, book, power, link = _link("alamouti-bpsk", 10.0, rng)
    n, ref = rs.n_relays, reference_vector(rs.n_relays)
    s = np.einsum("bij,j->bi", book.entries[rng.integers(book.size, size=blocks)], ref)
    d = np.einsum("bij,j->bi", book.entries[rng.integers(book.size, size=blocks)], ref)
    y = simulate_block(rs, s, d, link, power, rng).y2
    D = code_matrix(rs, d)
    terms = np.einsum("bji,bj->bi", D.conj(), y) / (n * np.sqrt(power.p2))
    # real and imaginary parts judged separately
    parts = np.concatenate([terms.real, terms.imag], axis=1)
    truth = np.concatenate([link.h22.real, link.h22.imag])
    se = parts.std(axis=0, ddof=1) / np.sqrt(blocks)
    worst = float(np.max(np.abs(parts.mean(axis=0) - truth) / se))
    return Check("self-channel-unbiased", worst <= 3.0,
                 f"worst |bias| / standard error {worst:.2f}")


def check_gaussian_integral(seed, samples=1_000_000):
    rng = substream(seed, 5)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    mats = {"I2": np.eye(2), "diag(2,3)": np.diag([2.0, 3.0]),
            "random": a @ a.conj().T + np.eye(2)}
    out = []
    for label, b in mats.items():
        mc, closed = gaussian_integral_check(b, samples, rng)
        rel = abs(mc / closed - 1)
        out.append(Check(f"gaussian-integral[{label}]", rel <= 0.02,
                         f"MC {mc:.5g} vs pi^n/det {closed:.5g} ({rel:.2%})"))
    return out


def check_ei():
    x = -np.logspace(-8, np.log10(50), 400)
    err = float(np.max(np.abs(exp_integral_ei(x) - expi(x))))
    at_one = abs(float(exp_integral_ei(-1.0)) + 0.2193839)
    return [Check("Ei(-1)", at_one <= 1e-6, f"|Ei(-1) + 0.2193839| = {at_one:.1e}"),
            Check("Ei accuracy", err <= 1e-10, f"max abs error on [-50, -1e-8] {err:.1e}")]


def check_quadrature():
    worst = 0.0
    for n in (1, 2, 4):
        for m in (1.0, 10.0, 100.0, 1e3, 1e4):
            p = PepParams.from_m([m] * n)
            a, b = pep_mgf(p, 128), pep_mgf(p, 256)
            worst = max(worst, abs(a - b) / b)
    return Check("quadrature-convergence", worst < 1e-10, f"max rel change 128->256 nodes {worst:.1e}")


def check_pep_ordering():
    grid = (20.0, 50.0, 100.0, 1000.0)
    ok, ratio_err = True, 0.0
    for n in (2, 4):
        for ms in itertools.product(grid, repeat=n):
            p = PepParams.from_m(ms)
            c, s = pep_chernoff(p), pep_simplified(p)
            ok &= c >= pep_mgf(p)
            ratio_err = max(ratio_err, abs(s / c - double_factorial_ratio(n)))
    return [Check("chernoff-dominates-mgf", bool(ok), "M in {20, 50, 100, 1000}, N in {2, 4}"),
            Check("simplified/chernoff ratio", ratio_err <= 1e-14, f"max deviation {ratio_err:.1e}")]


def check_opa():
    res = solve_opa(1.0, 1.0, 2)
    err = max(abs(res.alpha1 - 0.25), abs(res.alpha2 - 0.25))
    return Check("opa-symmetric", err <= 1e-3, f"alpha = ({res.alpha1:.5f}, {res.alpha2:.5f})")


def run_all(seed: int = 2024):
    checks = []
    checks += check_codebooks()
    checks.append(check_model_equivalence(seed))
    checks += check_norm_and_identity(seed)
    checks.append(check_noise_doubling(seed))
    checks.append(check_estimator(seed))
    checks += check_gaussian_integral(seed)
    checks += check_ei()
    checks.append(check_quadrature())
    checks += check_pep_ordering()
    checks.append(check_opa())
    return checks
