"""Pairwise error probability and block error rate of the differential scheme.

Everything here works from the per-mode constants

    M_i = P1 |beta|^2 sigma_f^2 sigma_g^2 lambda_i / (8 (N |beta|^2 sigma_g^2 + 1) N0)

where ``lambda_i`` are the eigenvalues of ``S_D^H S_D`` for the codeword
difference ``S_D = (U_k - U_j) S(t-1)``. The sum ``sum_i |g_i|^2`` in the
noise variance is replaced by its mean ``N sigma_g^2``, and the previous
cleaned block is taken as noise free; both approximations tighten at high SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelStats
from .codebooks import Codebook, RelaySet, code_matrix, reference_vector
from .special import gauss_legendre, scaled_e1

QUAD_NODES = 128


@dataclass(frozen=True)
class PepParams:
    lambdas: np.ndarray
    m_values: np.ndarray
    snr: float = float("nan")

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.m_values, dtype=float))
        if np.any(m < 0):
            raise ValueError("M values must be non-negative")
        object.__setattr__(self, "m_values", m)
        object.__setattr__(self, "lambdas", np.atleast_1d(np.asarray(self.lambdas, dtype=float)))

    @property
    def n_relays(self) -> int:
        return self.m_values.size

    @classmethod
    def from_m(cls, m_values):
        m = np.atleast_1d(np.asarray(m_values, dtype=float))
        return cls(lambdas=np.full_like(m, np.nan), m_values=m)

    @classmethod
    def from_link(cls, lambdas, stats: ChannelStats, power, terminal: int = 2):
        """Constants for detection at ``terminal`` (2 decodes T1, 1 decodes T2)."""
        lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
        beta_sq = power.beta(stats) ** 2  # the relays' gain does not depend on who listens
        if terminal == 1:
            stats = stats.swapped()
            p_other = power.p2
        elif terminal == 2:
            p_other = power.p1
        else:
            raise ValueError("terminal must be 1 or 2")
        n = lambdas.size
        scale = (p_other * beta_sq * stats.sigma_f_sq * stats.sigma_g_sq
                 / (8 * (n * beta_sq * stats.sigma_g_sq + 1) * power.n0))
        return cls(lambdas=lambdas, m_values=scale * lambdas, snr=power.snr)


def singular_values_of_difference(codebook: Codebook, k: int, j: int, prev_code) -> np.ndarray:
    """Eigenvalues of ``S_D^H S_D`` with ``S_D = (U_k - U_j) S(t-1)``, descending."""
    if k == j:
        raise ValueError("a codeword pair needs two distinct indices")
    S_d = (codebook.entries[k] - codebook.entries[j]) @ np.asarray(prev_code)
    lam = np.linalg.eigvalsh(S_d.conj().T @ S_d)
    return np.clip(lam[::-1], 0, None)


def _mgf_factor(sin_sq, m):
    # -(x) e^x Ei(-x) with x = sin^2(theta) / M, i.e. x e^x E1(x)
    x = sin_sq / m
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * scaled_e1(x[pos])
    return out


def pep_mgf(params: PepParams, nodes: int = QUAD_NODES) -> float:
    """MGF-based PEP, integrated with Gauss-Legendre on ``[0, pi/2]``.

    ``(1/pi) int_0^{pi/2} prod_i [x_i e^{x_i} E1(x_i)] dtheta`` with
    ``x_i = sin^2(theta) / M_i``.
    """
    m = params.m_values
    if np.any(m <= 0):
        bad = np.flatnonzero(m <= 0).tolist()
        raise ValueError(f"codeword pair is indistinguishable along mode(s) {bad} (M = 0)")
    theta, w = gauss_legendre(nodes, 0.0, np.pi / 2)
    sin_sq = np.sin(theta) ** 2
    integrand = np.ones_like(theta)
    for mi in m:
        integrand = integrand * _mgf_factor(sin_sq, mi)
    return float(np.dot(w, integrand) / np.pi)


def double_factorial_ratio(n: int) -> float:
    """``(2n - 1)!! / (2n)!!``."""
    return math.prod(range(1, 2 * n, 2)) / math.prod(range(2, 2 * n + 1, 2))


def _check_regime(m):
    bad = np.flatnonzero(m <= np.e)
    if bad.size:
        raise ValueError(
            f"high-SNR bound needs every M_i > e; mode(s) {bad.tolist()} have "
            f"M = {m[bad].tolist()}")


def pep_chernoff(params: PepParams) -> float:
    """``(1/2) prod_i ln(M_i) / M_i``."""
    m = params.m_values
    _check_regime(m)
    return float(0.5 * np.prod(np.log(m) / m))


def pep_simplified(params: PepParams) -> float:
    """``(1/2) ((2N-1)!!/(2N)!!) prod_i ln(M_i) / M_i``."""
    m = params.m_values
    _check_regime(m)
    return float(0.5 * double_factorial_ratio(m.size) * np.prod(np.log(m) / m))


def pair_lambdas(relay_set: RelaySet, codebook: Codebook, prev_code=None) -> np.ndarray:
    """Eigenvalues for every ordered pair, shape ``(K, K, N)`` (diagonal is NaN)."""
    if prev_code is None:
        prev_code = code_matrix(relay_set, reference_vector(relay_set.n_relays))
    K, n = codebook.size, codebook.n
    out = np.full((K, K, n), np.nan)
    for k in range(K):
        for j in range(K):
            if k != j:
                out[k, j] = singular_values_of_difference(codebook, k, j, prev_code)
    return out


def bler_union_bound(relay_set: RelaySet, codebook: Codebook, stats: ChannelStats, power,
                     terminal: int = 2, nodes: int = QUAD_NODES) -> float:
    """Union bound ``sum_k sum_{j != k} P(U_k) P_kj`` under a uniform prior."""
    K = codebook.size
    if K < 2:
        raise ValueError("union bound needs at least two codewords")
    lam = pair_lambdas(relay_set, codebook)
    cache = {}
    total = 0.0
    for k in range(K):
        for j in range(K):
            if k == j:
                continue
            key = tuple(np.round(lam[k, j], 12))
            if key not in cache:
                cache[key] = pep_mgf(PepParams.from_link(lam[k, j], stats, power, terminal), nodes)
            total += cache[key] / K
    return float(min(1.0, max(0.0, total)))


def diversity_slope(snr_db, bler) -> float:
    """Negated least-squares slope of ``log10(BLER)`` against ``log10(SNR)``."""
    snr_db = np.asarray(snr_db, dtype=float)
    bler = np.asarray(bler, dtype=float)
    ok = bler > 0
    if ok.sum() < 2:
        raise ValueError("need at least two points with non-zero BLER")
    slope = np.polyfit(snr_db[ok] / 10, np.log10(bler[ok]), 1)[0]
    return float(-slope)


def coding_gain_constants(alpha1, alpha2, sigma_f_sq, sigma_g_sq, n):
    """High-SNR constants ``(C_T1, C_T2)`` with ``M_i ~ C lambda_i gamma``.

    ``C_T2`` governs detection of T1's data at T2, ``C_T1`` the reverse.
    Works elementwise on arrays.
    """
    r = 1 - alpha1 - alpha2
    num = (r / n) * sigma_f_sq * sigma_g_sq
    c_t1 = alpha2 * num / (8 * (r * sigma_f_sq + alpha1 * sigma_f_sq + alpha2 * sigma_g_sq))
    c_t2 = alpha1 * num / (8 * (r * sigma_g_sq + alpha1 * sigma_f_sq + alpha2 * sigma_g_sq))
    return c_t1, c_t2


@dataclass(frozen=True)
class HighSnrConstants:
    c: float
    c_prime: float
    c_t1: float
    c_t2: float

    @classmethod
    def compute(cls, alpha1, alpha2, stats: ChannelStats, lambdas):
        lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
        n = lambdas.size
        c_t1, c_t2 = coding_gain_constants(alpha1, alpha2, stats.sigma_f_sq, stats.sigma_g_sq, n)
        base = 0.5 * double_factorial_ratio(n) / np.prod(c_t2 * lambdas)
        return cls(c=float(c_t2), c_prime=float(base ** (-1.0 / n)),
                   c_t1=float(c_t1), c_t2=float(c_t2))


def gaussian_integral_check(b, samples: int, rng=None):
    """Monte Carlo and closed-form values of ``int_{C^n} exp(-x^H B x) dx``.

    The estimate draws ``x ~ CN(0, I / lambda_min(B))`` so the importance
    weights stay bounded. Returns ``(monte_carlo, pi^n / det B)``.
    """
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    if b.shape != (n, n) or not np.allclose(b, b.conj().T):
        raise ValueError("B must be a square Hermitian matrix")
    eig = np.linalg.eigvalsh(b)
    if eig.min() <= 0:
        raise ValueError("B must be positive definite")
    rng = np.random.default_rng() if rng is None else rng
    var = 1.0 / eig.min()
    resid = b - np.eye(n) / var
    total = 0.0
    for start in range(0, samples, 1_000_000):
        m = min(1_000_000, samples - start)
        x = np.sqrt(var / 2) * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
        total += np.exp(-np.einsum("si,ij,sj->s", x.conj(), resid, x).real).sum()
    closed = np.pi ** n / np.linalg.det(b).real
    return float((np.pi * var) ** n * total / samples), float(closed)
