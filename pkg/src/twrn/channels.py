"""Rayleigh fading coefficients, relay gain and receiver noise."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelStats:
    """Per-link variances, identical for every relay.

    ``sigma_f_sq`` is the variance of each T1-relay coefficient and
    ``sigma_g_sq`` that of each T2-relay coefficient.
    """

    sigma_f_sq: float = 1.0
    sigma_g_sq: float = 1.0

    def __post_init__(self):
        if not (self.sigma_f_sq > 0 and self.sigma_g_sq > 0):
            raise ValueError(
                f"channel variances must be positive, got {self.sigma_f_sq}, {self.sigma_g_sq}")

    def swapped(self) -> "ChannelStats":
        return ChannelStats(self.sigma_g_sq, self.sigma_f_sq)


class FadingKind(enum.Enum):
    QUASI_STATIC = "quasi_static"
    JAKES = "jakes"


@dataclass(frozen=True)
class FadingProcess:
    kind: FadingKind = FadingKind.QUASI_STATIC
    doppler_hz: float = 0.0
    symbol_period_s: float = 3.693e-6

    def __post_init__(self):
        object.__setattr__(self, "kind", FadingKind(self.kind))
        if self.doppler_hz < 0 or self.symbol_period_s <= 0:
            raise ValueError("doppler must be >= 0 and symbol period > 0")
        if self.kind is FadingKind.JAKES:
            _check_slow_fading(self.doppler_hz, self.symbol_period_s)


def _check_slow_fading(doppler_hz, symbol_period_s):
    if doppler_hz * symbol_period_s >= 0.1:
        raise ValueError(
            f"normalized Doppler {doppler_hz * symbol_period_s:.3g} is outside the slow-fading "
            "regime (must be < 0.1)")


def _shape(size):
    return tuple(int(k) for k in np.atleast_1d(size))


def complex_normal(var, shape, rng) -> np.ndarray:
    """Circularly symmetric ``CN(0, var)`` draws."""
    scale = np.sqrt(np.asarray(var, dtype=float) / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def awgn(n0: float, dims, rng) -> np.ndarray:
    """I.i.d. ``CN(0, n0)`` noise of shape ``dims``."""
    if n0 < 0:
        raise ValueError(f"noise level must be >= 0, got {n0}")
    if n0 == 0:
        return np.zeros(dims, dtype=complex)
    return complex_normal(n0, dims, rng)


def sample_quasi_static(stats: ChannelStats, n: int, rng, size=()) -> tuple[np.ndarray, np.ndarray]:
    """One frame's coefficients ``(f, g)``, each of shape ``size + (n,)``."""
    if n < 1:
        raise ValueError("need at least one relay")
    shape = _shape(size) + (n,)
    f = complex_normal(stats.sigma_f_sq, shape, rng)
    g = complex_normal(stats.sigma_g_sq, shape, rng)
    return f, g


def sum_of_sinusoids(var, doppler_hz, symbol_period_s, length, rng, shape=(), n_osc=32):
    """Clarke-model fading series with J0 autocorrelation.

    Returns an array of shape ``shape + (length,)``. Each realization draws its
    own arrival angles and phases, which makes the ensemble autocorrelation
    exactly ``var * J0(2 pi f_d tau)``.
    """
    shape = _shape(shape)
    t = np.arange(length) * symbol_period_s
    out = np.zeros(shape + (length,), dtype=complex)
    for _ in range(n_osc):
        angle = rng.uniform(0, 2 * np.pi, shape + (1,))
        phase = rng.uniform(0, 2 * np.pi, shape + (1,))
        out += np.exp(1j * (2 * np.pi * doppler_hz * np.cos(angle) * t + phase))
    return np.sqrt(var / n_osc) * out


def sample_jakes(stats: ChannelStats, n: int, doppler_hz: float, symbol_period_s: float,
                 length: int, rng, size=(), n_osc=32) -> tuple[np.ndarray, np.ndarray]:
    """Time-varying ``(f, g)`` series, each of shape ``size + (length, n)``."""
    _check_slow_fading(doppler_hz, symbol_period_s)
    shape = _shape(size) + (n,)
    f = sum_of_sinusoids(stats.sigma_f_sq, doppler_hz, symbol_period_s, length, rng, shape, n_osc)
    g = sum_of_sinusoids(stats.sigma_g_sq, doppler_hz, symbol_period_s, length, rng, shape, n_osc)
    # (..., n, length) -> (..., length, n)
    return np.swapaxes(f, -1, -2), np.swapaxes(g, -1, -2)


def compute_beta(p_r: float, p1: float, p2: float, stats: ChannelStats, n0: float) -> float:
    """Relay amplification ``sqrt(P_R / (sigma_f^2 P1 + sigma_g^2 P2 + N0))``.

    The same value applies to every relay because the link statistics are
    symmetric across relays.
    """
    if min(p_r, p1, p2, n0) < 0:
        raise ValueError("powers and noise level must be non-negative")
    denom = stats.sigma_f_sq * p1 + stats.sigma_g_sq * p2 + n0
    if denom <= 0:
        raise ValueError("relay input power is zero; amplification undefined")
    return float(np.sqrt(p_r / denom))


@dataclass(frozen=True)
class LinkRealization:
    """Channel draw for one frame as seen by terminal T2.

    ``h12`` has entries ``beta * f^_i * g_i`` and ``h22`` has entries
    ``beta * g^_i * g_i``, where the hat conjugates the coefficient for a relay
    that forwards the conjugate of its input.
    """

    f: np.ndarray
    g: np.ndarray
    beta: float
    h12: np.ndarray
    h22: np.ndarray
    sigma_n2_sq: np.ndarray
    conjugated: np.ndarray

    @property
    def sigma_n2_tilde_sq(self):
        return 2 * self.sigma_n2_sq

    @classmethod
    def from_draw(cls, f, g, beta, conjugated, n0):
        f = np.asarray(f, dtype=complex)
        g = np.asarray(g, dtype=complex)
        conjugated = np.asarray(conjugated, dtype=bool)
        f_hat = np.where(conjugated, np.conj(f), f)
        g_hat = np.where(conjugated, np.conj(g), g)
        sigma = (beta ** 2 * np.sum(np.abs(g) ** 2, axis=-1) + 1) * n0
        return cls(f, g, beta, beta * f_hat * g, beta * g_hat * g, sigma, conjugated)

    def swapped(self, n0) -> "LinkRealization":
        """The same draw seen from T1 (roles of ``f`` and ``g`` exchanged)."""
        return LinkRealization.from_draw(self.g, self.f, self.beta, self.conjugated, n0)
