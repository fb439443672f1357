"""Two-way relay link with differential distributed space-time coding.

Both terminals differentially encode unitary codewords, the relays amplify
and forward a per-relay linear transform of the superimposed signal, and each
terminal removes its own contribution (using a blind estimate of its
self-channel) before differential least-squares detection.

All functions accept leading batch dimensions so that many frames can be
simulated at once; a symbol vector has shape ``(..., N)``, a code matrix
``(..., N, N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (ChannelStats, FadingKind, FadingProcess, awgn, compute_beta,
                       sample_jakes, sample_quasi_static)
from .codebooks import Codebook, RelayCase, RelaySet, code_matrix, reference_vector

RECEIVERS = ("coherent", "differential", "genie")


@dataclass(frozen=True)
class PowerConfig:
    """Power split of a network with total per-symbol power ``p_total``.

    Terminal T1 sends at ``alpha1 * P``, T2 at ``alpha2 * P`` and every relay
    at ``(1 - alpha1 - alpha2) * P / N``, so that
    ``N P = N P1 + N P2 + N^2 P_R``.
    """

    p_total: float
    alpha1: float
    alpha2: float
    n0: float
    n_relays: int

    def __post_init__(self):
        if self.p_total <= 0:
            raise ValueError("total power must be positive")
        if self.n0 < 0:
            raise ValueError("noise level must be non-negative")
        if self.n_relays < 1:
            raise ValueError("need at least one relay")
        if not (0 <= self.alpha1 <= 1 and 0 <= self.alpha2 <= 1):
            raise ValueError("power fractions must lie in [0, 1]")
        if self.alpha1 + self.alpha2 > 1 + 1e-12:
            raise ValueError("alpha1 + alpha2 must not exceed 1")

    @classmethod
    def from_snr_db(cls, snr_db, alpha1, alpha2, n_relays, p_total=1.0):
        n0 = 0.0 if np.isinf(snr_db) and snr_db > 0 else p_total / 10 ** (snr_db / 10)
        return cls(p_total, alpha1, alpha2, n0, n_relays)

    @classmethod
    def equal(cls, snr_db, n_relays, p_total=1.0):
        """Every node transmits ``P / (N + 2)``."""
        a = 1 / (n_relays + 2)
        return cls.from_snr_db(snr_db, a, a, n_relays, p_total)

    @property
    def p1(self):
        return self.alpha1 * self.p_total

    @property
    def p2(self):
        return self.alpha2 * self.p_total

    @property
    def p_relay(self):
        return max(0.0, 1 - self.alpha1 - self.alpha2) * self.p_total / self.n_relays

    @property
    def snr(self):
        return np.inf if self.n0 == 0 else self.p_total / self.n0

    @property
    def snr_db(self):
        return 10 * np.log10(self.snr)

    def beta(self, stats: ChannelStats) -> float:
        return compute_beta(self.p_relay, self.p1, self.p2, stats, self.n0)


def differential_encode(u: np.ndarray, s_prev: np.ndarray) -> np.ndarray:
    """Next transmit vector ``U s_prev``."""
    u = np.asarray(u)
    s_prev = np.asarray(s_prev)
    if u.shape[-1] != s_prev.shape[-1]:
        raise ValueError(f"codeword is {u.shape[-2:]}, vector has length {s_prev.shape[-1]}")
    return np.einsum("...ij,...j->...i", u, s_prev)


def relay_process(r, matrix, case, beta) -> np.ndarray:
    """Relay output ``beta A r`` (case I) or ``beta B r*`` (case II)."""
    r = np.asarray(r, dtype=complex)
    if RelayCase(case) is RelayCase.CONJUGATE:
        r = np.conj(r)
    return beta * np.einsum("ij,...j->...i", np.asarray(matrix), r)


def _relay_outputs(relay_set, r, beta):
    # r: (..., N_relays, T) -> x: (..., N_relays, T)
    r_hat = np.where(relay_set.conjugated[:, None], np.conj(r), r)
    return beta * np.einsum("irc,...ic->...ir", relay_set.stacked, r_hat)


def _receive(x, h_dn):
    # sum_i h_dn[..., k, i] * x[..., i, k]
    return np.einsum("...ki,...ik->...k", h_dn, x)


@dataclass
class BlockObservation:
    """Received blocks at both terminals for one time slot pair.

    ``self1``/``self2`` are the noise-free contributions of each terminal's own
    transmission (what a genie would subtract); ``noise1``/``noise2`` are the
    total noise terms.
    """

    y1: np.ndarray
    y2: np.ndarray
    self1: np.ndarray
    self2: np.ndarray
    noise1: np.ndarray
    noise2: np.ndarray
    u_index: object = None
    v_index: object = None


def transmit_block(relay_set: RelaySet, s, d, f_up, g_up, f_dn, g_dn, beta, p1, p2, n0, rng,
                   relay_noise=None, receiver_noise=None) -> BlockObservation:
    """Run one block through the two-hop network, relay by relay.

    Channel arrays have shape ``(..., T, N)``: entry ``[k, i]`` is the
    coefficient of relay ``i`` at symbol ``k`` of the uplink (``*_up``) or
    downlink (``*_dn``) slot. Noise can be supplied for shared-randomness
    checks; otherwise it is drawn from ``rng``.
    """
    s = np.asarray(s, dtype=complex)
    d = np.asarray(d, dtype=complex)
    n = relay_set.n_relays
    batch = np.broadcast_shapes(s.shape[:-1], d.shape[:-1], np.shape(f_up)[:-2])
    if relay_noise is None:
        relay_noise = awgn(n0, batch + (n, n), rng)
    if receiver_noise is None:
        receiver_noise = (awgn(n0, batch + (n,), rng), awgn(n0, batch + (n,), rng))
    w1, w2 = receiver_noise

    # r_i[k] = sqrt(P1) f_i[k] s[k] + sqrt(P2) g_i[k] d[k] + v_i[k], stored as (..., i, k)
    r_s = np.sqrt(p1) * np.swapaxes(f_up, -1, -2) * s[..., None, :]
    r_d = np.sqrt(p2) * np.swapaxes(g_up, -1, -2) * d[..., None, :]
    x_s = _relay_outputs(relay_set, r_s, beta)
    x_d = _relay_outputs(relay_set, r_d, beta)
    x_v = _relay_outputs(relay_set, relay_noise, beta)

    sig1_s, sig1_d, n1 = _receive(x_s, f_dn), _receive(x_d, f_dn), _receive(x_v, f_dn) + w1
    sig2_s, sig2_d, n2 = _receive(x_s, g_dn), _receive(x_d, g_dn), _receive(x_v, g_dn) + w2
    return BlockObservation(
        y1=sig1_s + sig1_d + n1, y2=sig2_s + sig2_d + n2,
        self1=sig1_s, self2=sig2_d, noise1=n1, noise2=n2)


def simulate_block(relay_set: RelaySet, s, d, link, power: PowerConfig, rng,
                   relay_noise=None, receiver_noise=None) -> BlockObservation:
    """One block over a quasi-static ``LinkRealization``."""
    f = np.asarray(link.f)[..., None, :]
    g = np.asarray(link.g)[..., None, :]
    return transmit_block(relay_set, s, d, f, g, f, g, link.beta, power.p1, power.p2,
                          power.n0, rng, relay_noise, receiver_noise)


def closed_form_y2(relay_set, s, d, link, power, noise2):
    """``sqrt(P1) S h12 + sqrt(P2) D h22 + n2``."""
    S = code_matrix(relay_set, s)
    D = code_matrix(relay_set, d)
    return (np.sqrt(power.p1) * np.einsum("...ij,...j->...i", S, link.h12)
            + np.sqrt(power.p2) * np.einsum("...ij,...j->...i", D, link.h22) + noise2)


def estimate_self_channel(past_own, past_y, p_own) -> np.ndarray:
    """Blind self-channel estimate ``(1 / (N L sqrt P)) sum_l D_l^H y_l``.

    ``past_own`` holds the terminal's own code matrices, shape ``(..., L, N, N)``,
    and ``past_y`` the matching received blocks, shape ``(..., L, N)``.
    """
    past_own = np.asarray(past_own)
    past_y = np.asarray(past_y)
    if past_own.ndim < 3 or past_own.shape[-3] == 0:
        raise ValueError("self-channel estimation needs at least one past block")
    if past_own.shape[:-2] != past_y.shape[:-1]:
        raise ValueError("code matrix and received block histories differ in length")
    if p_own <= 0:
        raise ValueError("own transmit power must be positive to estimate the self-channel")
    n = past_own.shape[-1]
    L = past_own.shape[-3]
    acc = np.einsum("...lji,...lj->...i", np.conj(past_own), past_y)
    return acc / (n * L * np.sqrt(p_own))


def sliding_self_channel(own, y, p_own, width):
    """Per-block estimates from the ``width`` blocks nearest each block.

    The window is centred on the block and shifted inwards at the frame edges,
    so every estimate averages ``min(width, L)`` blocks.
    """
    L = own.shape[-3]
    width = min(width, L)
    n = own.shape[-1]
    terms = np.einsum("...lji,...lj->...li", np.conj(own), y)
    csum = np.concatenate([np.zeros_like(terms[..., :1, :]), np.cumsum(terms, axis=-2)], axis=-2)
    start = np.clip(np.arange(L) - width // 2, 0, L - width)
    acc = csum[..., start + width, :] - csum[..., start, :]
    return acc / (n * width * np.sqrt(p_own))


def cancel_self_interference(y, own_code, h_self, p_own):
    return y - np.sqrt(p_own) * np.einsum("...ij,...j->...i", own_code, h_self)


def detect_differential(y_t, y_prev, codebook: Codebook) -> np.ndarray:
    """Least-squares index ``argmin_k ||y_t - U_k y_prev||`` (lowest index on ties)."""
    cand = np.einsum("kij,...j->...ki", codebook.entries, y_prev)
    dist = np.sum(np.abs(np.asarray(y_t)[..., None, :] - cand) ** 2, axis=-1)
    return np.argmin(dist, axis=-1)


def cancel_and_detect(y_t, y_prev_clean, h_self_hat, own_code_t, p_own, codebook: Codebook):
    """Remove the estimated self-interference and detect differentially.

    Returns ``(index, cleaned y_t)``; the cleaned block is what the receiver
    keeps as ``y_prev_clean`` for the next block.
    """
    clean = cancel_self_interference(y_t, own_code_t, h_self_hat, p_own)
    return detect_differential(clean, y_prev_clean, codebook), clean


def coherent_detect(y_t, other_code_prev, h_other, h_self, own_code_t, p_other, p_own,
                    codebook: Codebook) -> np.ndarray:
    """Reference receiver with full CSI and the previous code matrix known.

    Subtracts the exact self-interference and returns
    ``argmin_k ||y~ - sqrt(P) U_k S_prev h||``.
    """
    clean = cancel_self_interference(y_t, own_code_t, h_self, p_own)
    base = np.sqrt(p_other) * np.einsum("...ij,...j->...i", other_code_prev, h_other)
    cand = np.einsum("kij,...j->...ki", codebook.entries, base)
    dist = np.sum(np.abs(clean[..., None, :] - cand) ** 2, axis=-1)
    return np.argmin(dist, axis=-1)


@dataclass
class FrameState:
    """Running state of a batch of frames.

    Holds the last transmit vectors of both terminals and, for the causal
    estimator, the running sum of ``D^H y`` and the last cleaned block.
    """

    n: int
    batch: tuple = ()
    t: int = 0
    s_prev: np.ndarray = None
    d_prev: np.ndarray = None
    y_prev: np.ndarray = None
    h22_accumulator: np.ndarray = None
    blocks_seen: int = 0

    def __post_init__(self):
        ref = np.broadcast_to(reference_vector(self.n), self.batch + (self.n,))
        if self.s_prev is None:
            self.s_prev = ref.copy()
        if self.d_prev is None:
            self.d_prev = ref.copy()
        if self.h22_accumulator is None:
            self.h22_accumulator = np.zeros(self.batch + (self.n,), dtype=complex)

    def advance(self, u, v):
        """Encode the next codewords of both terminals."""
        self.s_prev = differential_encode(u, self.s_prev)
        self.d_prev = differential_encode(v, self.d_prev)
        self.t += 1
        return self.s_prev, self.d_prev

    def absorb(self, own_code, y, p_own):
        """Add one received block to the causal estimator and return the estimate."""
        self.h22_accumulator = self.h22_accumulator + np.einsum(
            "...ji,...j->...i", np.conj(own_code), y)
        self.blocks_seen += 1
        return self.h22_accumulator / (self.n * self.blocks_seen * np.sqrt(p_own))


@dataclass(frozen=True)
class FrameSetup:
    relay_set: RelaySet
    codebook: Codebook
    stats: ChannelStats
    power: PowerConfig
    fading: FadingProcess = field(default_factory=FadingProcess)
    frame_blocks: int = 100
    window: str = "frame"
    receivers: tuple = RECEIVERS

    def __post_init__(self):
        n = self.relay_set.n_relays
        if self.codebook.n != n or self.power.n_relays != n:
            raise ValueError("codebook, power config and relay set disagree on N")
        if self.frame_blocks < 2:
            raise ValueError("a frame needs the reference block and at least one data block")
        if not (self.window in ("frame", "causal")
                or (isinstance(self.window, int) and self.window >= 1)):
            raise ValueError(f"unknown estimator window {self.window!r}")
        bad = set(self.receivers) - set(RECEIVERS)
        if bad:
            raise ValueError(f"unknown receivers {sorted(bad)}")

    @property
    def blocks_per_frame(self):
        return self.frame_blocks

    @property
    def frame_symbols(self):
        return self.frame_blocks * self.relay_set.n_relays


@dataclass
class FrameCounts:
    """Mergeable error counters, one entry per receiver."""

    frames: int = 0
    blocks: dict = field(default_factory=dict)
    block_errors: dict = field(default_factory=dict)
    frame_errors: dict = field(default_factory=dict)

    def merge(self, other: "FrameCounts") -> "FrameCounts":
        out = FrameCounts(self.frames + other.frames)
        for name in set(self.blocks) | set(other.blocks):
            out.blocks[name] = self.blocks.get(name, 0) + other.blocks.get(name, 0)
            out.block_errors[name] = self.block_errors.get(name, 0) + other.block_errors.get(name, 0)
            out.frame_errors[name] = self.frame_errors.get(name, 0) + other.frame_errors.get(name, 0)
        return out


def _gains(conj, beta, up, dn):
    return beta * np.where(conj, np.conj(up), up) * dn


def run_frames(setup: FrameSetup, n_frames: int, rng) -> FrameCounts:
    """Simulate ``n_frames`` independent frames and count block errors.

    Block 0 of each frame carries the known reference vector; the remaining
    blocks carry uniformly drawn codewords from both terminals. Both terminals
    detect, and each receiver variant sees the same channel and noise draws.
    """
    rs, book, power = setup.relay_set, setup.codebook, setup.power
    n, B, F = rs.n_relays, setup.blocks_per_frame, n_frames
    beta = power.beta(setup.stats)
    conj = rs.conjugated
    U = book.entries

    u_idx = rng.integers(book.size, size=(F, B))
    v_idx = rng.integers(book.size, size=(F, B))

    if setup.fading.kind is FadingKind.JAKES:
        f_t, g_t = sample_jakes(setup.stats, n, setup.fading.doppler_hz,
                                setup.fading.symbol_period_s, 2 * n * B, rng, size=F)
    else:
        f_q, g_q = sample_quasi_static(setup.stats, n, rng, size=F)

    Y1 = np.empty((F, B, n), complex)
    Y2 = np.empty_like(Y1)
    SELF1 = np.empty_like(Y1)
    SELF2 = np.empty_like(Y1)
    S = np.empty((F, B, n, n), complex)
    D = np.empty_like(S)
    gains = {k: np.empty((F, B, n), complex) for k in ("h11", "h12", "h21", "h22")}

    state = FrameState(n, (F,))
    for b in range(B):
        if b:
            s, d = state.advance(U[u_idx[:, b]], U[v_idx[:, b]])
        else:
            s, d = state.s_prev, state.d_prev
        if setup.fading.kind is FadingKind.JAKES:
            up = slice(2 * n * b, 2 * n * b + n)
            dn = slice(2 * n * b + n, 2 * n * (b + 1))
            f_up, g_up, f_dn, g_dn = f_t[:, up], g_t[:, up], f_t[:, dn], g_t[:, dn]
        else:
            f_up = f_dn = f_q[:, None, :]
            g_up = g_dn = g_q[:, None, :]
        obs = transmit_block(rs, s, d, f_up, g_up, f_dn, g_dn, beta,
                             power.p1, power.p2, power.n0, rng)
        Y1[:, b], Y2[:, b], SELF1[:, b], SELF2[:, b] = obs.y1, obs.y2, obs.self1, obs.self2
        S[:, b] = code_matrix(rs, s)
        D[:, b] = code_matrix(rs, d)
        fu, gu, fd, gd = (a.mean(axis=1) for a in (f_up, g_up, f_dn, g_dn))
        gains["h12"][:, b] = _gains(conj, beta, fu, gd)
        gains["h22"][:, b] = _gains(conj, beta, gu, gd)
        gains["h11"][:, b] = _gains(conj, beta, fu, fd)
        gains["h21"][:, b] = _gains(conj, beta, gu, fd)

    # T2 detects T1's codewords; T1 detects T2's with the roles swapped
    errs2 = _detect_terminal(setup, Y2, SELF2, D, S, u_idx, power.p2, power.p1,
                             gains["h22"], gains["h12"])
    errs1 = _detect_terminal(setup, Y1, SELF1, S, D, v_idx, power.p1, power.p2,
                             gains["h11"], gains["h21"])

    counts = FrameCounts(F)
    for name in setup.receivers:
        e = errs1[name] | errs2[name]
        counts.blocks[name] = 2 * F * (B - 1)
        counts.block_errors[name] = int(errs1[name].sum() + errs2[name].sum())
        counts.frame_errors[name] = int(e.any(axis=1).sum())
    return counts


def _detect_terminal(setup, Y, SELF, OWN, OTHER, sent, p_own, p_other, h_self, h_other):
    book = setup.codebook
    n = setup.relay_set.n_relays
    out = {}
    for name in setup.receivers:
        if name == "genie":
            clean = Y - SELF
            det = detect_differential(clean[:, 1:], clean[:, :-1], book)
        elif name == "differential":
            if p_own == 0:
                clean = Y
            elif setup.window == "frame":
                h_hat = estimate_self_channel(OWN, Y, p_own)
                clean = cancel_self_interference(Y, OWN, h_hat[:, None, :], p_own)
            elif isinstance(setup.window, int):
                h_hat = sliding_self_channel(OWN, Y, p_own, setup.window)
                clean = cancel_self_interference(Y, OWN, h_hat, p_own)
            else:
                state = FrameState(n, (Y.shape[0],))
                clean = np.empty_like(Y)
                for b in range(Y.shape[1]):
                    h_hat = state.absorb(OWN[:, b], Y[:, b], p_own)
                    clean[:, b] = cancel_self_interference(Y[:, b], OWN[:, b], h_hat, p_own)
            det = detect_differential(clean[:, 1:], clean[:, :-1], book)
        else:
            det = coherent_detect(Y[:, 1:], OTHER[:, :-1], h_other[:, 1:], h_self[:, 1:],
                                  OWN[:, 1:], p_other, p_own, book)
        out[name] = det != sent[:, 1:]
    return out


def run_frame(setup: FrameSetup, rng) -> FrameCounts:
    """Error counts for a single frame."""
    return run_frames(setup, 1, rng)
