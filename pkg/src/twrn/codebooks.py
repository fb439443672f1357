"""Relay matrix sets and unitary information codebooks.

A relay set holds the per-relay transforms ``O_i`` together with a flag saying
whether relay ``i`` forwards its received block (case I) or the conjugate of
it (case II). A codebook holds the unitary matrices a terminal uses to
differentially encode its data. Both are checked numerically when built.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

MATRIX_TOL = 1e-12


class RelayCase(enum.Enum):
    """How a relay treats its received block."""

    SIGNAL = "I"        # x = beta * A r
    CONJUGATE = "II"    # x = beta * B r*


@dataclass(frozen=True)
class RelaySet:
    """Relay transforms for an ``N``-relay network with block length ``T = N``."""

    matrices: tuple
    cases: tuple

    def __post_init__(self):
        mats = tuple(np.array(m, dtype=complex) for m in self.matrices)
        for m in mats:
            m.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "cases", tuple(RelayCase(c) for c in self.cases))
        n = len(mats)
        if n == 0 or len(self.cases) != n:
            raise ValueError("need one case flag per relay matrix")
        for m in mats:
            if m.shape != (n, n):
                raise ValueError(f"relay matrices must be {n}x{n} (T = N), got {m.shape}")
        if unitarity_violation(mats) > MATRIX_TOL:
            raise ValueError("relay matrices must be unitary")

    @property
    def n_relays(self) -> int:
        return len(self.matrices)

    @property
    def conjugated(self) -> np.ndarray:
        """Boolean mask, True where the relay forwards the conjugate."""
        return np.array([c is RelayCase.CONJUGATE for c in self.cases])

    @property
    def stacked(self) -> np.ndarray:
        """Relay matrices as one ``(N, N, N)`` array indexed ``[i, row, col]``."""
        return np.stack(self.matrices)


@dataclass(frozen=True)
class Codebook:
    """Unitary matrices ``U_k`` used for differential encoding."""

    entries: np.ndarray
    label: str = ""
    relay_set: RelaySet | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 3 or entries.shape[1] != entries.shape[2]:
            raise ValueError("codebook entries must be a stack of square matrices")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return self.entries.shape[0]

    def __getitem__(self, k):
        return self.entries[k]

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def bits_per_block(self) -> float:
        return float(np.log2(self.size))


def reference_vector(n: int) -> np.ndarray:
    """The known first block ``[1, ..., 1]``, with squared norm ``n``."""
    return np.ones(n, dtype=complex)


def code_matrix(relay_set: RelaySet, s: np.ndarray) -> np.ndarray:
    """Distributed code matrix ``[O_1 s_1, ..., O_N s_N]``.

    Column ``i`` is ``O_i s`` for a case-I relay and ``O_i s*`` for a case-II
    relay. ``s`` may carry leading batch dimensions: shape ``(..., N)`` maps to
    ``(..., N, N)``.
    """
    s = np.asarray(s, dtype=complex)
    n = relay_set.n_relays
    if s.shape[-1] != n:
        raise ValueError(f"symbol vector has length {s.shape[-1]}, relay set needs {n}")
    # hat_s[..., i, :] is s or s* depending on relay i
    hat_s = np.where(relay_set.conjugated[:, None], np.conj(s)[..., None, :], s[..., None, :])
    # column i = O_i @ hat_s_i
    return np.einsum("irc,...ic->...ri", relay_set.stacked, hat_s)


def build_alamouti_relay_set() -> RelaySet:
    """Two relays whose code matrix is ``[[s1, -s2*], [s2, s1*]]``."""
    rot = np.array([[0, -1], [1, 0]])
    return RelaySet((np.eye(2), rot), (RelayCase.SIGNAL, RelayCase.CONJUGATE))


def _quaternion_left(q):
    a, b, c, d = q
    return np.array([
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ], dtype=float)


def _quaternion_right(q):
    a, b, c, d = q
    return np.array([
        [a, -b, -c, -d],
        [b, a, d, -c],
        [c, -d, a, b],
        [d, c, -b, a],
    ], dtype=float)


def _complex_mult(z):
    a, b = z
    return np.array([[a, -b], [b, a]], dtype=float)


def build_sorc_relay_set(n: int) -> RelaySet:
    """Square real orthogonal relay set for ``n`` in {2, 4}.

    The relay matrices are left multiplications by the units of the complex
    numbers (n=2) or the quaternions (n=4). All relays are case I, and for a
    real vector ``s`` the code matrix is the matching real orthogonal design.
    """
    if n == 2:
        units = np.eye(2)
        mats = [_complex_mult(u) for u in units]
    elif n == 4:
        units = np.eye(4)
        mats = [_quaternion_left(u) for u in units]
    else:
        raise ValueError(f"SORC relay sets are available for n in {{2, 4}}, got {n}")
    return RelaySet(tuple(mats), (RelayCase.SIGNAL,) * n)


def psk_constellation(order: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(order) / order)


def build_unitary_codebook(relay_set: RelaySet, psk_order: int) -> Codebook:
    """Unitary codebook compatible with ``relay_set``.

    For the Alamouti set the entries are ``(1/sqrt 2) [[u1, -u2*], [u2, u1*]]``
    over all PSK pairs. For a SORC set of size ``n`` the entries are the real
    orthogonal design (right multiplication) at every BPSK ``n``-tuple, scaled
    by ``1/sqrt(n)``. The result is checked against unitarity and the
    commutation condition; a failing construction raises.
    """
    n = relay_set.n_relays
    if psk_order not in (2, 4, 8):
        raise ValueError(f"PSK order must be 2, 4 or 8, got {psk_order}")

    alamouti = build_alamouti_relay_set()
    is_alamouti = n == 2 and relay_set.cases == alamouti.cases and all(
        np.allclose(a, b) for a, b in zip(relay_set.matrices, alamouti.matrices))

    if is_alamouti:
        pts = psk_constellation(psk_order)
        entries = [np.array([[u1, -np.conj(u2)], [u2, np.conj(u1)]]) / np.sqrt(2)
                   for u1, u2 in itertools.product(pts, pts)]
        label = f"alamouti-{_psk_name(psk_order)}"
    elif all(c is RelayCase.SIGNAL for c in relay_set.cases) and n in (2, 4):
        if psk_order != 2:
            raise ValueError("SORC codebooks take real (BPSK) symbols only")
        right = _complex_mult if n == 2 else _quaternion_right
        entries = [right(u) / np.sqrt(n)
                   for u in itertools.product((1.0, -1.0), repeat=n)]
        label = f"sorc{n}-bpsk"
    else:
        raise ValueError("no codebook construction for this relay set")

    book = Codebook(np.array(entries), label=label, relay_set=relay_set)
    report = verify_relay_and_code_properties(relay_set, book)
    if not report.passed:
        raise RuntimeError(f"codebook construction failed its checks: {report}")
    return book


def _psk_name(order):
    return {2: "bpsk", 4: "qpsk", 8: "8psk"}[order]


CODEBOOK_NAMES = ("alamouti-bpsk", "alamouti-qpsk", "alamouti-8psk", "sorc2-bpsk", "sorc4-bpsk")


def codebook_by_name(name: str) -> tuple[RelaySet, Codebook]:
    """Look up a (relay set, codebook) pair by its config name."""
    name = name.strip().lower()
    if name.startswith("alamouti-"):
        order = {"bpsk": 2, "qpsk": 4, "8psk": 8}.get(name.split("-", 1)[1])
        if order is None:
            raise ValueError(f"unknown codebook {name!r}")
        rs = build_alamouti_relay_set()
        return rs, build_unitary_codebook(rs, order)
    if name in ("sorc2-bpsk", "sorc4-bpsk"):
        rs = build_sorc_relay_set(int(name[4]))
        return rs, build_unitary_codebook(rs, 2)
    raise ValueError(f"unknown codebook {name!r}; choose from {', '.join(CODEBOOK_NAMES)}")


def unitarity_violation(mats) -> float:
    worst = 0.0
    for m in mats:
        m = np.asarray(m)
        worst = max(worst, np.abs(m @ m.conj().T - np.eye(m.shape[0])).max())
    return float(worst)


def trace_orthogonality_violation(relay_set: RelaySet) -> float:
    """Largest deviation of ``tr(O_j O_i^H)`` from ``N * delta_ij``."""
    n = relay_set.n_relays
    O = relay_set.stacked
    gram = np.einsum("jrc,irc->ji", O, O.conj())
    return float(np.abs(gram - n * np.eye(n)).max())


def commutation_violation(relay_set: RelaySet, codebook: Codebook) -> float:
    """Largest entry of ``O_i U^ - U O_i`` over all relays and entries."""
    worst = 0.0
    for U in codebook.entries:
        for O, case in zip(relay_set.matrices, relay_set.cases):
            U_hat = np.conj(U) if case is RelayCase.CONJUGATE else U
            worst = max(worst, np.abs(O @ U_hat - U @ O).max())
    return float(worst)


def factorization_violation(relay_set: RelaySet, codebook: Codebook, rng=None, trials=8) -> float:
    """Largest entry of ``S(U s) - U S(s)`` over random complex ``s``."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = relay_set.n_relays
    worst = 0.0
    for _ in range(trials):
        s = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        base = code_matrix(relay_set, s)
        for U in codebook.entries:
            worst = max(worst, np.abs(code_matrix(relay_set, U @ s) - U @ base).max())
    return float(worst)


@dataclass
class PropertyReport:
    unitarity: float
    trace_orthogonality: float
    commutation: float
    factorization: float
    min_distance: float
    tol: float = MATRIX_TOL

    @property
    def passed(self) -> bool:
        # factorization accumulates a few more roundings per entry
        return (max(self.unitarity, self.trace_orthogonality, self.commutation) <= self.tol
                and self.factorization <= 1e-10
                and self.min_distance > 0)

    def lines(self):
        yield f"unitarity max violation            {self.unitarity:.3e}"
        yield f"trace-orthogonality max violation  {self.trace_orthogonality:.3e}"
        yield f"commutation max violation          {self.commutation:.3e}"
        yield f"differential factorization error   {self.factorization:.3e}"
        yield f"min pairwise codeword distance     {self.min_distance:.3e}"


def min_pairwise_distance(codebook: Codebook) -> float:
    E = codebook.entries
    d = np.linalg.norm(E[:, None] - E[None, :], axis=(-2, -1))
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min()) if codebook.size > 1 else float("inf")


def verify_relay_and_code_properties(relay_set: RelaySet, codebook: Codebook) -> PropertyReport:
    """Measure how far a (relay set, codebook) pair is from the required algebra."""
    mats = list(relay_set.matrices) + list(codebook.entries)
    return PropertyReport(
        unitarity=unitarity_violation(mats),
        trace_orthogonality=trace_orthogonality_violation(relay_set),
        commutation=commutation_violation(relay_set, codebook),
        factorization=factorization_violation(relay_set, codebook),
        min_distance=min_pairwise_distance(codebook),
    )

