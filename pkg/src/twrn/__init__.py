"""Differential distributed space-time coding for two-way relay networks.

The library simulates a two-terminal, N-relay amplify-and-forward network in
which both terminals transmit differentially encoded unitary codewords at the
same time and every relay forwards a fixed linear transform of what it hears.
It also provides the matching pairwise error probability analysis and an
optimum power split between terminals and relays.
"""

from .channels import ChannelStats, FadingKind, FadingProcess, LinkRealization
from .codebooks import CODEBOOK_NAMES, Codebook, RelayCase, RelaySet, code_matrix, codebook_by_name
from .pep import (PepParams, bler_union_bound, diversity_slope, pep_chernoff, pep_mgf,
                  pep_simplified)
from .power import AllocationResult, allocation_to_powers, opa_cost, solve_opa
from .protocol import FrameSetup, PowerConfig, run_frames
from .sim import SimConfig, SweepResult, emit_csv, run_bler_sweep, run_preset, snr_at_bler
from .special import exp_integral_ei

__version__ = "0.1.0"

__all__ = [
    "AllocationResult", "CODEBOOK_NAMES", "ChannelStats", "Codebook", "FadingKind",
    "FadingProcess", "FrameSetup", "LinkRealization", "PepParams", "PowerConfig", "RelayCase",
    "RelaySet", "SimConfig", "SweepResult", "allocation_to_powers", "bler_union_bound",
    "code_matrix", "codebook_by_name", "diversity_slope", "emit_csv", "exp_integral_ei",
    "opa_cost", "pep_chernoff", "pep_mgf", "pep_simplified", "run_bler_sweep", "run_frames",
    "run_preset", "snr_at_bler", "solve_opa",
]
