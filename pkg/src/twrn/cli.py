"""Command line entry point: ``twrn {simulate,pep,opa,validate}``."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from .channels import ChannelStats
from .codebooks import CODEBOOK_NAMES, codebook_by_name
from .config import ConfigError, load_config, parse_grid
from .pep import PepParams, bler_union_bound, pair_lambdas, pep_chernoff, pep_mgf, pep_simplified
from .power import allocation_to_powers, solve_opa
from .protocol import PowerConfig
from .sim import PRESETS, emit_csv, run_bler_sweep, run_preset

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="twrn", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo BLER sweep")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="key = value configuration file")
    src.add_argument("--preset", choices=sorted(PRESETS))
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", help="CSV file (config) or directory (preset); default stdout")
    sim.add_argument("--timing", action="store_true", help="add a wall_time_s column")

    pep = sub.add_parser("pep", help="analytical PEP of the closest codeword pair and the "
                         "union bound over an SNR grid")
    pep.add_argument("--codebook", default="alamouti-bpsk", choices=CODEBOOK_NAMES)
    pep.add_argument("--sigma-f", type=float, default=1.0, help="variance of the T1-relay links")
    pep.add_argument("--sigma-g", type=float, default=1.0, help="variance of the T2-relay links")
    pep.add_argument("--alpha1", type=float, default=0.25)
    pep.add_argument("--alpha2", type=float, default=0.25)
    pep.add_argument("--snr", default="10:40:5", help="grid in dB, 'a,b,c' or 'start:stop:step'")
    pep.add_argument("--terminal", type=int, choices=(1, 2), default=2)
    pep.add_argument("--out")

    opa = sub.add_parser("opa", help="optimum power allocation")
    opa.add_argument("--sigma-f", type=float, default=1.0, help="variance of the T1-relay links")
    opa.add_argument("--sigma-g", type=float, default=1.0, help="variance of the T2-relay links")
    opa.add_argument("--relays", type=int, default=2)
    opa.add_argument("--power", type=float, default=1.0)

    val = sub.add_parser("validate", help="run the invariant suite")
    val.add_argument("--seed", type=int, default=2024)
    return p


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_simulate(args):
    if args.preset:
        overrides = {} if args.seed is None else {"seed": args.seed}
        results = run_preset(args.preset, out_dir=args.out or ".", **overrides)
        for label in results:
            print(f"wrote {args.out or '.'}/{args.preset}_{label}.csv")
        return EXIT_OK
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    res = run_bler_sweep(cfg)
    emit_csv(res, args.out or sys.stdout, include_timing=args.timing)
    return EXIT_OK


def _pep_or_nan(fn, params):
    try:
        return fn(params)
    except ValueError:
        return float("nan")


def cmd_pep(args):
    relay_set, book = codebook_by_name(args.codebook)
    stats = ChannelStats(args.sigma_f, args.sigma_g)
    grid = parse_grid(args.snr)
    lam = pair_lambdas(relay_set, book)
    # worst pair: smallest product of eigenvalues
    off = [lam[k, j] for k in range(book.size) for j in range(book.size) if k != j]
    worst = min(off, key=lambda v: (np.prod(v), tuple(v)))
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["snr_db", "pep_mgf", "pep_simplified", "pep_chernoff", "bler_union_bound"])
        for snr_db in grid:
            power = PowerConfig.from_snr_db(snr_db, args.alpha1, args.alpha2, relay_set.n_relays)
            p = PepParams.from_link(worst, stats, power, args.terminal)
            w.writerow([f"{snr_db:.6g}", f"{pep_mgf(p):.8e}",
                        f"{_pep_or_nan(pep_simplified, p):.8e}",
                        f"{_pep_or_nan(pep_chernoff, p):.8e}",
                        f"{bler_union_bound(relay_set, book, stats, power, args.terminal):.8e}"])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_opa(args):
    res = solve_opa(args.sigma_f, args.sigma_g, args.relays)
    p1, p2, pr = allocation_to_powers(res, args.power, args.relays)
    print("alpha1,alpha2,p1,p2,p_relay,cost")
    print(f"{res.alpha1:.6f},{res.alpha2:.6f},{p1:.6g},{p2:.6g},{pr:.6g},{res.cost:.8e}")
    return EXIT_OK


def cmd_validate(args):
    from .validate import run_all

    checks = run_all(args.seed)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "pep": cmd_pep, "opa": cmd_opa, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
