"""Monte Carlo block error rate sweeps."""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .channels import ChannelStats, FadingKind, FadingProcess
from .codebooks import CODEBOOK_NAMES, codebook_by_name
from .power import equal_allocation, solve_opa
from .protocol import RECEIVERS, FrameCounts, FrameSetup, PowerConfig, run_frames
from .rng import substream

POWER_MODES = ("explicit", "epa", "opa")
GSM_DOPPLER_HZ = 75.0
GSM_SYMBOL_PERIOD_S = 3.693e-6


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce a sweep.

    ``frames_per_point`` switches from the error-count stopping rule to a
    fixed number of frames per SNR point.
    """

    codebook: str = "alamouti-bpsk"
    stats: ChannelStats = field(default_factory=ChannelStats)
    fading: FadingProcess = field(default_factory=FadingProcess)
    power_mode: str = "opa"
    alpha1: float = 0.25
    alpha2: float = 0.25
    snr_grid_db: tuple = (10.0, 15.0, 20.0, 25.0, 30.0)
    receivers: tuple = ("differential",)
    frame_blocks: int = 100
    window: object = "frame"
    seed: int = 1
    target_block_errors: int = 200
    max_blocks: int = 1_000_000
    frames_per_point: int | None = None
    frames_per_batch: int = 50

    def validate(self):
        if self.codebook not in CODEBOOK_NAMES:
            raise ValueError(f"unknown codebook {self.codebook!r}; choose from {', '.join(CODEBOOK_NAMES)}")
        if self.power_mode not in POWER_MODES:
            raise ValueError(f"power mode must be one of {POWER_MODES}")
        if not self.snr_grid_db:
            raise ValueError("SNR grid is empty")
        if any(math.isnan(s) for s in self.snr_grid_db):
            raise ValueError("SNR grid contains NaN")
        if not self.receivers or set(self.receivers) - set(RECEIVERS):
            raise ValueError(f"receivers must be a non-empty subset of {RECEIVERS}")
        if self.target_block_errors < 1 or self.max_blocks < 1 or self.frames_per_batch < 1:
            raise ValueError("stopping rule parameters must be positive")
        if self.frames_per_point is not None and self.frames_per_point < 1:
            raise ValueError("frames_per_point must be positive")
        self.alphas()
        self.setup(30.0)  # frame/window/receiver checks
        return self

    def alphas(self):
        n = codebook_by_name(self.codebook)[0].n_relays
        if self.power_mode == "opa":
            res = solve_opa(self.stats.sigma_f_sq, self.stats.sigma_g_sq, n)
        elif self.power_mode == "epa":
            res = equal_allocation(n, self.stats.sigma_f_sq, self.stats.sigma_g_sq)
        else:
            a1, a2 = self.alpha1, self.alpha2
            if a1 <= 0 or a2 <= 0 or a1 + a2 >= 1:
                raise ValueError("explicit alphas must satisfy a1 > 0, a2 > 0, a1 + a2 < 1")
            return a1, a2
        return res.alpha1, res.alpha2

    def setup(self, snr_db, alphas=None) -> FrameSetup:
        relay_set, book = codebook_by_name(self.codebook)
        a1, a2 = self.alphas() if alphas is None else alphas
        power = PowerConfig.from_snr_db(snr_db, a1, a2, relay_set.n_relays)
        return FrameSetup(relay_set, book, self.stats, power, self.fading,
                          frame_blocks=self.frame_blocks, window=self.window,
                          receivers=tuple(self.receivers))


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    receiver: str
    blocks: int
    block_errors: int
    bler: float
    ci_low: float
    ci_high: float
    frames: int
    frame_errors: int
    wall_time_s: float = 0.0

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.ci_low + self.ci_high)


@dataclass
class SweepResult:
    config: SimConfig | None
    rows: list = field(default_factory=list)

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.snr_db, r.receiver))

    def curve(self, receiver):
        rows = sorted((r for r in self.rows if r.receiver == receiver), key=lambda r: r.snr_db)
        return rows

    def column(self, receiver, name):
        return np.array([getattr(r, name) for r in self.curve(receiver)])


def wilson_interval(errors, trials):
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(int(errors), int(trials)).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _run_batch(args):
    setup, frames, seed, point, batch = args
    return run_frames(setup, frames, substream(seed, point, batch))


def worker_count():
    cap = os.environ.get("TWRN_THREADS")
    cpus = os.cpu_count() or 1
    if cap is None:
        return cpus
    try:
        return max(1, min(cpus, int(cap)))
    except ValueError:
        raise ValueError(f"TWRN_THREADS must be an integer, got {cap!r}") from None


def _done(counts: FrameCounts, cfg: SimConfig, receivers):
    if cfg.frames_per_point is not None:
        return counts.frames >= cfg.frames_per_point
    if counts.frames and max(counts.blocks.values()) >= cfg.max_blocks:
        return True
    return bool(counts.frames) and min(counts.block_errors[r] for r in receivers) >= cfg.target_block_errors


def _simulate_point(cfg: SimConfig, setup: FrameSetup, point: int, pool, workers: int) -> FrameCounts:
    counts = FrameCounts()
    batch = 0
    while not _done(counts, cfg, setup.receivers):
        # Batches are merged strictly in index order and surplus ones dropped,
        # so the stopping point does not depend on the number of workers.
        jobs = []
        for _ in range(workers):
            frames = cfg.frames_per_batch
            if cfg.frames_per_point is not None:
                left = cfg.frames_per_point - counts.frames - sum(j[1] for j in jobs)
                if left <= 0:
                    break
                frames = min(frames, left)
            jobs.append((setup, frames, cfg.seed, point, batch))
            batch += 1
        results = pool.map(_run_batch, jobs) if pool else map(_run_batch, jobs)
        for part in results:
            if _done(counts, cfg, setup.receivers):
                break
            counts = counts.merge(part)
    return counts


def run_bler_sweep(cfg: SimConfig, workers: int | None = None) -> SweepResult:
    """Simulate every SNR point until the stopping rule fires.

    Each (point, batch) unit draws from its own random substream, so the
    result is identical for any number of worker processes.
    """
    cfg.validate()
    workers = worker_count() if workers is None else max(1, int(workers))
    alphas = cfg.alphas()
    result = SweepResult(cfg)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for point, snr_db in enumerate(cfg.snr_grid_db):
            setup = cfg.setup(snr_db, alphas)
            t0 = time.perf_counter()
            counts = _simulate_point(cfg, setup, point, pool, workers)
            elapsed = time.perf_counter() - t0
            for name in setup.receivers:
                k, n = counts.block_errors[name], counts.blocks[name]
                lo, hi = wilson_interval(k, n)
                result.rows.append(SweepRow(float(snr_db), name, n, k, k / n, lo, hi,
                                            counts.frames, counts.frame_errors[name], elapsed))
    finally:
        if pool:
            pool.shutdown()
    return result


CSV_FIELDS = ("snr_db", "receiver", "blocks", "block_errors", "bler", "ci_low", "ci_high",
              "frames", "frame_errors")


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def emit_csv(result: SweepResult, path, include_timing=False, extra=None):
    """Write one row per (SNR, receiver), sorted by SNR then receiver name.

    ``path`` may also be an open text stream.
    Floats are written in shortest round-trip form. Wall time is left out
    unless ``include_timing`` is set, so repeated runs give identical files.
    ``extra`` maps additional column names to constant values (e.g. a label).
    """
    extra = dict(extra or {})
    fields = list(extra) + list(CSV_FIELDS) + (["wall_time_s"] if include_timing else [])

    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for row in result.sorted_rows():
            vals = [extra[k] for k in extra] + [getattr(row, k) for k in fields[len(extra):]]
            w.writerow([_fmt(v) for v in vals])

    if hasattr(path, "write"):
        write(path)
        return None
    try:
        with open(path, "w", newline="") as fh:
            write(fh)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return Path(path)


def read_csv(path) -> SweepResult:
    out = SweepResult(None)
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.rows.append(SweepRow(
                float(rec["snr_db"]), rec["receiver"], int(rec["blocks"]), int(rec["block_errors"]),
                float(rec["bler"]), float(rec["ci_low"]), float(rec["ci_high"]),
                int(rec["frames"]), int(rec["frame_errors"]), float(rec.get("wall_time_s") or 0.0)))
    return out


def snr_at_bler(snr_db, bler, target):
    """SNR where a decreasing curve first crosses ``target``.

    Interpolates linearly in ``log10(BLER)``; returns NaN when the curve
    never brackets the target.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    logb = np.log10(np.clip(np.asarray(bler, dtype=float), 1e-300, None))
    lt = math.log10(target)
    for i in range(len(snr_db) - 1):
        a, b = logb[i], logb[i + 1]
        if a >= lt >= b and a != b:
            return float(snr_db[i] + (a - lt) / (a - b) * (snr_db[i + 1] - snr_db[i]))
    return float("nan")


def crossing(result: SweepResult, receiver, target):
    rows = result.curve(receiver)
    return snr_at_bler([r.snr_db for r in rows], [r.midpoint for r in rows], target)


# --- presets -----------------------------------------------------------------

def _grid(lo, hi, step):
    return tuple(float(x) for x in np.arange(lo, hi + step / 2, step))


PRESETS = {
    "fig2_alamouti": {
        "quasi_static": SimConfig(codebook="alamouti-bpsk", power_mode="opa",
                                  receivers=RECEIVERS, snr_grid_db=_grid(14, 36, 2)),
    },
    "fig3_gsm": {
        "quasi_static": SimConfig(codebook="alamouti-bpsk", power_mode="opa",
                                  receivers=("differential", "genie"), snr_grid_db=_grid(14, 32, 2)),
        "jakes": SimConfig(codebook="alamouti-bpsk", power_mode="opa",
                           fading=FadingProcess(FadingKind.JAKES, GSM_DOPPLER_HZ, GSM_SYMBOL_PERIOD_S),
                           receivers=("differential", "genie"), snr_grid_db=_grid(14, 32, 2)),
    },
    "fig5_sorc_opa": {
        f"case{case}_{mode}": SimConfig(codebook="sorc4-bpsk", power_mode=mode,
                                        stats=ChannelStats(1.0, sg), snr_grid_db=_grid(10, 26, 4))
        for case, sg in ((1, 1.0), (2, 10.0)) for mode in ("epa", "opa")
    },
}


def run_preset(name, out_dir=None, workers=None, **overrides) -> dict:
    """Run every sweep of a preset; ``overrides`` replace SimConfig fields.

    With ``out_dir`` each sweep is also written to ``<name>_<label>.csv``.
    """
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    results = {}
    for label, cfg in PRESETS[name].items():
        res = run_bler_sweep(replace(cfg, **overrides), workers)
        results[label] = res
        if out_dir is not None:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            emit_csv(res, Path(out_dir) / f"{name}_{label}.csv")
    return results
