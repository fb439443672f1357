"""Flat ``key = value`` configuration files with dotted section keys.

Example::

    seed = 7
    codebook = alamouti-bpsk
    receivers = differential, genie
    snr_db = 10:30:2          # start:stop:step (inclusive) or a comma list
    channel.kind = jakes
    channel.doppler_hz = 75
    power.mode = opa
    frame.blocks = 100
"""

from __future__ import annotations

import configparser
from pathlib import Path

import numpy as np

from .channels import ChannelStats, FadingKind, FadingProcess
from .sim import SimConfig


class ConfigError(ValueError):
    pass


def parse_grid(text: str) -> tuple:
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ValueError
            lo, hi, step = parts
            return tuple(float(x) for x in np.arange(lo, hi + step / 2, step))
        vals = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"bad SNR grid {text!r}; use 'a,b,c' or 'start:stop:step'") from None
    if not vals:
        raise ConfigError("SNR grid is empty")
    return vals


def _int(v):
    return int(v)


def _float(v):
    return float(v)


def _window(v):
    return v if v in ("frame", "causal") else int(v)


def _list(v):
    return tuple(x.strip() for x in v.split(",") if x.strip())


# key -> converter
_KEYS = {
    "seed": _int,
    "codebook": str,
    "receivers": _list,
    "snr_db": parse_grid,
    "channel.kind": str,
    "channel.doppler_hz": _float,
    "channel.symbol_period_s": _float,
    "channel.sigma_f_sq": _float,
    "channel.sigma_g_sq": _float,
    "power.mode": str,
    "power.alpha1": _float,
    "power.alpha2": _float,
    "frame.blocks": _int,
    "frame.symbols": _int,
    "estimator.window": _window,
    "target_block_errors": _int,
    "max_blocks": _int,
    "frames_per_point": _int,
}


def parse_text(text: str, source="<string>") -> dict:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       strict=True, delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string("[root]\n" + text, source=source)
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{source}: line {lineno - 1}: expected 'key = value', got {line.strip()!r}") \
            from None
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    raw = dict(parser["root"])
    unknown = sorted(set(raw) - set(_KEYS))
    if unknown:
        raise ConfigError(f"{source}: unknown key(s) {', '.join(unknown)}")
    out = {}
    for key, val in raw.items():
        try:
            out[key] = _KEYS[key](val)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{source}: bad value for {key}: {val!r} ({exc})") from None
    return out


def build_config(values: dict, source="<config>") -> SimConfig:
    v = dict(values)
    if "frame.blocks" in v and "frame.symbols" in v and v["frame.blocks"] != v["frame.symbols"]:
        raise ConfigError(f"{source}: frame.blocks and frame.symbols disagree")
    try:
        kind = FadingKind(v.get("channel.kind", "quasi_static"))
        fading = FadingProcess(
            kind,
            v.get("channel.doppler_hz", 75.0 if kind is FadingKind.JAKES else 0.0),
            v.get("channel.symbol_period_s", 3.693e-6))
        stats = ChannelStats(v.get("channel.sigma_f_sq", 1.0), v.get("channel.sigma_g_sq", 1.0))
        kw = dict(stats=stats, fading=fading)
        for key, name in (("seed", "seed"), ("codebook", "codebook"), ("receivers", "receivers"),
                          ("snr_db", "snr_grid_db"), ("power.mode", "power_mode"),
                          ("power.alpha1", "alpha1"), ("power.alpha2", "alpha2"),
                          ("frame.blocks", "frame_blocks"), ("frame.symbols", "frame_blocks"),
                          ("estimator.window", "window"),
                          ("target_block_errors", "target_block_errors"),
                          ("max_blocks", "max_blocks"), ("frames_per_point", "frames_per_point")):
            if key in v:
                kw[name] = v[key]
        if ("power.alpha1" in v or "power.alpha2" in v) and "power.mode" not in v:
            kw["power_mode"] = "explicit"
        return SimConfig(**kw).validate()
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    return build_config(parse_text(text, str(path)), str(path))
