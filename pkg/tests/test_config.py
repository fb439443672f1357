import pytest

from twrn.channels import FadingKind
from twrn.config import ConfigError, build_config, load_config, parse_grid, parse_text


def test_full_config(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("""
# comment line
seed = 7
codebook = sorc4-bpsk
receivers = differential, genie
snr_db = 10:20:5
channel.kind = jakes      # inline comment
channel.doppler_hz = 75
channel.symbol_period_s = 3.693e-6
channel.sigma_f_sq = 1
channel.sigma_g_sq = 10
power.mode = opa
frame.blocks = 50
estimator.window = 20
target_block_errors = 100
max_blocks = 50000
""")
    cfg = load_config(p)
    assert cfg.seed == 7 and cfg.codebook == "sorc4-bpsk"
    assert cfg.receivers == ("differential", "genie")
    assert cfg.snr_grid_db == (10.0, 15.0, 20.0)
    assert cfg.fading.kind is FadingKind.JAKES and cfg.fading.doppler_hz == 75.0
    assert cfg.stats.sigma_g_sq == 10.0
    assert cfg.frame_blocks == 50 and cfg.window == 20
    assert cfg.target_block_errors == 100 and cfg.max_blocks == 50000


def test_defaults_and_explicit_alphas():
    cfg = build_config(parse_text("power.alpha1 = 0.3\npower.alpha2 = 0.2\n"))
    assert cfg.power_mode == "explicit" and cfg.alphas() == (0.3, 0.2)
    assert cfg.frame_blocks == 100 and cfg.window == "frame"
    assert build_config(parse_text("frame.symbols = 80")).frame_blocks == 80


def test_grid_forms():
    assert parse_grid("5, 10,15") == (5.0, 10.0, 15.0)
    assert parse_grid("0:2:1") == (0.0, 1.0, 2.0)
    assert parse_grid("inf") == (float("inf"),)
    for bad in ("", "1:2", "5:1:1", "a,b", "0:10:0"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


@pytest.mark.parametrize("text,needle", [
    ("colour = blue", "unknown key"),
    ("seed = seven", "seed"),
    ("seed = 1\nseed = 2", "seed"),
    ("codebook = golden", "codebook"),
    ("power.mode = greedy", "power mode"),
    ("channel.kind = jakes\nchannel.doppler_hz = 1e6", "slow-fading"),
    ("frame.blocks = 10\nframe.symbols = 20", "disagree"),
    ("seed = 1\nno equals sign here", "line 2: expected"),
])
def test_malformed(text, needle):
    with pytest.raises(ConfigError, match=needle):
        build_config(parse_text(text, "t.cfg"), "t.cfg")


def test_missing_file_names_path(tmp_path):
    with pytest.raises(ConfigError, match="missing.file"):
        load_config(tmp_path / "missing.file")
