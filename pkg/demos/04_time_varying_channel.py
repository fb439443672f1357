"""Quasi-static fading against a slowly varying (Jakes) channel.

In the Jakes channel the coefficients drift during a 100-block frame. The
genie receiver, which removes its own signal exactly, barely notices. The
blind receiver averages its self-channel estimate over the frame, so the
drift leaves a residual self-interference that does not fall with SNR and
shows up as an error floor.
"""

from twrn import FadingKind, FadingProcess, SimConfig, run_bler_sweep

jakes = FadingProcess(FadingKind.JAKES, doppler_hz=75.0, symbol_period_s=3.693e-6)
grid = (18.0, 24.0, 30.0)
common = dict(codebook="alamouti-bpsk", receivers=("differential", "genie"), snr_grid_db=grid,
              frames_per_point=600, seed=4)
static = run_bler_sweep(SimConfig(**common), workers=1)
varying = run_bler_sweep(SimConfig(fading=jakes, **common), workers=1)

print(f"{'SNR':>5} {'static blind':>13} {'static genie':>13} {'Jakes blind':>12} {'Jakes genie':>12}")
for snr in grid:
    row = [r.bler for res in (static, varying) for r in res.sorted_rows() if r.snr_db == snr]
    print(f"{snr:5.0f} {row[0]:13.3e} {row[1]:13.3e} {row[2]:12.3e} {row[3]:12.3e}")
