"""How to split power between the terminals and the relays.

With equally strong links the best split gives each terminal a quarter of
the power and the relays the other half. When one side's links are much
stronger, the terminal behind the weak links should get more power, while
the relays still keep about half.
"""

from dataclasses import replace

from twrn import ChannelStats, SimConfig, run_bler_sweep, solve_opa
from twrn.power import equal_allocation

print(f"{'sigma_g^2':>9} {'alpha1':>7} {'alpha2':>7} {'relays':>7}")
for sg in (0.1, 0.5, 1.0, 2.0, 10.0):
    res = solve_opa(1.0, sg, 4)
    print(f"{sg:9.1f} {res.alpha1:7.4f} {res.alpha2:7.4f} {1 - res.alpha1 - res.alpha2:7.4f}")

eq = equal_allocation(4, 1.0, 10.0)
opt = solve_opa(1.0, 10.0, 4)
print(f"\nsigma_g^2 = 10: design cost {opt.cost:.3e} optimised vs {eq.cost:.3e} equal split")

base = SimConfig(codebook="sorc4-bpsk", stats=ChannelStats(1.0, 10.0), snr_grid_db=(14.0, 18.0, 22.0),
                 frames_per_point=500, seed=9)
curves = {mode: run_bler_sweep(replace(base, power_mode=mode), workers=1) for mode in ("epa", "opa")}
print(f"\n{'SNR':>5} {'equal':>10} {'optimised':>10}")
for e, o in zip(curves["epa"].rows, curves["opa"].rows):
    print(f"{e.snr_db:5.0f} {e.bler:10.3e} {o.bler:10.3e}")
