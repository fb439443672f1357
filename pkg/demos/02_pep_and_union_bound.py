"""Analytical error probability against a short simulation.

The pairwise error probability of two codewords depends on the eigenvalues
of their difference matrix. Integrating the moment generating function gives
an accurate value; the Chernoff and simplified forms are cheap high-SNR
approximations. Summing over pairs gives a union bound on the block error
rate, which should sit above the simulated curve.
"""

from twrn import (ChannelStats, PepParams, PowerConfig, SimConfig, bler_union_bound,
                  codebook_by_name, pep_chernoff, pep_mgf, pep_simplified, run_bler_sweep)
from twrn.pep import pair_lambdas

relays, book = codebook_by_name("alamouti-bpsk")
lam = pair_lambdas(relays, book)
print("eigenvalues of each codeword difference (row k, column j):")
for k in range(book.size):
    print("  ", "  ".join("    -    " if k == j else "(%g, %g)" % tuple(lam[k, j])
                          for j in range(book.size)))

stats = ChannelStats()
print("\nworst pair, lambda = (4, 4):")
print(f"{'SNR':>5} {'MGF':>10} {'simplified':>11} {'Chernoff':>10}")
for snr_db in (20, 25, 30, 35):
    p = PepParams.from_link([4.0, 4.0], stats, PowerConfig.from_snr_db(snr_db, 0.25, 0.25, 2))
    print(f"{snr_db:5d} {pep_mgf(p):10.3e} {pep_simplified(p):11.3e} {pep_chernoff(p):10.3e}")

grid = (20.0, 24.0, 28.0)
sim = run_bler_sweep(SimConfig(codebook="alamouti-bpsk", power_mode="epa", snr_grid_db=grid,
                               frames_per_point=1000, seed=3), workers=1)
print(f"\n{'SNR':>5} {'union bound':>12} {'simulated':>10}")
for row in sim.rows:
    ub = bler_union_bound(relays, book, stats, PowerConfig.from_snr_db(row.snr_db, 0.25, 0.25, 2))
    print(f"{row.snr_db:5.0f} {ub:12.3e} {row.bler:10.3e}")
