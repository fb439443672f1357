"""Walk one frame through the network, step by step, at terminal 2.

Both terminals send differentially encoded Alamouti-BPSK codewords at the
same time. Terminal 2 hears its own signal mixed into every block, so it
first estimates its self-channel blindly from the whole frame, subtracts the
self-interference, and then detects terminal 1's data differentially without
knowing any channel coefficient.
"""

import numpy as np

from twrn import ChannelStats, LinkRealization, PowerConfig, code_matrix, codebook_by_name
from twrn.channels import sample_quasi_static
from twrn.codebooks import reference_vector
from twrn.protocol import (cancel_self_interference, detect_differential, differential_encode,
                           estimate_self_channel, simulate_block)

rng = np.random.default_rng(7)
relays, book = codebook_by_name("alamouti-bpsk")
n, blocks = relays.n_relays, 100
power = PowerConfig.from_snr_db(24.0, 0.25, 0.25, n)
stats = ChannelStats()

f, g = sample_quasi_static(stats, n, rng)
link = LinkRealization.from_draw(f, g, power.beta(stats), relays.conjugated, power.n0)
print(f"relay gain beta = {link.beta:.4f}")
print(f"true self-channel h22 = {np.round(link.h22, 4)}")

# Differential encoding: s(t) = U(t) s(t-1), starting from the reference vector.
u_idx = rng.integers(book.size, size=blocks)
v_idx = rng.integers(book.size, size=blocks)
s = np.empty((blocks + 1, n), complex)
d = np.empty((blocks + 1, n), complex)
s[0] = d[0] = reference_vector(n)
for t in range(blocks):
    s[t + 1] = differential_encode(book.entries[u_idx[t]], s[t])
    d[t + 1] = differential_encode(book.entries[v_idx[t]], d[t])

y2 = simulate_block(relays, s, d, link, power, rng).y2

# Terminal 2 knows its own code matrices, so correlating them with what it
# received averages out everything except its own channel.
own = code_matrix(relays, d)
h22_hat = estimate_self_channel(own, y2, power.p2)
print(f"blind estimate        = {np.round(h22_hat, 4)}")

clean = cancel_self_interference(y2, own, h22_hat, power.p2)
decided = detect_differential(clean[1:], clean[:-1], book)
errors = int(np.sum(decided != u_idx))
print(f"terminal 1 -> 2: {errors} block errors out of {blocks}")
