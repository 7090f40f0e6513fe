"""Low-resolution ADCs as gain plus noise, and the resulting estimation bound.

Run: python3 demos/03_quantizer_and_crlb.py
"""

import numpy as np

from mimo_ba import (
    ChannelParams,
    capacity,
    crlb,
    empirical_mse,
    f_of_b,
    g_of_b,
    generate_channel,
    ideal_link,
    mse_delta,
    mse_matrix,
    svd_decompose,
)

for b in range(1, 6):
    print(f"b={b}: f={f_of_b(b):.6f}  g={g_of_b(b):.6f}")

d = svd_decompose(generate_channel(ChannelParams(seed=3)), 4)
model = ideal_link(d, [4, 3, 2, 1], sigma_n2=1.0)

# With the unbiased combiner the MSE reaches the bound exactly.
gap = np.max(np.abs(mse_matrix(model) - crlb(model)))
print(f"max |MSE - CRLB| = {gap:.1e}")

rng = np.random.default_rng(0)
print(f"delta analytic {mse_delta(model):.5f}, "
      f"Monte-Carlo {empirical_mse(model, 100_000, rng):.5f}")
print(f"capacity {capacity(model):.3f} bits/use")
