"""Draw a clustered mmWave channel and inspect its strongest eigenchannels.

Run: python3 demos/01_channel_and_svd.py
"""

import numpy as np

from mimo_ba import ArrayConfig, ChannelParams, generate_channel, svd_decompose

params = ChannelParams(array=ArrayConfig(num_tx=32, num_rx=64), seed=1)
h = generate_channel(params)
print(f"H is {h.shape[0]} x {h.shape[1]}, ||H||_F = {np.linalg.norm(h):.2f}")

# Keep the eight strongest streams.
d = svd_decompose(h, 8)
print("singular values:", np.round(d.sigma, 3))
print(f"sigma_8 / sigma_1 = {d.sigma[-1] / d.sigma[0]:.3f}")

# The truncated product is the best rank-8 approximation of H.
err = np.linalg.norm(h - d.reconstruct())
tail = np.sqrt(np.sum(np.linalg.svd(h, compute_uv=False)[8:] ** 2))
print(f"reconstruction error {err:.4f} vs discarded energy {tail:.4f}")
