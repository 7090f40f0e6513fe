"""Split the ideal combiner U into phase shifters and a digital stage.

Run: python3 demos/02_hybrid_combiner.py
"""

import numpy as np

from mimo_ba import ChannelParams, factor_combiner, generate_channel, svd_decompose

d = svd_decompose(generate_channel(ChannelParams(seed=2)), 8)

for n_rf in (8, 12, 16):
    comb = factor_combiner(d.u, n_rf)
    moduli = np.abs(comb.analog)
    print(f"n_rf={n_rf:2d}: residual {comb.residual:.3f} after {comb.iterations} sweeps, "
          f"|analog| in [{moduli.min():.4f}, {moduli.max():.4f}]")

# The residual history never goes up.
print("first residuals:", np.round(comb.history[:5], 4))
