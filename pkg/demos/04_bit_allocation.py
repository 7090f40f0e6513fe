"""Compare bit allocations chosen under an ADC power budget.

Run: python3 demos/04_bit_allocation.py
"""

import numpy as np

from mimo_ba import (
    ChannelParams,
    PowerModel,
    capacity,
    crlb_ba,
    enumerate_bset,
    es_ba,
    factor_combiner,
    generate_channel,
    ideal_link,
    loading_terms,
    mmqse_ba,
    mse_delta,
    svd_decompose,
)

h = generate_channel(ChannelParams(seed=4))
d = svd_decompose(h, 6)
comb = factor_combiner(d.u, 6)
load = loading_terms(comb.digital, d.sigma)

# Average of 3 bits per path.
pm = PowerModel(c_per_step=494e-15, f_s=1e9, p_adc=6 * 494e-15 * 1e9 * 8)
bset = enumerate_bset(6, 4, pm)
print(f"{len(bset)} feasible allocations")

sigma_n2 = 0.1
model_for = lambda bits: ideal_link(d, bits, sigma_n2, loading=load)
choices = {
    "crlb": crlb_ba(d.sigma, load, sigma_n2, bset).chosen,
    "es(capacity)": es_ba("capacity", model_for, bset).chosen,
    "es(delta)": es_ba("mse_delta", model_for, bset).chosen,
    "mmqse": mmqse_ba(comb.analog.conj().T @ h, 4, pm).chosen,
    "one_bit": np.ones(6, dtype=int),
}
for name, bits in choices.items():
    m = model_for(bits)
    print(f"{name:13s} {bits}  delta={mse_delta(m):10.3f}  C={capacity(m):6.3f}")
