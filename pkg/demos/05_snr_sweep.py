"""Run a small SNR sweep through the experiment runner and print the CSV.

Equivalent CLI: mimo-ba --config sweep.cfg
"""

import sys

from mimo_ba import emit_csv, parse_config, run_experiment

config = parse_config("""
n_s = 4
n_b = 3
snr_db = -10, 0, 10, 20, 30
schemes = one_bit, two_bit, infinite, es, crlb, mmqse
es_metric = capacity
empirical = true
trials = 2000
seed = 5
""")

emit_csv(run_experiment(config), stream=sys.stdout)
