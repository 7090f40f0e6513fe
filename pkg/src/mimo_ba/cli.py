"""Command-line entry point: ``mimo-ba --config exp.cfg --out results.csv``.

Exit codes: 0 success, 2 configuration error, 3 every scheme infeasible.
``MIMO_BA_THREADS`` caps the number of worker threads.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from typing import List, Optional

from .bitalloc import enumerate_bset
from .errors import ConfigurationError, InfeasibleBudgetError
from .experiment import (
    ExperimentConfig,
    complexity_counts,
    emit_complexity_csv,
    emit_csv,
    load_config,
    run_experiment,
)

log = logging.getLogger("mimo_ba")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mimo-ba", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="experiment config file (key = value lines)")
    ap.add_argument("--out", help="CSV output path; stdout when omitted")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--trials", type=int, help="Monte-Carlo trials per point")
    ap.add_argument("--complexity-only", action="store_true",
                    help="print operation counts instead of running the sweep")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _thread_cap(config: ExperimentConfig) -> ExperimentConfig:
    env = os.environ.get("MIMO_BA_THREADS")
    if not env:
        return config
    cap = max(1, int(env))
    workers = cap if config.workers is None else min(config.workers, cap)
    return replace(config, workers=workers)


def _complexity(config: ExperimentConfig, out) -> int:
    n_s, n_b = config.n_s, config.n_b
    measured = None
    if config.gamma is None or config.mu is None:
        try:
            measured = len(enumerate_bset(n_s, n_b, config.power_model))
        except InfeasibleBudgetError as exc:
            log.error("%s", exc)
            return EXIT_INFEASIBLE
    gamma = config.gamma if config.gamma is not None else measured
    mu = config.mu if config.mu is not None else measured
    reports = [
        complexity_counts("es", n_s, n_b, gamma=gamma, t_order=config.t_order),
        complexity_counts("mmqse", n_s, n_b, t_order=config.t_order),
        complexity_counts("crlb", n_s, n_b, mu=mu, t_order=config.t_order),
    ]
    emit_complexity_csv([(n_s, n_b, r) for r in reports], out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.trials is not None:
            config = replace(config, trials=args.trials)
        config = _thread_cap(config)
    except (ConfigurationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.complexity_only:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                return _complexity(config, fh)
        return _complexity(config, sys.stdout)

    rows = run_experiment(config)
    if args.out:
        emit_csv(rows, path=args.out)
    else:
        emit_csv(rows, stream=sys.stdout)
    if not any(r.feasible for r in rows):
        log.error("every scheme is infeasible under the ADC power budget")
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
