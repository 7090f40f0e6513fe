"""SNR sweeps over allocation schemes, complexity counts and CSV output."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from os import PathLike
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bitalloc import BSet, crlb_ba, enumerate_bset, es_ba, mmqse_ba, _workers
from .channel import ArrayConfig, ChannelParams, generate_channel, svd_decompose
from .errors import ConfigurationError, DomainError, InfeasibleBudgetError, MimoBaError
from .hybrid import factor_combiner
from .metrics import capacity, empirical_mse, factored_link, ideal_link, mse_delta
from .quantization import (
    DEFAULT_TABLE,
    PowerModel,
    QuantTable,
    adc_power,
    loading_terms,
    loading_terms_raw,
)

__all__ = [
    "SCHEMES",
    "CSV_HEADER",
    "ExperimentConfig",
    "ResultRow",
    "ComplexityReport",
    "parse_config",
    "load_config",
    "run_experiment",
    "complexity_counts",
    "emit_csv",
    "read_csv",
    "emit_complexity_csv",
]

SCHEMES = ("one_bit", "two_bit", "infinite", "es", "crlb", "mmqse")
CSV_HEADER = (
    "snr_db,scheme,n_s,bits,delta_analytic,delta_empirical,capacity_bits,adc_power_watts,feasible"
)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one sweep.

    ``p_adc=None`` means an average budget of 3 bits per path,
    ``n_s * c * f_s * 2**3``. Symbol power is fixed at 1, so the SNR
    ``rho = 1 / sigma_n^2``.
    """

    channel: ChannelParams = field(default_factory=ChannelParams)
    n_s: int = 8
    n_b: int = 4
    c_per_step: float = 494e-15
    f_s: float = 1e9
    p_adc: Optional[float] = None
    snr_db: Tuple[float, ...] = tuple(range(-10, 31, 5))
    schemes: Tuple[str, ...] = SCHEMES
    trials: int = 1000
    empirical: bool = False
    seed: int = 0
    combiner: str = "ideal"
    loading: str = "digital"
    es_metric: str = "mse_delta"
    sv_floor: Optional[float] = None
    table: QuantTable = DEFAULT_TABLE
    t_order: int = 5
    gamma: Optional[int] = None
    mu: Optional[int] = None
    workers: Optional[int] = None

    def __post_init__(self):
        if not self.snr_db:
            raise ConfigurationError("snr grid must not be empty")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.n_s < 1 or self.n_b < 1:
            raise ConfigurationError("n_s and n_b must be >= 1")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ConfigurationError(f"unknown schemes: {sorted(unknown)}")
        if self.combiner not in ("ideal", "factored"):
            raise ConfigurationError(f"combiner must be ideal or factored, not {self.combiner!r}")
        if self.loading not in ("digital", "raw"):
            raise ConfigurationError(f"loading must be digital or raw, not {self.loading!r}")
        if self.es_metric not in ("mse_delta", "capacity"):
            raise ConfigurationError("es_metric must be mse_delta or capacity")
        if self.table.mode == "table" and self.n_b > self.table.max_bits:
            raise ConfigurationError(
                f"n_b={self.n_b} exceeds the quantizer table; use quant_mode = approximation"
            )

    @property
    def power_model(self) -> PowerModel:
        p_adc = self.p_adc
        if p_adc is None:
            p_adc = self.n_s * self.c_per_step * self.f_s * 2.0**3
        return PowerModel(self.c_per_step, self.f_s, p_adc)


@dataclass
class ResultRow:
    snr_db: float
    scheme: str
    n_s: int
    bits: Optional[Tuple[int, ...]]
    delta_analytic: Optional[float]
    delta_empirical: Optional[float]
    capacity_bits: Optional[float]
    adc_power_watts: Optional[float]
    feasible: bool


@dataclass
class ComplexityReport:
    scheme: str
    complex_mults: int
    real_mults: int
    complex_adds: int
    real_adds: int
    gamma: Optional[int]
    mu: Optional[int]
    t_order: int

    def __post_init__(self):
        counts = (self.complex_mults, self.real_mults, self.complex_adds, self.real_adds)
        if min(counts) < 0:
            raise DomainError("operation counts must be non-negative")


def complexity_counts(scheme: str, n_s: int, n_b: int, gamma: Optional[int] = None,
                      mu: Optional[int] = None, t_order: int = 5) -> ComplexityReport:
    """Closed-form multiply/add counts to reach an allocation.

    ``gamma`` is the number of MSE evaluations of exhaustive search and
    ``mu`` the number of ``K_f`` evaluations; ``t_order`` is the polynomial
    order assumed for the cube root and log in the row-norm heuristic.
    """
    if min(n_s, n_b, t_order) < 1:
        raise DomainError("n_s, n_b and t_order must be >= 1")
    if scheme == "es":
        if gamma is None:
            raise DomainError("exhaustive search counts need gamma")
        return ComplexityReport(
            scheme,
            complex_mults=gamma * (n_s**2 + 2 * n_s),
            real_mults=3 * n_s**2,
            complex_adds=gamma * (n_s * (n_s - 1) + n_s),
            real_adds=0,
            gamma=gamma,
            mu=None,
            t_order=t_order,
        )
    if scheme == "crlb":
        if mu is None:
            raise DomainError("CRLB counts need mu")
        return ComplexityReport(
            scheme,
            complex_mults=0,
            real_mults=3 * n_s**2 + 3 * n_s * n_b,
            complex_adds=0,
            real_adds=3 * n_s**2 + n_s * n_b + mu * (n_s - 1),
            gamma=None,
            mu=mu,
            t_order=t_order,
        )
    if scheme == "mmqse":
        t = t_order
        log_term = math.ceil(math.log2(n_s)) if n_s > 1 else 0
        return ComplexityReport(
            scheme,
            complex_mults=0,
            real_mults=n_s * (3 * n_s + t * t + t + 1),
            complex_adds=0,
            real_adds=2 * n_s**2 + n_s * (2 * t - 1) + 3 * (n_s - 1) * log_term,
            gamma=None,
            mu=None,
            t_order=t_order,
        )
    raise DomainError(f"no complexity model for scheme {scheme!r}")


# -- configuration -----------------------------------------------------------

_CHANNEL_KEYS = {
    "num_clusters": int,
    "rays_per_cluster": int,
    "angle_spread": float,
    "carrier_ghz": float,
    "cluster_decay_db": float,
}
_ARRAY_KEYS = {"num_tx": int, "num_rx": int, "element_spacing": float}


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    def parse(text):
        return None if text.strip().lower() in ("", "none") else conv(text)

    return parse


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _names(text: str) -> Tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


_TOP_KEYS = {
    "n_s": int,
    "n_b": int,
    "c_per_step": float,
    "f_s": float,
    "p_adc": _opt(float),
    "snr_db": _floats,
    "schemes": _names,
    "trials": int,
    "empirical": _bool,
    "seed": int,
    "combiner": str.strip,
    "loading": str.strip,
    "es_metric": str.strip,
    "sv_floor": _opt(float),
    "t_order": int,
    "gamma": _opt(int),
    "mu": _opt(int),
    "workers": _opt(int),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment.

    A ``[quantizer]`` section maps bit counts to ``f(b)`` (``1 = 0.3634``)
    and replaces the default table. ``quant_mode`` selects ``table`` or
    ``approximation``.
    """
    top: Dict[str, object] = {}
    chan: Dict[str, object] = {}
    arr: Dict[str, object] = {}
    f_table: Dict[int, float] = {}
    quant_mode = "table"
    section = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("", "quantizer"):
                raise ConfigurationError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if section == "quantizer":
                f_table[int(key)] = float(value)
            elif key in _TOP_KEYS:
                top[key] = _TOP_KEYS[key](value)
            elif key in _CHANNEL_KEYS:
                chan[key] = _CHANNEL_KEYS[key](value)
            elif key in _ARRAY_KEYS:
                arr[key] = _ARRAY_KEYS[key](value)
            elif key == "quant_mode":
                quant_mode = value
            else:
                raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    try:
        seed = top.get("seed", 0)
        params = ChannelParams(array=ArrayConfig(**arr), seed=seed, **chan)
        table = (
            QuantTable.from_mapping(f_table, mode=quant_mode)
            if f_table
            else QuantTable(mode=quant_mode)
        )
        return ExperimentConfig(channel=params, table=table, **top)
    except MimoBaError as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path: Union[str, PathLike]) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc


# -- sweep -------------------------------------------------------------------


@dataclass
class _Link:
    """Per-channel quantities shared by every SNR point."""

    decomp: object
    h: np.ndarray
    loading: np.ndarray
    combiner: object
    h_eff: np.ndarray
    bset: Optional[BSet]
    bset_error: Optional[str]


def _prepare(config: ExperimentConfig) -> _Link:
    params = replace(config.channel, seed=config.seed)
    h = generate_channel(params)
    decomp = svd_decompose(h, config.n_s, floor=config.sv_floor)
    comb = factor_combiner(decomp.u, decomp.n_s)
    w_a_h = decomp.u.conj().T if config.combiner == "ideal" else comb.analog.conj().T
    if config.loading == "digital":
        loading = loading_terms(comb.digital, decomp.sigma)
    else:
        loading = loading_terms_raw(w_a_h, h)
    bset, err = None, None
    try:
        bset = enumerate_bset(decomp.n_s, config.n_b, config.power_model)
    except InfeasibleBudgetError as exc:
        err = str(exc)
    return _Link(decomp, h, loading, comb, comb.analog.conj().T @ h, bset, err)


def _model_factory(config: ExperimentConfig, link: _Link, sigma_n2: float):
    def model_for(bits):
        if config.combiner == "ideal":
            return ideal_link(link.decomp, bits, sigma_n2, 1.0, link.loading, config.table)
        return factored_link(
            link.decomp, link.combiner, bits, sigma_n2, 1.0, link.loading, config.table
        )

    return model_for


def _allocate(scheme: str, config: ExperimentConfig, link: _Link, sigma_n2: float, model_for):
    n_s = link.decomp.n_s
    pm = config.power_model
    if scheme in ("one_bit", "two_bit"):
        return np.full(n_s, 1 if scheme == "one_bit" else 2)
    if scheme == "infinite":
        return None
    if scheme == "mmqse":
        return mmqse_ba(link.h_eff, config.n_b, pm).chosen
    if link.bset is None:
        raise InfeasibleBudgetError(link.bset_error)
    if scheme == "crlb":
        return crlb_ba(link.decomp.sigma, link.loading, sigma_n2, link.bset, config.table,
                       workers=1).chosen
    return es_ba(config.es_metric, model_for, link.bset, workers=1).chosen


def _run_point(config: ExperimentConfig, link: _Link, k: int, snr_db: float) -> List[ResultRow]:
    sigma_n2 = 10.0 ** (-snr_db / 10.0)
    model_for = _model_factory(config, link, sigma_n2)
    pm = config.power_model
    rows = []
    for j, scheme in enumerate(config.schemes):
        n_s = link.decomp.n_s
        try:
            bits = _allocate(scheme, config, link, sigma_n2, model_for)
        except InfeasibleBudgetError:
            rows.append(ResultRow(snr_db, scheme, n_s, None, None, None, None, None, False))
            continue
        power = None if bits is None else adc_power(bits, pm)
        if power is not None and power > pm.p_adc:
            rows.append(ResultRow(snr_db, scheme, n_s, tuple(int(b) for b in bits),
                                  None, None, None, power, False))
            continue
        model = model_for(bits)
        emp = None
        if config.empirical:
            rng = np.random.default_rng(np.random.SeedSequence([config.seed, k, j]))
            emp = empirical_mse(model, config.trials, rng)
        rows.append(ResultRow(
            snr_db, scheme, n_s,
            None if bits is None else tuple(int(b) for b in bits),
            mse_delta(model), emp, capacity(model), power, True,
        ))
    return rows


def run_experiment(config: ExperimentConfig) -> List[ResultRow]:
    """Sweep every SNR point and scheme on one seeded channel draw.

    Rows come out in (SNR, scheme) config order regardless of how many
    worker threads evaluate the SNR points.
    """
    link = _prepare(config)
    points = list(enumerate(config.snr_db))
    n = _workers(config.workers)
    if n == 1:
        blocks = [_run_point(config, link, k, s) for k, s in points]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            blocks = list(pool.map(lambda ks: _run_point(config, link, *ks), points))
    return [row for block in blocks for row in block]


# -- CSV ---------------------------------------------------------------------


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def emit_csv(rows: Sequence[ResultRow], path: Union[str, PathLike, None] = None, stream=None) -> str:
    """Write rows as UTF-8 CSV; returns the text as well."""
    if not rows:
        raise DomainError("no result rows to write")
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            _fmt(r.snr_db),
            r.scheme,
            str(r.n_s),
            "" if r.bits is None else "|".join(str(b) for b in r.bits),
            _fmt(r.delta_analytic),
            _fmt(r.delta_empirical),
            _fmt(r.capacity_bits),
            _fmt(r.adc_power_watts),
            "true" if r.feasible else "false",
        ]))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if stream is not None:
        stream.write(text)
    return text


def read_csv(path: Union[str, PathLike]) -> List[ResultRow]:
    def num(s):
        return None if s == "" else float(s)

    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(ResultRow(
                snr_db=float(rec["snr_db"]),
                scheme=rec["scheme"],
                n_s=int(rec["n_s"]),
                bits=tuple(int(b) for b in rec["bits"].split("|")) if rec["bits"] else None,
                delta_analytic=num(rec["delta_analytic"]),
                delta_empirical=num(rec["delta_empirical"]),
                capacity_bits=num(rec["capacity_bits"]),
                adc_power_watts=num(rec["adc_power_watts"]),
                feasible=rec["feasible"] == "true",
            ))
    return rows


def emit_complexity_csv(entries: Sequence[Tuple[int, int, ComplexityReport]], stream) -> None:
    """Write ``(n_s, n_b, report)`` triples as CSV to ``stream``."""
    names = [f.name for f in fields(ComplexityReport)]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["n_s", "n_b"] + names)
    for n_s, n_b, r in entries:
        values = [getattr(r, n) for n in names]
        writer.writerow([n_s, n_b] + ["" if v is None else v for v in values])
