"""Simulation and experiment configuration.

Experiment spec files are JSON:

    {
      "experiment": "fig4-cfb-ser",
      "output_dir": "results/fig4",          # optional
      "config": {...SimConfig overrides...},
      "sweep": {...experiment parameters...}
    }

Every key is type- and range-checked here, before anything is simulated.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from sdma.errors import ConfigurationError

SCHEMES = ("robust", "naive-uncoded", "naive-coded")
SOLVER_CHOICES = ("cnna", "two-opt", "exhaustive", "identity", "random")
FEEDBACK_MODELS = ("nearest-neighbor", "psk-awgn")

EXPERIMENTS = (
    "fig1-approx",
    "fig3-lemma4",
    "fig4-cfb-ser",
    "fig5-cfb-snr",
    "fig6-ser-sweep",
    "fig7-fbsnr-sweep",
    "tsp-bench",
    "rate-table-dump",
)

# Parameters each experiment accepts under "sweep", with their defaults.
SWEEP_DEFAULTS: dict[str, dict[str, Any]] = {
    "fig1-approx": {"snr_db": [20.0, 30.0, 40.0], "samples": 20000, "min_interference": 0.05},
    "fig3-lemma4": {"codebooks": 20, "solvers": ["cnna", "identity", "random"]},
    "fig4-cfb-ser": {"c_fb": [4, 5, 6, 8], "ser": 0.2, "schemes": list(SCHEMES)},
    "fig5-cfb-snr": {
        "bits_per_symbol": [2, 3, 4, 5, 6],
        "feedback_snr_db": 10.0,
        "symbol_budget": 1,
        "schemes": list(SCHEMES),
    },
    "fig6-ser-sweep": {
        "snr_db": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
        "ser": [0.05, 0.2, 0.4],
        "c_fb": 8,
        "schemes": list(SCHEMES),
    },
    "fig7-fbsnr-sweep": {
        "feedback_snr_db": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
        "c_fb": 6,
        "schemes": list(SCHEMES),
    },
    "tsp-bench": {"sizes": [8, 16, 32, 64], "instances": 100, "p_e": 0.2},
    "rate-table-dump": {"fixture": "none"},
}

RATE_TABLE_FIXTURES = ("none", "worked-example", "identity")


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return (isinstance(value, (int, float)) and not isinstance(value, bool)) and math.isfinite(value)


@dataclass(frozen=True)
class FeedbackModel:
    """
    Feedback link model.

    ``bits_per_symbol`` None means the C_fb bits ride one 2^C_fb-ary symbol;
    otherwise C_fb must be a multiple of it and the link carries C_fb / b symbols.
    """

    model: str = "nearest-neighbor"
    ser: float = 0.2
    snr_db: float = 10.0
    bits_per_symbol: int | None = None

    def validate(self) -> None:
        if self.model not in FEEDBACK_MODELS:
            raise ConfigurationError(f"feedback.model must be one of {FEEDBACK_MODELS} (got {self.model!r})")
        if not _is_number(self.ser) or not 0.0 <= self.ser < 1.0:
            raise ConfigurationError(f"feedback.ser must lie in [0, 1) (got {self.ser!r})")
        if not _is_number(self.snr_db):
            raise ConfigurationError(f"feedback.snr_db must be a finite number (got {self.snr_db!r})")
        if self.bits_per_symbol is not None and (not _is_int(self.bits_per_symbol) or self.bits_per_symbol < 1):
            raise ConfigurationError(
                f"feedback.bits_per_symbol must be a positive integer or null (got {self.bits_per_symbol!r})"
            )


@dataclass(frozen=True)
class SimConfig:
    n_t: int = 4
    k_users: int = 100
    c_fb: int = 4
    forward_snr_db: float = 20.0
    feedback: FeedbackModel = field(default_factory=FeedbackModel)
    delta: float = 0.1
    g_th: float = 2.0
    eps: float = 0.05
    scheme: str = "robust"
    solver: str = "cnna"
    trials: int = 10_000
    seed: int = 2010
    prior_samples: int = 100_000
    workers: int = 1
    random_start: bool = False
    likely_istar: bool = False

    @property
    def power(self) -> float:
        """Forward transmit power P (unit noise variance)."""
        return 10.0 ** (self.forward_snr_db / 10.0)

    @property
    def codebook_size(self) -> int:
        return 2**self.c_fb

    def symbol_layout(self) -> tuple[int, int]:
        """(bits per feedback symbol, number of feedback symbols)."""
        b = self.feedback.bits_per_symbol or self.c_fb
        return b, self.c_fb // b

    def validate(self) -> None:
        for name in ("n_t", "k_users", "c_fb", "trials", "seed", "prior_samples", "workers"):
            if not _is_int(getattr(self, name)):
                raise ConfigurationError(f"{name} must be an integer (got {getattr(self, name)!r})")
        for name in ("forward_snr_db", "delta", "g_th", "eps"):
            if not _is_number(getattr(self, name)):
                raise ConfigurationError(f"{name} must be a finite number (got {getattr(self, name)!r})")
        for name in ("random_start", "likely_istar"):
            if not isinstance(getattr(self, name), bool):
                raise ConfigurationError(f"{name} must be true or false")
        if self.n_t < 2:
            raise ConfigurationError(f"n_t must be >= 2 (got {self.n_t})")
        if self.k_users <= self.n_t:
            raise ConfigurationError(f"k_users must exceed n_t (got K={self.k_users}, n_T={self.n_t})")
        if self.c_fb < 1:
            raise ConfigurationError(f"c_fb must be >= 1 (got {self.c_fb})")
        if self.codebook_size % self.n_t:
            raise ConfigurationError(
                f"codebook size 2^c_fb = {self.codebook_size} is not divisible by n_t={self.n_t}"
            )
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1) (got {self.delta})")
        if self.g_th < 0.0:
            raise ConfigurationError(f"g_th must be >= 0 (got {self.g_th})")
        if not 0.0 < self.eps < 1.0:
            raise ConfigurationError(f"eps must lie in (0, 1) (got {self.eps})")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES} (got {self.scheme!r})")
        if self.solver not in SOLVER_CHOICES:
            raise ConfigurationError(f"solver must be one of {SOLVER_CHOICES} (got {self.solver!r})")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1 (got {self.trials})")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative (got {self.seed})")
        if self.prior_samples < 10_000:
            raise ConfigurationError(f"prior_samples must be >= 10000 (got {self.prior_samples})")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1 (got {self.workers})")
        self.feedback.validate()
        b = self.feedback.bits_per_symbol
        if b is not None and self.c_fb % b:
            raise ConfigurationError(
                f"c_fb={self.c_fb} is not a multiple of feedback.bits_per_symbol={b}"
            )

    def with_overrides(self, **changes: Any) -> "SimConfig":
        """Copy with top-level fields replaced; ``feedback`` may be a dict of FeedbackModel fields."""
        fb = changes.pop("feedback", None)
        cfg = replace(self, **changes)
        if fb is not None:
            if isinstance(fb, FeedbackModel):
                cfg = replace(cfg, feedback=fb)
            else:
                cfg = replace(cfg, feedback=replace(cfg.feedback, **fb))
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _known_keys(cls) -> set[str]:
    return {f.name for f in fields(cls)}


def config_from_dict(overrides: dict[str, Any] | None) -> SimConfig:
    """SimConfig from a (possibly partial) dict; unknown keys are rejected."""
    overrides = dict(overrides or {})
    unknown = set(overrides) - _known_keys(SimConfig)
    if unknown:
        raise ConfigurationError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    fb = overrides.pop("feedback", None)
    if fb is not None:
        if not isinstance(fb, dict):
            raise ConfigurationError("config.feedback must be an object")
        unknown_fb = set(fb) - _known_keys(FeedbackModel)
        if unknown_fb:
            raise ConfigurationError(f"unknown feedback key(s): {', '.join(sorted(unknown_fb))}")
        overrides["feedback"] = FeedbackModel(**fb)
    cfg = SimConfig(**overrides)
    cfg.validate()
    return cfg


def _check_sweep_value(experiment: str, key: str, value: Any, default: Any) -> None:
    where = f"sweep.{key} of {experiment}"
    if isinstance(default, list):
        if not isinstance(value, list) or not value:
            raise ConfigurationError(f"{where} must be a non-empty list")
        if all(isinstance(x, str) for x in default):
            if not all(isinstance(x, str) for x in value):
                raise ConfigurationError(f"{where} must be a list of strings")
        elif all(_is_int(x) for x in default):
            if not all(_is_int(x) for x in value):
                raise ConfigurationError(f"{where} must be a list of integers")
        elif not all(_is_number(x) for x in value):
            raise ConfigurationError(f"{where} must be a list of numbers")
    elif isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigurationError(f"{where} must be a string (got {value!r})")
    elif _is_int(default):
        if not _is_int(value) or value < 1:
            raise ConfigurationError(f"{where} must be a positive integer (got {value!r})")
    elif not _is_number(value):
        raise ConfigurationError(f"{where} must be a finite number (got {value!r})")


def resolve_sweep(experiment: str, sweep: dict[str, Any] | None) -> dict[str, Any]:
    """Experiment parameters with defaults filled in; unknown keys are rejected."""
    if experiment not in SWEEP_DEFAULTS:
        raise ConfigurationError(f"unknown experiment id {experiment!r}; expected one of {EXPERIMENTS}")
    defaults = SWEEP_DEFAULTS[experiment]
    sweep = dict(sweep or {})
    unknown = set(sweep) - set(defaults)
    if unknown:
        raise ConfigurationError(f"unknown sweep key(s) for {experiment}: {', '.join(sorted(unknown))}")
    for key, value in sweep.items():
        _check_sweep_value(experiment, key, value, defaults[key])
    resolved = copy.deepcopy(defaults)
    resolved.update(sweep)
    for key in ("schemes", "solvers"):
        choices = SCHEMES if key == "schemes" else SOLVER_CHOICES
        bad = [s for s in resolved.get(key, []) if s not in choices]
        if bad:
            raise ConfigurationError(f"sweep.{key} has unknown value(s) {bad}; expected {choices}")
    if resolved.get("fixture", "none") not in RATE_TABLE_FIXTURES:
        raise ConfigurationError(
            f"sweep.fixture must be one of {RATE_TABLE_FIXTURES} (got {resolved['fixture']!r})"
        )
    ser = resolved.get("ser")
    for value in ser if isinstance(ser, list) else ([ser] if ser is not None else []):
        if not 0.0 <= value < 1.0:
            raise ConfigurationError(f"sweep.ser values must lie in [0, 1) (got {value})")
    return resolved


def cfb_cell(cfg: SimConfig, c_fb: int, ser: float) -> SimConfig:
    """C_fb bits on one 2^C_fb-ary symbol with nearest-neighbour errors at ``ser``."""
    return cfg.with_overrides(
        c_fb=int(c_fb), feedback={"model": "nearest-neighbor", "ser": float(ser), "bits_per_symbol": None}
    )


def constellation_cell(cfg: SimConfig, bits_per_symbol: int, feedback_snr_db: float, symbol_budget: int) -> SimConfig:
    """``symbol_budget`` PSK symbols of ``bits_per_symbol`` bits each over AWGN."""
    return cfg.with_overrides(
        c_fb=int(bits_per_symbol) * int(symbol_budget),
        feedback={"model": "psk-awgn", "snr_db": float(feedback_snr_db), "bits_per_symbol": int(bits_per_symbol)},
    )


def feedback_snr_cell(cfg: SimConfig, c_fb: int, feedback_snr_db: float) -> SimConfig:
    """C_fb bits on one 2^C_fb-PSK symbol over AWGN."""
    return cfg.with_overrides(
        c_fb=int(c_fb), feedback={"model": "psk-awgn", "snr_db": float(feedback_snr_db), "bits_per_symbol": None}
    )


def sweep_cells(experiment: str, cfg: SimConfig, sweep: dict[str, Any]) -> list[SimConfig]:
    """Every per-cell config ``experiment`` will simulate, each one validated."""
    cells: list[SimConfig] = []
    point = ""
    try:
        if experiment == "fig4-cfb-ser":
            for c_fb in sweep["c_fb"]:
                point = f"c_fb={c_fb}"
                cells.append(cfb_cell(cfg, c_fb, sweep["ser"]))
        elif experiment == "fig5-cfb-snr":
            for b in sweep["bits_per_symbol"]:
                point = f"bits_per_symbol={b}"
                cells.append(constellation_cell(cfg, b, sweep["feedback_snr_db"], sweep["symbol_budget"]))
        elif experiment == "fig6-ser-sweep":
            for ser in sweep["ser"]:
                point = f"c_fb={sweep['c_fb']}, ser={ser}"
                cell = cfb_cell(cfg, sweep["c_fb"], ser)
                cells.extend(cell.with_overrides(forward_snr_db=float(snr)) for snr in sweep["snr_db"])
        elif experiment == "fig7-fbsnr-sweep":
            for snr in sweep["feedback_snr_db"]:
                point = f"c_fb={sweep['c_fb']}, feedback_snr_db={snr}"
                cells.append(feedback_snr_cell(cfg, sweep["c_fb"], snr))
        elif experiment == "tsp-bench":
            for n in sweep["sizes"]:
                point = f"sizes={n}"
                if n < 2 or n & (n - 1):
                    raise ConfigurationError(f"tsp-bench sizes must be powers of two (got {n})")
                if n % cfg.n_t:
                    raise ConfigurationError(f"tsp-bench size {n} is not divisible by n_t={cfg.n_t}")
            if not 0.0 <= sweep["p_e"] <= 1.0:
                point = f"p_e={sweep['p_e']}"
                raise ConfigurationError(f"p_e must lie in [0, 1] (got {sweep['p_e']})")
        else:
            cells.append(cfg)
    except ConfigurationError as exc:
        raise ConfigurationError(f"sweep point {point} of {experiment}: {exc}") from exc
    return cells


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    config: SimConfig
    sweep: dict[str, Any]
    output_dir: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "output_dir": self.output_dir,
            "config": self.config.to_dict(),
            "sweep": self.sweep,
        }


def spec_from_dict(data: dict[str, Any]) -> ExperimentSpec:
    if not isinstance(data, dict):
        raise ConfigurationError("experiment spec must be a JSON object")
    unknown = set(data) - {"experiment", "output_dir", "config", "sweep"}
    if unknown:
        raise ConfigurationError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    experiment = data.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(f"unknown experiment id {experiment!r}; expected one of {EXPERIMENTS}")
    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigurationError("output_dir must be a string")
    config = config_from_dict(data.get("config"))
    sweep = resolve_sweep(experiment, data.get("sweep"))
    sweep_cells(experiment, config, sweep)
    return ExperimentSpec(experiment=experiment, config=config, sweep=sweep, output_dir=output_dir)


def load_spec(path: str | Path) -> ExperimentSpec:
    """Read and validate an experiment spec file."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise ConfigurationError(f"cannot read spec file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"spec file {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    return spec_from_dict(data)
