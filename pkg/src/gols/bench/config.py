"""Benchmark configuration: INI-style experiment files plus CLI overrides."""

from __future__ import annotations

import configparser
import hashlib
import json
import os
import re
from dataclasses import asdict, dataclass

from ..ensembles import MATRIX_KINDS, SIGNAL_DISTS


class ConfigError(ValueError):
    """Experiment configuration is missing, malformed, or inconsistent."""


ALGORITHMS = ("ols", "gols", "omp")
MAX_SEED = 2**64

SWEEP_SECTION = "sweep"
PHASE_SECTION = "phase"


@dataclass(frozen=True)
class ExperimentSpec:
    """Sweep over sparsity levels k (and selection widths L for GOLS)."""

    n: int
    m: int
    k_values: tuple[int, ...]
    L_values: tuple[int, ...] = (2,)
    trials: int = 200
    matrix_kind: str = "gaussian"
    signal_dist: str = "gaussian-unit"
    noise_sigma: float = 0.0
    algorithms: tuple[str, ...] = ("ols", "gols", "omp")
    master_seed: int = 0
    normalize_columns: bool = False
    output_dir: str = "results"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError("n and m must be >= 1")
        if not self.k_values:
            raise ConfigError("k_values must be non-empty")
        for k in self.k_values:
            if not 1 <= k <= self.m:
                raise ConfigError(f"k={k} must be in [1, m={self.m}]")
        if not self.L_values:
            raise ConfigError("L_values must be non-empty")
        for L in self.L_values:
            if not 1 <= L <= self.n:
                raise ConfigError(f"L={L} must be in [1, n={self.n}]")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.matrix_kind not in MATRIX_KINDS:
            raise ConfigError(f"matrix must be one of {MATRIX_KINDS}")
        if self.signal_dist not in SIGNAL_DISTS:
            raise ConfigError(f"signal must be one of {SIGNAL_DISTS}")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        if not self.algorithms:
            raise ConfigError("algorithms must be non-empty")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {alg!r}, expected one of {ALGORITHMS}")
        if not 0 <= self.master_seed < MAX_SEED:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")

    def capped(self, k: int, L: int) -> bool:
        """True when L*k exceeds n, so the iteration cap truncates the run."""
        return L * k > self.n


@dataclass(frozen=True)
class PhaseTransitionSpec:
    """Recovery-rate curve of OLS as the measurement count n grows."""

    m: int
    k: int
    n_values: tuple[int, ...]
    trials: int = 500
    delta_target: float = 0.05
    matrix_kind: str = "gaussian"
    signal_dist: str = "gaussian-unit"
    master_seed: int = 0
    normalize_columns: bool = False
    output_dir: str = "results"

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if not 1 <= self.k <= self.m:
            raise ConfigError(f"k={self.k} must be in [1, m={self.m}]")
        if not self.n_values:
            raise ConfigError("n_values must be non-empty")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise ConfigError("n_values must be strictly increasing")
        for n in self.n_values:
            if not self.k <= n <= self.m:
                raise ConfigError(f"every n must satisfy k={self.k} <= n <= m={self.m}, got {n}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 < self.delta_target < 1:
            raise ConfigError("delta_target must be in (0, 1)")
        if self.matrix_kind not in MATRIX_KINDS:
            raise ConfigError(f"matrix must be one of {MATRIX_KINDS}")
        if self.signal_dist not in SIGNAL_DISTS:
            raise ConfigError(f"signal must be one of {SIGNAL_DISTS}")
        if not 0 <= self.master_seed < MAX_SEED:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")


def _int_list(raw: str) -> tuple[int, ...]:
    tokens = [t for t in re.split(r"[,\s]+", raw.strip()) if t]
    return tuple(int(t) for t in tokens)


def _str_list(raw: str) -> tuple[str, ...]:
    tokens = [t for t in re.split(r"[,\s]+", raw.strip()) if t]
    return tuple(t.lower() for t in tokens)


def _read_section(path, section: str) -> configparser.SectionProxy:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if section not in parser:
        raise ConfigError(f"config {path} has no [{section}] section")
    return parser[section]


def load_experiment(path, master_seed: int | None = None,
                    section: str = SWEEP_SECTION) -> ExperimentSpec:
    """Parse an [sweep] section into an ExperimentSpec; ``master_seed`` overrides the file."""
    sec = _read_section(path, section)
    try:
        spec = ExperimentSpec(
            n=sec.getint("n"),
            m=sec.getint("m"),
            k_values=_int_list(sec.get("k_values")),
            L_values=_int_list(sec.get("L_values", "2")),
            trials=sec.getint("trials", 200),
            matrix_kind=sec.get("matrix", "gaussian").lower(),
            signal_dist=sec.get("signal", "gaussian-unit").lower(),
            noise_sigma=sec.getfloat("noise_sigma", 0.0),
            algorithms=_str_list(sec.get("algorithms", "ols, gols, omp")),
            master_seed=(master_seed if master_seed is not None
                         else sec.getint("master_seed", 0)),
            normalize_columns=sec.getboolean("normalize_columns", False),
            output_dir=sec.get("output_dir", "results"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad [{section}] section in {path}: {exc}") from exc
    return spec


def load_phase(path, master_seed: int | None = None,
               section: str = PHASE_SECTION) -> PhaseTransitionSpec:
    """Parse a [phase] section into a PhaseTransitionSpec."""
    sec = _read_section(path, section)
    try:
        spec = PhaseTransitionSpec(
            m=sec.getint("m"),
            k=sec.getint("k"),
            n_values=_int_list(sec.get("n_values")),
            trials=sec.getint("trials", 500),
            delta_target=sec.getfloat("delta_target", 0.05),
            matrix_kind=sec.get("matrix", "gaussian").lower(),
            signal_dist=sec.get("signal", "gaussian-unit").lower(),
            master_seed=(master_seed if master_seed is not None
                         else sec.getint("master_seed", 0)),
            normalize_columns=sec.getboolean("normalize_columns", False),
            output_dir=sec.get("output_dir", "results"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad [{section}] section in {path}: {exc}") from exc
    return spec


def config_digest(spec) -> str:
    """Short hash of the effective configuration (after any CLI overrides).

    The output directory is excluded: it locates the artifacts but does not
    identify the experiment, and reruns into different directories must
    produce identical files.
    """
    payload = asdict(spec)
    payload.pop("output_dir", None)
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode("ascii")).hexdigest()[:16]
