"""Experiment configuration: JSON file plus command-line overrides."""

import json
from dataclasses import dataclass, field, fields, asdict

from .crc import CRC12_POLY, CRC28_POLY


class ConfigError(ValueError):
    """Bad or inconsistent configuration (CLI exit code 2)."""


class DecodeError(RuntimeError):
    """Decoding failed irrecoverably (CLI exit code 4)."""


@dataclass
class ExperimentConfig:
    codec: str = "polar"            # "polar" | "ldpca"
    llr_mode: str = "proposed"      # "basic" | "proposed"
    width: int = 176
    height: int = 144
    fps: float = 15.0
    gop: int = 2
    f: int = 7                      # quality point, row of the qmatrix table
    list_size: int = 32
    exact_f: bool = False
    crc_polar_width: int = 28
    crc_polar_poly: int = CRC28_POLY
    crc_ldpca_width: int = 12
    crc_ldpca_poly: int = CRC12_POLY
    chain_dims: list | None = None  # None -> default nested chain
    chain_step: int | None = None
    T: float = 1e-3
    eps: float = 1e-4
    seed: int = 0
    alpha_mode: str = "oracle"      # "oracle" | "fixed"
    alpha_fixed: float = 0.1
    beta_dc: int = 12
    beta_ac: int = 11
    key_rate_bits: int = 0          # charged per key frame, not simulated
    qmatrix_path: str | None = None
    cache_dir: str | None = None
    max_frames: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.codec not in ("polar", "ldpca"):
            raise ConfigError(f"codec must be polar or ldpca, got {self.codec!r}")
        if self.llr_mode not in ("basic", "proposed"):
            raise ConfigError(f"llr_mode must be basic or proposed, got {self.llr_mode!r}")
        if self.gop < 2:
            raise ConfigError("gop must be at least 2")
        if not 0 <= self.f < 8:
            raise ConfigError("quality point f must be in [0, 8)")
        if self.width % 4 or self.height % 4:
            raise ConfigError("frame dimensions must be multiples of 4")
        if self.list_size < 1:
            raise ConfigError("list_size must be positive")
        if not (0 < self.T < 1):
            raise ConfigError("target error rate T must lie in (0, 1)")
        if not (0 < self.eps < self.T):
            raise ConfigError("bisection tolerance eps must lie in (0, T)")
        if self.alpha_mode not in ("oracle", "fixed"):
            raise ConfigError(f"alpha_mode must be oracle or fixed, got {self.alpha_mode!r}")
        if self.alpha_fixed <= 0:
            raise ConfigError("alpha_fixed must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_sources(cls, json_path=None, **overrides) -> "ExperimentConfig":
        """Config file first, explicit overrides win.  Unknown file keys
        are rejected; overrides valued None are ignored."""
        values = {}
        if json_path is not None:
            try:
                with open(json_path) as fh:
                    values = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config {json_path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"bad JSON in {json_path}: {exc}") from exc
            known = {f.name for f in fields(cls)}
            unknown = set(values) - known
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, val in overrides.items():
            if val is not None:
                values[key] = val
        try:
            return cls(**values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
