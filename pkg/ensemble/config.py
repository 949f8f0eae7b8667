"""
Run configuration: a plain `key = value` file (parsed with python-dotenv)
merged over the process defaults in settings, with command-line overrides
applied last.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
from dotenv import dotenv_values

from blocks.crossings import BlockLadder, CrossingError
from disorder.sampling import DisorderSpec
from scaling.fitting import c_eff_of_spin, q_ext_linear
from sdrg.model_kind import ModelKind

logger = logging.getLogger(__name__)


class ConfigurationError(ValueError):
    """Invalid or unknown run configuration."""


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"not a boolean: '{value}'")


def _parse_optional(parser):
    def parse(value):
        if value is None or str(value).strip().lower() in ('', 'none', 'auto'):
            return None
        return parser(value)
    return parse


def _parse_list(item_parser):
    def parse(value):
        if isinstance(value, (list, tuple)):
            return tuple(item_parser(item) for item in value)
        return tuple(item_parser(item) for item in str(value).split(',') if item.strip())
    return parse


# file key -> (field name, parser)
CONFIG_KEYS = {
    'model': ('model', lambda value: str(value).strip().lower()),
    'two_s': ('two_s', int),
    'sites': ('sites', int),
    'configurations': ('configurations', int),
    'seed': ('seed', int),
    'workers': ('workers', int),
    'disorder.alpha': ('alpha', float),
    'disorder.support_max': ('support_max', float),
    'sdrg.kappa_left': ('kappa_left', float),
    'sdrg.kappa_right': ('kappa_right', float),
    'sdrg.debug_checks': ('debug_checks', _parse_bool),
    'blocks.sizes': ('block_sizes', _parse_optional(_parse_list(int))),
    'blocks.auto': ('blocks_auto', _parse_bool),
    'blocks.anchors': ('anchors', int),
    'entropy.q_values': ('q_values', _parse_optional(_parse_list(float))),
    'entropy.q_points': ('q_points', int),
    'entropy.q_halfwidth': ('q_halfwidth', float),
    'entropy.include_von_neumann': ('include_von_neumann', _parse_bool),
    'scaling.l_min': ('l_min', _parse_optional(float)),
    'scaling.l_max': ('l_max', _parse_optional(float)),
    'scaling.weighted': ('weighted', _parse_bool),
    'scaling.dgamma_policy': ('dgamma_policy', lambda value: str(value).strip().lower()),
    'checkpoint_every': ('checkpoint_every', int),
    'out': ('out_dir', str),
}
FIELD_TO_KEY = {field_name: key for key, (field_name, _) in CONFIG_KEYS.items()}
# keys that do not change the simulated numbers
EXECUTION_KEYS = ('workers', 'checkpoint_every', 'out', 'sdrg.debug_checks')


@dataclass(frozen=True)
class RunConfig:
    model: str = 'heisenberg'
    two_s: int = 1
    sites: int = 50000
    configurations: int = 2000
    seed: int = 12345
    workers: int = 1
    alpha: float = 0.8
    support_max: float = 1.0
    kappa_left: float = 1.0
    kappa_right: float = 1.0
    debug_checks: bool = False
    block_sizes: Optional[Tuple[int, ...]] = None
    blocks_auto: bool = True
    anchors: int = 1
    q_values: Optional[Tuple[float, ...]] = None
    q_points: int = 11
    q_halfwidth: float = 0.5
    include_von_neumann: bool = True
    l_min: Optional[float] = None
    l_max: Optional[float] = None
    weighted: bool = True
    dgamma_policy: str = 'median'
    checkpoint_every: int = 500
    out_dir: str = 'runs'

    @classmethod
    def defaults(cls) -> "RunConfig":
        """Dataclass defaults overlaid with the process settings."""
        from django.conf import settings
        return cls(
            seed=settings.RSP_SEED,
            workers=settings.RSP_WORKERS,
            checkpoint_every=settings.RSP_CHECKPOINT_EVERY,
            debug_checks=settings.RSP_DEBUG_CHECKS,
            out_dir=settings.RSP_OUTPUT_DIR,
        )

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any], base: Optional["RunConfig"] = None) -> "RunConfig":
        """Apply file-style keys over `base` (or the dataclass defaults)."""
        updates = {}
        for key, raw in mapping.items():
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise ConfigurationError(f"Unknown configuration key '{key}'")
            field_name, parser = CONFIG_KEYS[key]
            try:
                updates[field_name] = parser(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"Invalid value for '{key}': {raw!r} ({exc})") from exc
        # the biquadratic chain only exists for spin-1
        if updates.get('model') == 'biquadratic' and 'two_s' not in updates:
            updates['two_s'] = 2
        return replace(base or cls(), **updates)

    @classmethod
    def from_file(cls, path, overrides: Optional[Mapping[str, Any]] = None,
                  base: Optional["RunConfig"] = None) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Configuration file not found: {path}")
        config = cls.from_mapping(dotenv_values(path), base)
        if overrides:
            config = cls.from_mapping(overrides, config)
        logger.info(f"Configuration loaded from {path}")
        return config

    def model_kind(self) -> ModelKind:
        try:
            return ModelKind.from_name(self.model, self.two_s)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc

    def disorder_spec(self) -> DisorderSpec:
        try:
            return DisorderSpec(self.alpha, self.support_max, self.seed)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc

    def ladder(self) -> BlockLadder:
        try:
            if self.block_sizes:
                return BlockLadder(tuple(self.block_sizes), self.sites)
            if not self.blocks_auto:
                raise ConfigurationError("Set blocks.sizes or enable blocks.auto")
            return BlockLadder.auto(self.sites)
        except CrossingError as exc:
            raise ConfigurationError(str(exc)) from exc

    def resolved_q_values(self) -> Tuple[float, ...]:
        """
        Explicit q list, or q_points values spread over q_halfwidth around the
        linear-law estimate for this spin; q = 1 is appended for the von
        Neumann slope when enabled.
        """
        if self.q_values:
            grid = list(self.q_values)
        else:
            center = q_ext_linear(c_eff_of_spin(self.two_s))
            grid = np.round(
                np.linspace(center - self.q_halfwidth, center + self.q_halfwidth, self.q_points), 10
            ).tolist()
        if self.include_von_neumann and not any(abs(q - 1.0) < 1e-12 for q in grid):
            grid.append(1.0)
        return tuple(float(q) for q in grid)

    def fit_window(self) -> Tuple[float, float]:
        """Inclusive L window of the power-law fits; [8, N/8] by default."""
        l_min = self.l_min if self.l_min is not None else 8.0
        l_max = self.l_max if self.l_max is not None else self.sites / 8.0
        return l_min, l_max

    def validate(self) -> "RunConfig":
        """Check every section before any work starts."""
        if self.sites < 4 or self.sites % 2:
            raise ConfigurationError(f"sites must be even and at least 4, got {self.sites}")
        if self.configurations < 1:
            raise ConfigurationError(f"configurations must be at least 1, got {self.configurations}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {self.workers}")
        if self.anchors < 1:
            raise ConfigurationError(f"blocks.anchors must be at least 1, got {self.anchors}")
        if self.anchors > self.sites:
            raise ConfigurationError(f"blocks.anchors cannot exceed sites ({self.sites}), got {self.anchors}")
        if self.checkpoint_every < 1:
            raise ConfigurationError(f"checkpoint_every must be at least 1, got {self.checkpoint_every}")
        if self.q_points < 1 or self.q_halfwidth < 0:
            raise ConfigurationError("entropy.q_points must be positive and entropy.q_halfwidth nonnegative")
        if self.dgamma_policy not in ('median', 'max'):
            raise ConfigurationError(f"scaling.dgamma_policy must be 'median' or 'max', got '{self.dgamma_policy}'")
        if self.kappa_left <= 0 or self.kappa_right <= 0:
            raise ConfigurationError("sdrg.kappa_left and sdrg.kappa_right must be positive")
        l_min, l_max = self.fit_window()
        if l_min > l_max:
            raise ConfigurationError(f"Empty fit window [{l_min}, {l_max}]")
        self.model_kind()
        self.disorder_spec()
        self.ladder()
        self.resolved_q_values()
        return self

    def as_dict(self) -> Dict[str, Any]:
        """File-style keys and values; from_mapping(as_dict()) rebuilds the config."""
        payload = {}
        for item in fields(self):
            value = getattr(self, item.name)
            payload[FIELD_TO_KEY[item.name]] = list(value) if isinstance(value, tuple) else value
        return payload

    def fingerprint(self) -> str:
        """Hash of every setting that affects the simulated numbers."""
        payload = {key: value for key, value in self.as_dict().items() if key not in EXECUTION_KEYS}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode('utf-8')).hexdigest()
