"""Workbench configuration: defaults for seeds, the rendering chain, the
stimulus set, bootstrap size, and the session service. Values are checked
against the preconditions of the modules that consume them at load time.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import InvalidSpecError
from .signal_chain import DEFAULT_SAMPLE_RATE, FilterSpec
from .textures import CANONICAL_GRIT_ORDER, REFERENCE_GRADE, canonical_grit


@dataclass
class WorkbenchConfig:
    plan_seed: int = 0
    observer_seed: int = 1
    bootstrap_seed: int = 2
    texture_seed: int = 3
    filter_order: int = 2
    filter_cutoff_hz: float = 20.0
    frame_len: int = 256
    pwm_gain: float = 1.0
    grits: tuple = CANONICAL_GRIT_ORDER
    reference: str = REFERENCE_GRADE
    per_grit: int = 2
    reps_per_level: int = 20
    trace_duration_s: float = 2.0
    bootstrap_resamples: int = 2000
    link: str = "logit"
    service_port: int = 8439
    data_dir: str = "./session-data"
    stim_ms: int = 2000
    gap_ms: int = 500

    def __post_init__(self):
        self.validate()

    def filter_spec(self) -> FilterSpec:
        return FilterSpec(order=self.filter_order, cutoff_hz=self.filter_cutoff_hz)

    def validate(self) -> None:
        self.filter_spec().validate_for(DEFAULT_SAMPLE_RATE)
        if self.frame_len < 1 or (self.frame_len & (self.frame_len - 1)) != 0:
            raise InvalidSpecError("frame_len must be a power of two")
        if not self.pwm_gain > 0:
            raise InvalidSpecError("pwm_gain must be positive")
        for name in ("plan_seed", "observer_seed", "bootstrap_seed", "texture_seed"):
            if getattr(self, name) < 0:
                raise InvalidSpecError(f"{name} must be non-negative")
        self.grits = tuple(self.grits)
        for grade in (*self.grits, self.reference):
            canonical_grit(grade)
        if self.per_grit < 1 or self.reps_per_level < 1:
            raise InvalidSpecError("per_grit and reps_per_level must be at least 1")
        if self.trace_duration_s <= 0:
            raise InvalidSpecError("trace_duration_s must be positive")
        if self.bootstrap_resamples < 0:
            raise InvalidSpecError("bootstrap_resamples must be non-negative")
        if self.link not in ("logit", "probit"):
            raise InvalidSpecError("link must be 'logit' or 'probit'")
        if not 0 < self.service_port < 65536:
            raise InvalidSpecError("service_port must be a valid TCP port")
        if self.stim_ms < 0 or self.gap_ms < 0:
            raise InvalidSpecError("phase durations must be non-negative")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["grits"] = list(self.grits)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "WorkbenchConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidSpecError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "WorkbenchConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
