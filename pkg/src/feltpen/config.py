"""Pipeline configuration with the published defaults.

The defaults are the deployed parameter set: 1344 Hz sampling, 30 Hz
high-pass, 100 ms units, top-10 principal frequencies, 15 sub-patterns
(1500 ms nominal pattern), 300 ms audio loop window. Everything is
overridable through a JSON file mirroring the CLI flags.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class PipelineConfig:
    sample_rate_hz: float = 1344.0
    highpass_hz: float = 30.0
    unit_ms: float = 100.0
    peak_count: int = 10
    sub_pattern_count: int = 15
    band_lo_hz: float = 30.0
    band_hi_hz: float = 500.0
    min_sep_hz: float | None = None  # None: two analysis-bin widths
    amp_mode: str = "sqrt"
    crossfade_ms: float = 2.0
    loop_window_ms: float = 300.0
    loop_guard_ms: float = 100.0
    max_boost: float = 10.0

    @property
    def band_hz(self) -> tuple[float, float]:
        return (self.band_lo_hz, self.band_hi_hz)

    @property
    def pattern_nominal_ms(self) -> float:
        return self.sub_pattern_count * self.unit_ms

    def to_dict(self) -> dict:
        return asdict(self)


def config_from_dict(data: dict) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return replace(PipelineConfig(), **data)


def load_config(path: str) -> PipelineConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))
