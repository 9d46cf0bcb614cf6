"""Playback amplitude from writing pressure and speed.

The audio gain is a clamped linear map of the two writing quantities:

    gain = clamp(c_p * (pressure - c_op) + c_x * (speed - c_ov), lo, hi)

Defaults are synthetic (no published constants exist): they put a
mid-pressure, mid-speed stroke near gain 0.5 and are meant to be
overridden per pen from a JSON config. Speed comes from an
exponential-moving-average over per-sample Euclidean velocities, since
raw pointer streams are jittery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

DEFAULT_EMA_ALPHA = 0.3
# Screen-units-per-second scale that maps a brisk stroke to a 0.3 gain
# contribution; tablets report positions in px so 1000 px/s is a
# reasonable reference writing speed.
REFERENCE_SPEED = 1000.0


@dataclass(frozen=True)
class CouplingParams:
    c_p: float = 0.7
    c_op: float = 0.05
    c_x: float = 0.3 / REFERENCE_SPEED
    c_ov: float = 0.0
    clamp_lo: float = 0.0
    clamp_hi: float = 1.0

    def __post_init__(self):
        if not self.clamp_hi > self.clamp_lo:
            raise ValueError("clamp_hi must exceed clamp_lo")
        if self.c_p < 0 or self.c_x < 0:
            raise ValueError("c_p and c_x must be non-negative")


@dataclass(frozen=True)
class TracePoint:
    t: float
    x: float
    y: float
    pressure: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.pressure <= 1.0:
            raise ValueError(f"pressure {self.pressure} outside [0, 1]")


@dataclass(frozen=True)
class PenTrace:
    points: tuple[TracePoint, ...]

    def __post_init__(self):
        ts = [p.t for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("trace timestamps must be strictly increasing")


@dataclass(frozen=True)
class CouplingState:
    """Velocity-estimation state for one writing session."""

    smoothed_speed: float = 0.0
    last_point: TracePoint | None = None
    ema_alpha: float = DEFAULT_EMA_ALPHA

    def __post_init__(self):
        if not 0.0 < self.ema_alpha <= 1.0:
            raise ValueError("ema_alpha must be in (0, 1]")
        if self.smoothed_speed < 0.0:
            raise ValueError("smoothed_speed must be non-negative")


def coupled_amplitude(params: CouplingParams, pressure: float, speed: float) -> float:
    """Clamped linear coupling of pressure and speed to playback gain."""
    if not (math.isfinite(pressure) and math.isfinite(speed)):
        raise ValueError("pressure and speed must be finite")
    raw = params.c_p * (pressure - params.c_op) + params.c_x * (speed - params.c_ov)
    return min(params.clamp_hi, max(params.clamp_lo, raw))


def update_speed(state: CouplingState, point: TracePoint) -> tuple[CouplingState, float]:
    """Fold one trace point into the state; returns (state, smoothed speed).

    The first point of a session yields speed 0. Later points must carry
    strictly increasing timestamps.
    """
    if state.last_point is None:
        new = replace(state, smoothed_speed=0.0, last_point=point)
        return new, 0.0
    dt = point.t - state.last_point.t
    if dt <= 0.0:
        raise ValueError(
            f"non-increasing timestamp {point.t} after {state.last_point.t}")
    instantaneous = math.hypot(point.x - state.last_point.x,
                               point.y - state.last_point.y) / dt
    smoothed = state.ema_alpha * instantaneous + (1.0 - state.ema_alpha) * state.smoothed_speed
    new = replace(state, smoothed_speed=smoothed, last_point=point)
    return new, smoothed


def params_from_dict(data: dict) -> tuple[CouplingParams, float]:
    """Parse {c_p, c_op, c_x, c_ov, ema_alpha}; absent keys keep defaults.

    Returns (params, ema_alpha) since the EMA constant belongs to the
    session state rather than the gain law.
    """
    defaults = CouplingParams()
    known = {"c_p", "c_op", "c_x", "c_ov", "ema_alpha"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown coupling keys: {sorted(unknown)}")
    params = CouplingParams(
        c_p=float(data.get("c_p", defaults.c_p)),
        c_op=float(data.get("c_op", defaults.c_op)),
        c_x=float(data.get("c_x", defaults.c_x)),
        c_ov=float(data.get("c_ov", defaults.c_ov)),
    )
    return params, float(data.get("ema_alpha", DEFAULT_EMA_ALPHA))


def params_to_dict(params: CouplingParams, ema_alpha: float = DEFAULT_EMA_ALPHA) -> dict:
    return {"c_p": params.c_p, "c_op": params.c_op, "c_x": params.c_x,
            "c_ov": params.c_ov, "ema_alpha": ema_alpha}


def load_params(path: str) -> tuple[CouplingParams, float]:
    with open(path) as fh:
        return params_from_dict(json.load(fh))
