"""1-DOF mass-spring-damper pen-tip model with Coulomb friction.

The gripped pen is a lumped mass on a spring-damper against the
surface; sliding at constant traverse speed over a textured surface
modulates the normal force at spatial-frequency x speed, which excites
the oscillator through the Coulomb friction term:

    m*x'' + c*x' + k*x = -sgn(v_rel) * mu * F_n(t)
    F_n(t) = F_n * (1 + sum_j depth_j * sin(2*pi*sf_j*V*t + phi_j))

with v_rel = V + x'. Output is the acceleration trace, mirroring what
an accelerometer on the pen barrel measures. Because the forcing
frequencies are known exactly (V * spatial_freq), the simulator serves
as a ground-truth generator for the analysis pipeline.

Integration is classical fixed-step RK4 at the output rate; sgn is
exact with sgn(0) = 0. Constant positive traverse speeds keep v_rel
one-signed, so stick-slip transitions do not arise here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .signal_io import SampledSignal, normalize


@dataclass(frozen=True)
class TextureComponent:
    spatial_freq_cycles_per_m: float
    depth: float
    phase_rad: float = 0.0


@dataclass(frozen=True)
class SimConfig:
    mass_kg: float
    stiffness_n_per_m: float
    damping_ns_per_m: float = 0.0
    mu_s: float = 0.0
    normal_force_n: float = 0.0
    pen_speed_m_per_s: float = 0.0
    texture: tuple[TextureComponent, ...] = ()
    fs_hz: float = 1344.0
    duration_s: float = 1.5
    initial_displacement_m: float = 0.0
    initial_velocity_m_per_s: float = 0.0

    def __post_init__(self):
        if self.mass_kg <= 0 or self.stiffness_n_per_m <= 0:
            raise ValueError("mass and stiffness must be positive")
        if self.damping_ns_per_m < 0 or self.mu_s < 0 or self.normal_force_n < 0:
            raise ValueError("damping, mu_s and normal force must be non-negative")
        if self.fs_hz <= 0 or self.duration_s <= 0:
            raise ValueError("fs_hz and duration_s must be positive")
        depth_sum = 0.0
        for comp in self.texture:
            if not 0.0 <= comp.depth < 1.0:
                raise ValueError("texture depths must lie in [0, 1)")
            depth_sum += comp.depth
        if depth_sum >= 1.0:
            raise ValueError("texture depths must sum below 1 (normal force "
                             "must stay positive)")


def natural_frequency(cfg: SimConfig, damped: bool = False) -> float:
    """Closed-form oscillator frequency in Hz.

    Undamped: sqrt(k/m) / 2pi. Damped: sqrt(k/m - (c/2m)^2) / 2pi,
    defined only while underdamped (c^2 < 4km).
    """
    omega_sq = cfg.stiffness_n_per_m / cfg.mass_kg
    if not damped:
        return math.sqrt(omega_sq) / (2.0 * math.pi)
    decay = cfg.damping_ns_per_m / (2.0 * cfg.mass_kg)
    if omega_sq <= decay ** 2:
        raise ValueError("no damped natural frequency: system is not underdamped")
    return math.sqrt(omega_sq - decay ** 2) / (2.0 * math.pi)


def simulate(cfg: SimConfig) -> SampledSignal:
    """Acceleration trace at cfg.fs_hz, peak-normalized to 1.0."""
    _, _, _, accel = simulate_states(cfg)
    return normalize(SampledSignal(accel, cfg.fs_hz))


def simulate_states(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Integrate the model; returns (t, displacement, velocity, acceleration)
    without normalization. Mostly useful for physics checks (energy,
    forcing linearity) that the normalized trace hides."""
    dt = 1.0 / cfg.fs_hz
    n = int(round(cfg.duration_s * cfg.fs_hz))
    if n < 2:
        raise ValueError("duration too short to simulate")
    t = np.arange(n) * dt

    # Normal force sampled at step times and midpoints; RK4 never needs
    # other time points, so the inner loop stays scalar arithmetic.
    f_steps = _normal_force(cfg, np.arange(n + 1) * dt)
    f_mids = _normal_force(cfg, (np.arange(n) + 0.5) * dt)

    m = cfg.mass_kg
    k = cfg.stiffness_n_per_m
    c = cfg.damping_ns_per_m
    mu = cfg.mu_s
    big_v = cfg.pen_speed_m_per_s

    def accel(x: float, v: float, fn: float) -> float:
        v_rel = big_v + v
        sgn = 1.0 if v_rel > 0.0 else (-1.0 if v_rel < 0.0 else 0.0)
        return (-sgn * mu * fn - c * v - k * x) / m

    xs = np.empty(n)
    vs = np.empty(n)
    accs = np.empty(n)
    x = cfg.initial_displacement_m
    v = cfg.initial_velocity_m_per_s
    half = dt / 2.0
    for i in range(n):
        xs[i] = x
        vs[i] = v
        a1 = accel(x, v, f_steps[i])
        accs[i] = a1
        if i == n - 1:
            break
        fm = f_mids[i]
        a2 = accel(x + half * v, v + half * a1, fm)
        a3 = accel(x + half * (v + half * a1), v + half * a2, fm)
        a4 = accel(x + dt * (v + half * a2), v + dt * a3, f_steps[i + 1])
        x += dt * (v + (dt / 6.0) * (a1 + a2 + a3))
        v += (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return t, xs, vs, accs


def _normal_force(cfg: SimConfig, t: np.ndarray) -> np.ndarray:
    fn = np.full(len(t), cfg.normal_force_n)
    for comp in cfg.texture:
        forcing_hz = comp.spatial_freq_cycles_per_m * cfg.pen_speed_m_per_s
        fn += cfg.normal_force_n * comp.depth * np.sin(
            2.0 * np.pi * forcing_hz * t + comp.phase_rad)
    return fn


def forcing_frequencies_hz(cfg: SimConfig) -> list[float]:
    """Frequencies at which the texture drives the oscillator."""
    return [c.spatial_freq_cycles_per_m * cfg.pen_speed_m_per_s for c in cfg.texture]


def config_from_dict(data: dict) -> SimConfig:
    data = dict(data)
    texture = tuple(
        TextureComponent(
            spatial_freq_cycles_per_m=float(comp["spatial_freq_cycles_per_m"]),
            depth=float(comp["depth"]),
            phase_rad=float(comp.get("phase_rad", 0.0)),
        )
        for comp in data.pop("texture", []))
    return SimConfig(texture=texture, **{key: float(value) for key, value in data.items()})


def config_to_dict(cfg: SimConfig) -> dict:
    return {
        "mass_kg": cfg.mass_kg,
        "stiffness_n_per_m": cfg.stiffness_n_per_m,
        "damping_ns_per_m": cfg.damping_ns_per_m,
        "mu_s": cfg.mu_s,
        "normal_force_n": cfg.normal_force_n,
        "pen_speed_m_per_s": cfg.pen_speed_m_per_s,
        "texture": [{"spatial_freq_cycles_per_m": c.spatial_freq_cycles_per_m,
                     "depth": c.depth, "phase_rad": c.phase_rad}
                    for c in cfg.texture],
        "fs_hz": cfg.fs_hz,
        "duration_s": cfg.duration_s,
        "initial_displacement_m": cfg.initial_displacement_m,
        "initial_velocity_m_per_s": cfg.initial_velocity_m_per_s,
    }


def load_config(path: str) -> SimConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))
