"""Pen preset assets: simulator-generated stand-ins for three pens.

No raw pen recordings ship with the toolkit, so each preset is built
from the friction simulator with a pen-specific surface texture
(disjoint spectra, so the pens stay distinguishable end to end):

* tactile.wav / pattern.json - the synthesized tactile pattern, from
  the full analysis + synthesis pipeline over the simulated recording
  (first and last units discarded, middle 15 kept);
* audio.wav / loop.json - a seamless 300 ms loop cut from a separate
  higher-rate simulated friction sound;
* coupling.json - per-pen gain-law constants for the live session.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from . import audioloop, coupling, signal_io, spectral, synth
from .actuator import ActuatorProfile, default_profile
from .config import PipelineConfig
from .sim import SimConfig, TextureComponent, simulate
from .signal_io import SampledSignal

PEN_NAMES = ("ballpoint", "pencil", "marker")

AUDIO_FS_HZ = 22050.0
AUDIO_FREQ_SCALE = 4.0  # audible stand-in lines sit 2 octaves above tactile

# Base oscillation lines per pen (Hz at the reference traverse speed).
# Chosen pairwise-disjoint across pens and inside the tactile band.
_PEN_LINES_HZ = {
    "ballpoint": (85.0, 170.0, 255.0, 340.0),
    "pencil": (60.0, 120.0, 240.0, 300.0),
    "marker": (45.0, 95.0, 190.0, 380.0),
}
_PEN_DEPTHS = {
    "ballpoint": (0.30, 0.22, 0.15, 0.10),
    "pencil": (0.28, 0.24, 0.18, 0.08),
    "marker": (0.32, 0.20, 0.14, 0.11),
}
_PEN_COUPLING = {
    "ballpoint": {"c_p": 0.7, "c_op": 0.05, "c_x": 0.3 / coupling.REFERENCE_SPEED,
                  "c_ov": 0.0, "ema_alpha": 0.3},
    "pencil": {"c_p": 0.8, "c_op": 0.04, "c_x": 0.35 / coupling.REFERENCE_SPEED,
               "c_ov": 0.0, "ema_alpha": 0.3},
    "marker": {"c_p": 0.6, "c_op": 0.06, "c_x": 0.25 / coupling.REFERENCE_SPEED,
               "c_ov": 0.0, "ema_alpha": 0.3},
}
_TRAVERSE_SPEED = 0.05  # m/s


@dataclass(frozen=True)
class PenPreset:
    name: str
    tactile_pattern: SampledSignal
    audio_loop: SampledSignal
    coupling_params: coupling.CouplingParams
    ema_alpha: float
    directory: str


def pen_sim_config(name: str, fs_hz: float = 1344.0, duration_s: float = 1.7,
                   freq_scale: float = 1.0) -> SimConfig:
    """Simulator config for one pen's surface texture."""
    if name not in _PEN_LINES_HZ:
        raise ValueError(f"unknown pen {name!r}; expected one of {PEN_NAMES}")
    texture = tuple(
        TextureComponent(spatial_freq_cycles_per_m=freq_scale * line / _TRAVERSE_SPEED,
                         depth=depth)
        for line, depth in zip(_PEN_LINES_HZ[name], _PEN_DEPTHS[name]))
    if freq_scale == 1.0:
        mass, stiffness, damping = 0.010, 300.0, 0.6
    else:
        # Audio variant: stiffer tip resonance so the ring sits in the
        # audible band next to the scaled texture lines.
        mass, stiffness, damping = 0.002, 16000.0, 1.1
    return SimConfig(mass_kg=mass, stiffness_n_per_m=stiffness,
                     damping_ns_per_m=damping, mu_s=0.6, normal_force_n=1.2,
                     pen_speed_m_per_s=_TRAVERSE_SPEED, texture=texture,
                     fs_hz=fs_hz, duration_s=duration_s)


def pen_line_frequencies(name: str) -> tuple[float, ...]:
    return _PEN_LINES_HZ[name]


def build_preset(name: str, out_dir: str, cfg: PipelineConfig = PipelineConfig(),
                 profile: ActuatorProfile | None = None) -> PenPreset:
    if profile is None:
        profile = default_profile(max_boost=cfg.max_boost)
    pen_dir = os.path.join(out_dir, name)
    os.makedirs(pen_dir, exist_ok=True)

    # Tactile: record enough units to drop the first and last, keeping
    # the configured count from the middle.
    duration_s = (cfg.sub_pattern_count + 2) * cfg.unit_ms / 1000.0
    recording = simulate(pen_sim_config(name, fs_hz=cfg.sample_rate_hz,
                                        duration_s=duration_s))
    peak_sets = spectral.analyze(recording, highpass_hz=cfg.highpass_hz,
                                 unit_ms=cfg.unit_ms, k=cfg.peak_count,
                                 band_hz=cfg.band_hz, min_sep_hz=cfg.min_sep_hz)
    peak_sets = peak_sets[1:1 + cfg.sub_pattern_count]
    pattern = synth.build_pattern(peak_sets, profile, fs=cfg.sample_rate_hz,
                                  sub_duration_ms=cfg.unit_ms,
                                  amp_mode=cfg.amp_mode,
                                  crossfade_ms=cfg.crossfade_ms)
    signal_io.save_signal(pattern.waveform, os.path.join(pen_dir, "tactile.wav"))
    with open(os.path.join(pen_dir, "pattern.json"), "w") as fh:
        json.dump(synth.pattern_to_dict(pattern), fh, indent=1)

    # Audio: separate higher-rate simulation, cut to a seamless loop.
    sound = simulate(pen_sim_config(name, fs_hz=AUDIO_FS_HZ, duration_s=1.2,
                                    freq_scale=AUDIO_FREQ_SCALE))
    segment = audioloop.find_loop(sound, window_ms=cfg.loop_window_ms,
                                  guard_ms=cfg.loop_guard_ms)
    loop = audioloop.equalize_max_amplitude([audioloop.extract_loop(sound, segment)])[0]
    signal_io.save_signal(loop, os.path.join(pen_dir, "audio.wav"))
    with open(os.path.join(pen_dir, "loop.json"), "w") as fh:
        json.dump(segment.to_dict(), fh, indent=1)

    with open(os.path.join(pen_dir, "coupling.json"), "w") as fh:
        json.dump(_PEN_COUPLING[name], fh, indent=1)

    params, ema_alpha = coupling.params_from_dict(_PEN_COUPLING[name])
    return PenPreset(name=name, tactile_pattern=pattern.waveform,
                     audio_loop=loop, coupling_params=params,
                     ema_alpha=ema_alpha, directory=pen_dir)


def build_presets(out_dir: str, cfg: PipelineConfig = PipelineConfig()) -> dict[str, PenPreset]:
    profile = default_profile(max_boost=cfg.max_boost)
    return {name: build_preset(name, out_dir, cfg, profile) for name in PEN_NAMES}


def load_preset(out_dir: str, name: str) -> PenPreset:
    """Load one preset from disk, checking all referenced files exist."""
    pen_dir = os.path.join(out_dir, name)
    tactile_path = os.path.join(pen_dir, "tactile.wav")
    audio_path = os.path.join(pen_dir, "audio.wav")
    coupling_path = os.path.join(pen_dir, "coupling.json")
    for path in (tactile_path, audio_path, coupling_path):
        if not os.path.isfile(path):
            raise ValueError(f"preset {name!r} is missing {path}")
    params, ema_alpha = coupling.load_params(coupling_path)
    return PenPreset(name=name,
                     tactile_pattern=signal_io.load_signal(tactile_path),
                     audio_loop=signal_io.load_signal(audio_path),
                     coupling_params=params, ema_alpha=ema_alpha,
                     directory=pen_dir)


def load_presets(out_dir: str) -> dict[str, PenPreset]:
    names = sorted(d for d in os.listdir(out_dir)
                   if os.path.isdir(os.path.join(out_dir, d)))
    if not names:
        raise ValueError(f"no presets found under {out_dir!r}")
    return {name: load_preset(out_dir, name) for name in names}
