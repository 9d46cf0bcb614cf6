"""Superposed-sinusoid tactile pattern synthesis.

Each unit's principal frequencies become one sub-pattern: a sum of
sinusoids whose amplitudes follow the unit's power ratios (square-root
mapping by default, preserving relative energy) scaled by the actuator
equalization weight. Sub-patterns are concatenated into one loopable
waveform.

Boundary policy: a frequency that persists from one sub-pattern to the
next continues its phase, so persisting components cross the boundary
seamlessly; genuinely new components start at phase zero and a short
linear crossfade (default 2 ms) absorbs the residual discontinuity,
including the loop seam from the last sub-pattern back to the first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actuator import ActuatorProfile, weight
from .signal_io import SampledSignal
from .spectral import PeakSet, _next_pow2, unit_sample_count

DEFAULT_SUB_DURATION_MS = 100.0
DEFAULT_SUB_PATTERN_COUNT = 15
DEFAULT_CROSSFADE_MS = 2.0


@dataclass(frozen=True)
class SubPattern:
    """Sinusoid components of one sub-pattern (parallel arrays)."""

    freqs_hz: np.ndarray
    amplitudes: np.ndarray
    phases_rad: np.ndarray


@dataclass(frozen=True)
class TactilePattern:
    """Ordered sub-patterns plus the rendered loopable waveform.

    Component amplitudes are expressed on the same scale as the
    waveform, i.e. after global peak normalization.
    """

    sub_patterns: tuple[SubPattern, ...]
    sub_duration_ms: float
    waveform: SampledSignal

    @property
    def sample_rate_hz(self) -> float:
        return self.waveform.sample_rate_hz

    @property
    def nominal_duration_ms(self) -> float:
        return len(self.sub_patterns) * self.sub_duration_ms


def build_pattern(peak_sets: list[PeakSet], profile: ActuatorProfile,
                  fs: float, sub_duration_ms: float = DEFAULT_SUB_DURATION_MS,
                  amp_mode: str = "sqrt",
                  crossfade_ms: float = DEFAULT_CROSSFADE_MS,
                  phase_match_hz: float | None = None) -> TactilePattern:
    """Assemble the tactile pattern from per-unit peak sets.

    For a unit with peaks (f_i, p_i) the component drive amplitude is
    weight(profile, f_i) * sqrt(p_i / max_j p_j) (or the plain ratio
    with amp_mode="linear"). The final waveform is normalized to peak
    magnitude exactly 1.0.

    phase_match_hz bounds how far apart two frequencies in adjacent
    sub-patterns may be and still count as the same persisting
    component; it defaults to two analysis-grid bin widths.
    """
    if not peak_sets:
        raise ValueError("no peak sets given")
    if amp_mode not in ("sqrt", "linear"):
        raise ValueError(f"amp_mode must be 'sqrt' or 'linear', got {amp_mode!r}")
    n_unit = unit_sample_count(fs, sub_duration_ms)
    if phase_match_hz is None:
        phase_match_hz = 2.0 * fs / (4 * _next_pow2(n_unit))

    subs: list[SubPattern] = []
    prev: SubPattern | None = None
    for ps in peak_sets:
        if not ps.peaks:
            raise ValueError(f"unit {ps.unit_index} has no peaks")
        freqs = ps.freqs_hz
        powers = ps.powers
        p_max = powers.max()
        if p_max <= 0.0:
            raise ValueError(f"unit {ps.unit_index} has all-zero powers")
        ratio = powers / p_max
        amps = weight(profile, freqs) * (np.sqrt(ratio) if amp_mode == "sqrt" else ratio)
        phases = _continue_phases(freqs, prev, phase_match_hz, n_unit, fs)
        prev = SubPattern(freqs, amps, phases)
        subs.append(prev)

    waveform = _render(subs, n_unit, fs, crossfade_ms)
    peak = np.max(np.abs(waveform))
    if peak == 0.0:
        raise ValueError("synthesized pattern is silent")
    scale = 1.0 / peak
    subs = [SubPattern(s.freqs_hz, s.amplitudes * scale, s.phases_rad) for s in subs]
    return TactilePattern(sub_patterns=tuple(subs),
                          sub_duration_ms=sub_duration_ms,
                          waveform=SampledSignal(waveform * scale, fs))


def render_loop(pattern: TactilePattern, repeats: int) -> SampledSignal:
    """Concatenate `repeats` copies of the pattern waveform."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    return SampledSignal(np.tile(pattern.waveform.samples, repeats),
                         pattern.sample_rate_hz)


def pattern_to_dict(pattern: TactilePattern) -> dict:
    """JSON form of the sub-pattern tables, for inspection or for
    microcontroller-style sample-table generation."""
    return {
        "sample_rate_hz": pattern.sample_rate_hz,
        "sub_duration_ms": pattern.sub_duration_ms,
        "sub_pattern_samples": unit_sample_count(pattern.sample_rate_hz,
                                                 pattern.sub_duration_ms),
        "sub_patterns": [
            {"components": [[float(f), float(a), float(ph)]
                            for f, a, ph in zip(s.freqs_hz, s.amplitudes, s.phases_rad)]}
            for s in pattern.sub_patterns
        ],
    }


def _continue_phases(freqs: np.ndarray, prev: SubPattern | None,
                     match_hz: float, n_unit: int, fs: float) -> np.ndarray:
    """Phase for each component: carried over from the closest matching
    component of the previous sub-pattern, else zero."""
    phases = np.zeros(len(freqs))
    if prev is None:
        return phases
    end_phases = (prev.phases_rad + 2.0 * np.pi * prev.freqs_hz * n_unit / fs) % (2.0 * np.pi)
    used = np.zeros(len(prev.freqs_hz), dtype=bool)
    for i, f in enumerate(freqs):
        diffs = np.abs(prev.freqs_hz - f)
        diffs[used] = np.inf
        j = int(np.argmin(diffs))
        if diffs[j] <= match_hz:
            phases[i] = end_phases[j]
            used[j] = True
    return phases


def _render_components(sub: SubPattern, start: int, count: int, fs: float) -> np.ndarray:
    """Evaluate a sub-pattern's sinusoid sum on local samples
    [start, start+count), allowing extension past the nominal end."""
    t = np.arange(start, start + count) / fs
    out = np.zeros(count)
    for f, a, ph in zip(sub.freqs_hz, sub.amplitudes, sub.phases_rad):
        out += a * np.sin(2.0 * np.pi * f * t + ph)
    return out


def _render(subs: list[SubPattern], n_unit: int, fs: float,
            crossfade_ms: float) -> np.ndarray:
    n_units = len(subs)
    out = np.concatenate([_render_components(s, 0, n_unit, fs) for s in subs])
    n_fade = int(round(crossfade_ms * fs / 1000.0))
    n_fade = min(n_fade, n_unit)
    if n_fade == 0:
        return out
    ramp = np.arange(1, n_fade + 1) / (n_fade + 1.0)
    for u in range(n_units):
        # Extend sub-pattern u past its end and blend into the head of
        # the successor; the last sub-pattern wraps onto the first, which
        # is what makes the repeated loop seamless.
        ext = _render_components(subs[u], n_unit, n_fade, fs)
        head = ((u + 1) % n_units) * n_unit
        out[head:head + n_fade] = (1.0 - ramp) * ext + ramp * out[head:head + n_fade]
    return out
