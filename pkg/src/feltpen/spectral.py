"""Filtering, unit segmentation, per-unit power spectra, and principal peaks.

An input recording is high-pass filtered to strip motion artifacts, cut
into consecutive fixed-length units, and each unit is reduced to its
dominant frequency components: the per-unit ``PeakSet`` that drives
pattern synthesis.

Analysis choices baked in here:

* 4th-order Butterworth high-pass, applied forward-backward so the
  filter is zero-phase (oscillation timing is preserved).
* One Hann-windowed transform per unit, zero-padded to 4x the next
  power of two; peak frequencies refined by parabolic interpolation
  over the three bins around each maximum.
* Power is a one-sided scaled periodogram: the sum over bins equals the
  windowed unit's energy (Parseval), so per-unit power levels are
  directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .signal_io import SampledSignal

DEFAULT_BAND_HZ = (30.0, 500.0)
DEFAULT_PAD_FACTOR = 4


@dataclass(frozen=True)
class UnitSpectrum:
    """One-sided power spectrum of a single unit sequence."""

    unit_index: int
    bin_freqs_hz: np.ndarray
    power: np.ndarray

    @property
    def bin_width_hz(self) -> float:
        return float(self.bin_freqs_hz[1] - self.bin_freqs_hz[0])


@dataclass(frozen=True)
class PeakSet:
    """Principal frequencies of one unit, ordered by descending power.

    ``peaks`` is a sequence of (freq_hz, power) pairs; ``k`` is the
    requested count, so ``len(peaks) <= k``.
    """

    unit_index: int
    peaks: tuple[tuple[float, float], ...]
    k: int

    @property
    def freqs_hz(self) -> np.ndarray:
        return np.array([f for f, _ in self.peaks])

    @property
    def powers(self) -> np.ndarray:
        return np.array([p for _, p in self.peaks])


def high_pass(signal: SampledSignal, cutoff_hz: float) -> SampledSignal:
    """Zero-phase 4th-order Butterworth high-pass filter.

    Output has the same length as the input. The forward-backward pass
    squares the single-pass magnitude response, so attenuation at
    cutoff/6 is far beyond the 20 dB floor and passband ripple above
    2x cutoff stays within +-0.5 dB.
    """
    if len(signal) == 0:
        raise ValueError("signal is empty")
    nyquist = signal.sample_rate_hz / 2.0
    if not 0.0 < cutoff_hz < nyquist:
        raise ValueError(f"cutoff {cutoff_hz} Hz outside (0, {nyquist}) Hz")
    sos = sps.butter(4, cutoff_hz, btype="highpass", fs=signal.sample_rate_hz,
                     output="sos")
    filtered = sps.sosfiltfilt(sos, signal.samples)
    return SampledSignal(filtered, signal.sample_rate_hz)


def segment_units(signal: SampledSignal, unit_ms: float) -> list[SampledSignal]:
    """Cut into consecutive non-overlapping units of unit_ms milliseconds.

    Unit length is floor(unit_ms * fs / 1000) samples; a trailing
    remainder shorter than one unit is discarded.
    """
    n_unit = unit_sample_count(signal.sample_rate_hz, unit_ms)
    if len(signal) < n_unit:
        raise ValueError(
            f"signal of {len(signal)} samples is shorter than one "
            f"{unit_ms} ms unit ({n_unit} samples)")
    n_units = len(signal) // n_unit
    return [SampledSignal(signal.samples[i * n_unit:(i + 1) * n_unit],
                          signal.sample_rate_hz)
            for i in range(n_units)]


def unit_sample_count(sample_rate_hz: float, unit_ms: float) -> int:
    n = int(np.floor(unit_ms * sample_rate_hz / 1000.0))
    if n < 1:
        raise ValueError(f"unit of {unit_ms} ms holds no samples at {sample_rate_hz} Hz")
    return n


def power_spectrum(unit: SampledSignal, unit_index: int = 0,
                   pad_factor: int = DEFAULT_PAD_FACTOR) -> UnitSpectrum:
    """Hann-windowed one-sided power spectrum of one unit.

    Scaled so that sum(power) equals the energy of the windowed unit;
    zero-padding interpolates the spectrum without changing that total.
    """
    x = unit.samples
    if len(x) == 0:
        raise ValueError("unit is empty")
    n = len(x)
    window = sps.windows.hann(n, sym=False)
    n_fft = pad_factor * _next_pow2(n)
    spectrum = np.fft.rfft(x * window, n=n_fft)
    power = np.abs(spectrum) ** 2 / n_fft
    # Fold negative frequencies into the one-sided bins; DC and Nyquist
    # have no mirror.
    power[1:-1] *= 2.0
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / unit.sample_rate_hz)
    return UnitSpectrum(unit_index=unit_index, bin_freqs_hz=freqs, power=power)


def extract_principal(spec: UnitSpectrum, k: int,
                      band_hz: tuple[float, float] = DEFAULT_BAND_HZ,
                      min_sep_hz: float | None = None) -> PeakSet:
    """Pick up to k principal frequencies from one unit spectrum.

    Candidates are local maxima of the power array inside the band,
    taken greedily by descending power (ties broken toward the lower
    frequency); a candidate closer than min_sep_hz to any already-chosen
    peak is skipped. Frequencies and powers are refined by parabolic
    interpolation around the winning bin. Returns fewer than k peaks
    when the spectrum has fewer qualifying maxima.

    min_sep_hz defaults to two bin widths, enough to suppress
    leakage-duplicate maxima on the padded grid.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lo, hi = band_hz
    nyquist = spec.bin_freqs_hz[-1]
    if not lo < hi:
        raise ValueError(f"empty analysis band [{lo}, {hi}]")
    if hi > nyquist + 1e-9:
        raise ValueError(f"band upper edge {hi} Hz exceeds Nyquist {nyquist} Hz")
    if min_sep_hz is None:
        min_sep_hz = 2.0 * spec.bin_width_hz

    power = spec.power
    freqs = spec.bin_freqs_hz
    interior = np.arange(1, len(power) - 1)
    is_max = (power[interior] > power[interior - 1]) & (power[interior] >= power[interior + 1])
    candidates = interior[is_max & (power[interior] > 0.0)]
    candidates = candidates[(freqs[candidates] >= lo) & (freqs[candidates] <= hi)]
    # Descending power, lower frequency first on ties.
    order = np.lexsort((freqs[candidates], -power[candidates]))
    chosen: list[int] = []
    for idx in candidates[order]:
        if len(chosen) == k:
            break
        if all(abs(freqs[idx] - freqs[j]) >= min_sep_hz for j in chosen):
            chosen.append(int(idx))

    peaks = []
    for i in chosen:
        freq, pwr = _refine_peak(freqs, power, i)
        # refinement may nudge an edge bin past the band boundary
        peaks.append((float(np.clip(freq, lo, hi)), pwr))
    return PeakSet(unit_index=spec.unit_index, peaks=tuple(peaks), k=k)


def analyze(signal: SampledSignal, highpass_hz: float = 30.0,
            unit_ms: float = 100.0, k: int = 10,
            band_hz: tuple[float, float] = DEFAULT_BAND_HZ,
            min_sep_hz: float | None = None,
            pad_factor: int = DEFAULT_PAD_FACTOR) -> list[PeakSet]:
    """Full analysis chain: high-pass, segment, spectrum, peaks per unit."""
    n_unit = unit_sample_count(signal.sample_rate_hz, unit_ms)
    if len(signal) < n_unit:
        raise ValueError(
            f"signal of {len(signal)} samples is shorter than one "
            f"{unit_ms} ms unit ({n_unit} samples)")
    filtered = high_pass(signal, highpass_hz)
    units = segment_units(filtered, unit_ms)
    peak_sets = []
    for i, unit in enumerate(units):
        spec = power_spectrum(unit, unit_index=i, pad_factor=pad_factor)
        peak_sets.append(extract_principal(spec, k, band_hz, min_sep_hz))
    return peak_sets


def peak_sets_to_dict(peak_sets: list[PeakSet]) -> dict:
    """Wire/file form: {"units":[{"unit_index":0,"peaks":[[f,p],...]}]}."""
    return {"units": [{"unit_index": ps.unit_index,
                       "peaks": [[f, p] for f, p in ps.peaks]}
                      for ps in peak_sets]}


def peak_sets_from_dict(data: dict) -> list[PeakSet]:
    units = data.get("units")
    if not isinstance(units, list):
        raise ValueError('peak-set JSON must have a "units" list')
    peak_sets = []
    for entry in units:
        peaks = tuple((float(f), float(p)) for f, p in entry["peaks"])
        peak_sets.append(PeakSet(unit_index=int(entry["unit_index"]),
                                 peaks=peaks, k=max(len(peaks), 1)))
    return peak_sets


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def _refine_peak(freqs: np.ndarray, power: np.ndarray, i: int) -> tuple[float, float]:
    """Parabolic interpolation through (i-1, i, i+1); falls back to the
    raw bin at array edges or degenerate (flat) neighborhoods."""
    if i <= 0 or i >= len(power) - 1:
        return float(freqs[i]), float(power[i])
    y_prev, y0, y_next = power[i - 1], power[i], power[i + 1]
    denom = y_prev - 2.0 * y0 + y_next
    if denom == 0.0:
        return float(freqs[i]), float(power[i])
    delta = 0.5 * (y_prev - y_next) / denom
    delta = float(np.clip(delta, -0.5, 0.5))
    bin_width = freqs[1] - freqs[0]
    refined_freq = freqs[i] + delta * bin_width
    refined_power = y0 - 0.25 * (y_prev - y_next) * delta
    return float(refined_freq), float(refined_power)
