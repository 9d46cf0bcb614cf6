"""Time-series signal container and WAV/CSV file I/O.

All pipeline stages exchange :class:`SampledSignal` values: a 1-D float
array of amplitudes in [-1, 1] plus its sample rate. WAV covers normal
audio interchange; CSV covers raw accelerometer dumps at non-audio rates
(the CSV format carries no rate, so the rate is always an explicit
argument).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled real-valued signal."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        object.__setattr__(self, "samples", samples)
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def normalize(signal: SampledSignal) -> SampledSignal:
    """Scale to peak magnitude 1.0. Silent signals pass through unchanged.

    Idempotent: normalizing twice equals normalizing once.
    """
    peak = np.max(np.abs(signal.samples)) if len(signal) else 0.0
    if peak == 0.0:
        return signal
    return SampledSignal(signal.samples / peak, signal.sample_rate_hz)


def load_signal(path: str, format: str | None = None,
                sample_rate_hz: float | None = None) -> SampledSignal:
    """Read a signal from a WAV or CSV file.

    ``format`` is inferred from the extension when omitted. WAV must be
    16-bit PCM or 32-bit float; multi-channel files contribute only their
    first channel; samples are scaled to [-1, 1] by the format maximum.
    CSV is one amplitude per line and requires ``sample_rate_hz``.
    """
    fmt = format or _format_from_path(path)
    if fmt == "wav":
        return _load_wav(path)
    if fmt == "csv":
        if sample_rate_hz is None:
            raise ValueError("CSV carries no sample rate; pass sample_rate_hz")
        return _load_csv(path, sample_rate_hz)
    raise ValueError(f"unsupported format {fmt!r} (expected 'wav' or 'csv')")


def save_signal(signal: SampledSignal, path: str, format: str | None = None) -> None:
    """Write a signal to WAV (16-bit PCM) or CSV.

    CSV round-trips bitwise; WAV round-trips within 16-bit quantization
    (max abs error 2**-15).
    """
    fmt = format or _format_from_path(path)
    if fmt == "wav":
        # Scale by 32768 with clipping at the positive rail so the
        # load-side /32768 keeps the round-trip error within 2**-15.
        quantized = np.clip(np.round(signal.samples * 32768.0), -32768, 32767)
        wavfile.write(path, int(round(signal.sample_rate_hz)), quantized.astype(np.int16))
    elif fmt == "csv":
        with open(path, "w") as fh:
            for value in signal.samples:
                fh.write(repr(float(value)))
                fh.write("\n")
    else:
        raise ValueError(f"unsupported format {fmt!r} (expected 'wav' or 'csv')")


def _format_from_path(path: str) -> str:
    ext = os.path.splitext(path)[1].lower().lstrip(".")
    if ext in ("wav", "csv"):
        return ext
    raise ValueError(f"cannot infer format from {path!r}; pass format explicitly")


def _load_wav(path: str) -> SampledSignal:
    try:
        rate, data = wavfile.read(path)
    except (ValueError, EOFError) as exc:
        raise ValueError(f"unreadable WAV file {path!r}: {exc}") from exc
    if data.ndim == 2:
        data = data[:, 0]
    if data.size == 0:
        raise ValueError(f"empty signal in {path!r}")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise ValueError(
            f"unsupported WAV encoding {data.dtype} in {path!r}; "
            "only 16-bit PCM and 32-bit float are accepted")
    return SampledSignal(samples, float(rate))


def _load_csv(path: str, sample_rate_hz: float) -> SampledSignal:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from exc
    if not values:
        raise ValueError(f"empty signal in {path!r}")
    return SampledSignal(np.array(values), sample_rate_hz)
