"""Seamless-loop extraction from recorded friction sound.

Scans the recording with a fixed-length window and scores every
candidate segment on how well its start would splice onto its end when
repeated: a waveform-similarity term (normalized cross-correlation of
the 10 ms at the segment start against the 10 ms that follows the
segment end) plus an amplitude term (RMS difference between the first
and last 30 ms). The best candidate's start is snapped to the nearest
rising zero crossing so the splice lands at a quiet point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal_io import SampledSignal

DEFAULT_WINDOW_MS = 300.0
DEFAULT_GUARD_MS = 100.0
SCAN_STRIDE_MS = 1.0
EDGE_SUBWINDOW_MS = 10.0
RMS_SUBWINDOW_MS = 30.0


@dataclass(frozen=True)
class LoopSegment:
    start_sample: int
    length_samples: int
    mismatch_score: float

    def to_dict(self) -> dict:
        return {"start_sample": self.start_sample,
                "length_samples": self.length_samples,
                "mismatch_score": self.mismatch_score}


def find_loop(audio: SampledSignal, window_ms: float = DEFAULT_WINDOW_MS,
              guard_ms: float = DEFAULT_GUARD_MS,
              alpha: float = 0.5, beta: float = 0.5) -> LoopSegment:
    """Pick the window_ms segment that repeats most seamlessly.

    Candidate starts lie on a 1 ms grid inside the guard margins; the
    reported mismatch_score is the grid minimum (ties resolved toward
    the earliest start), evaluated before the zero-crossing snap.
    """
    fs = audio.sample_rate_hz
    n_window = int(round(window_ms * fs / 1000.0))
    n_guard = int(round(guard_ms * fs / 1000.0))
    n_edge = max(1, int(round(EDGE_SUBWINDOW_MS * fs / 1000.0)))
    n_guard = max(n_guard, n_edge)  # the splice sub-window reads past the segment end
    if len(audio) < n_window + 2 * n_guard:
        raise ValueError(
            f"audio of {len(audio)} samples is too short for a {window_ms} ms "
            f"window with {guard_ms} ms guards")

    x = audio.samples
    stride = max(1, int(round(SCAN_STRIDE_MS * fs / 1000.0)))
    starts = np.arange(n_guard, len(x) - n_window - n_guard + 1, stride)
    scores = np.array([_mismatch(x, s, n_window, fs, alpha, beta) for s in starts])
    best = int(np.argmin(scores))
    start = int(starts[best])
    snapped = _snap_to_rising_zero(x, start, n_guard, len(x) - n_window - n_edge)
    return LoopSegment(start_sample=snapped, length_samples=n_window,
                       mismatch_score=float(scores[best]))


def extract_loop(audio: SampledSignal, segment: LoopSegment) -> SampledSignal:
    sl = audio.samples[segment.start_sample:segment.start_sample + segment.length_samples]
    return SampledSignal(sl.copy(), audio.sample_rate_hz)


def equalize_max_amplitude(patterns: list[SampledSignal]) -> list[SampledSignal]:
    """Scale every pattern to peak magnitude 1.0 (pure per-pattern scaling,
    so waveshapes are untouched). Rejects silent patterns."""
    out = []
    for i, p in enumerate(patterns):
        peak = np.max(np.abs(p.samples)) if len(p) else 0.0
        if peak == 0.0:
            raise ValueError(f"pattern {i} is silent; cannot equalize")
        out.append(SampledSignal(p.samples / peak, p.sample_rate_hz))
    return out


def _mismatch(x: np.ndarray, start: int, n_window: int, fs: float,
              alpha: float, beta: float) -> float:
    n_edge = max(1, int(round(EDGE_SUBWINDOW_MS * fs / 1000.0)))
    n_rms = max(1, int(round(RMS_SUBWINDOW_MS * fs / 1000.0)))
    segment = x[start:start + n_window]

    head = x[start:start + n_edge]
    continuation = x[start + n_window:start + n_window + n_edge]
    denom = np.linalg.norm(head) * np.linalg.norm(continuation)
    ncc = float(np.dot(head, continuation) / denom) if denom > 0.0 else 0.0

    rms_head = _rms(segment[:n_rms])
    rms_tail = _rms(segment[-n_rms:])
    rms_all = _rms(segment)
    level_term = abs(rms_head - rms_tail) / rms_all if rms_all > 0.0 else 0.0

    return alpha * (1.0 - ncc) + beta * level_term


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x ** 2)))


def _snap_to_rising_zero(x: np.ndarray, start: int, lo: int, hi: int) -> int:
    """Nearest index i in [lo, hi] with x[i-1] < 0 <= x[i]; start itself
    when no rising zero crossing exists in range."""
    rising = np.flatnonzero((x[:-1] < 0.0) & (x[1:] >= 0.0)) + 1
    rising = rising[(rising >= lo) & (rising <= hi)]
    if len(rising) == 0:
        return start
    return int(rising[np.argmin(np.abs(rising - start))])
