"""Actuator frequency-response profiles and the equalizing weight.

A linear resonant actuator moves strongly near its resonance and weakly
elsewhere, so equal drive amplitudes come out at very unequal strengths.
The weighting function inverts the tabulated response (with a boost cap
so frequencies far off resonance cannot demand unbounded drive): drive
amplitude times actuator gain is then constant wherever the cap is
inactive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PROFILE_HEADER = "# actuator-profile v1"
DEFAULT_MAX_BOOST = 10.0


@dataclass(frozen=True)
class ActuatorProfile:
    """Tabulated frequency -> output gain response, strictly increasing in
    frequency, with at least two points and positive gains."""

    freqs_hz: np.ndarray
    gains: np.ndarray
    max_boost: float = DEFAULT_MAX_BOOST

    def __post_init__(self):
        freqs = np.asarray(self.freqs_hz, dtype=np.float64)
        gains = np.asarray(self.gains, dtype=np.float64)
        object.__setattr__(self, "freqs_hz", freqs)
        object.__setattr__(self, "gains", gains)
        if freqs.shape != gains.shape or freqs.ndim != 1:
            raise ValueError("freqs_hz and gains must be 1-D and the same length")
        if len(freqs) < 2:
            raise ValueError("profile needs >= 2 points")
        if not np.all(freqs[:-1] < freqs[1:]):
            raise ValueError("profile frequencies must be strictly increasing")
        if not np.all(freqs > 0):
            raise ValueError("profile frequencies must be positive")
        if not np.all(gains > 0):
            raise ValueError("profile gains must be positive")
        if not self.max_boost >= 1.0:
            raise ValueError("max_boost must be >= 1")


def interp_gain(profile: ActuatorProfile, freq_hz):
    """Actuator gain at freq_hz: linear interpolation in (log f, gain),
    clamped to the endpoint gains outside the table."""
    freq = np.asarray(freq_hz, dtype=np.float64)
    if np.any(freq <= 0):
        raise ValueError("frequency must be positive")
    gain = np.interp(np.log(freq), np.log(profile.freqs_hz), profile.gains)
    return float(gain) if np.isscalar(freq_hz) else gain


def weight(profile: ActuatorProfile, freq_hz):
    """Equalizing drive weight: min(max_boost, 1 / gain(freq))."""
    gain = interp_gain(profile, freq_hz)
    return np.minimum(profile.max_boost, 1.0 / gain)


def load_profile(path: str, max_boost: float = DEFAULT_MAX_BOOST) -> ActuatorProfile:
    """Parse a ``freq_hz,gain`` CSV (optional '#' comment lines)."""
    freqs, gains = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'freq_hz,gain': {line!r}")
            try:
                freqs.append(float(parts[0]))
                gains.append(float(parts[1]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not numeric: {line!r}") from exc
    if len(freqs) < 2:
        raise ValueError(f"{path}: profile needs >= 2 points")
    return ActuatorProfile(np.array(freqs), np.array(gains), max_boost=max_boost)


def save_profile(profile: ActuatorProfile, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(PROFILE_HEADER + "\n")
        for f, g in zip(profile.freqs_hz, profile.gains):
            fh.write(f"{float(f)!r},{float(g)!r}\n")


def default_profile(resonance_hz: float = 175.0, q: float = 8.0,
                    f_lo: float = 10.0, f_hi: float = 650.0,
                    n_points: int = 48,
                    max_boost: float = DEFAULT_MAX_BOOST) -> ActuatorProfile:
    """Synthetic stand-in for an unmeasured linear resonant actuator.

    Second-order band-pass magnitude with unit peak at the resonance:
    g(f) = 1 / sqrt(1 + Q^2 (f/f0 - f0/f)^2), sampled at log-spaced
    frequencies plus a knot pinned at the resonance itself (the peak is
    too sharp to survive interpolation otherwise). Purely synthetic;
    measured hardware profiles should be loaded from CSV instead.
    """
    freqs = np.unique(np.append(np.geomspace(f_lo, f_hi, n_points), resonance_hz))
    ratio = freqs / resonance_hz
    gains = 1.0 / np.sqrt(1.0 + q ** 2 * (ratio - 1.0 / ratio) ** 2)
    return ActuatorProfile(freqs, gains, max_boost=max_boost)


def flat_profile(gain: float = 1.0, f_lo: float = 1.0, f_hi: float = 1000.0,
                 max_boost: float = DEFAULT_MAX_BOOST) -> ActuatorProfile:
    """Unit-gain profile: weight(f) == 1/gain everywhere. Handy baseline."""
    return ActuatorProfile(np.array([f_lo, f_hi]),
                           np.array([gain, gain]), max_boost=max_boost)
