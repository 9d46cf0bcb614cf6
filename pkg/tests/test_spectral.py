import math

import numpy as np
import pytest
from scipy import signal as sps

from feltpen.signal_io import SampledSignal
from feltpen.spectral import (PeakSet, UnitSpectrum, analyze, extract_principal,
                              high_pass, peak_sets_from_dict, peak_sets_to_dict,
                              power_spectrum, segment_units)

FS = 1344.0


def filtfilt_gain(f, cutoff=30.0, fs=FS, order=4):
    """Analytic magnitude of the forward-backward Butterworth high-pass:
    the bilinear design's |H|^2 at frequency f."""
    ratio = math.tan(math.pi * cutoff / fs) / math.tan(math.pi * f / fs)
    return 1.0 / (1.0 + ratio ** (2 * order))


def tone(freq, fs=FS, seconds=1.0, amp=1.0, phase=0.0):
    t = np.arange(int(seconds * fs)) / fs
    return SampledSignal(amp * np.sin(2 * np.pi * freq * t + phase), fs)


def measured_amplitude(samples):
    # middle third avoids edge transients of the zero-phase filter
    mid = samples[len(samples) // 3:2 * len(samples) // 3]
    return math.sqrt(2.0) * np.std(mid)


class TestHighPass:
    def test_dc_removed(self):
        out = high_pass(SampledSignal(np.ones(int(2 * FS)), FS), 30.0)
        mid = out.samples[len(out) // 3:2 * len(out) // 3]
        assert np.sqrt(np.mean(mid ** 2)) <= 0.01

    def test_passband_100hz(self):
        out = high_pass(tone(100.0, seconds=3.0), 30.0)
        amp = measured_amplitude(out.samples)
        assert abs(amp - 1.0) < 0.05
        assert amp == pytest.approx(filtfilt_gain(100.0), rel=1e-2)

    def test_stopband_5hz(self):
        out = high_pass(tone(5.0, seconds=3.0), 30.0)
        amp = measured_amplitude(out.samples)
        assert amp < 10 ** (-20 / 20.0)  # >= 20 dB attenuation
        assert amp == pytest.approx(filtfilt_gain(5.0), rel=0.05)

    def test_output_length_preserved(self):
        sig = tone(77.0, seconds=0.5)
        assert len(high_pass(sig, 30.0)) == len(sig)

    def test_linearity(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.normal(size=600)
            y = rng.normal(size=600)
            a, b = rng.uniform(-2, 2, 2)
            lhs = high_pass(SampledSignal(a * x + b * y, FS), 30.0).samples
            rhs = (a * high_pass(SampledSignal(x, FS), 30.0).samples
                   + b * high_pass(SampledSignal(y, FS), 30.0).samples)
            assert np.max(np.abs(lhs - rhs)) < 1e-9

    def test_cutoff_out_of_range(self):
        sig = tone(100.0, seconds=0.2)
        with pytest.raises(ValueError):
            high_pass(sig, 0.0)
        with pytest.raises(ValueError):
            high_pass(sig, FS / 2)


class TestSegmentUnits:
    def test_paper_grid(self):
        sig = SampledSignal(np.zeros(int(1.5 * FS)), FS)
        units = segment_units(sig, 100.0)
        assert len(units) == 15
        assert all(len(u) == 134 for u in units)

    def test_remainder_discarded(self):
        sig = SampledSignal(np.arange(250), 1000.0)
        units = segment_units(sig, 100.0)
        assert len(units) == 2
        assert np.array_equal(units[0].samples, np.arange(100))
        assert np.array_equal(units[1].samples, np.arange(100, 200))

    def test_too_short(self):
        with pytest.raises(ValueError):
            segment_units(SampledSignal(np.zeros(67), FS), 100.0)


class TestPowerSpectrum:
    def test_single_tone_peak_bin(self):
        unit = tone(100.0, seconds=134 / FS)
        spec = power_spectrum(unit)
        peak_freq = spec.bin_freqs_hz[np.argmax(spec.power)]
        assert abs(peak_freq - 100.0) <= spec.bin_width_hz

    def test_zero_signal(self):
        spec = power_spectrum(SampledSignal(np.zeros(134), FS))
        assert np.all(spec.power == 0.0)

    def test_bins_span_to_nyquist(self):
        spec = power_spectrum(tone(100.0, seconds=134 / FS))
        assert spec.bin_freqs_hz[0] == 0.0
        assert spec.bin_freqs_hz[-1] == pytest.approx(FS / 2)
        assert np.all(np.diff(spec.bin_freqs_hz) > 0)

    def test_matches_brute_force_dft(self):
        # independent oracle: direct windowed DFT sums at a few bins
        rng = np.random.default_rng(5)
        x = rng.normal(size=134)
        spec = power_spectrum(SampledSignal(x, FS))
        window = sps.windows.hann(134, sym=False)
        xw = x * window
        n_fft = 1024
        for k in (0, 7, 76, 300, 512):
            value = sum(xw[n] * np.exp(-2j * np.pi * k * n / n_fft) for n in range(134))
            expected = abs(value) ** 2 / n_fft * (1.0 if k in (0, 512) else 2.0)
            assert spec.power[k] == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_two_tone_power_ratio(self):
        t = np.arange(134) / FS
        x = np.sin(2 * np.pi * 100 * t) + 0.5 * np.sin(2 * np.pi * 300 * t)
        spec = power_spectrum(SampledSignal(x, FS))

        def peak_power_near(freq):
            i = int(np.argmin(np.abs(spec.bin_freqs_hz - freq)))
            return spec.power[max(0, i - 4):i + 5].max()

        ratio = peak_power_near(100.0) / peak_power_near(300.0)
        assert ratio == pytest.approx(4.0, rel=0.10)

    def test_parseval(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=134)
        spec = power_spectrum(SampledSignal(x, FS))
        window = sps.windows.hann(134, sym=False)
        energy = np.sum((x * window) ** 2)
        assert spec.power.sum() == pytest.approx(energy, rel=1e-6)

    def test_phase_invariance_on_canonical_grid(self):
        # 128-sample units put harmonics on exact window bins, where the
        # Hann transform's zero structure makes the canonical-grid power
        # exactly phase independent. Padded in-between bins carry
        # phase-dependent leakage around -90 dB and are excluded.
        fs = 1280.0
        n = 128
        amps = {3: 1.0, 7: 0.6, 12: 0.35}
        spectra = []
        peak_sets = []
        for shift in (0, 11, 57):
            t = (np.arange(n) + shift) / fs
            x = sum(a * np.sin(2 * np.pi * (m * fs / n) * t) for m, a in amps.items())
            spec = power_spectrum(SampledSignal(x, fs))
            spectra.append(spec.power[::4])
            peak_sets.append(extract_principal(spec, k=3, band_hz=(20.0, 500.0),
                                               min_sep_hz=20.0))
        reference = spectra[0]
        for other in spectra[1:]:
            assert np.max(np.abs(other - reference)) <= 1e-6 * reference.max()
        # parabolic refinement reads the padded in-between bins, so the
        # refined peaks keep a small leakage-bounded phase sensitivity
        ref_peaks = peak_sets[0]
        for ps in peak_sets[1:]:
            assert np.allclose(ps.freqs_hz, ref_peaks.freqs_hz, atol=0.5)
            assert np.allclose(ps.powers, ref_peaks.powers, rtol=1e-3)


def oracle_extract(spec, k, band, min_sep):
    """Exhaustive argmax with suppression: repeatedly take the hottest
    allowed bin and knock out its neighborhood."""
    freqs, power = spec.bin_freqs_hz, spec.power
    allowed = (freqs >= band[0]) & (freqs <= band[1])
    picks = []
    for _ in range(k):
        masked = np.where(allowed, power, -1.0)
        i = int(np.argmax(masked))
        if masked[i] <= 0.0:
            break
        picks.append((float(freqs[i]), float(power[i])))
        allowed &= np.abs(freqs - freqs[i]) >= min_sep
    return picks


class TestExtractPrincipal:
    def test_single_tone(self):
        spec = power_spectrum(tone(180.0, seconds=134 / FS))
        ps = extract_principal(spec, k=10)
        assert abs(ps.peaks[0][0] - 180.0) <= spec.bin_width_hz

    def test_ten_tones_vs_exhaustive_oracle(self):
        freqs = [50, 80, 120, 160, 200, 240, 280, 320, 360, 400]
        t = np.arange(134) / FS
        x = sum(np.sin(2 * np.pi * f * t + 0.3 * i) for i, f in enumerate(freqs))
        spec = power_spectrum(SampledSignal(x, FS))
        # separation rule must cover the window mainlobe on both sides
        min_sep = 25.0
        ps = extract_principal(spec, k=10, min_sep_hz=min_sep)
        oracle = oracle_extract(spec, 10, (30.0, 500.0), min_sep)
        assert len(ps.peaks) == 10 and len(oracle) == 10
        got = ps.freqs_hz
        for f, _ in oracle:
            assert np.min(np.abs(got - f)) <= spec.bin_width_hz

    def test_all_zero_spectrum(self):
        spec = power_spectrum(SampledSignal(np.zeros(134), FS))
        assert extract_principal(spec, k=10).peaks == ()

    def test_bad_arguments(self):
        spec = power_spectrum(tone(100.0, seconds=134 / FS))
        with pytest.raises(ValueError):
            extract_principal(spec, k=0)
        with pytest.raises(ValueError):
            extract_principal(spec, k=3, band_hz=(100.0, 100.0))
        with pytest.raises(ValueError):
            extract_principal(spec, k=3, band_hz=(30.0, FS))

    def test_peaks_are_local_maxima_ordered_and_separated(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            x = rng.normal(size=134)
            spec = power_spectrum(SampledSignal(x, FS))
            min_sep = 10.0
            ps = extract_principal(spec, k=6, min_sep_hz=min_sep)
            powers = ps.powers
            assert np.all(powers[:-1] >= powers[1:])
            freqs = ps.freqs_hz
            for i in range(len(freqs)):
                for j in range(i + 1, len(freqs)):
                    assert abs(freqs[i] - freqs[j]) >= min_sep
            # refined freqs stay within half a bin of a true local max
            for f in freqs:
                i = int(np.argmin(np.abs(spec.bin_freqs_hz - f)))
                window = spec.power[max(0, i - 1):i + 2]
                assert spec.power[i] == window.max()

    def test_refined_freqs_stay_inside_band(self):
        # tone right at the band edge: refinement must not escape it
        spec = power_spectrum(tone(500.0, seconds=134 / FS))
        ps = extract_principal(spec, k=1, band_hz=(30.0, 500.0))
        assert len(ps.peaks) == 1
        assert 30.0 <= ps.peaks[0][0] <= 500.0

    def test_tie_break_lower_frequency(self):
        freqs = np.arange(0.0, 672.0, 1.0)
        power = np.zeros(len(freqs))
        power[100] = power[300] = 5.0
        spec = UnitSpectrum(unit_index=0, bin_freqs_hz=freqs, power=power)
        ps = extract_principal(spec, k=1, band_hz=(30.0, 500.0), min_sep_hz=2.0)
        assert ps.peaks[0][0] == pytest.approx(100.0)


def test_analyze_chain_unit_count():
    sig = tone(100.0, seconds=1.5)
    peak_sets = analyze(sig)
    assert len(peak_sets) == 15
    assert all(ps.unit_index == i for i, ps in enumerate(peak_sets))
    assert all(abs(ps.peaks[0][0] - 100.0) < 1.3125 for ps in peak_sets)


def test_peak_sets_json_round_trip():
    sig = tone(100.0, seconds=0.5)
    peak_sets = analyze(sig, k=3)
    data = peak_sets_to_dict(peak_sets)
    assert set(data) == {"units"}
    assert data["units"][0]["unit_index"] == 0
    back = peak_sets_from_dict(data)
    for ps, qs in zip(peak_sets, back):
        assert ps.unit_index == qs.unit_index
        assert np.allclose(ps.freqs_hz, qs.freqs_hz)
        assert np.allclose(ps.powers, qs.powers)


def test_peak_sets_from_dict_rejects_garbage():
    with pytest.raises(ValueError):
        peak_sets_from_dict({"nope": []})
