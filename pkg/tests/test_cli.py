import json
import subprocess
import sys
import threading
import time

import numpy as np
import pytest

from feltpen.signal_io import SampledSignal, load_signal, save_signal
from feltpen.spectral import analyze


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "feltpen", *args],
                          capture_output=True, text=True)


def write_tone(path, freq=100.0, seconds=0.5, fs=1344.0):
    t = np.arange(int(seconds * fs)) / fs
    save_signal(SampledSignal(np.sin(2 * np.pi * freq * t), fs), str(path))


def test_analyze_writes_peaks_json(tmp_path):
    wav = tmp_path / "tone.wav"
    write_tone(wav, seconds=1.5)
    out = tmp_path / "peaks.json"
    result = run_cli("analyze", str(wav), "-o", str(out), "--k", "3")
    assert result.returncode == 0, result.stderr
    peaks = json.loads(out.read_text())
    assert len(peaks["units"]) == 15
    assert abs(peaks["units"][0]["peaks"][0][0] - 100.0) < 1.3125


def test_analyze_csv_with_rate(tmp_path):
    csv = tmp_path / "sig.csv"
    t = np.arange(int(0.3 * 1344)) / 1344.0
    csv.write_text("\n".join(repr(float(v)) for v in np.sin(2 * np.pi * 80 * t)) + "\n")
    result = run_cli("analyze", str(csv), "--fs", "1344")
    assert result.returncode == 0, result.stderr
    peaks = json.loads(result.stdout)
    assert len(peaks["units"]) == 3


def test_analyze_empty_file_exit_2(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    result = run_cli("analyze", str(empty), "--fs", "1344")
    assert result.returncode == 2
    assert "error" in result.stderr


def test_missing_file_exit_2(tmp_path):
    result = run_cli("analyze", str(tmp_path / "nope.wav"))
    assert result.returncode == 2


def test_synth_single_peak_pure_tone(tmp_path):
    peaks = tmp_path / "peaks.json"
    peaks.write_text(json.dumps(
        {"units": [{"unit_index": 0, "peaks": [[100.0, 1.0]]}]}))
    out = tmp_path / "pattern.wav"
    pattern_json = tmp_path / "pattern.json"
    flat = tmp_path / "flat.csv"
    flat.write_text("30,1.0\n600,1.0\n")
    result = run_cli("synth", str(peaks), "-o", str(out),
                     "--pattern-json", str(pattern_json), "--profile", str(flat))
    assert result.returncode == 0, result.stderr
    wave = load_signal(str(out))
    assert len(wave) == 134
    got = analyze(SampledSignal(np.tile(wave.samples, 10), 1344.0), k=1)
    assert abs(got[0].peaks[0][0] - 100.0) < 1.3125
    assert len(json.loads(pattern_json.read_text())["sub_patterns"]) == 1


def test_round_trip_analyze_synth_analyze(tmp_path):
    wav = tmp_path / "rec.wav"
    write_tone(wav, freq=120.0, seconds=0.5)
    peaks = tmp_path / "peaks.json"
    assert run_cli("analyze", str(wav), "-o", str(peaks), "--k", "1").returncode == 0
    out = tmp_path / "pattern.wav"
    assert run_cli("synth", str(peaks), "-o", str(out)).returncode == 0
    back = tmp_path / "back.json"
    assert run_cli("analyze", str(out), "-o", str(back), "--k", "1").returncode == 0
    units = json.loads(back.read_text())["units"]
    assert all(abs(u["peaks"][0][0] - 120.0) < 1.3125 for u in units)


def test_loopfind(tmp_path):
    fs = 22050.0
    t = np.arange(int(0.8 * fs)) / fs
    wav = tmp_path / "audio.wav"
    save_signal(SampledSignal(np.sin(2 * np.pi * 440.0 * t), fs), str(wav))
    loop_wav = tmp_path / "loop.wav"
    loop_json = tmp_path / "loop.json"
    result = run_cli("loopfind", str(wav), "-o", str(loop_wav),
                     "--json", str(loop_json), "--guard-ms", "50")
    assert result.returncode == 0, result.stderr
    info = json.loads(loop_json.read_text())
    assert info["length_samples"] == int(0.3 * fs)
    assert info["mismatch_score"] < 1e-3
    assert len(load_signal(str(loop_wav))) == info["length_samples"]


def test_simulate(tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({
        "mass_kg": 0.01, "stiffness_n_per_m": 400.0, "damping_ns_per_m": 0.5,
        "mu_s": 0.5, "normal_force_n": 1.0, "pen_speed_m_per_s": 0.05,
        "texture": [{"spatial_freq_cycles_per_m": 2000.0, "depth": 0.5}],
        "duration_s": 1.0}))
    out = tmp_path / "sim.wav"
    result = run_cli("simulate", str(cfg), "-o", str(out))
    assert result.returncode == 0, result.stderr
    trace = load_signal(str(out))
    assert len(trace) == 1344
    assert trace.sample_rate_hz == 1344.0


def test_analyze_simulated_ten_tone_texture(tmp_path):
    # end-to-end oracle: forcing frequencies are known exactly from the
    # simulator config (V x spatial_freq), so the emitted peaks JSON
    # must contain all ten in every unit
    tones = [50, 80, 120, 160, 200, 240, 280, 320, 360, 400]
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({
        "mass_kg": 0.01, "stiffness_n_per_m": 300.0, "damping_ns_per_m": 0.6,
        "mu_s": 0.6, "normal_force_n": 1.2, "pen_speed_m_per_s": 0.05,
        "texture": [{"spatial_freq_cycles_per_m": f / 0.05, "depth": 0.09}
                    for f in tones],
        "duration_s": 1.2}))
    rec = tmp_path / "rec.wav"
    assert run_cli("simulate", str(cfg), "-o", str(rec)).returncode == 0
    peaks = tmp_path / "peaks.json"
    assert run_cli("analyze", str(rec), "-o", str(peaks), "--k", "10").returncode == 0
    units = json.loads(peaks.read_text())["units"]
    assert len(units) == 12
    for unit in units[1:]:  # unit 0 still carries the start-up transient
        freqs = np.array([f for f, _ in unit["peaks"]])
        for tone in tones:
            assert np.min(np.abs(freqs - tone)) <= 1.3125


def test_cli_outputs_deterministic(tmp_path):
    wav = tmp_path / "tone.wav"
    write_tone(wav, seconds=0.5)
    out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("analyze", str(wav), "-o", str(out_a)).returncode == 0
    assert run_cli("analyze", str(wav), "-o", str(out_b)).returncode == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_simulate_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({"mass_kg": -1.0, "stiffness_n_per_m": 400.0}))
    result = run_cli("simulate", str(cfg), "-o", str(tmp_path / "x.wav"))
    assert result.returncode == 2


def test_presets_command(tmp_path):
    outdir = tmp_path / "presets"
    result = run_cli("presets", str(outdir))
    assert result.returncode == 0, result.stderr
    for pen in ("ballpoint", "pencil", "marker"):
        for asset in ("tactile.wav", "audio.wav", "pattern.json", "coupling.json"):
            assert (outdir / pen / asset).is_file()


def test_no_command_exit_2():
    result = run_cli()
    assert result.returncode == 2


def test_server_mode(tmp_path):
    import uvicorn

    from feltpen.service import create_app

    app = create_app()
    config = uvicorn.Config(app, host="127.0.0.1", port=8973, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.time() + 15
        import httpx

        while time.time() < deadline:
            try:
                if httpx.get("http://127.0.0.1:8973/health").status_code == 200:
                    break
            except httpx.TransportError:
                time.sleep(0.1)
        else:
            pytest.fail("server did not come up")

        wav = tmp_path / "tone.wav"
        write_tone(wav, seconds=0.5)
        out = tmp_path / "peaks.json"
        result = run_cli("analyze", str(wav), "-o", str(out),
                         "--server", "http://127.0.0.1:8973")
        assert result.returncode == 0, result.stderr
        assert len(json.loads(out.read_text())["units"]) == 5
    finally:
        server.should_exit = True
        thread.join(timeout=10)
