"""Command-line interface.

Each pipeline subcommand is a thin client of the service operation
layer: it reads files into the request model, runs the operation
(in-process by default, or against a running server with ``--server``),
and writes the response back to files. Exit codes: 0 success, 2 on
usage or bad-input errors, 1 on unexpected runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import audioloop, service, signal_io
from .actuator import load_profile
from .config import PipelineConfig, load_config
from .presets import build_presets
from .signal_io import SampledSignal


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        args.func(args)
        return 0
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feltpen",
        description="Friction-writing feedback toolkit: analysis, tactile "
                    "pattern synthesis, loop extraction, simulation, demo service.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("analyze", help="extract per-unit principal frequencies")
    p.add_argument("input", help="recording (.wav or .csv)")
    p.add_argument("-o", "--output", help="peaks JSON path (default stdout)")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("synth", help="synthesize a tactile pattern from peaks JSON")
    p.add_argument("input", help="peaks JSON from 'analyze'")
    p.add_argument("-o", "--output", required=True, help="pattern WAV path")
    p.add_argument("--pattern-json", help="also write the sub-pattern tables")
    p.add_argument("--profile", help="actuator profile CSV (default: synthetic)")
    p.add_argument("--amp-mode", choices=("sqrt", "linear"))
    _add_common_flags(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("loopfind", help="extract a seamlessly loopable segment")
    p.add_argument("input", help="audio WAV")
    p.add_argument("-o", "--output", help="loop WAV path")
    p.add_argument("--json", dest="json_out", help="segment JSON path (default stdout)")
    p.add_argument("--window-ms", type=float)
    p.add_argument("--guard-ms", type=float)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_loopfind)

    p = sub.add_parser("simulate", help="run the friction simulator")
    p.add_argument("input", help="simulator config JSON")
    p.add_argument("-o", "--output", required=True, help="output signal (.wav or .csv)")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("presets", help="generate the three simulated pen presets")
    p.add_argument("outdir", help="directory to create preset assets in")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_presets)

    p = sub.add_parser("serve", help="run the demo service")
    p.add_argument("--presets", required=True, help="preset directory (see 'presets')")
    p.add_argument("--frontend", help="static demo UI directory to mount at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8731)
    p.set_defaults(func=_cmd_serve)

    return parser


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--fs", type=float, help="sample rate in Hz (required for CSV input)")
    p.add_argument("--k", type=int, help="principal frequencies per unit")
    p.add_argument("--unit-ms", type=float, help="unit / sub-pattern length")
    p.add_argument("--band", help="analysis band as lo:hi in Hz")
    p.add_argument("--server", help="run against a feltpen server at this URL "
                                    "instead of in-process")


def _pipeline_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    if getattr(args, "fs", None) is not None:
        cfg = replace(cfg, sample_rate_hz=args.fs)
    if getattr(args, "k", None) is not None:
        cfg = replace(cfg, peak_count=args.k)
    if getattr(args, "unit_ms", None) is not None:
        cfg = replace(cfg, unit_ms=args.unit_ms)
    if getattr(args, "band", None) is not None:
        try:
            lo, hi = (float(part) for part in args.band.split(":"))
        except ValueError:
            raise ValueError(f"--band expects lo:hi, got {args.band!r}")
        cfg = replace(cfg, band_lo_hz=lo, band_hi_hz=hi)
    return cfg


def _call(args, path: str, request, response_cls):
    """Run one service operation in-process or against --server."""
    if args.server:
        import httpx

        resp = httpx.post(args.server.rstrip("/") + path,
                          json=request.model_dump(), timeout=120.0)
        if resp.status_code != 200:
            detail = resp.json().get("detail", resp.text)
            raise ValueError(f"server rejected request: {detail}")
        return response_cls.model_validate(resp.json())
    op = {"/analyze": service.analyze_op, "/synthesize": service.synthesize_op,
          "/loop/find": service.loopfind_op, "/simulate": service.simulate_op}[path]
    return op(request)


def _load_input_signal(args, cfg: PipelineConfig) -> SampledSignal:
    if args.input.lower().endswith(".csv"):
        rate = args.fs if args.fs is not None else cfg.sample_rate_hz
        return signal_io.load_signal(args.input, sample_rate_hz=rate)
    return signal_io.load_signal(args.input)


def _cmd_analyze(args) -> None:
    cfg = _pipeline_config(args)
    sig = _load_input_signal(args, cfg)
    req = service.AnalyzeRequest(
        samples=sig.samples.tolist(), sample_rate_hz=sig.sample_rate_hz,
        highpass_hz=cfg.highpass_hz, unit_ms=cfg.unit_ms, k=cfg.peak_count,
        band_lo_hz=cfg.band_lo_hz, band_hi_hz=cfg.band_hi_hz,
        min_sep_hz=cfg.min_sep_hz)
    resp = _call(args, "/analyze", req, service.AnalyzeResponse)
    payload = json.dumps(resp.model_dump(), indent=1)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _cmd_synth(args) -> None:
    cfg = _pipeline_config(args)
    with open(args.input) as fh:
        peaks = json.load(fh)
    if not isinstance(peaks, dict) or "units" not in peaks:
        raise ValueError(f"{args.input}: expected peaks JSON with a 'units' list")
    profile_points = None
    if args.profile:
        profile = load_profile(args.profile, max_boost=cfg.max_boost)
        profile_points = list(zip(profile.freqs_hz.tolist(), profile.gains.tolist()))
    req = service.SynthesizeRequest(
        units=[service.UnitPeaks(**u) for u in peaks["units"]],
        sample_rate_hz=cfg.sample_rate_hz, sub_duration_ms=cfg.unit_ms,
        amp_mode=args.amp_mode or cfg.amp_mode, crossfade_ms=cfg.crossfade_ms,
        profile_points=profile_points, max_boost=cfg.max_boost)
    resp = _call(args, "/synthesize", req, service.SynthesizeResponse)
    signal_io.save_signal(SampledSignal(np.array(resp.waveform), resp.sample_rate_hz),
                          args.output)
    if args.pattern_json:
        with open(args.pattern_json, "w") as fh:
            json.dump(resp.pattern, fh, indent=1)


def _cmd_loopfind(args) -> None:
    cfg = _pipeline_config(args)
    audio = signal_io.load_signal(args.input)
    req = service.LoopFindRequest(
        samples=audio.samples.tolist(), sample_rate_hz=audio.sample_rate_hz,
        window_ms=args.window_ms if args.window_ms is not None else cfg.loop_window_ms,
        guard_ms=args.guard_ms if args.guard_ms is not None else cfg.loop_guard_ms)
    resp = _call(args, "/loop/find", req, service.LoopFindResponse)
    segment = audioloop.LoopSegment(start_sample=resp.start_sample,
                                    length_samples=resp.length_samples,
                                    mismatch_score=resp.mismatch_score)
    if args.output:
        signal_io.save_signal(audioloop.extract_loop(audio, segment), args.output)
    payload = json.dumps(segment.to_dict(), indent=1)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _cmd_simulate(args) -> None:
    with open(args.input) as fh:
        config = json.load(fh)
    req = service.SimulateRequest(config=config)
    resp = _call(args, "/simulate", req, service.SimulateResponse)
    signal_io.save_signal(SampledSignal(np.array(resp.samples), resp.sample_rate_hz),
                          args.output)


def _cmd_presets(args) -> None:
    cfg = _pipeline_config(args)
    built = build_presets(args.outdir, cfg)
    for name, preset in sorted(built.items()):
        print(f"{name}: {preset.directory}")


def _cmd_serve(args) -> None:
    import uvicorn

    app = service.create_app(presets_dir=args.presets, frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
