"""HTTP/WebSocket service exposing the pipeline and the live demo feed.

Pipeline operations (analyze, synthesize, loop finding, simulation) are
plain functions over pydantic request/response models; the FastAPI app
and the CLI both call them, so the CLI stays a thin client of the same
surface whether it runs in-process or against a remote server.

The live part serves preset assets over GET and a ``/session``
WebSocket: the client streams timestamped pen points, the server folds
each one through the speed estimator and the pressure/speed gain law,
and replies with one gain per point. Gain computation lives entirely
server-side so every client hears the same coupling.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import replace

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

import numpy as np

from . import audioloop, sim, spectral, synth
from .actuator import ActuatorProfile, default_profile
from .config import PipelineConfig
from .coupling import CouplingState, TracePoint, coupled_amplitude, update_speed
from .presets import PenPreset, load_presets
from .signal_io import SampledSignal


class UnitPeaks(BaseModel):
    unit_index: int
    peaks: list[tuple[float, float]]


class AnalyzeRequest(BaseModel):
    samples: list[float] = Field(min_length=1)
    sample_rate_hz: float = Field(default=1344.0, gt=0)
    highpass_hz: float = 30.0
    unit_ms: float = 100.0
    k: int = Field(default=10, ge=1)
    band_lo_hz: float = 30.0
    band_hi_hz: float = 500.0
    min_sep_hz: float | None = None


class AnalyzeResponse(BaseModel):
    units: list[UnitPeaks]


class SynthesizeRequest(BaseModel):
    units: list[UnitPeaks] = Field(min_length=1)
    sample_rate_hz: float = Field(default=1344.0, gt=0)
    sub_duration_ms: float = 100.0
    amp_mode: str = "sqrt"
    crossfade_ms: float = 2.0
    profile_points: list[tuple[float, float]] | None = None
    max_boost: float = 10.0


class SynthesizeResponse(BaseModel):
    sample_rate_hz: float
    waveform: list[float]
    pattern: dict


class LoopFindRequest(BaseModel):
    samples: list[float] = Field(min_length=1)
    sample_rate_hz: float = Field(gt=0)
    window_ms: float = 300.0
    guard_ms: float = 100.0


class LoopFindResponse(BaseModel):
    start_sample: int
    length_samples: int
    mismatch_score: float


class SimulateRequest(BaseModel):
    config: dict


class SimulateResponse(BaseModel):
    sample_rate_hz: float
    samples: list[float]


class PresetInfo(BaseModel):
    name: str
    audio_url: str
    tactile_url: str
    pattern_url: str


def analyze_op(req: AnalyzeRequest) -> AnalyzeResponse:
    signal = SampledSignal(np.array(req.samples), req.sample_rate_hz)
    peak_sets = spectral.analyze(signal, highpass_hz=req.highpass_hz,
                                 unit_ms=req.unit_ms, k=req.k,
                                 band_hz=(req.band_lo_hz, req.band_hi_hz),
                                 min_sep_hz=req.min_sep_hz)
    return AnalyzeResponse(units=[
        UnitPeaks(unit_index=ps.unit_index, peaks=list(ps.peaks))
        for ps in peak_sets])


def synthesize_op(req: SynthesizeRequest) -> SynthesizeResponse:
    peak_sets = spectral.peak_sets_from_dict(
        {"units": [u.model_dump() for u in req.units]})
    if req.profile_points is None:
        profile = default_profile(max_boost=req.max_boost)
    else:
        points = sorted(req.profile_points)
        profile = ActuatorProfile(np.array([f for f, _ in points]),
                                  np.array([g for _, g in points]),
                                  max_boost=req.max_boost)
    pattern = synth.build_pattern(peak_sets, profile, fs=req.sample_rate_hz,
                                  sub_duration_ms=req.sub_duration_ms,
                                  amp_mode=req.amp_mode,
                                  crossfade_ms=req.crossfade_ms)
    return SynthesizeResponse(sample_rate_hz=pattern.sample_rate_hz,
                              waveform=pattern.waveform.samples.tolist(),
                              pattern=synth.pattern_to_dict(pattern))


def loopfind_op(req: LoopFindRequest) -> LoopFindResponse:
    audio = SampledSignal(np.array(req.samples), req.sample_rate_hz)
    segment = audioloop.find_loop(audio, window_ms=req.window_ms,
                                  guard_ms=req.guard_ms)
    return LoopFindResponse(**segment.to_dict())


def simulate_op(req: SimulateRequest) -> SimulateResponse:
    cfg = sim.config_from_dict(req.config)
    trace = sim.simulate(cfg)
    return SimulateResponse(sample_rate_hz=trace.sample_rate_hz,
                            samples=trace.samples.tolist())


class SessionChannel:
    """State machine for one /session connection.

    Processes inbound JSON frames ``{"t":s,"x":u,"y":u,"p":[0,1],
    "pen":name}`` strictly in arrival order and produces exactly one
    reply per frame: ``{"gain":g,"t":s}`` on success, ``{"error":msg}``
    otherwise. Malformed frames leave the session state untouched, so a
    bad point never corrupts the speed estimate.
    """

    def __init__(self, presets: dict[str, PenPreset]):
        self.presets = presets
        self.state: CouplingState | None = None
        self.pen: str | None = None

    def handle(self, raw: str) -> str:
        try:
            reply = self._gain_reply(raw)
        except ValueError as exc:
            reply = {"error": str(exc)}
        return json.dumps(reply)

    def _gain_reply(self, raw: str) -> dict:
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            raise ValueError("not valid JSON")
        if not isinstance(msg, dict):
            raise ValueError("message must be a JSON object")
        missing = {"t", "x", "y", "p", "pen"} - set(msg)
        if missing:
            raise ValueError(f"missing fields: {sorted(missing)}")
        pen = msg["pen"]
        if pen not in self.presets:
            raise ValueError("unknown pen")
        try:
            t, x, y, p = (float(msg[key]) for key in ("t", "x", "y", "p"))
        except (TypeError, ValueError):
            raise ValueError("t, x, y, p must be numbers")
        if not all(map(math.isfinite, (t, x, y, p))):
            raise ValueError("t, x, y, p must be finite")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"pressure {p} outside [0, 1]")

        preset = self.presets[pen]
        if self.state is None:
            self.state = CouplingState(ema_alpha=preset.ema_alpha)
        elif pen != self.pen:
            self.state = replace(self.state, ema_alpha=preset.ema_alpha)
        point = TracePoint(t=t, x=x, y=y, pressure=p)
        new_state, speed = update_speed(self.state, point)
        gain = coupled_amplitude(preset.coupling_params, p, speed)
        self.state = new_state
        self.pen = pen
        return {"gain": gain, "t": t}


def create_app(presets_dir: str | None = None,
               frontend_dir: str | None = None) -> FastAPI:
    """Assemble the service. Presets load eagerly so a broken preset
    directory fails at startup, not mid-session."""
    app = FastAPI(title="feltpen service")
    presets = load_presets(presets_dir) if presets_dir else {}
    app.state.presets = presets
    app.state.presets_dir = presets_dir

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/config")
    def config() -> dict:
        return PipelineConfig().to_dict()

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(req: AnalyzeRequest):
        return _run(analyze_op, req)

    @app.post("/synthesize", response_model=SynthesizeResponse)
    def synthesize(req: SynthesizeRequest):
        return _run(synthesize_op, req)

    @app.post("/loop/find", response_model=LoopFindResponse)
    def loop_find(req: LoopFindRequest):
        return _run(loopfind_op, req)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest):
        return _run(simulate_op, req)

    @app.get("/presets", response_model=list[PresetInfo])
    def list_presets():
        return [PresetInfo(name=name,
                           audio_url=f"/presets/{name}/audio.wav",
                           tactile_url=f"/presets/{name}/tactile.wav",
                           pattern_url=f"/presets/{name}/pattern.json")
                for name in sorted(presets)]

    @app.get("/presets/{name}/{asset}")
    def preset_asset(name: str, asset: str):
        if name not in presets:
            raise HTTPException(status_code=404, detail="unknown pen")
        if asset not in ("audio.wav", "tactile.wav", "pattern.json", "coupling.json"):
            raise HTTPException(status_code=404, detail="unknown asset")
        path = os.path.join(presets[name].directory, asset)
        if not os.path.isfile(path):
            raise HTTPException(status_code=404, detail="asset missing")
        return FileResponse(path)

    @app.websocket("/session")
    async def session(ws: WebSocket):
        await ws.accept()
        channel = SessionChannel(presets)
        try:
            while True:
                raw = await ws.receive_text()
                await ws.send_text(channel.handle(raw))
        except WebSocketDisconnect:
            pass

    if frontend_dir and os.path.isdir(frontend_dir):
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="demo")

    return app


def _run(op, req):
    try:
        return op(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
