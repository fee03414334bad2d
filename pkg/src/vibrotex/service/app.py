"""FastAPI application: REST endpoints over the core package plus the
websocket session endpoint speaking the live tracing protocol."""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response, WebSocket, WebSocketDisconnect

from .. import __version__
from ..harness import PhaseViolation, SessionConfig, read_trials_csv
from ..rendering import alias_frequency
from ..scaling import (
    consistency_check,
    matrix_from_csv,
    matrix_to_csv,
    tally_matrix,
    thurstone_case_v,
)
from ..subject import SubjectParams, calibrated_params, simulate_cohort
from ..textures import MappingConfig, make_stripes, write_pgm
from . import schemas
from .schemas import WireError, parse_client_message
from .sessions import (
    ExperimentSettings,
    ExploreSettings,
    SessionError,
    SessionRegistry,
)

logger = logging.getLogger(__name__)


def _scale_entries(scales) -> list[schemas.ScaleEntry]:
    return [
        schemas.ScaleEntry(label=lab, scale=float(val))
        for lab, val in zip(scales.labels, scales.values)
    ]


def create_app(
    refresh_hz: float = 60.0,
    frame_quantize: bool = True,
    out_dir: str | Path = "sessions",
) -> FastAPI:
    mapping = MappingConfig(refresh_hz=refresh_hz)
    registry = SessionRegistry(mapping, out_dir=out_dir, frame_quantize=frame_quantize)
    app = FastAPI(title="vibrotex", version=__version__)
    app.state.registry = registry

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/textures/stripes")
    def stripes_pgm(req: schemas.StripeRequest):
        try:
            grid = make_stripes(req.stripe_width_px, req.width_px, req.height_px)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return Response(content=write_pgm(grid), media_type="image/x-portable-graymap")

    @app.get("/alias", response_model=schemas.AliasResponse)
    def alias_table(speed: float = 240.0, refresh: float = 60.0, widths: str = "1,2,4,8,16,32"):
        try:
            parsed = [float(w) for w in widths.split(",") if w.strip()]
            rows = [
                schemas.AliasRow(
                    stripe_width_px=w,
                    true_hz=speed / (2.0 * w),
                    alias_hz=alias_frequency(speed, w, refresh),
                )
                for w in parsed
            ]
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.AliasResponse(speed_px_s=speed, refresh_hz=refresh, rows=rows)

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        try:
            session_cfg = SessionConfig(
                sets=req.sets, participants=req.participants, seed=req.seed
            )
            defaults = calibrated_params(seed=req.seed, mean_speed_px_s=req.mean_speed_px_s)
            params = SubjectParams(
                sigma=defaults.sigma if req.sigma is None else req.sigma,
                mean_speed_px_s=req.mean_speed_px_s,
                speed_jitter_cv=(
                    defaults.speed_jitter_cv
                    if req.speed_jitter_cv is None
                    else req.speed_jitter_cv
                ),
                seed=req.seed,
            )
            records = simulate_cohort(session_cfg, params, mapping)
            matrix = tally_matrix(records, session_cfg.textures)
            scales = thurstone_case_v(matrix)
            report = consistency_check(matrix, scales)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.SimulateResponse(
            trials=len(records),
            matrix_csv=matrix_to_csv(matrix),
            scales=_scale_entries(scales),
            consistency=schemas.ConsistencyModel(
                mad=report.mad, chi_square=report.chi_square, dof=report.dof
            ),
        )

    @app.post("/analyze", response_model=schemas.AnalyzeResponse)
    def analyze(req: schemas.AnalyzeRequest):
        if (req.trials_csv is None) == (req.matrix_csv is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of trials_csv or matrix_csv"
            )
        try:
            if req.trials_csv is not None:
                matrix = tally_matrix(read_trials_csv(req.trials_csv))
            else:
                matrix = matrix_from_csv(req.matrix_csv)
            scales = thurstone_case_v(matrix)
            report = consistency_check(matrix, scales)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.AnalyzeResponse(
            scales=_scale_entries(scales),
            consistency=schemas.ConsistencyModel(
                mad=report.mad, chi_square=report.chi_square, dof=report.dof
            ),
            warnings=list(scales.warnings),
        )

    @app.websocket("/session")
    async def session_ws(ws: WebSocket):
        await ws.accept()
        core = None
        try:
            while True:
                raw = await ws.receive_json()
                try:
                    msg = parse_client_message(raw)
                except WireError as exc:
                    await ws.send_json(exc.message())
                    continue
                if msg.type == "start":
                    if core is not None:
                        await ws.send_json(
                            {"type": "error", "code": "already_started",
                             "detail": "session already started on this connection"}
                        )
                        continue
                    try:
                        core = registry.start_session(msg.mode, _settings_from(msg))
                    except (SessionError, ValueError) as exc:
                        await ws.send_json(
                            {"type": "error", "code": "bad_config", "detail": str(exc)}
                        )
                        continue
                    for out in core.start_messages():
                        await ws.send_json(out)
                elif core is None:
                    await ws.send_json(
                        {"type": "error", "code": "no_session",
                         "detail": "send a start message first"}
                    )
                elif msg.type == "pointer":
                    try:
                        for out in core.on_pointer(msg.t_ms, msg.x_px, msg.y_px):
                            await ws.send_json(out)
                    except SessionError as exc:
                        await ws.send_json(
                            {"type": "error", "code": "session_error", "detail": str(exc)}
                        )
                else:
                    try:
                        for out in core.on_response(msg.choice):
                            await ws.send_json(out)
                    except PhaseViolation as exc:
                        await ws.send_json(
                            {"type": "error", "code": "phase_violation", "detail": str(exc)}
                        )
                    except SessionError as exc:
                        await ws.send_json(
                            {"type": "error", "code": "session_error", "detail": str(exc)}
                        )
        except WebSocketDisconnect:
            if core is not None and not core.finished:
                if core.mode == "explore" and core.last_t_ms is not None:
                    core.finalize()
                else:
                    core.abort()

    return app


def _settings_from(msg: schemas.StartMessage) -> ExploreSettings | ExperimentSettings:
    cfg = msg.config
    if msg.mode == "explore":
        return ExploreSettings(
            stripe_width_px=cfg.stripe_width_px,
            width_px=cfg.width_px,
            height_px=cfg.height_px,
            show_texture=cfg.show_texture,
        )
    textures = tuple(cfg.textures) if cfg.textures else (1, 2, 4, 8, 16, 32)
    n_pairs = len(textures) * (len(textures) - 1) // 2
    session = SessionConfig(
        textures=textures,
        sets=cfg.sets,
        pairs_per_set=cfg.pairs_per_set or 2 * n_pairs,
        touch_s=cfg.touch_s,
        rest_s=cfg.rest_s,
        seed=cfg.seed,
    )
    return ExperimentSettings(participant_id=cfg.participant_id, session=session)
