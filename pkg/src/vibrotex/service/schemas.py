"""Pydantic request/response models for the HTTP endpoints and inbound
validation of the websocket wire protocol."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, ValidationError

__all__ = [
    "AliasResponse",
    "AliasRow",
    "AnalyzeRequest",
    "AnalyzeResponse",
    "ConsistencyModel",
    "HealthResponse",
    "PointerMessage",
    "ResponseMessage",
    "ScaleEntry",
    "SimulateRequest",
    "SimulateResponse",
    "StartConfig",
    "StartMessage",
    "StripeRequest",
    "WireError",
    "parse_client_message",
]


class HealthResponse(BaseModel):
    status: str
    version: str


class StripeRequest(BaseModel):
    stripe_width_px: int = Field(ge=1)
    width_px: int = Field(default=1920, ge=1)
    height_px: int = Field(default=1080, ge=1)


class AliasRow(BaseModel):
    stripe_width_px: float
    true_hz: float
    alias_hz: float


class AliasResponse(BaseModel):
    speed_px_s: float
    refresh_hz: float
    rows: list[AliasRow]


class SimulateRequest(BaseModel):
    participants: int = Field(default=5, ge=1)
    sets: int = Field(default=4, ge=1)
    mean_speed_px_s: float = Field(default=240.0, gt=0)
    sigma: float | None = Field(default=None, ge=0)
    speed_jitter_cv: float | None = Field(default=None, ge=0, lt=1)
    seed: int = 0


class ScaleEntry(BaseModel):
    label: int
    scale: float


class ConsistencyModel(BaseModel):
    mad: float
    chi_square: float
    dof: int


class SimulateResponse(BaseModel):
    trials: int
    matrix_csv: str
    scales: list[ScaleEntry]
    consistency: ConsistencyModel


class AnalyzeRequest(BaseModel):
    trials_csv: str | None = None
    matrix_csv: str | None = None


class AnalyzeResponse(BaseModel):
    scales: list[ScaleEntry]
    consistency: ConsistencyModel
    warnings: list[str] = []


# --- websocket client messages ----------------------------------------------


class StartConfig(BaseModel):
    # explore settings
    stripe_width_px: int = Field(default=8, ge=1)
    width_px: int | None = Field(default=None, ge=1)
    height_px: int | None = Field(default=None, ge=1)
    show_texture: bool = True
    # experiment settings
    participant_id: str = "P1"
    textures: list[int] | None = None
    sets: int = Field(default=4, ge=1)
    pairs_per_set: int | None = None
    touch_s: float = Field(default=5.0, gt=0)
    rest_s: float = Field(default=1.0, ge=0)
    seed: int = 0


class StartMessage(BaseModel):
    type: Literal["start"]
    mode: Literal["explore", "experiment"]
    config: StartConfig = Field(default_factory=StartConfig)


class PointerMessage(BaseModel):
    type: Literal["pointer"]
    t_ms: int
    x_px: int
    y_px: int


class ResponseMessage(BaseModel):
    type: Literal["response"]
    choice: Literal["first", "second"]


class WireError(ValueError):
    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.detail = detail

    def message(self) -> dict:
        return {"type": "error", "code": self.code, "detail": self.detail}


_CLIENT_TYPES = {
    "start": StartMessage,
    "pointer": PointerMessage,
    "response": ResponseMessage,
}


def parse_client_message(raw: dict) -> StartMessage | PointerMessage | ResponseMessage:
    if not isinstance(raw, dict) or "type" not in raw:
        raise WireError("bad_message", "message must be an object with a 'type' field")
    model = _CLIENT_TYPES.get(raw["type"])
    if model is None:
        raise WireError("unknown_type", f"unknown message type '{raw['type']}'")
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        raise WireError("bad_message", str(exc.errors()[0].get("msg", exc))) from None
