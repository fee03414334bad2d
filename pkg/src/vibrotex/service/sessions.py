"""Transport-agnostic session state machines for the live tracing service.

Pointer events carry client timestamps; the session samples the most recent
position at each display refresh tick (zero-order hold), looks the color up,
and emits edge-triggered vibration events, so a live pointer stream aliases
exactly like the offline renderer.  Session time is the client timestamp
stream: the clients send one pointer message per animation frame, which also
advances the trial phases.
"""

from __future__ import annotations

import base64
import logging
import math
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..harness import (
    Choice,
    Phase,
    PhaseViolation,
    Schedule,
    SessionConfig,
    TrialPhases,
    TrialRecord,
    build_schedule,
    trace_filename,
    write_trials_csv,
)
from ..scaling import matrix_to_csv, scales_to_csv, tally_matrix, thurstone_case_v
from ..textures import MappingConfig, TextureGrid, colors_at, make_stripes, write_pgm
from ..tracing import FrameSamples, frames_to_csv

logger = logging.getLogger(__name__)

_EPS_MS = 1e-6


class SessionError(RuntimeError):
    pass


def tick_ms(k: int, refresh_hz: float) -> int:
    """Client-clock millisecond timestamp of refresh tick k."""
    return int(round(k * 1000.0 / refresh_hz))


@dataclass(frozen=True)
class PointerEvent:
    t_ms: int
    x_px: int
    y_px: int


class _TickSampler:
    """Zero-order-hold sampling of a pointer stream at refresh ticks.

    A tick strictly before the incoming event takes the held (previous)
    position; a tick exactly at the event time takes the event itself.
    """

    def __init__(self, refresh_hz: float):
        self.refresh_hz = refresh_hz
        self._next_tick: int | None = None
        self._hold: tuple[int, int] | None = None

    def push(self, t_ms: int, pos: tuple[int, int]) -> list[tuple[int, tuple[int, int]]]:
        refresh = self.refresh_hz
        if self._next_tick is None:
            self._next_tick = math.ceil(t_ms * refresh / 1000.0 - _EPS_MS)
        ticks: list[tuple[int, tuple[int, int]]] = []
        while True:
            tick_t = self._next_tick * 1000.0 / refresh
            if tick_t < t_ms - _EPS_MS:
                assert self._hold is not None
                ticks.append((self._next_tick, self._hold))
                self._next_tick += 1
            elif abs(tick_t - t_ms) <= _EPS_MS:
                ticks.append((self._next_tick, pos))
                self._next_tick += 1
            else:
                break
        self._hold = pos
        return ticks


def quantize_pointer_events(
    events: list[PointerEvent], refresh_hz: float
) -> tuple[FrameSamples, int]:
    """Batch zero-order-hold sampling of a pointer stream at refresh ticks.

    Returns the frame samples (indices rebased to 0) and the absolute index
    of the first tick (the first tick at or after the first event); applies
    the same sampling rule as the live session path.
    """
    if not events:
        raise ValueError("pointer stream is empty")
    times = [e.t_ms for e in events]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("pointer timestamps must be non-decreasing")
    sampler = _TickSampler(refresh_hz)
    ticks: list[tuple[int, tuple[int, int]]] = []
    for e in events:
        ticks.extend(sampler.push(e.t_ms, (e.x_px, e.y_px)))
    if not ticks:
        raise ValueError("stream spans no refresh tick")
    k0 = ticks[0][0]
    xs = np.array([pos[0] for _, pos in ticks], dtype=np.int64)
    ys = np.array([pos[1] for _, pos in ticks], dtype=np.int64)
    return FrameSamples(refresh_hz, xs, ys), k0


@dataclass(frozen=True)
class ExploreSettings:
    stripe_width_px: int = 8
    width_px: int | None = None
    height_px: int | None = None
    show_texture: bool = True


@dataclass(frozen=True)
class ExperimentSettings:
    participant_id: str = "P1"
    session: SessionConfig = field(default_factory=SessionConfig)


class SessionCore:
    """One live session: explore (free tracing over a visible texture) or
    experiment (scheduled paired-comparison trials over hidden textures)."""

    def __init__(
        self,
        mode: str,
        mapping: MappingConfig,
        settings: ExploreSettings | ExperimentSettings,
        out_dir: str | Path = "sessions",
        frame_quantize: bool = True,
        session_id: str | None = None,
    ):
        if mode not in ("explore", "experiment"):
            raise SessionError(f"unknown mode '{mode}'")
        self.session_id = session_id or uuid.uuid4().hex[:12]
        self.mode = mode
        self.mapping = mapping
        self.out_dir = Path(out_dir) / self.session_id
        self.frame_quantize = frame_quantize

        self.vib_on = False
        self.last_t_ms: int | None = None
        self._sampler = _TickSampler(mapping.refresh_hz)
        self.finished = False
        self.aborted = False
        self._artifacts: list[str] | None = None

        if mode == "explore":
            assert isinstance(settings, ExploreSettings)
            self.explore = settings
            w = settings.width_px or mapping.screen_w_px
            h = settings.height_px or mapping.screen_h_px
            self.grid: TextureGrid = make_stripes(settings.stripe_width_px, w, h)
            self._trace_x: list[int] = []
            self._trace_y: list[int] = []
        else:
            assert isinstance(settings, ExperimentSettings)
            self.experiment = settings
            self.schedule: Schedule = build_schedule(settings.session, settings.participant_id)
            self.phases = TrialPhases(settings.session.touch_s, settings.session.rest_s)
            self._grids = {
                w: make_stripes(w, mapping.screen_w_px, mapping.screen_h_px)
                for w in settings.session.textures
            }
            self.trial_ptr = 0
            self.trial_start_ms: int | None = None
            self.current_phase: Phase | None = None
            self.records: list[TrialRecord] = []
            self._phase_trace: dict[tuple[int, str], tuple[list[int], list[int]]] = {}

    # -- message helpers -----------------------------------------------------

    def start_messages(self) -> list[dict]:
        msgs = [{"type": "started", "session_id": self.session_id}]
        if self.mode == "explore":
            texture = {
                "type": "texture",
                "show": bool(self.explore.show_texture),
                "width_px": self.grid.width_px,
                "height_px": self.grid.height_px,
            }
            if self.explore.show_texture:
                texture["pgm_base64"] = base64.b64encode(write_pgm(self.grid)).decode("ascii")
            msgs.append(texture)
        else:
            # participants trace a blank field; texture pixels never leave the server
            msgs.append(
                {
                    "type": "texture",
                    "show": False,
                    "width_px": self.mapping.screen_w_px,
                    "height_px": self.mapping.screen_h_px,
                }
            )
            msgs.append(self._phase_message(Phase.FIRST))
        return msgs

    def _phase_message(self, phase: Phase) -> dict:
        trial = self.schedule.trials[self.trial_ptr]
        return {
            "type": "phase",
            "phase": phase.value,
            "trial": trial.trial_index,
            "set": trial.set_index,
        }

    def _vibration_message(self, t_ms: int, on: bool) -> dict:
        return {
            "type": "vibration",
            "t_ms": t_ms,
            "state": "on" if on else "off",
            "freq_hz": int(self.mapping.drive_freq_hz),
        }

    # -- pointer handling ----------------------------------------------------

    def on_pointer(self, t_ms: int, x_px: int, y_px: int) -> list[dict]:
        if self.finished:
            raise SessionError("session already finalized")
        if self.last_t_ms is not None and t_ms < self.last_t_ms:
            logger.warning(
                "session %s: dropped out-of-order pointer event t_ms=%s < %s",
                self.session_id, t_ms, self.last_t_ms,
            )
            return []
        out: list[dict] = []
        if self.frame_quantize:
            for k, pos in self._sampler.push(t_ms, (x_px, y_px)):
                out.extend(self._process_frame(tick_ms(k, self.mapping.refresh_hz), pos))
        else:
            out.extend(self._process_frame(t_ms, (x_px, y_px)))
        self.last_t_ms = t_ms
        return out

    def _process_frame(self, t_ms: int, pos: tuple[int, int]) -> list[dict]:
        if self.mode == "explore":
            return self._explore_frame(t_ms, pos)
        return self._experiment_frame(t_ms, pos)

    def _explore_frame(self, t_ms: int, pos: tuple[int, int]) -> list[dict]:
        self._trace_x.append(pos[0])
        self._trace_y.append(pos[1])
        return self._gate_vibration(t_ms, self.grid, pos)

    def _gate_vibration(
        self, t_ms: int, grid: TextureGrid, pos: tuple[int, int]
    ) -> list[dict]:
        on = bool(colors_at(grid, np.array([pos[0]]), np.array([pos[1]]))[0])
        if on != self.vib_on:
            self.vib_on = on
            return [self._vibration_message(t_ms, on)]
        return []

    def _force_off(self, t_ms: int) -> list[dict]:
        if self.vib_on:
            self.vib_on = False
            return [self._vibration_message(t_ms, False)]
        return []

    def _experiment_frame(self, t_ms: int, pos: tuple[int, int]) -> list[dict]:
        if self.trial_ptr >= len(self.schedule.trials):
            return []
        out: list[dict] = []
        if self.trial_start_ms is None:
            self.trial_start_ms = t_ms
            self.current_phase = Phase.FIRST
        rel_s = (t_ms - self.trial_start_ms) / 1000.0
        phase = self.phases.phase_at(rel_s)
        if phase is not self.current_phase:
            order = list(Phase)
            for ph in order[order.index(self.current_phase) + 1 : order.index(phase) + 1]:
                if ph in (Phase.REST, Phase.RESPOND):
                    out.extend(self._force_off(t_ms))
                out.append(self._phase_message(ph))
            self.current_phase = phase
        if phase in (Phase.FIRST, Phase.SECOND):
            trial = self.schedule.trials[self.trial_ptr]
            width = trial.first_px if phase is Phase.FIRST else trial.second_px
            xs, ys = self._phase_trace.setdefault(
                (self.trial_ptr, phase.value), ([], [])
            )
            xs.append(pos[0])
            ys.append(pos[1])
            out.extend(self._gate_vibration(t_ms, self._grids[width], pos))
        return out

    # -- responses and lifecycle ----------------------------------------------

    def on_response(self, choice: str) -> list[dict]:
        if self.mode != "experiment":
            raise SessionError("explore sessions have no response channel")
        if self.finished:
            raise SessionError("session already finalized")
        if self.trial_ptr >= len(self.schedule.trials):
            raise SessionError("all trials already answered")
        try:
            parsed = Choice(choice)
        except ValueError:
            raise SessionError(f"invalid choice '{choice}'") from None
        if self.trial_start_ms is None or self.last_t_ms is None:
            raise PhaseViolation("response before the trial started")
        rel_s = (self.last_t_ms - self.trial_start_ms) / 1000.0
        self.phases.require_respond(rel_s)

        trial = self.schedule.trials[self.trial_ptr]
        respond_start = self.trial_start_ms + self.phases.boundaries[2] * 1000.0
        self.records.append(
            TrialRecord(
                participant_id=self.schedule.participant_id,
                set_index=trial.set_index,
                trial_index=trial.trial_index,
                first_px=trial.first_px,
                second_px=trial.second_px,
                response=parsed,
                response_time_ms=float(self.last_t_ms - respond_start),
            )
        )
        out: list[dict] = []
        self.trial_ptr += 1
        if self.trial_ptr >= len(self.schedule.trials):
            artifacts = self.finalize()
            # trials_csv rides along so the console can offer the download
            # without a second channel; texture hiding no longer applies
            out.append(
                {
                    "type": "done",
                    "artifacts": artifacts,
                    "trials_csv": write_trials_csv(self.records),
                }
            )
        else:
            self.trial_start_ms = self.last_t_ms
            self.current_phase = Phase.FIRST
            out.extend(self._force_off(self.last_t_ms))
            out.append(self._phase_message(Phase.FIRST))
        return out

    def abort(self) -> None:
        self.aborted = True
        logger.info("session %s aborted (mode %s)", self.session_id, self.mode)

    def finalize(self) -> list[str]:
        """Write session artifacts and return their paths (relative to out_dir)."""
        if self.finished:
            return list(self._artifacts or [])
        if self.mode == "experiment" and self.trial_ptr < len(self.schedule.trials):
            raise SessionError(
                f"cannot finalize: {len(self.schedule.trials) - self.trial_ptr} trials remain"
            )
        self.out_dir.mkdir(parents=True, exist_ok=True)
        artifacts: list[str] = []
        if self.mode == "explore":
            trace = FrameSamples(
                self.mapping.refresh_hz,
                np.array(self._trace_x, dtype=np.int64),
                np.array(self._trace_y, dtype=np.int64),
            )
            path = self.out_dir / "trace.csv"
            path.write_text(frames_to_csv(trace))
            artifacts.append(str(path))
        else:
            trials_path = self.out_dir / "trials.csv"
            trials_path.write_text(write_trials_csv(self.records))
            artifacts.append(str(trials_path))
            traces_dir = self.out_dir / "traces"
            traces_dir.mkdir(exist_ok=True)
            for (ptr, phase), (xs, ys) in sorted(self._phase_trace.items()):
                trial = self.schedule.trials[ptr]
                name = trace_filename(
                    self.schedule.participant_id, trial.set_index, trial.trial_index, phase
                )
                frames = FrameSamples(
                    self.mapping.refresh_hz,
                    np.array(xs, dtype=np.int64),
                    np.array(ys, dtype=np.int64),
                )
                (traces_dir / name).write_text(frames_to_csv(frames))
            artifacts.append(str(traces_dir))
            matrix = tally_matrix(self.records, self.experiment.session.textures)
            if not matrix.missing_cells():
                matrix_path = self.out_dir / "matrix.csv"
                matrix_path.write_text(matrix_to_csv(matrix))
                artifacts.append(str(matrix_path))
                scales_path = self.out_dir / "scales.csv"
                scales_path.write_text(scales_to_csv(thurstone_case_v(matrix)))
                artifacts.append(str(scales_path))
        self.finished = True
        self._artifacts = artifacts
        return artifacts


class SessionRegistry:
    """In-memory registry backing the service endpoints."""

    def __init__(self, mapping: MappingConfig, out_dir: str | Path = "sessions",
                 frame_quantize: bool = True):
        self.mapping = mapping
        self.out_dir = Path(out_dir)
        self.frame_quantize = frame_quantize
        self._sessions: dict[str, SessionCore] = {}

    def start_session(
        self, mode: str, settings: ExploreSettings | ExperimentSettings
    ) -> SessionCore:
        core = SessionCore(
            mode,
            self.mapping,
            settings,
            out_dir=self.out_dir,
            frame_quantize=self.frame_quantize,
        )
        self._sessions[core.session_id] = core
        return core

    def get(self, session_id: str) -> SessionCore:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionError(f"unknown session '{session_id}'") from None

    def submit_response(self, session_id: str, choice: str) -> list[dict]:
        return self.get(session_id).on_response(choice)

    def finalize_session(self, session_id: str) -> list[str]:
        return self.get(session_id).finalize()
