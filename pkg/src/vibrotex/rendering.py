"""Frame-sampled texture lookup to an on/off vibration timeline, plus the
stroboscopic-aliasing analysis that limits perceivable stripe fineness.

The actuator is binary: on at the drive frequency while the cursor sits on
a black pixel, off on white.  Because the cursor position is only sampled
once per display refresh, a moving cursor can skip stripe cycles entirely;
``alias_frequency`` gives the folded switching frequency that survives the
sampling.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .textures import BoundaryMode, MappingConfig, TextureGrid, colors_at
from .tracing import FrameSamples

__all__ = [
    "VibrationTimeline",
    "alias_frequency",
    "drive_waveform",
    "render_timeline",
    "timeline_to_csv",
    "toggle_rate",
    "waveform_to_csv",
]


@dataclass(frozen=True)
class VibrationTimeline:
    """Per-frame on/off states at a fixed refresh rate.

    Transitions are the frame boundaries where the state flips: one per
    adjacent frame pair with differing state.
    """

    refresh_hz: float
    drive_freq_hz: float
    on: np.ndarray

    def __post_init__(self):
        if self.refresh_hz <= 0 or self.drive_freq_hz <= 0:
            raise ValueError("refresh and drive frequencies must be positive")
        states = np.asarray(self.on, dtype=bool)
        if states.ndim != 1 or states.size < 1:
            raise ValueError("timeline needs at least one frame state")
        object.__setattr__(self, "on", states)
        states.setflags(write=False)

    def __len__(self) -> int:
        return int(self.on.size)

    @property
    def span_s(self) -> float:
        return (len(self) - 1) / self.refresh_hz

    @property
    def transition_frames(self) -> np.ndarray:
        """Frame indices k >= 1 where on[k] != on[k-1]."""
        return np.nonzero(np.diff(self.on))[0] + 1

    @property
    def transition_count(self) -> int:
        return int(self.transition_frames.size)

    @property
    def transition_times(self) -> np.ndarray:
        return self.transition_frames / self.refresh_hz

    def state_events(self, initial_on: bool = False) -> list[tuple[int, bool]]:
        """Edge list (frame, state) seen by an observer starting from
        ``initial_on``; includes the leading edge at frame 0 when the first
        frame differs from the initial state."""
        events = []
        if bool(self.on[0]) != initial_on:
            events.append((0, bool(self.on[0])))
        for k in self.transition_frames:
            events.append((int(k), bool(self.on[k])))
        return events


def render_timeline(
    grid: TextureGrid,
    frames: FrameSamples,
    cfg: MappingConfig = MappingConfig(),
    boundary: BoundaryMode = BoundaryMode.CLAMP,
) -> VibrationTimeline:
    """on at frame k iff the texture pixel under the frame position is black."""
    if len(frames) == 0:
        raise ValueError("frames must be non-empty")
    on = colors_at(grid, frames.xs, frames.ys, boundary)
    return VibrationTimeline(frames.refresh_hz, cfg.drive_freq_hz, on)


def toggle_rate(tl: VibrationTimeline, window_s: float) -> float:
    """State transitions per second inside the window [0, window_s]."""
    if window_s <= 0:
        raise ValueError("window_s must be positive")
    if window_s > tl.span_s + 1e-9:
        raise ValueError(
            f"window {window_s} s extends beyond timeline span {tl.span_s} s"
        )
    count = int(np.count_nonzero(tl.transition_times <= window_s + 1e-9))
    return count / window_s


def alias_frequency(speed: float, stripe_width_px: float, refresh_hz: float) -> float:
    """Folded stripe-cycle frequency after sampling at the refresh rate.

    The true cycle frequency of stripes of width w under a cursor moving at
    v px/s is v / 2w; sampling at refresh_hz folds it into [0, refresh/2].
    A zero result means the cursor lands on the same color every frame and
    the vibration never switches.
    """
    if speed < 0:
        raise ValueError("speed must be >= 0")
    if stripe_width_px <= 0 or refresh_hz <= 0:
        raise ValueError("stripe width and refresh rate must be positive")
    if speed == 0:
        return 0.0
    true_hz = speed / (2.0 * stripe_width_px)
    folded = abs(true_hz - refresh_hz * round(true_hz / refresh_hz))
    return min(folded, refresh_hz / 2.0)


def drive_waveform(tl: VibrationTimeline, sample_rate: float) -> np.ndarray:
    """Sampled actuator drive: a +/-1 square wave at the drive frequency
    during on intervals (phase runs on global time, so it continues across
    frame boundaries), 0 while off."""
    if sample_rate < 4 * tl.drive_freq_hz:
        raise ValueError("sample_rate must be at least 4x the drive frequency")
    total_s = len(tl) / tl.refresh_hz
    n = int(np.floor(total_s * sample_rate + 1e-9))
    ts = np.arange(n) / sample_rate
    # epsilon keeps frame and half-cycle boundaries stable under float jitter
    frame_idx = np.minimum(
        np.floor(ts * tl.refresh_hz + 1e-9).astype(np.int64), len(tl) - 1
    )
    half_cycles = np.floor(ts * (2.0 * tl.drive_freq_hz) + 1e-9).astype(np.int64)
    square = np.where(half_cycles % 2 == 0, 1, -1).astype(np.int8)
    return np.where(tl.on[frame_idx], square, np.int8(0))


def timeline_to_csv(tl: VibrationTimeline) -> str:
    out = io.StringIO()
    out.write("frame,t_s,on\n")
    for k in range(len(tl)):
        out.write(f"{k},{k / tl.refresh_hz!r},{int(tl.on[k])}\n")
    return out.getvalue()


def waveform_to_csv(wave: np.ndarray, sample_rate: float) -> str:
    out = io.StringIO()
    out.write("t_s,amplitude\n")
    for k, a in enumerate(wave):
        out.write(f"{k / sample_rate!r},{int(a)}\n")
    return out.getvalue()
