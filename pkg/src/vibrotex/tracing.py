"""Pointer trajectories and their quantization to display-refresh frames.

A trajectory is a piecewise-linear path (t, x, y); frame samples are the
floor-quantized positions at successive refresh ticks k / refresh_hz.
Quantization is floor, matching the pixel cell the cursor occupies.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FrameSamples",
    "Trajectory",
    "average_speed",
    "constant_sweep",
    "frames_from_csv",
    "frames_to_csv",
    "sample_at_refresh",
    "trajectory_from_csv",
    "trajectory_to_csv",
]

_TICK_EPS = 1e-9
_POS_EPS = 1e-9  # sub-pixel guard against float jitter at integer positions


@dataclass(frozen=True)
class Trajectory:
    """Continuous pointer path; position between samples is linear."""

    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.xs, dtype=float)
        y = np.asarray(self.ys, dtype=float)
        if not (t.shape == x.shape == y.shape) or t.ndim != 1 or t.size < 1:
            raise ValueError("times, xs, ys must be equal-length 1-D sequences")
        if t[0] != 0.0:
            raise ValueError("trajectory must start at t = 0")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "xs", x)
        object.__setattr__(self, "ys", y)
        for arr in (t, x, y):
            arr.setflags(write=False)

    @property
    def duration_s(self) -> float:
        return float(self.times[-1])

    def positions_at(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ts = np.asarray(ts, dtype=float)
        return np.interp(ts, self.times, self.xs), np.interp(ts, self.times, self.ys)


@dataclass(frozen=True)
class FrameSamples:
    """Integer cursor positions at refresh ticks; frame k is time k / refresh_hz."""

    refresh_hz: float
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        if self.refresh_hz <= 0:
            raise ValueError("refresh_hz must be positive")
        x = np.asarray(self.xs, dtype=np.int64)
        y = np.asarray(self.ys, dtype=np.int64)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("xs and ys must be equal-length 1-D sequences")
        object.__setattr__(self, "xs", x)
        object.__setattr__(self, "ys", y)
        x.setflags(write=False)
        y.setflags(write=False)

    def __len__(self) -> int:
        return int(self.xs.size)

    def __iter__(self):
        for k in range(len(self)):
            yield k, int(self.xs[k]), int(self.ys[k])

    def frame_time(self, k: int) -> float:
        return k / self.refresh_hz


def constant_sweep(
    start_x: float,
    speed: float,
    duration: float,
    x_min: float,
    x_max: float,
    reversing: bool,
    y_px: float = 0.0,
) -> Trajectory:
    """Horizontal sweep at constant |speed|, starting rightward.

    With reversing the direction flips at each bound (triangle wave);
    otherwise the position clamps at the bound it first reaches.
    """
    if speed < 0:
        raise ValueError("speed must be >= 0")
    if not x_min < x_max:
        raise ValueError("x_min must be strictly less than x_max")
    if not x_min <= start_x <= x_max:
        raise ValueError("start_x must lie within [x_min, x_max]")
    if duration <= 0:
        raise ValueError("duration must be positive")

    if speed == 0:
        return Trajectory(
            np.array([0.0, duration]),
            np.array([start_x, start_x]),
            np.full(2, y_px),
        )

    times = [0.0]
    positions = [start_x]
    t, pos, direction = 0.0, start_x, 1.0
    while True:
        bound = x_max if direction > 0 else x_min
        dist = abs(bound - pos)
        if dist == 0.0:
            direction = -direction
            continue
        t_hit = t + dist / speed
        if t_hit >= duration:
            positions.append(pos + direction * speed * (duration - t))
            times.append(duration)
            break
        times.append(t_hit)
        positions.append(bound)
        if not reversing:
            times.append(duration)
            positions.append(bound)
            break
        t, pos, direction = t_hit, bound, -direction
    return Trajectory(np.array(times), np.array(positions), np.full(len(times), y_px))


def sample_at_refresh(traj: Trajectory, refresh_hz: float) -> FrameSamples:
    """One frame per tick k / refresh_hz within [0, duration], positions floored.

    A sub-pixel epsilon is added before flooring so positions that are exact
    integers up to float rounding quantize stably.
    """
    if refresh_hz <= 0:
        raise ValueError("refresh_hz must be positive")
    n_ticks = int(np.floor(traj.duration_s * refresh_hz + _TICK_EPS))
    ts = np.arange(n_ticks + 1) / refresh_hz
    xs, ys = traj.positions_at(ts)
    return FrameSamples(
        refresh_hz,
        np.floor(xs + _POS_EPS).astype(np.int64),
        np.floor(ys + _POS_EPS).astype(np.int64),
    )


def average_speed(traj: Trajectory) -> float:
    """Total piecewise-linear path length divided by duration (px/s)."""
    if traj.times.size < 2:
        raise ValueError("average speed needs at least 2 samples")
    if traj.duration_s <= 0:
        raise ValueError("duration must be positive")
    seg = np.hypot(np.diff(traj.xs), np.diff(traj.ys))
    return float(seg.sum() / traj.duration_s)


def trajectory_to_csv(traj: Trajectory) -> str:
    out = io.StringIO()
    out.write("t_s,x_px,y_px\n")
    for t, x, y in zip(traj.times, traj.xs, traj.ys):
        out.write(f"{float(t)!r},{float(x)!r},{float(y)!r}\n")
    return out.getvalue()


def trajectory_from_csv(text: str) -> Trajectory:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "t_s,x_px,y_px":
        raise ValueError("trajectory CSV must start with header 't_s,x_px,y_px'")
    rows = [ln.split(",") for ln in lines[1:]]
    if any(len(r) != 3 for r in rows):
        raise ValueError("trajectory CSV rows must have 3 columns")
    data = np.array([[float(v) for v in r] for r in rows])
    return Trajectory(data[:, 0], data[:, 1], data[:, 2])


def frames_to_csv(frames: FrameSamples) -> str:
    out = io.StringIO()
    out.write("frame,x_px,y_px\n")
    for k, x, y in frames:
        out.write(f"{k},{x},{y}\n")
    return out.getvalue()


def frames_from_csv(text: str, refresh_hz: float = 60.0) -> FrameSamples:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "frame,x_px,y_px":
        raise ValueError("frame CSV must start with header 'frame,x_px,y_px'")
    xs, ys = [], []
    for i, ln in enumerate(lines[1:]):
        parts = ln.split(",")
        if len(parts) != 3:
            raise ValueError(f"frame CSV row {i + 2} must have 3 columns")
        k, x, y = (int(v) for v in parts)
        if k != i:
            raise ValueError(f"frame indices must be consecutive from 0 (row {i + 2})")
        xs.append(x)
        ys.append(y)
    return FrameSamples(refresh_hz, np.array(xs, dtype=np.int64), np.array(ys, dtype=np.int64))
