"""Virtual subject for simulated fineness-discrimination sessions.

The subject's fineness cue is the observed vibration toggle rate: switching
is what survives the refresh-rate sampling, and textures whose switching is
aliased away feel uniform.  Decisions compare log cues with additive
Gaussian noise, so the choice model stays compatible with Case V scaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .harness import (
    Choice,
    Schedule,
    SessionConfig,
    TrialRecord,
    build_schedule,
    participant_key,
)
from .rendering import VibrationTimeline, render_timeline, toggle_rate
from .textures import BoundaryMode, MappingConfig, make_stripes
from .tracing import constant_sweep, sample_at_refresh

__all__ = [
    "CALIBRATED_SIGMA",
    "CALIBRATED_SPEED_CV",
    "SubjectParams",
    "calibrated_params",
    "decide_pair",
    "fineness_cue",
    "simulate_cohort",
    "simulate_participant",
    "synthesize_touch",
]

# Calibrated so that a simulated default cohort lands inside the reference
# bands: 16-vs-32 px accuracy near 0.80, pairs among {1, 2, 4} px close to
# chance.  See scripts/calibrate_subject.py for the sweep.
CALIBRATED_SIGMA = 0.15
CALIBRATED_SPEED_CV = 0.6


@dataclass(frozen=True)
class SubjectParams:
    """Decision noise and trial-to-trial motion variability."""

    sigma: float
    mean_speed_px_s: float = 240.0
    speed_jitter_cv: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.mean_speed_px_s <= 0:
            raise ValueError("mean_speed_px_s must be positive")
        if not 0 <= self.speed_jitter_cv < 1:
            raise ValueError("speed_jitter_cv must lie in [0, 1)")


def calibrated_params(seed: int = 0, mean_speed_px_s: float = 240.0) -> SubjectParams:
    return SubjectParams(
        sigma=CALIBRATED_SIGMA,
        mean_speed_px_s=mean_speed_px_s,
        speed_jitter_cv=CALIBRATED_SPEED_CV,
        seed=seed,
    )


def fineness_cue(tl: VibrationTimeline, touch_s: float) -> float:
    """Observed toggle rate over the touch window; higher means finer."""
    if touch_s <= 0:
        raise ValueError("touch_s must be positive")
    return toggle_rate(tl, touch_s)


def decide_pair(
    cue_first: float,
    cue_second: float,
    params: SubjectParams,
    rng: np.random.Generator,
) -> Choice:
    """Noisy log-cue comparison; fair coin only on an exact tie."""
    if cue_first < 0 or cue_second < 0:
        raise ValueError("cues must be non-negative")
    d = np.log1p(cue_first) - np.log1p(cue_second)
    if params.sigma > 0:
        d += rng.normal(0.0, params.sigma)
    if d > 0:
        return Choice.FIRST
    if d < 0:
        return Choice.SECOND
    return Choice.FIRST if rng.integers(2) == 0 else Choice.SECOND


@lru_cache(maxsize=64)
def _stripe_grid(width: int, screen_w: int):
    return make_stripes(width, screen_w, 1)


def _draw_speed(params: SubjectParams, rng: np.random.Generator) -> float:
    if params.speed_jitter_cv == 0:
        return params.mean_speed_px_s
    s2 = np.log(1.0 + params.speed_jitter_cv**2)
    return float(rng.lognormal(np.log(params.mean_speed_px_s) - s2 / 2.0, np.sqrt(s2)))


def synthesize_touch(
    width_px: int,
    cfg: MappingConfig,
    speed: float,
    start_x: float,
    touch_s: float,
):
    """One reversing sweep over a stripe texture; returns (cue, frames)."""
    traj = constant_sweep(
        start_x, speed, touch_s, 0.0, float(cfg.px_per_sweep), reversing=True
    )
    frames = sample_at_refresh(traj, cfg.refresh_hz)
    grid = _stripe_grid(width_px, cfg.screen_w_px)
    tl = render_timeline(grid, frames, cfg, BoundaryMode.CLAMP)
    return fineness_cue(tl, touch_s), frames


def simulate_participant(
    textures: tuple[int, ...],
    schedule: Schedule,
    cfg: MappingConfig,
    params: SubjectParams,
    touch_s: float = 5.0,
    keep_traces: bool = False,
) -> list[TrialRecord]:
    """Run every scheduled trial for one virtual participant.

    Each touch gets its own lognormal speed draw around the mean and a
    start phase uniform over one stripe period.  Deterministic for a given
    (params.seed, schedule.participant_id).
    """
    allowed = set(textures)
    rng = np.random.default_rng(
        np.random.SeedSequence([params.seed, participant_key(schedule.participant_id)])
    )
    records: list[TrialRecord] = []
    for trial in schedule.trials:
        if trial.first_px not in allowed or trial.second_px not in allowed:
            raise ValueError(
                f"scheduled pair ({trial.first_px}, {trial.second_px}) "
                f"not in textures {sorted(allowed)}"
            )
        cues = []
        traces = []
        for width in (trial.first_px, trial.second_px):
            speed = _draw_speed(params, rng)
            start_x = float(rng.uniform(0.0, 2.0 * width))
            cue, frames = synthesize_touch(width, cfg, speed, start_x, touch_s)
            cues.append(cue)
            traces.append(frames)
        response = decide_pair(cues[0], cues[1], params, rng)
        records.append(
            TrialRecord(
                participant_id=schedule.participant_id,
                set_index=trial.set_index,
                trial_index=trial.trial_index,
                first_px=trial.first_px,
                second_px=trial.second_px,
                response=response,
                cue_first=cues[0],
                cue_second=cues[1],
                trace_first=traces[0] if keep_traces else None,
                trace_second=traces[1] if keep_traces else None,
            )
        )
    return records


def simulate_cohort(
    session_cfg: SessionConfig,
    params: SubjectParams,
    cfg: MappingConfig = MappingConfig(),
    keep_traces: bool = False,
) -> list[TrialRecord]:
    """Simulate the full cohort: one schedule and record set per participant."""
    records: list[TrialRecord] = []
    for idx in range(1, session_cfg.participants + 1):
        schedule = build_schedule(session_cfg, f"P{idx}")
        records.extend(
            simulate_participant(
                session_cfg.textures,
                schedule,
                cfg,
                params,
                touch_s=session_cfg.touch_s,
                keep_traces=keep_traces,
            )
        )
    return records
