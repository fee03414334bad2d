"""Cursor-driven vibrotactile texture rendering and its evaluation chain:
stripe textures, refresh-rate frame sampling, on/off vibration timelines,
stroboscopic-aliasing analysis, a simulated forced-choice subject, and
Thurstone Case V fineness scaling."""

__version__ = "0.1.0"

from .harness import (
    Choice,
    Phase,
    Schedule,
    SessionConfig,
    TrialRecord,
    build_schedule,
    read_trials_csv,
    write_trials_csv,
)
from .rendering import VibrationTimeline, alias_frequency, render_timeline, toggle_rate
from .scaling import (
    PairwiseMatrix,
    ScaleValues,
    consistency_check,
    inv_norm_cdf,
    load_reference_matrix,
    norm_cdf,
    tally_matrix,
    thurstone_case_v,
)
from .subject import SubjectParams, calibrated_params, simulate_cohort, simulate_participant
from .textures import (
    BoundaryMode,
    Color,
    LengthDirection,
    MappingConfig,
    TextureGrid,
    color_at,
    convert_length,
    load_pgm,
    make_stripes,
    write_pgm,
)
from .tracing import FrameSamples, Trajectory, average_speed, constant_sweep, sample_at_refresh
