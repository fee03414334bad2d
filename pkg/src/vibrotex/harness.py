"""Paired-comparison experiment protocol: schedules, trial phases, records.

A session runs ``sets`` blocks; within each block every unordered texture
pair appears exactly twice, once per presentation order, in a seeded random
order.  Each trial is touch / rest / touch / respond.
"""

from __future__ import annotations

import enum
import io
import itertools
import zlib
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .tracing import FrameSamples

__all__ = [
    "Choice",
    "Phase",
    "PhaseViolation",
    "Schedule",
    "SessionConfig",
    "SessionFault",
    "Trial",
    "TrialPhases",
    "TrialRecord",
    "TrialsCsvError",
    "build_schedule",
    "read_trials_csv",
    "run_phases",
    "trace_filename",
    "write_trials_csv",
]


class Choice(enum.Enum):
    FIRST = "first"
    SECOND = "second"


class Phase(enum.Enum):
    FIRST = "first"
    REST = "rest"
    SECOND = "second"
    RESPOND = "respond"


class PhaseViolation(RuntimeError):
    """An action arrived in a phase that does not allow it."""


class SessionFault(RuntimeError):
    """The session clock misbehaved (e.g. went backwards)."""


class TrialsCsvError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class SessionConfig:
    textures: tuple[int, ...] = (1, 2, 4, 8, 16, 32)
    sets: int = 4
    pairs_per_set: int = 30
    touch_s: float = 5.0
    rest_s: float = 1.0
    participants: int = 5
    seed: int = 0

    def __post_init__(self):
        if len(self.textures) < 2 or len(set(self.textures)) != len(self.textures):
            raise ValueError("textures must be >= 2 distinct labels")
        n_pairs = len(self.textures) * (len(self.textures) - 1) // 2
        if self.pairs_per_set != 2 * n_pairs:
            raise ValueError(
                f"pairs_per_set must be 2x the number of unordered pairs "
                f"({2 * n_pairs} for {len(self.textures)} textures)"
            )
        if self.sets < 1 or self.participants < 1:
            raise ValueError("sets and participants must be >= 1")
        if self.touch_s <= 0 or self.rest_s < 0:
            raise ValueError("touch_s must be positive and rest_s non-negative")

    @property
    def trials_per_participant(self) -> int:
        return self.sets * self.pairs_per_set


@dataclass(frozen=True)
class Trial:
    set_index: int
    trial_index: int
    first_px: int
    second_px: int


@dataclass(frozen=True)
class Schedule:
    participant_id: str
    trials: tuple[Trial, ...]


@dataclass
class TrialRecord:
    participant_id: str
    set_index: int
    trial_index: int
    first_px: int
    second_px: int
    response: Choice
    response_time_ms: float | None = None
    # simulation/debug extras; never serialized to the trials CSV
    cue_first: float | None = None
    cue_second: float | None = None
    trace_first: FrameSamples | None = None
    trace_second: FrameSamples | None = None


def participant_key(participant_id: str | int) -> int:
    """Stable integer for seeding per-participant randomness."""
    if isinstance(participant_id, int):
        return participant_id
    try:
        return int(participant_id)
    except ValueError:
        return zlib.crc32(str(participant_id).encode("utf-8"))


def build_schedule(cfg: SessionConfig, participant_id: str | int) -> Schedule:
    """Seeded schedule: per set, each unordered pair once per order, shuffled.

    Deterministic for a given (cfg.seed, participant_id); different
    participants and sets get independent permutations.
    """
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, participant_key(participant_id)])
    )
    ordered_pairs = []
    for a, b in itertools.combinations(cfg.textures, 2):
        ordered_pairs.append((a, b))
        ordered_pairs.append((b, a))
    trials = []
    for set_index in range(1, cfg.sets + 1):
        order = rng.permutation(len(ordered_pairs))
        for trial_index, pair_idx in enumerate(order, start=1):
            first, second = ordered_pairs[pair_idx]
            trials.append(Trial(set_index, trial_index, first, second))
    return Schedule(str(participant_id), tuple(trials))


@dataclass(frozen=True)
class TrialPhases:
    """Phase boundaries of one trial relative to its start time."""

    touch_s: float = 5.0
    rest_s: float = 1.0

    @property
    def boundaries(self) -> tuple[float, float, float]:
        return (
            self.touch_s,
            self.touch_s + self.rest_s,
            2 * self.touch_s + self.rest_s,
        )

    def phase_at(self, t_s: float) -> Phase:
        if t_s < 0:
            raise ValueError("time before trial start")
        b1, b2, b3 = self.boundaries
        if t_s < b1:
            return Phase.FIRST
        if t_s < b2:
            return Phase.REST
        if t_s < b3:
            return Phase.SECOND
        return Phase.RESPOND

    def require_respond(self, t_s: float) -> None:
        phase = self.phase_at(t_s)
        if phase is not Phase.RESPOND:
            raise PhaseViolation(f"response during {phase.value} phase rejected")


@dataclass(frozen=True)
class PhaseEvent:
    phase: Phase
    t_s: float


def run_phases(
    phases: TrialPhases,
    clock: Callable[[], float],
) -> Iterator[PhaseEvent]:
    """Drive one trial's phases off a monotonic clock.

    Yields a PhaseEvent as each phase is first observed; the caller polls
    by advancing the clock between iterations (boundary accuracy is set by
    the poll cadence, one refresh tick in the live service).  Raises
    SessionFault if the clock runs backwards; ends once RESPOND is reached.
    """
    start = clock()
    last_t = start
    current: Phase | None = None
    while True:
        now = clock()
        if now < last_t:
            raise SessionFault(f"clock went backwards: {now} < {last_t}")
        last_t = now
        phase = phases.phase_at(now - start)
        if phase is not current:
            # emit skipped phases in order when the clock jumps
            order = list(Phase)
            lo = 0 if current is None else order.index(current) + 1
            for ph in order[lo : order.index(phase) + 1]:
                boundary = (0.0, *phases.boundaries)[order.index(ph)]
                yield PhaseEvent(ph, start + boundary)
            current = phase
        if current is Phase.RESPOND:
            return


# --- trials CSV -------------------------------------------------------------

_COLUMNS = (
    "participant_id",
    "set_index",
    "trial_index",
    "first_px",
    "second_px",
    "response",
    "response_time_ms",
)
_REQUIRED = _COLUMNS[:-1]


def write_trials_csv(records: list[TrialRecord]) -> str:
    out = io.StringIO()
    out.write(",".join(_COLUMNS) + "\n")
    for r in records:
        rt = "" if r.response_time_ms is None else repr(float(r.response_time_ms))
        out.write(
            f"{r.participant_id},{r.set_index},{r.trial_index},"
            f"{r.first_px},{r.second_px},{r.response.value},{rt}\n"
        )
    return out.getvalue()


def read_trials_csv(text: str | bytes) -> list[TrialRecord]:
    """Parse a trials CSV; raises TrialsCsvError with the offending line."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.splitlines()
    if not lines:
        raise TrialsCsvError("empty trials file", 1)
    header = tuple(h.strip() for h in lines[0].split(","))
    for col in _REQUIRED:
        if col not in header:
            raise TrialsCsvError(f"missing required column '{col}'", 1)
    idx = {name: header.index(name) for name in header}
    has_rt = "response_time_ms" in idx

    records: list[TrialRecord] = []
    seen: set[tuple[str, int, int]] = set()
    for lineno, ln in enumerate(lines[1:], start=2):
        if not ln.strip():
            continue
        parts = ln.split(",")
        if len(parts) != len(header):
            raise TrialsCsvError(
                f"expected {len(header)} columns, got {len(parts)}", lineno
            )
        try:
            pid = parts[idx["participant_id"]]
            set_index = int(parts[idx["set_index"]])
            trial_index = int(parts[idx["trial_index"]])
            first_px = int(parts[idx["first_px"]])
            second_px = int(parts[idx["second_px"]])
        except ValueError as exc:
            raise TrialsCsvError(str(exc), lineno) from None
        raw_resp = parts[idx["response"]].strip()
        try:
            response = Choice(raw_resp)
        except ValueError:
            raise TrialsCsvError(f"invalid response '{raw_resp}'", lineno) from None
        rt: float | None = None
        if has_rt and parts[idx["response_time_ms"]].strip():
            try:
                rt = float(parts[idx["response_time_ms"]])
            except ValueError as exc:
                raise TrialsCsvError(str(exc), lineno) from None
        key = (pid, set_index, trial_index)
        if key in seen:
            raise TrialsCsvError(f"duplicate trial key {key}", lineno)
        seen.add(key)
        records.append(
            TrialRecord(pid, set_index, trial_index, first_px, second_px, response, rt)
        )
    return records


def trace_filename(participant_id: str, set_index: int, trial_index: int, phase: str) -> str:
    return f"{participant_id}_{set_index}_{trial_index}_{phase}.csv"
