#!/usr/bin/env python3
"""Generate the browser console's golden test fixtures from the session core.

Two fixtures are produced under frontend/test/fixtures/:

  golden_replay.json    : an explore-mode pointer replay with the server's
                          ordered message log and the expected vibration
                          event sequence (cross-checked against the offline
                          renderer before writing).
  experiment_fast.json  : a complete fast-mode experiment session: the
                          interleaved client/server message script, the
                          scripted choices, and the trials CSV the server
                          hands back (validated through the tally/scaling
                          pipeline before writing).
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]

from vibrotex.harness import SessionConfig, read_trials_csv
from vibrotex.rendering import render_timeline
from vibrotex.scaling import consistency_check, tally_matrix, thurstone_case_v
from vibrotex.service.sessions import (
    ExperimentSettings,
    ExploreSettings,
    PointerEvent,
    SessionCore,
    quantize_pointer_events,
    tick_ms,
)
from vibrotex.textures import MappingConfig, make_stripes

FIXTURE_DIR = ROOT / "frontend" / "test" / "fixtures"
MAPPING = MappingConfig()


def golden_replay() -> dict:
    rng = np.random.default_rng(2024)
    width = 8
    events = []
    t, x = 0, 100
    for _ in range(240):
        events.append(PointerEvent(t, x, 0))
        t += int(rng.integers(8, 30))
        x = int(np.clip(x + rng.integers(-50, 51), 0, 1000))

    settings = ExploreSettings(stripe_width_px=width, width_px=1920, height_px=8)
    with tempfile.TemporaryDirectory() as tmp:
        core = SessionCore("explore", MAPPING, settings, out_dir=tmp)
        server_messages = list(core.start_messages())
        for e in events:
            server_messages.extend(core.on_pointer(e.t_ms, e.x_px, e.y_px))

    vibration_log = [
        {"t_ms": m["t_ms"], "state": m["state"]}
        for m in server_messages
        if m["type"] == "vibration"
    ]

    # cross-check against the offline renderer before freezing
    frames, k0 = quantize_pointer_events(events, MAPPING.refresh_hz)
    tl = render_timeline(make_stripes(width, 1920, 8), frames, MAPPING)
    expected = [
        {"t_ms": tick_ms(k0 + k, MAPPING.refresh_hz), "state": "on" if on else "off"}
        for k, on in tl.state_events(initial_on=False)
    ]
    assert vibration_log == expected, "session/renderer disagreement"

    return {
        "mode": "explore",
        "config": {"stripe_width_px": width, "width_px": 1920, "height_px": 8},
        "pointer_events": [
            {"t_ms": e.t_ms, "x_px": e.x_px, "y_px": e.y_px} for e in events
        ],
        "server_messages": server_messages,
        "vibration_log": vibration_log,
    }


def experiment_fast() -> dict:
    touch_s, rest_s = 0.05, 0.01
    session_cfg = SessionConfig(
        textures=(1, 2, 4, 8, 16, 32),
        sets=4,
        pairs_per_set=30,
        touch_s=touch_s,
        rest_s=rest_s,
        participants=1,
        seed=77,
    )
    settings = ExperimentSettings(participant_id="browser", session=session_cfg)

    script: list[dict] = []

    def choice_for(trial_no: int) -> str:
        return "first" if trial_no % 2 == 0 else "second"

    with tempfile.TemporaryDirectory() as tmp:
        core = SessionCore("experiment", MAPPING, settings, out_dir=tmp)
        for msg in core.start_messages():
            script.append({"from": "server", "msg": msg})

        trial_span_ms = int((2 * touch_s + rest_s) * 1000) + 40
        t = 0
        x = 0
        trials_csv = None
        for trial_no in range(len(core.schedule.trials)):
            for step in range(0, trial_span_ms, 8):
                x = (x + 7) % 1000
                pointer = {"type": "pointer", "t_ms": t + step, "x_px": x, "y_px": 0}
                script.append({"from": "client", "msg": pointer})
                for out in core.on_pointer(t + step, x, 0):
                    script.append({"from": "server", "msg": out})
            t += trial_span_ms
            response = {"type": "response", "choice": choice_for(trial_no)}
            script.append({"from": "client", "msg": response})
            for out in core.on_response(response["choice"]):
                script.append({"from": "server", "msg": out})
                if out["type"] == "done":
                    trials_csv = out["trials_csv"]

    assert trials_csv is not None, "session did not complete"
    records = read_trials_csv(trials_csv)
    assert len(records) == 120
    assert all(
        r.response.value == choice_for(i) for i, r in enumerate(records)
    ), "responses diverge from the scripted chooser"
    matrix = tally_matrix(records, session_cfg.textures)
    assert not matrix.missing_cells()
    scales = thurstone_case_v(matrix)
    consistency_check(matrix, scales)  # analysis pipeline accepts the CSV

    return {
        "mode": "experiment",
        "config": {
            "participant_id": "browser",
            "touch_s": touch_s,
            "rest_s": rest_s,
            "sets": 4,
            "seed": 77,
        },
        "script": script,
        "trials_csv": trials_csv,
        "expected_responses": [choice_for(i) for i in range(120)],
    }


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    replay = golden_replay()
    (FIXTURE_DIR / "golden_replay.json").write_text(json.dumps(replay, indent=1))
    print(
        f"golden_replay.json: {len(replay['pointer_events'])} pointer events, "
        f"{len(replay['vibration_log'])} vibration edges"
    )
    experiment = experiment_fast()
    (FIXTURE_DIR / "experiment_fast.json").write_text(json.dumps(experiment, indent=1))
    n_msgs = len(experiment["script"])
    print(f"experiment_fast.json: {n_msgs} scripted messages, 120 trials")
    return 0


if __name__ == "__main__":
    sys.exit(main())
