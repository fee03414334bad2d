"""Command-line entry points: texture generation, aliasing tables, cohort
simulation, scaling analysis, and the live session server.

Exit codes: 0 success, 2 invalid arguments, 3 data/parse errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import SessionConfig, TrialsCsvError, read_trials_csv, trace_filename, write_trials_csv
from .rendering import alias_frequency
from .scaling import (
    consistency_check,
    matrix_from_csv,
    matrix_to_csv,
    scales_to_csv,
    tally_matrix,
    thurstone_case_v,
)
from .subject import SubjectParams, calibrated_params, simulate_cohort
from .textures import PgmParseError, make_stripes, write_pgm
from .tracing import frames_to_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibrotex",
        description="Texture-to-vibration rendering, aliasing analysis, and fineness scaling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("texgen", help="generate a stripe texture as a PGM image")
    p.add_argument("--line-width", type=int, required=True, metavar="W")
    p.add_argument("--width", type=int, default=1920)
    p.add_argument("--height", type=int, default=1080)
    p.add_argument("--out", required=True, metavar="FILE.pgm")

    p = sub.add_parser("alias", help="true vs. aliased switching frequencies")
    p.add_argument("--speed", type=float, default=240.0, help="cursor speed in px/s")
    p.add_argument("--refresh", type=float, default=60.0, help="display refresh in Hz")
    p.add_argument("--widths", default="1,2,4,8,16,32", help="comma-separated stripe widths")

    p = sub.add_parser("simulate", help="simulate a forced-choice cohort")
    p.add_argument("--participants", type=int, default=5)
    p.add_argument("--sets", type=int, default=4)
    p.add_argument("--speed", type=float, default=240.0)
    p.add_argument("--sigma", type=float, default=None, help="decision noise (default: calibrated)")
    p.add_argument("--speed-cv", type=float, default=None, help="speed jitter CV (default: calibrated)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--traces", action="store_true", help="also write per-trial trace CSVs")

    p = sub.add_parser("analyze", help="scale values + consistency from trials or a matrix")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--trials", help="trials CSV file or directory containing trials.csv")
    src.add_argument("--matrix", help="pairwise proportion matrix CSV")
    p.add_argument("--out", default=None, metavar="scales.csv")

    p = sub.add_parser("serve", help="run the live session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--refresh", type=float, default=60.0)
    p.add_argument("--no-frame-quantize", action="store_true",
                   help="evaluate vibration per raw pointer event instead of per refresh tick")
    p.add_argument("--out-dir", default="sessions")
    return parser


def cmd_texgen(args) -> int:
    try:
        grid = make_stripes(args.line_width, args.width, args.height)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    Path(args.out).write_bytes(write_pgm(grid))
    print(f"wrote {args.out} ({args.width}x{args.height}, line width {args.line_width})")
    return EXIT_OK


def cmd_alias(args) -> int:
    try:
        widths = [float(w) for w in args.widths.split(",") if w.strip()]
        if not widths:
            raise ValueError("no stripe widths given")
        rows = [(w, args.speed / (2 * w), alias_frequency(args.speed, w, args.refresh))
                for w in widths]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"speed {args.speed} px/s, refresh {args.refresh} Hz")
    print(f"{'width_px':>9} {'true_hz':>9} {'alias_hz':>9}")
    for w, true_hz, alias_hz in rows:
        print(f"{w:>9g} {true_hz:>9.4g} {alias_hz:>9.4g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        session_cfg = SessionConfig(sets=args.sets, participants=args.participants, seed=args.seed)
        defaults = calibrated_params(seed=args.seed, mean_speed_px_s=args.speed)
        params = SubjectParams(
            sigma=defaults.sigma if args.sigma is None else args.sigma,
            mean_speed_px_s=args.speed,
            speed_jitter_cv=defaults.speed_jitter_cv if args.speed_cv is None else args.speed_cv,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    records = simulate_cohort(session_cfg, params, keep_traces=args.traces)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trials.csv").write_text(write_trials_csv(records))
    matrix = tally_matrix(records, session_cfg.textures)
    (out / "matrix.csv").write_text(matrix_to_csv(matrix))
    scales = thurstone_case_v(matrix)
    (out / "scales.csv").write_text(scales_to_csv(scales))
    if args.traces:
        traces = out / "traces"
        traces.mkdir(exist_ok=True)
        for r in records:
            for phase, frames in (("first", r.trace_first), ("second", r.trace_second)):
                name = trace_filename(r.participant_id, r.set_index, r.trial_index, phase)
                (traces / name).write_text(frames_to_csv(frames))
    report = consistency_check(matrix, scales)
    print(f"simulated {len(records)} trials "
          f"({args.participants} participants x {session_cfg.trials_per_participant})")
    print(f"wrote {out / 'trials.csv'}, {out / 'matrix.csv'}, {out / 'scales.csv'}")
    print(f"consistency: mad={report.mad:.4f} chi_square={report.chi_square:.3f} dof={report.dof}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        if args.trials:
            path = Path(args.trials)
            if path.is_dir():
                path = path / "trials.csv"
            if not path.exists():
                print(f"error: no trials CSV at {path}", file=sys.stderr)
                return EXIT_DATA
            matrix = tally_matrix(read_trials_csv(path.read_text()))
        else:
            path = Path(args.matrix)
            if not path.exists():
                print(f"error: no matrix CSV at {path}", file=sys.stderr)
                return EXIT_DATA
            matrix = matrix_from_csv(path.read_text())
        scales = thurstone_case_v(matrix)
        report = consistency_check(matrix, scales)
    except (TrialsCsvError, PgmParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    print(f"{'label':>6} {'scale':>10}")
    for lab, val in zip(scales.labels, scales.values):
        print(f"{lab:>6} {val:>10.4f}")
    for warning in scales.warnings:
        print(f"warning: complementarity violated: {warning}")
    print(f"consistency: mad={report.mad:.4f} chi_square={report.chi_square:.3f} dof={report.dof}")
    if args.out:
        Path(args.out).write_text(scales_to_csv(scales))
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(
        refresh_hz=args.refresh,
        frame_quantize=not args.no_frame_quantize,
        out_dir=args.out_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "texgen": cmd_texgen,
    "alias": cmd_alias,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
