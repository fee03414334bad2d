import numpy as np
import pytest

from vibrotex.rendering import (
    VibrationTimeline,
    alias_frequency,
    drive_waveform,
    render_timeline,
    timeline_to_csv,
    toggle_rate,
    waveform_to_csv,
)
from vibrotex.textures import BoundaryMode, Color, MappingConfig, color_at, make_stripes
from vibrotex.tracing import FrameSamples, constant_sweep, sample_at_refresh

CFG = MappingConfig()


def frames_at(xs, refresh=60.0):
    xs = np.asarray(xs, dtype=np.int64)
    return FrameSamples(refresh, xs, np.zeros_like(xs))


def sweep_timeline(width, speed, duration=5.0, start_x=0.0, refresh=60.0):
    grid = make_stripes(width, CFG.screen_w_px, 1)
    traj = constant_sweep(start_x, speed, duration, 0, CFG.px_per_sweep, reversing=True)
    frames = sample_at_refresh(traj, refresh)
    return render_timeline(grid, frames, CFG)


class TestRenderTimeline:
    def test_stuck_on_black_width_two(self):
        grid = make_stripes(2, 64, 1)
        tl = render_timeline(grid, frames_at(range(0, 64, 4)), CFG)
        assert tl.on.all()
        assert tl.transition_count == 0

    def test_alternating_width_four(self):
        grid = make_stripes(4, 64, 1)
        tl = render_timeline(grid, frames_at(range(0, 64, 4)), CFG)
        assert np.array_equal(tl.on, np.arange(16) % 2 == 0)
        assert toggle_rate(tl, (len(tl) - 1) / 60) == pytest.approx(60.0)

    def test_all_white_grid(self):
        from vibrotex.textures import load_pgm

        grid = load_pgm(b"P2\n4 1\n255\n255 255 255 255\n")
        tl = render_timeline(grid, frames_at([0, 1, 2, 3]), CFG)
        assert not tl.on.any()
        assert tl.transition_count == 0

    def test_empty_frames_rejected(self):
        grid = make_stripes(2, 8, 1)
        with pytest.raises(ValueError):
            render_timeline(grid, frames_at([]), CFG)

    def test_gating_matches_color_lookup(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            w = int(rng.integers(1, 8))
            grid = make_stripes(w, 32, 1)
            xs = rng.integers(-5, 40, size=30)
            tl = render_timeline(grid, frames_at(xs), CFG)
            for k, x in enumerate(xs):
                expected = color_at(grid, int(x), 0, BoundaryMode.CLAMP) == Color.BLACK
                assert bool(tl.on[k]) == expected


class TestToggleRate:
    def test_plain_arithmetic(self):
        on = np.arange(301) % 2 == 0  # toggles every frame
        tl = VibrationTimeline(60, 120, on)
        assert tl.transition_count == 300
        assert toggle_rate(tl, 5.0) == 60.0

    def test_stuck_case_is_zero(self):
        tl = sweep_timeline(2, 240)
        assert toggle_rate(tl, 5.0) == 0.0

    def test_sixteen_px_at_240(self):
        tl = sweep_timeline(16, 240)
        assert toggle_rate(tl, 5.0) == pytest.approx(15.0, abs=0.4)

    def test_window_validation(self):
        tl = sweep_timeline(2, 240, duration=1.0)
        with pytest.raises(ValueError):
            toggle_rate(tl, 0)
        with pytest.raises(ValueError):
            toggle_rate(tl, 2.0)


class TestAliasFrequency:
    def test_reference_speeds(self):
        assert alias_frequency(240, 2, 60) == 0.0
        assert alias_frequency(240, 1, 60) == 0.0
        assert alias_frequency(240, 4, 60) == 30.0
        assert alias_frequency(240, 8, 60) == 15.0
        assert alias_frequency(240, 16, 60) == 7.5
        assert alias_frequency(240, 32, 60) == 3.75

    def test_zero_speed(self):
        assert alias_frequency(0, 8, 60) == 0.0

    def test_nyquist_returned_at_half_refresh(self):
        assert alias_frequency(240, 4, 60) == 30.0  # f exactly refresh/2

    def test_always_within_foldback_band(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            speed = float(rng.uniform(1, 5000))
            w = float(rng.uniform(0.5, 64))
            refresh = float(rng.uniform(24, 240))
            alias = alias_frequency(speed, w, refresh)
            assert 0.0 <= alias <= refresh / 2 + 1e-12

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            alias_frequency(-1, 2, 60)
        with pytest.raises(ValueError):
            alias_frequency(240, 0, 60)
        with pytest.raises(ValueError):
            alias_frequency(240, 2, 0)


class TestAliasSimulationAgreement:
    def test_commensurate_grid_with_random_phases(self):
        # integer px/frame speeds: folded prediction matches the frame
        # simulation up to one toggle per window, phase-averaged
        rng = np.random.default_rng(6)
        window = 5.0
        for speed in (60, 120, 240, 480):
            for width in (1, 2, 4, 8, 16, 32):
                predicted = alias_frequency(speed, width, 60)
                rates = []
                for _ in range(16):
                    start = float(rng.uniform(0, 2 * width))
                    tl = sweep_timeline(width, speed, duration=window, start_x=start)
                    rates.append(toggle_rate(tl, window))
                mean_rate = float(np.mean(rates))
                assert mean_rate / 2 == pytest.approx(predicted, abs=1.0 / window), (
                    speed, width
                )


class TestOnFraction:
    def test_long_random_phase_sweeps_near_half(self):
        rng = np.random.default_rng(7)
        for width in (4, 8, 16, 32):
            fractions = []
            for _ in range(8):
                start = float(rng.uniform(0, 2 * width))
                speed = float(rng.uniform(150, 350))
                tl = sweep_timeline(width, speed, duration=30.0, start_x=start)
                fractions.append(float(tl.on.mean()))
            assert np.mean(fractions) == pytest.approx(0.5, abs=0.05)


class TestDriveWaveform:
    def test_fully_on_half_period_runs(self):
        tl = VibrationTimeline(60, 120, np.ones(60, dtype=bool))
        wave = drive_waveform(tl, 48000)
        assert len(wave) == 48000
        # count runs of constant sign
        changes = np.nonzero(np.diff(wave))[0]
        run_lengths = np.diff(np.concatenate([[0], changes + 1, [len(wave)]]))
        assert len(run_lengths) == 240
        assert set(run_lengths.tolist()) == {200}

    def test_fully_off_is_silent(self):
        tl = VibrationTimeline(60, 120, np.zeros(30, dtype=bool))
        assert not drive_waveform(tl, 2000).any()

    def test_half_on_gating(self):
        on = np.concatenate([np.ones(30, dtype=bool), np.zeros(30, dtype=bool)])
        tl = VibrationTimeline(60, 120, on)
        wave = drive_waveform(tl, 8000)
        t = np.arange(len(wave)) / 8000
        assert np.abs(wave[t < 0.5]).all()
        assert not wave[t >= 0.5].any()

    def test_sample_rate_floor(self):
        tl = VibrationTimeline(60, 120, np.ones(6, dtype=bool))
        with pytest.raises(ValueError):
            drive_waveform(tl, 400)


class TestStateEventsAndCsv:
    def test_state_events_include_leading_edge(self):
        tl = VibrationTimeline(60, 120, np.array([True, True, False, True]))
        assert tl.state_events(initial_on=False) == [(0, True), (2, False), (3, True)]
        assert tl.state_events(initial_on=True) == [(2, False), (3, True)]

    def test_timeline_csv_shape(self):
        tl = VibrationTimeline(60, 120, np.array([True, False]))
        lines = timeline_to_csv(tl).splitlines()
        assert lines[0] == "frame,t_s,on"
        assert lines[1] == "0,0.0,1"

    def test_waveform_csv_shape(self):
        lines = waveform_to_csv(np.array([1, -1, 0], dtype=np.int8), 1000).splitlines()
        assert lines[0] == "t_s,amplitude"
        assert lines[2] == "0.001,-1"
