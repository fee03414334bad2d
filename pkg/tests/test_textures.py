import numpy as np
import pytest

from vibrotex.textures import (
    BoundaryMode,
    Color,
    LengthDirection,
    MappingConfig,
    PgmParseError,
    TextureGrid,
    color_at,
    convert_length,
    load_pgm,
    make_stripes,
    write_pgm,
)


def stripe_color_reference(x: int, w: int) -> Color:
    """Brute-force stripe rule, independent of the generator."""
    return Color.BLACK if (x // w) % 2 == 0 else Color.WHITE


class TestMakeStripes:
    def test_one_pixel_stripes(self):
        grid = make_stripes(1, 4, 1)
        cols = [color_at(grid, x, 0) for x in range(4)]
        assert cols == [Color.BLACK, Color.WHITE, Color.BLACK, Color.WHITE]

    def test_four_pixel_stripes_rows_identical(self):
        grid = make_stripes(4, 8, 2)
        for x in range(8):
            expected = Color.BLACK if x < 4 else Color.WHITE
            assert color_at(grid, x, 0) == expected
            assert color_at(grid, x, 1) == expected

    def test_stripe_count_full_screen(self):
        grid = make_stripes(32, 1920, 1080)
        # brute-force scan of column runs
        row = grid.blacks[0]
        runs = []
        start = 0
        for x in range(1, 1920):
            if row[x] != row[x - 1]:
                runs.append((bool(row[start]), x - start))
                start = x
        runs.append((bool(row[start]), 1920 - start))
        black_runs = [r for r in runs if r[0]]
        white_runs = [r for r in runs if not r[0]]
        assert len(black_runs) == 30 and len(white_runs) == 30
        assert all(length == 32 for _, length in runs)

    def test_matches_reference_rule(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            w = int(rng.integers(1, 40))
            width = int(rng.integers(w, 200))
            grid = make_stripes(w, width, 3)
            for x in rng.integers(0, width, size=15):
                assert color_at(grid, int(x), 0) == stripe_color_reference(int(x), w)

    def test_black_fraction_half_when_width_multiple_of_period(self):
        for w, width in [(1, 2), (4, 8), (4, 64), (16, 1920)]:
            assert make_stripes(w, width, 5).black_fraction == 0.5
        assert make_stripes(4, 10, 1).black_fraction != 0.5

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            make_stripes(0, 10, 10)
        with pytest.raises(ValueError):
            make_stripes(4, 0, 10)
        with pytest.raises(ValueError):
            make_stripes(4, 10, 0)
        with pytest.raises(ValueError):
            make_stripes(11, 10, 1)


class TestColorAt:
    def test_clamp_inside(self):
        grid = make_stripes(4, 16, 2)
        assert color_at(grid, 3, 0, BoundaryMode.CLAMP) == Color.BLACK
        assert color_at(grid, 4, 0, BoundaryMode.CLAMP) == Color.WHITE

    def test_clamp_vs_wrap_out_of_range(self):
        grid = make_stripes(4, 8, 1)
        # clamp lands on the last column (white); wrap reduces 9 -> 1 (black)
        assert color_at(grid, 9, 0, BoundaryMode.CLAMP) == Color.WHITE
        assert color_at(grid, 9, 0, BoundaryMode.WRAP_HORIZONTAL) == stripe_color_reference(9 % 8, 4)
        assert color_at(grid, 9, 0, BoundaryMode.WRAP_HORIZONTAL) == Color.BLACK

    def test_wrap_periodicity(self):
        grid = make_stripes(3, 18, 1)
        for x in range(-18, 36):
            assert color_at(grid, x, 0, BoundaryMode.WRAP_HORIZONTAL) == color_at(
                grid, x + 18, 0, BoundaryMode.WRAP_HORIZONTAL
            )

    def test_negative_and_vertical_clamp(self):
        grid = make_stripes(2, 8, 4)
        assert color_at(grid, -5, 0) == Color.BLACK
        assert color_at(grid, 0, 99) == Color.BLACK
        assert color_at(grid, 0, -3) == Color.BLACK


class TestConvertLength:
    def test_reference_rows_exact(self):
        cfg = MappingConfig()
        expected = {1: 0.04, 2: 0.08, 4: 0.16, 8: 0.32, 16: 0.64, 32: 1.28}
        for px, mm in expected.items():
            assert convert_length(px, LengthDirection.PX_TO_MM, cfg) == mm

    def test_mm_to_px(self):
        assert convert_length(0.04, LengthDirection.MM_TO_PX, MappingConfig()) == 1.0

    def test_round_trip(self):
        cfg = MappingConfig()
        rng = np.random.default_rng(2)
        for v in rng.uniform(0, 5000, size=200):
            mm = convert_length(v, LengthDirection.PX_TO_MM, cfg)
            back = convert_length(mm, LengthDirection.MM_TO_PX, cfg)
            assert back == pytest.approx(v, rel=1e-12)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            convert_length(-1.0, LengthDirection.PX_TO_MM, MappingConfig())

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MappingConfig(refresh_hz=0)
        with pytest.raises(ValueError):
            MappingConfig(px_per_sweep=-1)


class TestPgm:
    def test_p2_two_pixels(self):
        data = b"P2\n1 2\n255\n0\n255\n"
        grid = load_pgm(data, threshold=128)
        assert grid.width_px == 1 and grid.height_px == 2
        assert color_at(grid, 0, 0) == Color.BLACK
        assert color_at(grid, 0, 1) == Color.WHITE
        assert grid.stripe_width_px is None

    def test_round_trip_with_generator(self):
        original = make_stripes(4, 64, 8)
        parsed = load_pgm(write_pgm(original))
        assert np.array_equal(parsed.blacks, original.blacks)

    def test_truncated_payload(self):
        data = b"P5\n4 4\n255\n" + b"\x00" * 7
        with pytest.raises(PgmParseError) as err:
            load_pgm(data)
        assert "truncated" in str(err.value)
        assert err.value.offset > 0

    def test_maxval_too_large(self):
        with pytest.raises(PgmParseError):
            load_pgm(b"P2\n1 1\n65535\n12\n")

    def test_bad_magic(self):
        with pytest.raises(PgmParseError):
            load_pgm(b"P6\n1 1\n255\n\x00")

    def test_comments_in_header(self):
        data = b"P2\n# a comment\n2 1\n# another\n255\n0 255\n"
        grid = load_pgm(data)
        assert color_at(grid, 0, 0) == Color.BLACK
        assert color_at(grid, 1, 0) == Color.WHITE

    def test_threshold_strictly_less_than(self):
        data = b"P2\n2 1\n255\n127 128\n"
        grid = load_pgm(data, threshold=128)
        assert color_at(grid, 0, 0) == Color.BLACK
        assert color_at(grid, 1, 0) == Color.WHITE

    def test_p2_value_above_maxval(self):
        with pytest.raises(PgmParseError):
            load_pgm(b"P2\n1 1\n100\n101\n")


class TestTextureGrid:
    def test_immutable_pixels(self):
        grid = make_stripes(2, 4, 1)
        with pytest.raises(ValueError):
            grid.blacks[0, 0] = False

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            TextureGrid(4, 2, np.zeros((3, 4), dtype=bool))
