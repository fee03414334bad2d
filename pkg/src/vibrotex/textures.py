"""Binary on-screen textures and the screen/real-world length mapping.

A texture is a monochrome pixel field: black pixels drive the vibration
actuator on, white pixels leave it off.  Stripe textures are generated with
a fixed phase (leftmost column black) so fixtures stay deterministic;
trajectory phase is randomized elsewhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BoundaryMode",
    "Color",
    "LengthDirection",
    "MappingConfig",
    "PgmParseError",
    "TextureGrid",
    "color_at",
    "colors_at",
    "convert_length",
    "load_pgm",
    "make_stripes",
    "write_pgm",
]


class Color(enum.Enum):
    BLACK = 0
    WHITE = 1


class BoundaryMode(enum.Enum):
    """How out-of-range coordinates are resolved by color lookups."""

    CLAMP = "clamp"
    WRAP_HORIZONTAL = "wrap-horizontal"


class LengthDirection(enum.Enum):
    PX_TO_MM = "px-to-mm"
    MM_TO_PX = "mm-to-px"


class PgmParseError(ValueError):
    """Malformed portable-graymap input; carries the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class TextureGrid:
    """Immutable black/white pixel field.

    ``blacks`` is a (height_px, width_px) boolean array, True where the pixel
    is black.  ``stripe_width_px`` is set only for generated stripe textures.
    """

    width_px: int
    height_px: int
    blacks: np.ndarray
    stripe_width_px: int | None = None

    def __post_init__(self):
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError("texture dimensions must be >= 1")
        if self.blacks.shape != (self.height_px, self.width_px):
            raise ValueError(
                f"pixel array shape {self.blacks.shape} does not match "
                f"({self.height_px}, {self.width_px})"
            )
        if self.blacks.dtype != np.bool_:
            object.__setattr__(self, "blacks", self.blacks.astype(bool))
        self.blacks.setflags(write=False)

    @property
    def black_fraction(self) -> float:
        return float(self.blacks.mean())


@dataclass(frozen=True)
class MappingConfig:
    """Display and drive parameters plus the pointer gain (one 40 mm hand
    sweep moves the cursor 1000 px at defaults)."""

    px_per_sweep: int = 1000
    mm_per_sweep: float = 40.0
    refresh_hz: float = 60.0
    drive_freq_hz: float = 120.0
    screen_w_px: int = 1920
    screen_h_px: int = 1080

    def __post_init__(self):
        for name in (
            "px_per_sweep",
            "mm_per_sweep",
            "refresh_hz",
            "drive_freq_hz",
            "screen_w_px",
            "screen_h_px",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def mm_per_px(self) -> float:
        return self.mm_per_sweep / self.px_per_sweep


def make_stripes(stripe_width_px: int, width_px: int, height_px: int) -> TextureGrid:
    """Vertical stripes of equal line and space width, leftmost column black.

    Column x is black iff floor(x / stripe_width_px) is even, so the spatial
    period is exactly 2 * stripe_width_px.
    """
    if stripe_width_px < 1 or width_px < 1 or height_px < 1:
        raise ValueError("stripe width and dimensions must be >= 1")
    if stripe_width_px > width_px:
        raise ValueError("stripe width cannot exceed texture width")
    cols = (np.arange(width_px) // stripe_width_px) % 2 == 0
    blacks = np.broadcast_to(cols, (height_px, width_px)).copy()
    return TextureGrid(width_px, height_px, blacks, stripe_width_px=stripe_width_px)


def colors_at(
    grid: TextureGrid,
    xs: np.ndarray,
    ys: np.ndarray,
    boundary: BoundaryMode = BoundaryMode.CLAMP,
) -> np.ndarray:
    """Vectorized lookup; returns a boolean array, True where black."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if boundary is BoundaryMode.CLAMP:
        xs = np.clip(xs, 0, grid.width_px - 1)
    elif boundary is BoundaryMode.WRAP_HORIZONTAL:
        xs = np.mod(xs, grid.width_px)
    else:
        raise ValueError(f"unsupported boundary mode: {boundary!r}")
    ys = np.clip(ys, 0, grid.height_px - 1)
    return grid.blacks[ys, xs]


def color_at(
    grid: TextureGrid,
    x: int,
    y: int,
    boundary: BoundaryMode = BoundaryMode.CLAMP,
) -> Color:
    """Pixel color under (x, y); total under both boundary modes."""
    black = colors_at(grid, np.array([x]), np.array([y]), boundary)[0]
    return Color.BLACK if black else Color.WHITE


def convert_length(
    value: float,
    direction: LengthDirection,
    cfg: MappingConfig = MappingConfig(),
) -> float:
    """Convert between screen pixels and real-world millimeters.

    Multiplies before dividing so the six canonical stripe widths map to
    their exact millimeter values at default configuration.
    """
    if value < 0:
        raise ValueError("length value must be non-negative")
    if direction is LengthDirection.PX_TO_MM:
        return (value * cfg.mm_per_sweep) / cfg.px_per_sweep
    if direction is LengthDirection.MM_TO_PX:
        return (value * cfg.px_per_sweep) / cfg.mm_per_sweep
    raise ValueError(f"unsupported direction: {direction!r}")


# --- portable graymap (PGM) ingestion and export ---------------------------

_WHITESPACE = b" \t\n\r\x0b\x0c"


class _PgmScanner:
    """Tokenizer for PGM headers: skips whitespace and # comments, tracks
    the current byte offset for error reporting."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_separators(self):
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos : self.pos + 1]
            if ch in (b"#",):
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif ch in _WHITESPACE:
                self.pos += 1
            else:
                return

    def token(self, what: str) -> bytes:
        self._skip_separators()
        if self.pos >= len(self.data):
            raise PgmParseError(f"unexpected end of data while reading {what}", self.pos)
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in _WHITESPACE:
            if self.data[self.pos : self.pos + 1] == b"#":
                break
            self.pos += 1
        return self.data[start : self.pos]

    def int_token(self, what: str) -> int:
        start = self.pos
        tok = self.token(what)
        try:
            return int(tok)
        except ValueError:
            raise PgmParseError(f"invalid integer for {what}: {tok!r}", start) from None


def load_pgm(data: bytes, threshold: int = 128) -> TextureGrid:
    """Parse a P2 (ASCII) or P5 (binary) graymap into a binary texture.

    Gray values strictly below ``threshold`` become black.  maxval must be
    at most 255.  Malformed or truncated input raises PgmParseError naming
    the byte offset.
    """
    if not 0 <= threshold <= 255:
        raise ValueError("threshold must be in 0..255")
    scanner = _PgmScanner(data)
    magic = scanner.token("magic number")
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"not a PGM image (magic {magic!r})", 0)
    width = scanner.int_token("width")
    height = scanner.int_token("height")
    maxval_at = scanner.pos
    maxval = scanner.int_token("maxval")
    if width < 1 or height < 1:
        raise PgmParseError(f"invalid dimensions {width}x{height}", 2)
    if maxval < 1 or maxval > 255:
        raise PgmParseError(f"maxval {maxval} out of supported range 1..255", maxval_at)

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        if scanner.pos >= len(data) or data[scanner.pos : scanner.pos + 1] not in _WHITESPACE:
            raise PgmParseError("missing raster separator after maxval", scanner.pos)
        start = scanner.pos + 1
        raster = data[start : start + count]
        if len(raster) < count:
            raise PgmParseError(
                f"raster truncated: expected {count} bytes, got {len(raster)}",
                start + len(raster),
            )
        grays = np.frombuffer(raster, dtype=np.uint8, count=count).astype(np.int64)
    else:
        grays = np.empty(count, dtype=np.int64)
        for i in range(count):
            at = scanner.pos
            value = scanner.int_token(f"pixel {i}")
            if value < 0 or value > maxval:
                raise PgmParseError(f"pixel value {value} exceeds maxval {maxval}", at)
            grays[i] = value
    blacks = (grays < threshold).reshape(height, width)
    return TextureGrid(width, height, blacks)


def write_pgm(grid: TextureGrid) -> bytes:
    """Export as binary P5, black pixels as 0 and white as 255."""
    header = f"P5\n{grid.width_px} {grid.height_px}\n255\n".encode("ascii")
    raster = np.where(grid.blacks, 0, 255).astype(np.uint8)
    return header + raster.tobytes()
