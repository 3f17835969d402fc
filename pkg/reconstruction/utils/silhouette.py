"""
Silhouette images: occupancy grids in [0, 1] with bilinear lookup.

Portable graymap (P2 ascii / P5 binary, 8-bit) is the native file format;
other decoders can be attached with `register_loader`.
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..exceptions import FileFormatError

logger = logging.getLogger(__name__)

# Pixels at or above this count as fully inside when measuring area
AREA_LEVEL = 0.999


@dataclass(frozen=True, eq=False)
class Silhouette:
    """Row-major occupancy grid, values[y, x] with 1 = inside the object."""

    values: np.ndarray

    def __post_init__(self):
        grid = np.array(self.values, dtype=np.float64)
        if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
            raise ValueError(f"Silhouette must be a non-empty 2D grid, got shape {grid.shape}")
        if not np.all(np.isfinite(grid)) or grid.min() < 0.0 or grid.max() > 1.0:
            raise ValueError("Silhouette values must lie in [0, 1]")
        grid.setflags(write=False)
        object.__setattr__(self, "values", grid)

    @classmethod
    def from_flat(cls, width, height, values):
        flat = np.asarray(values, dtype=np.float64)
        if flat.size != width * height:
            raise ValueError(f"Expected {width * height} values for {width}x{height}, got {flat.size}")
        return cls(flat.reshape(height, width))

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]

    def interp(self, x, y):
        return interp(self, x, y)

    def area(self):
        return area(self)


def interp(s: Silhouette, x, y):
    """
    Bilinear lookup with pixel values sampled at pixel centers.

    Inside [0, W] x [0, H] the lookup clamps to the outermost centers;
    anything outside the image reads as background (0). Accepts scalars
    or arrays and returns the same shape.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w, h = s.width, s.height
    inside = (x >= 0.0) & (x <= w) & (y >= 0.0) & (y <= h)

    u = np.clip(x - 0.5, 0.0, w - 1.0)
    v = np.clip(y - 0.5, 0.0, h - 1.0)
    u = np.where(np.isfinite(u), u, 0.0)
    v = np.where(np.isfinite(v), v, 0.0)
    i0 = np.floor(u).astype(np.intp)
    j0 = np.floor(v).astype(np.intp)
    i1 = np.minimum(i0 + 1, w - 1)
    j1 = np.minimum(j0 + 1, h - 1)
    fx = u - i0
    fy = v - j0

    grid = s.values
    top = grid[j0, i0] * (1.0 - fx) + grid[j0, i1] * fx
    bottom = grid[j1, i0] * (1.0 - fx) + grid[j1, i1] * fx
    value = top * (1.0 - fy) + bottom * fy
    value = np.where(inside, value, 0.0)
    if value.ndim == 0:
        return float(value)
    return value


def area(s: Silhouette) -> float:
    """Count of pixels whose value is at least AREA_LEVEL."""
    return float(np.count_nonzero(s.values >= AREA_LEVEL))


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data, count, path):
    tokens = []
    pos = 0
    for _ in range(count):
        match = _TOKEN.match(data, pos)
        if match is None:
            raise FileFormatError(path, "truncated PGM header")
        tokens.append(match.group(1))
        pos = match.end()
    return tokens, pos


def read_pgm(path) -> Silhouette:
    """Read an 8-bit P2 or P5 graymap; byte b maps to b / maxval."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FileFormatError(path, f"cannot read image: {exc}") from exc

    (magic, width, height, maxval), pos = _header_tokens(data, 4, path)
    try:
        width, height, maxval = int(width), int(height), int(maxval)
    except ValueError as exc:
        raise FileFormatError(path, f"bad PGM header: {exc}") from exc
    if width < 1 or height < 1 or not 0 < maxval < 256:
        raise FileFormatError(path, f"unsupported PGM geometry {width}x{height} maxval {maxval}")

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        raster = data[pos + 1:pos + 1 + count]
        if len(raster) != count:
            raise FileFormatError(path, f"expected {count} raster bytes, found {len(raster)}")
        pixels = np.frombuffer(raster, dtype=np.uint8)
    elif magic == b"P2":
        body = re.sub(rb"#[^\n]*", b"", data[pos:])
        try:
            pixels = np.array(body.split()[:count], dtype=np.int64)
        except ValueError as exc:
            raise FileFormatError(path, f"bad ASCII raster: {exc}") from exc
        if pixels.size != count:
            raise FileFormatError(path, f"expected {count} samples, found {pixels.size}")
        if pixels.min() < 0 or pixels.max() > maxval:
            raise FileFormatError(path, "sample outside [0, maxval]")
    else:
        raise FileFormatError(path, f"unknown format {magic!r}, expected P2 or P5")

    return Silhouette(pixels.reshape(height, width).astype(np.float64) / maxval)


def write_pgm(s: Silhouette, path, binary=True):
    """Write an 8-bit graymap, rounding value * 255."""
    pixels = np.rint(s.values * 255.0).astype(np.uint8)
    header = f"{'P5' if binary else 'P2'}\n{s.width} {s.height}\n255\n".encode('ascii')
    with open(path, 'wb') as f:
        f.write(header)
        if binary:
            f.write(pixels.tobytes())
        else:
            for row in pixels:
                f.write((' '.join(str(int(v)) for v in row) + '\n').encode('ascii'))


_LOADERS = {
    '.pgm': read_pgm,
}


def register_loader(suffix, loader):
    """Attach a decoder returning a Silhouette for files ending in `suffix`."""
    _LOADERS[suffix.lower()] = loader


def load_silhouette(path) -> Silhouette:
    path = Path(path)
    loader = _LOADERS.get(path.suffix.lower())
    if loader is None:
        raise FileFormatError(path, f"no loader registered for '{path.suffix}'")
    logger.debug("Loading silhouette %s", path)
    return loader(path)
