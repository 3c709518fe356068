"""Image containers, HSV conversion and plane statistics.

A *plane* is a 2-D ``float64`` numpy array with values nominally in [0, 1].
Colour images are kept as three separate planes so that enhancement
operators can touch the value channel and nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "RgbImage",
    "HsvImage",
    "as_plane",
    "rgb_to_hsv",
    "hsv_to_rgb",
    "mean_value",
    "percentile",
    "clamp01",
]


def as_plane(data) -> np.ndarray:
    """Validate ``data`` as a plane and return it as a C-contiguous float64 array."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"a plane must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("a plane must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("plane contains non-finite values")
    return arr


def _check_same_shape(*planes: np.ndarray) -> None:
    shapes = {p.shape for p in planes}
    if len(shapes) != 1:
        raise ValueError(f"planes have mismatched shapes: {sorted(shapes)}")


@dataclass(frozen=True)
class RgbImage:
    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("r", "g", "b"):
            object.__setattr__(self, name, as_plane(getattr(self, name)))
        _check_same_shape(self.r, self.g, self.b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.r.shape

    @property
    def width(self) -> int:
        return self.r.shape[1]

    @property
    def height(self) -> int:
        return self.r.shape[0]

    @classmethod
    def from_array(cls, arr) -> RgbImage:
        """Build from an ``(H, W, 3)`` array, or a 2-D array taken as gray."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            return cls(arr, arr.copy(), arr.copy())
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) array, got shape {arr.shape}")
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    @classmethod
    def gray(cls, plane) -> RgbImage:
        return cls.from_array(as_plane(plane))

    def to_array(self) -> np.ndarray:
        return np.stack([self.r, self.g, self.b], axis=-1)

    def channels(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.r, self.g, self.b


@dataclass(frozen=True)
class HsvImage:
    """Hue as a fraction of a turn in [0, 1), saturation and value in [0, 1]."""

    h: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for name in ("h", "s", "v"):
            object.__setattr__(self, name, as_plane(getattr(self, name)))
        _check_same_shape(self.h, self.s, self.v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.v.shape

    def with_value(self, v) -> HsvImage:
        """Return a copy sharing ``h`` and ``s`` with the value plane replaced."""
        return HsvImage(self.h, self.s, v)


def rgb_to_hsv(img: RgbImage) -> HsvImage:
    """Hexcone RGB to HSV. Achromatic pixels get hue 0."""
    r, g, b = img.channels()
    v = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    chroma = v - mn

    s = np.zeros_like(v)
    np.divide(chroma, v, out=s, where=v > 0)

    h = np.zeros_like(v)
    safe = np.where(chroma > 0, chroma, 1.0)
    is_r = (chroma > 0) & (v == r)
    is_g = (chroma > 0) & (v == g) & ~is_r
    is_b = (chroma > 0) & ~is_r & ~is_g
    h = np.where(is_r, np.mod((g - b) / safe, 6.0), h)
    h = np.where(is_g, (b - r) / safe + 2.0, h)
    h = np.where(is_b, (r - g) / safe + 4.0, h)
    h = h / 6.0
    h[h >= 1.0] -= 1.0
    h[h < 0.0] = 0.0
    return HsvImage(h, s, v)


def hsv_to_rgb(img: HsvImage) -> RgbImage:
    """Inverse hexcone conversion; the result is clamped to [0, 1]."""
    h6 = np.mod(img.h, 1.0) * 6.0
    sector_f = np.floor(h6)
    f = h6 - sector_f
    sector = sector_f.astype(np.int64) % 6
    s, v = img.s, img.v

    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))

    r = np.choose(sector, [v, q, p, p, t, v])
    g = np.choose(sector, [t, v, v, q, p, p])
    b = np.choose(sector, [p, p, t, v, v, q])
    return RgbImage(clamp01(r), clamp01(g), clamp01(b))


def mean_value(p) -> float:
    p = np.asarray(p, dtype=np.float64)
    if p.size == 0:
        raise ValueError("mean of an empty plane is undefined")
    return float(np.mean(p))


def percentile(p, q: float) -> float:
    """Nearest-rank percentile; ``q = 0`` is the minimum, ``q = 100`` the maximum."""
    if not 0.0 <= q <= 100.0:
        raise ValueError(f"percentile q must lie in [0, 100], got {q}")
    flat = np.sort(np.asarray(p, dtype=np.float64), axis=None)
    n = flat.size
    if n == 0:
        raise ValueError("percentile of an empty plane is undefined")
    # exact rational rank: q / 100 * n in floats can overshoot an integer
    rank = min(max(math.ceil(Fraction(q) * n / 100), 1), n)
    return float(flat[rank - 1])


def clamp01(p) -> np.ndarray:
    return np.clip(np.asarray(p, dtype=np.float64), 0.0, 1.0)
