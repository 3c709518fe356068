"""Smoothing filters used by the enhancement operators.

* :func:`box_filter` - windowed mean with partial-window normalisation.
* :func:`guided_filter` - He et al.'s locally linear edge-preserving filter.
* :func:`gaussian_blur` - separable, truncated, replicate-bordered Gaussian.
* :func:`edge_aware_smooth` - joint spatial/range Gaussian filter evaluated on a
  downsampled bilateral grid; :func:`gaussian_range_oracle` is its O(n^2)
  definition.
* :func:`clahe` - contrast limited adaptive histogram equalisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .image import RgbImage, as_plane

__all__ = [
    "GuidedFilterParams",
    "EdgeAwareParams",
    "ClaheParams",
    "box_filter",
    "guided_filter",
    "gaussian_kernel",
    "gaussian_blur",
    "edge_aware_smooth",
    "gaussian_range_oracle",
    "clip_histogram",
    "clahe",
    "ORACLE_MAX_SIDE",
]

ORACLE_MAX_SIDE = 64

# Bilateral-grid sampling: grid cells per standard deviation along each axis.
_SPATIAL_CELLS_PER_SIGMA = 4.0
_RANGE_CELLS_PER_SIGMA = 2.0
_MAX_GRID_CELLS = 1 << 23
_GRID_TRUNCATE = 4.0


@dataclass(frozen=True)
class GuidedFilterParams:
    radius: int = 2
    eps: float = 0.01

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise ValueError(f"guided filter radius must be an integer >= 1, got {self.radius}")
        if not self.eps > 0:
            raise ValueError(f"guided filter eps must be > 0, got {self.eps}")


@dataclass(frozen=True)
class EdgeAwareParams:
    sigma_s: float = 20.0
    sigma_r: float = 0.4

    def __post_init__(self):
        if not self.sigma_s > 0 or not self.sigma_r > 0:
            raise ValueError(
                f"sigma_s and sigma_r must be > 0, got {self.sigma_s}, {self.sigma_r}")


@dataclass(frozen=True)
class ClaheParams:
    tiles_x: int = 8
    tiles_y: int = 8
    clip_limit: float = 0.01
    bins: int = 256

    def __post_init__(self):
        if self.tiles_x < 1 or self.tiles_y < 1:
            raise ValueError("CLAHE needs at least one tile along each axis")
        if not 0 < self.clip_limit <= 1:
            raise ValueError(f"clip_limit must lie in (0, 1], got {self.clip_limit}")
        if self.bins < 2:
            raise ValueError(f"CLAHE needs at least 2 bins, got {self.bins}")


def box_filter(p, radius: int) -> np.ndarray:
    """Mean over the ``(2r+1)^2`` window clipped to the image."""
    if int(radius) != radius or radius < 1:
        raise ValueError(f"box radius must be an integer >= 1, got {radius}")
    return _kernels.box_mean(as_plane(p), int(radius))


def guided_filter(input, guide, params: GuidedFilterParams = GuidedFilterParams()) -> np.ndarray:
    """Guided filter of ``input`` steered by ``guide``.

    Each window k fits ``input ~ a_k * guide + b_k`` by ridge regression with
    penalty ``eps``; the output at a pixel averages the fits of every window
    covering it. The result is not clamped.
    """
    p = as_plane(input)
    guide = as_plane(guide)
    if p.shape != guide.shape:
        raise ValueError(f"input {p.shape} and guide {guide.shape} differ in shape")
    r = params.radius
    mean_i = _kernels.box_mean(guide, r)
    mean_p = _kernels.box_mean(p, r)
    corr_ip = _kernels.box_mean(guide * p, r)
    corr_ii = _kernels.box_mean(guide * guide, r)
    cov_ip = corr_ip - mean_i * mean_p
    var_i = corr_ii - mean_i * mean_i
    a = cov_ip / (var_i + params.eps)
    b = mean_p - a * mean_i
    return _kernels.box_mean(a, r) * guide + _kernels.box_mean(b, r)


def gaussian_kernel(sigma: float, truncate: float = 3.0) -> np.ndarray:
    """Sampled Gaussian on ``[-ceil(truncate*sigma), ceil(truncate*sigma)]``, summing to 1."""
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    half = int(math.ceil(truncate * sigma))
    t = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(t * t) / (2.0 * sigma * sigma))
    return k / k.sum()


def _correlate_axis(arr: np.ndarray, kernel: np.ndarray, axis: int, replicate: bool) -> np.ndarray:
    moved = np.moveaxis(arr, axis, -1)
    shape = moved.shape
    flat = np.ascontiguousarray(moved.reshape(-1, shape[-1]))
    out = _kernels.correlate_last(flat, kernel, replicate)
    return np.moveaxis(np.asarray(out).reshape(shape), -1, axis)


def gaussian_blur(p, sigma: float) -> np.ndarray:
    plane = as_plane(p)
    k = gaussian_kernel(sigma)
    out = _correlate_axis(plane, k, axis=1, replicate=True)
    return np.ascontiguousarray(_correlate_axis(out, k, axis=0, replicate=True))


def _grid_sampling(h: int, w: int, spans: np.ndarray, params: EdgeAwareParams):
    ds = max(1, int(params.sigma_s // _SPATIAL_CELLS_PER_SIGMA))
    dr = params.sigma_r / _RANGE_CELLS_PER_SIGMA

    def cells(ds, dr):
        spatial = ((h - 1) // ds + 2) * ((w - 1) // ds + 2)
        return spatial * int(np.prod(np.floor(spans / dr) + 2))

    # coarser range sampling first: spatial detail matters more for edges
    while cells(ds, dr) > _MAX_GRID_CELLS and dr < params.sigma_r:
        dr *= 1.25
    while cells(ds, dr) > _MAX_GRID_CELLS and ds < max(h, w):
        ds += 1
    return ds, dr


def _blur_sigma(sigma_cells: float, resampled: bool) -> float:
    # splat + slice each add a unit tent (variance 1/6 cell^2) on resampled axes
    if not resampled:
        return sigma_cells
    return math.sqrt(max(sigma_cells * sigma_cells - 1.0 / 3.0, 0.25 * sigma_cells * sigma_cells))


def _grid_filter(values: np.ndarray, params: EdgeAwareParams) -> np.ndarray:
    h, w, channels = values.shape
    flat = values.reshape(-1, channels)
    lo = flat.min(axis=0)
    hi = flat.max(axis=0)
    spans = hi - lo
    if not np.any(spans > 0):
        return values.copy()

    ds, dr = _grid_sampling(h, w, spans, params)
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64),
                         indexing="ij")
    coords = np.empty((h * w, 2 + channels))
    coords[:, 0] = yy.ravel() / ds
    coords[:, 1] = xx.ravel() / ds
    coords[:, 2:] = (flat - lo) / dr
    gshape = [(h - 1) // ds + 2, (w - 1) // ds + 2]
    gshape += [int(math.floor(s / dr)) + 2 for s in spans]

    homogeneous = np.empty((h * w, channels + 1))
    homogeneous[:, 0] = 1.0
    homogeneous[:, 1:] = flat
    grid = _kernels.grid_splat(coords, homogeneous, gshape)
    grid = np.asarray(grid).reshape(gshape + [channels + 1])

    spatial = gaussian_kernel(_blur_sigma(params.sigma_s / ds, ds > 1), _GRID_TRUNCATE)
    rng = gaussian_kernel(_blur_sigma(params.sigma_r / dr, True), _GRID_TRUNCATE)
    for axis in range(len(gshape)):
        kernel = spatial if axis < 2 else rng
        # zero padding: the ratio below then normalises over in-image samples only
        grid = _correlate_axis(grid, kernel, axis, replicate=False)

    sliced = np.asarray(_kernels.grid_slice(
        np.ascontiguousarray(grid.reshape(-1, channels + 1)), coords, gshape))
    weight = sliced[:, :1]
    out = np.where(weight > 0, sliced[:, 1:] / np.where(weight > 0, weight, 1.0), flat)
    # the ratio is a convex combination; clipping only removes rounding overshoot
    out = np.clip(out, lo, hi)
    return out.reshape(h, w, channels)


def edge_aware_smooth(img, params: EdgeAwareParams = EdgeAwareParams()):
    """Joint spatial/range Gaussian smoothing of a plane or an :class:`RgbImage`.

    Approximates :func:`gaussian_range_oracle` with a bilateral grid
    (splat, separable blur, multilinear slice). For colour input the range
    distance is taken jointly over the three channels. Every output pixel
    is a convex combination of input pixels.
    """
    if isinstance(img, RgbImage):
        out = _grid_filter(img.to_array(), params)
        return RgbImage.from_array(out)
    plane = as_plane(img)
    return np.ascontiguousarray(_grid_filter(plane[..., None], params)[..., 0])


def gaussian_range_oracle(img, params: EdgeAwareParams):
    """Brute-force joint spatial/range Gaussian filter, O(n^2) in the pixel count.

    Only for images up to ``ORACLE_MAX_SIDE`` on each side.
    """
    is_rgb = isinstance(img, RgbImage)
    values = img.to_array() if is_rgb else as_plane(img)[..., None]
    h, w, channels = values.shape
    if h > ORACLE_MAX_SIDE or w > ORACLE_MAX_SIDE:
        raise ValueError(
            f"oracle limited to {ORACLE_MAX_SIDE}x{ORACLE_MAX_SIDE}, got {h}x{w}")
    ys, xs = np.mgrid[0:h, 0:w]
    ys = ys.ravel().astype(np.float64)
    xs = xs.ravel().astype(np.float64)
    flat = values.reshape(-1, channels)
    out = np.empty_like(flat)
    two_ss = 2.0 * params.sigma_s ** 2
    two_rr = 2.0 * params.sigma_r ** 2
    for i in range(flat.shape[0]):
        d_pos = (ys - ys[i]) ** 2 + (xs - xs[i]) ** 2
        d_val = np.sum((flat - flat[i]) ** 2, axis=1)
        wgt = np.exp(-d_pos / two_ss) * np.exp(-d_val / two_rr)
        out[i] = wgt @ flat / wgt.sum()
    out = out.reshape(h, w, channels)
    return RgbImage.from_array(out) if is_rgb else out[..., 0]


def clip_histogram(hist, clip_limit: float) -> np.ndarray:
    """Clip an integer histogram and hand the excess back out uniformly.

    The cap is ``clip_limit`` times the histogram mass. The excess is
    divided evenly over all bins; the remainder goes one count at a time to
    evenly spaced bins, so the total mass is preserved exactly.
    """
    hist = np.asarray(hist, dtype=np.int64)
    bins = hist.shape[0]
    total = int(hist.sum())
    limit = max(1, int(clip_limit * total))
    excess = int(np.maximum(hist - limit, 0).sum())
    out = np.minimum(hist, limit)
    batch, residual = divmod(excess, bins)
    out += batch
    if residual:
        step = max(bins // residual, 1)
        out[np.arange(0, bins, step)[:residual]] += 1
    return out


def clahe(p, params: ClaheParams = ClaheParams()) -> np.ndarray:
    """Contrast limited adaptive histogram equalisation of a [0, 1] plane.

    Tiles whose pixels all fall in one histogram bin map through the
    identity, so flat regions are left untouched.
    """
    plane = as_plane(p)
    h, w = plane.shape
    ty = min(params.tiles_y, h)
    tx = min(params.tiles_x, w)
    bins = params.bins
    ys = (np.arange(ty + 1) * h) // ty
    xs = (np.arange(tx + 1) * w) // tx
    level = np.clip((plane * bins).astype(np.int64), 0, bins - 1)

    luts = np.empty((ty, tx, bins))
    identity = np.zeros((ty, tx), dtype=bool)
    for i in range(ty):
        for j in range(tx):
            tile = level[ys[i]:ys[i + 1], xs[j]:xs[j + 1]]
            hist = np.bincount(tile.ravel(), minlength=bins)
            identity[i, j] = np.count_nonzero(hist) == 1
            cdf = np.cumsum(clip_histogram(hist, params.clip_limit))
            luts[i, j] = cdf / tile.size

    centers_y = (ys[:-1] + ys[1:] - 1) / 2.0
    centers_x = (xs[:-1] + xs[1:] - 1) / 2.0
    out = _kernels.clahe_interpolate(plane, luts, identity, centers_y, centers_x)
    return np.clip(np.asarray(out), 0.0, 1.0)
