"""Vectorised numpy kernels; the fallback when ``revfilt._native`` is not built.

Every function here has a twin in ``_native.pyx`` with the same signature
and semantics. Outputs agree to rounding, not necessarily bit for bit.
"""

import numpy as np


def _window_sums(a, radius, axis):
    """Sums over ``[i - radius, i + radius]`` clipped to the array, via prefix sums."""
    n = a.shape[axis]
    shape = list(a.shape)
    shape[axis] = 1
    prefix = np.concatenate([np.zeros(shape), np.cumsum(a, axis=axis)], axis=axis)
    idx = np.arange(n)
    lo = np.maximum(idx - radius, 0)
    hi = np.minimum(idx + radius + 1, n)
    return np.take(prefix, hi, axis=axis) - np.take(prefix, lo, axis=axis), hi - lo


def box_mean(plane, radius):
    rows, cnt_x = _window_sums(plane, radius, axis=1)
    sums, cnt_y = _window_sums(rows, radius, axis=0)
    return sums / (cnt_y[:, None] * cnt_x[None, :]).astype(np.float64)


def correlate_last(arr, kernel, replicate):
    """Correlate each row of a 2-D array with an odd-length centred kernel."""
    k = kernel.shape[0]
    half = k // 2
    n = arr.shape[1]
    mode = "edge" if replicate else "constant"
    padded = np.pad(arr, ((0, 0), (half, half)), mode=mode)
    out = np.zeros_like(arr)
    for j in range(k):
        out += kernel[j] * padded[:, j:j + n]
    return out


def _corners(coords, gshape):
    """Yield ``(flat_index, weight)`` for each of the 2**D multilinear corners."""
    n, dims = coords.shape
    base = np.floor(coords).astype(np.int64)
    frac = coords - base
    strides = np.ones(dims, dtype=np.int64)
    for d in range(dims - 2, -1, -1):
        strides[d] = strides[d + 1] * gshape[d + 1]
    for corner in range(1 << dims):
        flat = np.zeros(n, dtype=np.int64)
        weight = np.ones(n)
        for d in range(dims):
            if corner >> (dims - 1 - d) & 1:
                flat += (base[:, d] + 1) * strides[d]
                weight *= frac[:, d]
            else:
                flat += base[:, d] * strides[d]
                weight *= 1.0 - frac[:, d]
        yield flat, weight


def grid_splat(coords, values, gshape):
    """Scatter ``values`` (N, C) into a grid with multilinear weights."""
    size = int(np.prod(gshape))
    channels = values.shape[1]
    grid = np.zeros((size, channels))
    for flat, weight in _corners(coords, gshape):
        for c in range(channels):
            grid[:, c] += np.bincount(flat, weights=weight * values[:, c], minlength=size)
    return grid


def grid_slice(grid, coords, gshape):
    """Gather multilinearly interpolated grid rows at ``coords``."""
    out = np.zeros((coords.shape[0], grid.shape[1]))
    for flat, weight in _corners(coords, gshape):
        out += weight[:, None] * grid[flat]
    return out


def clahe_interpolate(plane, luts, identity, centers_y, centers_x):
    """Blend the four surrounding tile mappings bilinearly at every pixel."""
    h, w = plane.shape
    ty, tx, bins = luts.shape

    def locate(n, centers):
        pos = np.arange(n, dtype=np.float64)
        if centers.shape[0] == 1:
            zeros = np.zeros(n, dtype=np.int64)
            return zeros, zeros, np.zeros(n)
        i0 = np.clip(np.searchsorted(centers, pos, side="right") - 1, 0, centers.shape[0] - 2)
        i1 = i0 + 1
        frac = np.clip((pos - centers[i0]) / (centers[i1] - centers[i0]), 0.0, 1.0)
        return i0, i1, frac

    y0, y1, fy = locate(h, centers_y)
    x0, x1, fx = locate(w, centers_x)
    level = np.clip((plane * bins).astype(np.int64), 0, bins - 1)

    def mapped(iy, ix):
        yy, xx = iy[:, None], ix[None, :]
        return np.where(identity[yy, xx], plane, luts[yy, xx, level])

    fy = fy[:, None]
    fx = fx[None, :]
    top = (1.0 - fx) * mapped(y0, x0) + fx * mapped(y0, x1)
    bottom = (1.0 - fx) * mapped(y1, x0) + fx * mapped(y1, x1)
    return (1.0 - fy) * top + fy * bottom
