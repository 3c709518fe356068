# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Signatures mirror ``revfilt._pure``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def box_mean(const double[:, ::1] plane, Py_ssize_t radius):
    cdef Py_ssize_t h = plane.shape[0], w = plane.shape[1]
    cdef Py_ssize_t i, j, lo, hi
    cdef double[:, ::1] rows = np.empty((h, w))
    cdef double[:, ::1] out = np.empty((h, w))
    cdef double[::1] prefix_x = np.empty(w + 1)
    cdef double[::1] prefix_y = np.empty(h + 1)
    cdef double[::1] cnt_x = np.empty(w)
    cdef double[::1] cnt_y = np.empty(h)

    for j in range(w):
        lo = j - radius if j > radius else 0
        hi = j + radius + 1 if j + radius + 1 < w else w
        cnt_x[j] = hi - lo
    for i in range(h):
        lo = i - radius if i > radius else 0
        hi = i + radius + 1 if i + radius + 1 < h else h
        cnt_y[i] = hi - lo

    for i in range(h):
        prefix_x[0] = 0.0
        for j in range(w):
            prefix_x[j + 1] = prefix_x[j] + plane[i, j]
        for j in range(w):
            lo = j - radius if j > radius else 0
            hi = j + radius + 1 if j + radius + 1 < w else w
            rows[i, j] = prefix_x[hi] - prefix_x[lo]

    for j in range(w):
        prefix_y[0] = 0.0
        for i in range(h):
            prefix_y[i + 1] = prefix_y[i] + rows[i, j]
        for i in range(h):
            lo = i - radius if i > radius else 0
            hi = i + radius + 1 if i + radius + 1 < h else h
            out[i, j] = (prefix_y[hi] - prefix_y[lo]) / (cnt_y[i] * cnt_x[j])
    return np.asarray(out)


def correlate_last(const double[:, ::1] arr, const double[::1] kernel, bint replicate):
    cdef Py_ssize_t rows = arr.shape[0], n = arr.shape[1], k = kernel.shape[0]
    cdef Py_ssize_t half = k // 2
    cdef Py_ssize_t i, j, t, src
    cdef double acc, x
    cdef double[:, ::1] out = np.empty((rows, n))
    for i in range(rows):
        for j in range(n):
            acc = 0.0
            for t in range(k):
                src = j + t - half
                if src < 0:
                    if not replicate:
                        continue
                    src = 0
                elif src >= n:
                    if not replicate:
                        continue
                    src = n - 1
                x = arr[i, src]
                acc = acc + kernel[t] * x
            out[i, j] = acc
    return np.asarray(out)


cdef inline Py_ssize_t _corner(const double[:, ::1] coords, Py_ssize_t p, int corner,
                               const Py_ssize_t[::1] strides, double* weight):
    cdef Py_ssize_t dims = coords.shape[1]
    cdef Py_ssize_t d, flat = 0, base
    cdef double c, frac, wt = 1.0
    for d in range(dims):
        c = coords[p, d]
        base = <Py_ssize_t>floor(c)
        frac = c - base
        if (corner >> (dims - 1 - d)) & 1:
            flat += (base + 1) * strides[d]
            wt *= frac
        else:
            flat += base * strides[d]
            wt *= 1.0 - frac
    weight[0] = wt
    return flat


def _strides(gshape):
    dims = len(gshape)
    strides = np.ones(dims, dtype=np.intp)
    for d in range(dims - 2, -1, -1):
        strides[d] = strides[d + 1] * gshape[d + 1]
    return strides


def grid_splat(const double[:, ::1] coords, const double[:, ::1] values, gshape):
    cdef Py_ssize_t n = coords.shape[0], dims = coords.shape[1]
    cdef Py_ssize_t channels = values.shape[1]
    cdef Py_ssize_t size = int(np.prod(gshape))
    cdef const Py_ssize_t[::1] strides = _strides(gshape)
    cdef double[:, ::1] grid = np.zeros((size, channels))
    cdef Py_ssize_t p, c, flat
    cdef int corner
    cdef double wt
    for corner in range(1 << dims):
        for p in range(n):
            flat = _corner(coords, p, corner, strides, &wt)
            for c in range(channels):
                grid[flat, c] += wt * values[p, c]
    return np.asarray(grid)


def grid_slice(const double[:, ::1] grid, const double[:, ::1] coords, gshape):
    cdef Py_ssize_t n = coords.shape[0], dims = coords.shape[1]
    cdef Py_ssize_t channels = grid.shape[1]
    cdef const Py_ssize_t[::1] strides = _strides(gshape)
    cdef double[:, ::1] out = np.zeros((n, channels))
    cdef Py_ssize_t p, c, flat
    cdef int corner
    cdef double wt
    for corner in range(1 << dims):
        for p in range(n):
            flat = _corner(coords, p, corner, strides, &wt)
            for c in range(channels):
                out[p, c] += wt * grid[flat, c]
    return np.asarray(out)


def clahe_interpolate(const double[:, ::1] plane, const double[:, :, ::1] luts,
                      identity, const double[::1] centers_y, const double[::1] centers_x):
    cdef Py_ssize_t h = plane.shape[0], w = plane.shape[1]
    cdef Py_ssize_t ty = luts.shape[0], tx = luts.shape[1], bins = luts.shape[2]
    cdef const unsigned char[:, ::1] ident = np.ascontiguousarray(identity, dtype=np.uint8)
    cdef double[:, ::1] out = np.empty((h, w))
    cdef Py_ssize_t[::1] y0 = np.zeros(h, dtype=np.intp), x0 = np.zeros(w, dtype=np.intp)
    cdef double[::1] fy = np.zeros(h), fx = np.zeros(w)
    cdef Py_ssize_t i, j, level, a, b
    cdef double v, m00, m01, m10, m11, f

    _locate(centers_y, y0, fy)
    _locate(centers_x, x0, fx)
    for i in range(h):
        for j in range(w):
            v = plane[i, j]
            level = <Py_ssize_t>(v * bins)
            if level < 0:
                level = 0
            elif level > bins - 1:
                level = bins - 1
            a = y0[i]
            b = x0[j]
            m00 = v if ident[a, b] else luts[a, b, level]
            m01 = v if ident[a, b + (tx > 1)] else luts[a, b + (tx > 1), level]
            m10 = v if ident[a + (ty > 1), b] else luts[a + (ty > 1), b, level]
            m11 = (v if ident[a + (ty > 1), b + (tx > 1)]
                   else luts[a + (ty > 1), b + (tx > 1), level])
            f = fx[j]
            out[i, j] = ((1.0 - fy[i]) * ((1.0 - f) * m00 + f * m01)
                         + fy[i] * ((1.0 - f) * m10 + f * m11))
    return np.asarray(out)


cdef void _locate(const double[::1] centers, Py_ssize_t[::1] idx, double[::1] frac):
    cdef Py_ssize_t n = idx.shape[0], m = centers.shape[0], p, k = 0
    cdef double pos, t
    if m == 1:
        return
    for p in range(n):
        pos = <double>p
        while k < m - 2 and centers[k + 1] <= pos:
            k += 1
        idx[p] = k
        t = (pos - centers[k]) / (centers[k + 1] - centers[k])
        frac[p] = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
