"""Independent reference implementations and synthetic images for the tests.

Nothing here calls into the code path it is used to check: the oracles are
plain loops over the textbook definitions.
"""

import math
import struct
import zlib

import numpy as np

from revfilt.image import RgbImage


# ---------------------------------------------------------------- oracles

def naive_box(p, radius):
    h, w = p.shape
    out = np.empty_like(p)
    for i in range(h):
        for j in range(w):
            win = p[max(i - radius, 0):i + radius + 1, max(j - radius, 0):j + radius + 1]
            out[i, j] = math.fsum(win.ravel()) / win.size
    return out


def naive_guided(p, guide, radius, eps):
    """Per-window ridge fits, then per-pixel averaging over covering windows."""
    h, w = p.shape
    a = np.empty((h, w))
    b = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            sl = (slice(max(i - radius, 0), i + radius + 1), slice(max(j - radius, 0), j + radius + 1))
            gi = guide[sl].ravel()
            pi = p[sl].ravel()
            mu = gi.mean()
            pm = pi.mean()
            var = np.mean((gi - mu) ** 2)
            cov = np.mean((gi - mu) * (pi - pm))
            a[i, j] = cov / (var + eps)
            b[i, j] = pm - a[i, j] * mu
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            acc = []
            for k in range(max(i - radius, 0), min(i + radius + 1, h)):
                for m in range(max(j - radius, 0), min(j + radius + 1, w)):
                    acc.append(a[k, m] * guide[i, j] + b[k, m])
            out[i, j] = math.fsum(acc) / len(acc)
    return out


def direct_gaussian_kernel(sigma):
    half = math.ceil(3 * sigma)
    vals = [math.exp(-(t * t) / (2 * sigma * sigma)) for t in range(-half, half + 1)]
    total = math.fsum(vals)
    return [v / total for v in vals]


def naive_gaussian_blur(p, sigma):
    """Non-separable 2-D correlation with a replicate border."""
    k = direct_gaussian_kernel(sigma)
    half = len(k) // 2
    h, w = p.shape
    out = np.empty_like(p)
    for i in range(h):
        for j in range(w):
            acc = []
            for dy in range(-half, half + 1):
                y = min(max(i + dy, 0), h - 1)
                for dx in range(-half, half + 1):
                    x = min(max(j + dx, 0), w - 1)
                    acc.append(k[dy + half] * k[dx + half] * p[y, x])
            out[i, j] = math.fsum(acc)
    return out


def naive_spatial_gaussian(p, sigma):
    """Untruncated spatial Gaussian normalised over the pixels inside the image."""
    h, w = p.shape
    out = np.empty_like(p)
    for i in range(h):
        for j in range(w):
            num = den = 0.0
            for y in range(h):
                for x in range(w):
                    wt = math.exp(-((y - i) ** 2 + (x - j) ** 2) / (2 * sigma * sigma))
                    num += wt * p[y, x]
                    den += wt
            out[i, j] = num / den
    return out


def global_equalization(p, bins):
    """Histogram equalisation by counting: rank of each pixel's bin / n."""
    levels = [min(int(v * bins), bins - 1) for v in p.ravel()]
    n = len(levels)
    counts = [0] * bins
    for lv in levels:
        counts[lv] += 1
    cdf = []
    run = 0
    for c in counts:
        run += c
        cdf.append(run / n)
    return np.array([cdf[lv] for lv in levels]).reshape(p.shape)


def naive_gold_step(x, y, fx, floor=1e-6):
    h, w = x.shape
    out = np.empty_like(x)
    for i in range(h):
        for j in range(w):
            out[i, j] = x[i, j] * y[i, j] / max(fx[i, j], floor)
    return out


def two_pass_psnr(a, b, cap=99.0):
    diffs = [(u - v) ** 2 for u, v in zip(a.to_array().ravel(), b.to_array().ravel())]
    mse = math.fsum(diffs) / len(diffs)
    return cap if mse == 0 else min(cap, 10 * math.log10(1 / mse))


def round_half_up_byte(x):
    from decimal import ROUND_HALF_UP, Decimal

    # the product is taken in floating point, then rounded exactly
    x = min(max(x, 0.0), 1.0)
    return int(Decimal(x * 255.0).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def decode_png_rgb8(data):
    """Minimal PNG decoder for 8-bit truecolour, non-interlaced images."""
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    pos = 8
    idat = b""
    width = height = None
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos:pos + 4])
        ctype = data[pos + 4:pos + 8]
        body = data[pos + 8:pos + 8 + length]
        pos += 12 + length
        if ctype == b"IHDR":
            width, height, depth, color, _, _, interlace = struct.unpack(">IIBBBBB", body)
            assert (depth, color, interlace) == (8, 2, 0)
        elif ctype == b"IDAT":
            idat += body
        elif ctype == b"IEND":
            break
    raw = zlib.decompress(idat)
    stride = width * 3
    rows = []
    prev = bytearray(stride)
    for r in range(height):
        ftype = raw[r * (stride + 1)]
        line = bytearray(raw[r * (stride + 1) + 1:(r + 1) * (stride + 1)])
        for i in range(stride):
            left = line[i - 3] if i >= 3 else 0
            up = prev[i]
            ul = prev[i - 3] if i >= 3 else 0
            if ftype == 1:
                line[i] = (line[i] + left) & 0xFF
            elif ftype == 2:
                line[i] = (line[i] + up) & 0xFF
            elif ftype == 3:
                line[i] = (line[i] + (left + up) // 2) & 0xFF
            elif ftype == 4:
                pa, pb, pc = abs(up - ul), abs(left - ul), abs(left + up - 2 * ul)
                pred = left if pa <= pb and pa <= pc else (up if pb <= pc else ul)
                line[i] = (line[i] + pred) & 0xFF
        rows.append(bytes(line))
        prev = line
    return width, height, b"".join(rows)


# ------------------------------------------------------- synthetic images

def _box_smooth(noise, passes=3, radius=3):
    # repeated box smoothing by array rolls; independent of the library filters
    out = noise
    for _ in range(passes):
        acc = np.zeros_like(out)
        for dy in range(-radius, radius + 1):
            for dx in range(-radius, radius + 1):
                acc += np.roll(np.roll(out, dy, 0), dx, 1)
        out = acc / (2 * radius + 1) ** 2
    return out


def smooth_field(rng, n, lo, hi):
    f = _box_smooth(rng.random((n, n)))
    f = (f - f.min()) / (f.max() - f.min())
    return lo + (hi - lo) * f


def smooth_rgb(rng, n=64, lo=0.15, hi=0.95):
    return RgbImage(*(smooth_field(rng, n, lo, hi) for _ in range(3)))


def textured_rgb(rng, n=64):
    base = _box_smooth(rng.random((n, n)), passes=1, radius=1)
    base = (base - base.min()) / (base.max() - base.min())
    tint = rng.uniform(0.6, 1.0, 3)
    return RgbImage(*(np.clip(base * t, 0, 1) for t in tint))


def hazy(img, veil=0.4):
    return RgbImage(*((1 - veil) * c + veil for c in img.channels()))


def step_texture_suite(n=32):
    """Fixed step-edge images with low-amplitude texture, seeded."""
    rng = np.random.default_rng(20240601)
    yy, xx = np.mgrid[0:n, 0:n]
    masks = [
        xx >= n // 2,
        yy >= n // 2,
        xx + yy >= n,
        (yy - n / 2) ** 2 + (xx - n / 2) ** 2 <= (n / 4) ** 2,
    ]
    suite = []
    for mask in masks:
        img = np.where(mask, 0.8, 0.2) + 0.05 * (rng.random((n, n)) - 0.5)
        suite.append(np.clip(img, 0, 1))
    return suite
