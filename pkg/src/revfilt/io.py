"""8-bit PNG and binary PPM (P6) reading and writing."""

from __future__ import annotations

import io as _io
import re
from pathlib import Path

import numpy as np

from .image import RgbImage

__all__ = [
    "ImageIOError",
    "UnreadableImageError",
    "UnsupportedFormatError",
    "DimensionOverflowError",
    "MAX_PIXELS",
    "load_image",
    "save_image",
    "quantize",
    "encode_ppm",
    "decode_ppm",
]

# 2^28 pixels is ~800 MB of float64 planes; anything larger is rejected up front.
MAX_PIXELS = 1 << 28
MAX_SIDE = 1 << 16

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_PPM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


class ImageIOError(Exception):
    """Base class for image decode/encode failures."""


class UnreadableImageError(ImageIOError):
    """The file is missing, unreadable, truncated or corrupt."""


class UnsupportedFormatError(ImageIOError):
    """The file is an image, but not a format or bit depth handled here."""


class DimensionOverflowError(ImageIOError):
    """Header dimensions are zero or exceed the supported limits."""


def _check_dims(width: int, height: int) -> None:
    if width <= 0 or height <= 0:
        raise DimensionOverflowError(f"invalid dimensions {width}x{height}")
    if width > MAX_SIDE or height > MAX_SIDE or width * height > MAX_PIXELS:
        raise DimensionOverflowError(f"dimensions {width}x{height} exceed limits")


def quantize(x) -> np.ndarray:
    """Map reals to bytes: ``round(clamp(x, 0, 1) * 255)``, halves away from zero."""
    y = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0) * 255.0
    q = np.floor(y)
    # compare the exact fraction; floor(y + 0.5) misrounds just below a half
    return (q + (y - q >= 0.5)).astype(np.uint8)


def _to_bytes(img: RgbImage) -> np.ndarray:
    return quantize(img.to_array())


def _from_bytes(arr: np.ndarray) -> RgbImage:
    return RgbImage.from_array(arr.astype(np.float64) / 255.0)


def decode_ppm(data: bytes) -> RgbImage:
    """Decode a binary P6 PPM with maxval 255."""
    if not data.startswith(b"P6"):
        raise UnsupportedFormatError("not a binary PPM (P6)")
    pos = 2
    fields = []
    for _ in range(3):
        m = _PPM_TOKEN.match(data, pos)
        if m is None:
            raise UnreadableImageError("truncated PPM header")
        fields.append(m.group(1))
        pos = m.end()
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise UnreadableImageError(f"malformed PPM header fields {fields!r}") from None
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise UnreadableImageError("missing whitespace after PPM header")
    pos += 1
    if maxval != 255:
        raise UnsupportedFormatError(f"PPM maxval {maxval} unsupported (only 8-bit)")
    _check_dims(width, height)
    need = width * height * 3
    body = data[pos:pos + need]
    if len(body) < need:
        raise UnreadableImageError(
            f"truncated PPM pixel data: {len(body)} of {need} bytes")
    arr = np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)
    return _from_bytes(arr)


def encode_ppm(img: RgbImage) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + _to_bytes(img).tobytes()


def _decode_png(data: bytes) -> RgbImage:
    from PIL import Image

    # IHDR is always the first chunk: magic(8) len(4) type(4) w(4) h(4) depth(1)
    if len(data) < 33 or data[12:16] != b"IHDR":
        raise UnreadableImageError("PNG is missing its IHDR chunk")
    width = int.from_bytes(data[16:20], "big")
    height = int.from_bytes(data[20:24], "big")
    _check_dims(width, height)
    if data[24] > 8:
        raise UnsupportedFormatError(f"PNG bit depth {data[24]} unsupported (only 8-bit)")
    try:
        with Image.open(_io.BytesIO(data)) as im:
            im.load()
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except Exception as exc:
        raise UnreadableImageError(f"cannot decode PNG: {exc}") from exc
    return _from_bytes(arr)


def _encode_png(img: RgbImage) -> bytes:
    from PIL import Image

    buf = _io.BytesIO()
    Image.fromarray(_to_bytes(img)).save(buf, format="PNG")
    return buf.getvalue()


def load_image(path) -> RgbImage:
    """Read an 8-bit PNG or P6 PPM into an :class:`RgbImage` with values in [0, 1].

    Alpha channels are discarded. The format is detected from the file
    contents, not the extension.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise UnreadableImageError(f"cannot read {path}: {exc}") from exc
    if data.startswith(_PNG_MAGIC):
        return _decode_png(data)
    if data.startswith(b"P6"):
        return decode_ppm(data)
    if data[:2] in (b"P1", b"P2", b"P3", b"P4", b"P5", b"P7"):
        raise UnsupportedFormatError(f"{path}: only binary P6 PPM is supported")
    raise UnsupportedFormatError(f"{path}: not a PNG or P6 PPM file")


def save_image(img: RgbImage, path) -> None:
    """Write ``img`` as 8-bit PNG (``.png``) or P6 PPM (``.ppm``)."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".png":
        data = _encode_png(img)
    elif ext in (".ppm", ".pnm"):
        data = encode_ppm(img)
    else:
        raise UnsupportedFormatError(f"unsupported output extension {ext!r}")
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc
