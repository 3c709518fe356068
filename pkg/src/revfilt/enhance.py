"""Reverse-filtering enhancement operators.

Low-light brightening treats darkening as ``v -> v * f(v)**p`` for an
edge-preserving smoother ``f`` and undoes it with ``v / (f(v)**p + r)``.
Haze clarification runs one multiplicative fixed-point (Gold) step against
a haze-like smoother and takes the square root, ``v / sqrt(f(v))``.

Every operator here works on the HSV value channel only; hue and
saturation pass through untouched. The one exception is
:func:`percentile_stretch`, which deliberately rescales each RGB channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .filters import (
    ClaheParams,
    EdgeAwareParams,
    GuidedFilterParams,
    clahe,
    edge_aware_smooth,
    guided_filter,
)
from .image import HsvImage, RgbImage, as_plane, clamp01, hsv_to_rgb, mean_value, percentile, rgb_to_hsv

__all__ = [
    "DIVISION_FLOOR",
    "PSNR_CAP",
    "LlieParams",
    "ClarifyParams",
    "GoldState",
    "Decomposition",
    "auto_p",
    "resolve_p",
    "base_detail_decompose",
    "brighten_value",
    "darken_value",
    "apply_to_value",
    "apply_to_value_hsv",
    "im_beam",
    "simulate_darkening",
    "gold_step",
    "gold_iterate",
    "smoother",
    "clarify_value",
    "inv_sqrt_clarify",
    "percentile_stretch",
    "clarify_pipeline",
    "enhance_gf",
    "psnr",
]

# Floor applied to smoother outputs before dividing by them.
DIVISION_FLOOR = 1e-6
PSNR_CAP = 99.0

AUTO_P_DARK_MEAN = 0.05
AUTO_P_BRIGHT_MEAN = 0.30
AUTO_P_MAX = 1.0
AUTO_P_MIN = 0.8

PlaneFilter = Callable[[np.ndarray, object], np.ndarray]


@dataclass(frozen=True)
class LlieParams:
    """Brightening exponent ``p``, regulariser ``r``, and whether to pick ``p`` from the mean value."""

    p: float = 0.9
    r: float = 0.01
    auto_p: bool = True

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if not self.r >= 0:
            raise ValueError(f"r must be >= 0, got {self.r}")


@dataclass(frozen=True)
class ClarifyParams:
    sigma_s: float = 20.0
    sigma_r: float = 0.4
    gamma: float = 0.5
    use_clahe: bool = False
    stretch: bool = True
    stretch_lo: float = 1.0
    stretch_hi: float = 99.0
    apply_gf_stage: bool = True
    gf: GuidedFilterParams = field(default_factory=GuidedFilterParams)
    clahe: ClaheParams = field(default_factory=ClaheParams)

    def __post_init__(self):
        if not (0 <= self.stretch_lo < self.stretch_hi <= 100):
            raise ValueError(
                f"need 0 <= stretch_lo < stretch_hi <= 100, got {self.stretch_lo}, {self.stretch_hi}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        EdgeAwareParams(self.sigma_s, self.sigma_r)

    @property
    def edge_aware(self) -> EdgeAwareParams:
        return EdgeAwareParams(self.sigma_s, self.sigma_r)


@dataclass(frozen=True)
class GoldState:
    """Observed image ``y``, current iterate ``x`` and iteration count ``k``."""

    y: np.ndarray
    x: np.ndarray
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "y", as_plane(self.y))
        object.__setattr__(self, "x", as_plane(self.x))
        if self.x.shape != self.y.shape:
            raise ValueError("iterate and observation differ in shape")
        if self.k < 0:
            raise ValueError("iteration index must be non-negative")

    @classmethod
    def start(cls, y) -> GoldState:
        y = as_plane(y)
        return cls(y=y, x=y, k=0)


class Decomposition(NamedTuple):
    base_term: np.ndarray
    detail_term: np.ndarray
    nonfinite: np.ndarray


def auto_p(mean_v: float) -> float:
    """Exponent for a given mean value: 1.0 for very dark images, 0.8 for moderately dark."""
    if not 0.0 <= mean_v <= 1.0:
        raise ValueError(f"mean value must lie in [0, 1], got {mean_v}")
    if mean_v <= AUTO_P_DARK_MEAN:
        return AUTO_P_MAX
    if mean_v >= AUTO_P_BRIGHT_MEAN:
        return AUTO_P_MIN
    t = (mean_v - AUTO_P_DARK_MEAN) / (AUTO_P_BRIGHT_MEAN - AUTO_P_DARK_MEAN)
    return AUTO_P_MAX - (AUTO_P_MAX - AUTO_P_MIN) * t


def resolve_p(llie: LlieParams, v) -> float:
    return auto_p(mean_value(v)) if llie.auto_p else llie.p


def base_detail_decompose(v, params: GuidedFilterParams, p: float) -> Decomposition:
    """Split ``v / b**p`` into ``b**(1-p)`` and ``d / b**p`` with ``b`` the guided-filtered base.

    Entries where the base is zero or negative come out non-finite; they
    are reported in ``nonfinite`` rather than raised.
    """
    v = as_plane(v)
    b = guided_filter(v, v, params)
    d = v - b
    with np.errstate(divide="ignore", invalid="ignore"):
        base_term = np.power(b, 1.0 - p)
        detail_term = d / np.power(b, p)
    nonfinite = ~(np.isfinite(base_term) & np.isfinite(detail_term))
    return Decomposition(base_term, detail_term, nonfinite)


def _smoothed_base(v: np.ndarray, gf: GuidedFilterParams) -> np.ndarray:
    # guided filter output may overshoot [0, 1]; powers need a non-negative base
    return clamp01(guided_filter(v, v, gf))


def brighten_value(v, gf: GuidedFilterParams, p: float, r: float) -> np.ndarray:
    """``v / (f(v)**p + r)`` before clamping."""
    v = as_plane(v)
    denom = np.power(_smoothed_base(v, gf), p) + r
    return v / np.maximum(denom, DIVISION_FLOOR)


def darken_value(v, gf: GuidedFilterParams, p: float) -> np.ndarray:
    v = as_plane(v)
    return clamp01(v * np.power(_smoothed_base(v, gf), p))


def apply_to_value_hsv(hsv: HsvImage, fn: Callable[[np.ndarray], np.ndarray]) -> HsvImage:
    return hsv.with_value(clamp01(fn(hsv.v)))


def apply_to_value(img: RgbImage, fn: Callable[[np.ndarray], np.ndarray]) -> RgbImage:
    """Run ``fn`` on the value channel, clamp, and convert back to RGB."""
    return hsv_to_rgb(apply_to_value_hsv(rgb_to_hsv(img), fn))


def im_beam(img: RgbImage, llie: LlieParams = LlieParams(),
            gf: GuidedFilterParams = GuidedFilterParams()) -> RgbImage:
    """Brighten a low-light image by reversing the ``v * f(v)**p`` darkening model."""
    hsv = rgb_to_hsv(img)
    p = resolve_p(llie, hsv.v)
    return hsv_to_rgb(apply_to_value_hsv(hsv, lambda v: brighten_value(v, gf, p, llie.r)))


def simulate_darkening(img: RgbImage, p: float,
                       gf: GuidedFilterParams = GuidedFilterParams()) -> RgbImage:
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return apply_to_value(img, lambda v: darken_value(v, gf, p))


def gold_step(state: GoldState, filter: PlaneFilter, params) -> GoldState:
    """One multiplicative fixed-point step ``x <- x * (y / filter(x))``."""
    fx = np.maximum(filter(state.x, params), DIVISION_FLOOR)
    # ratio first: an identity filter then returns y bit-exactly on the first step
    return replace(state, x=state.x * (state.y / fx), k=state.k + 1)


def gold_iterate(y, filter: PlaneFilter, params, steps: int) -> GoldState:
    state = GoldState.start(y)
    for _ in range(steps):
        state = gold_step(state, filter, params)
    return state


def _guided_self(v, params: GuidedFilterParams) -> np.ndarray:
    return guided_filter(v, v, params)


def smoother(kind: str) -> PlaneFilter:
    """Plane filter for ``kind``: ``"amf"`` (edge-aware smoother) or ``"gf"`` (guided filter)."""
    if kind == "amf":
        return edge_aware_smooth
    if kind == "gf":
        return _guided_self
    raise ValueError(f"unknown filter kind {kind!r}; expected 'amf' or 'gf'")


def clarify_value(v, kind: str, params, gamma: float = 0.5) -> np.ndarray:
    """One Gold step from ``x0 = v`` followed by gamma correction, clamped.

    With ``gamma = 1/2`` this is ``v / sqrt(filter(v))``.
    """
    v = as_plane(v)
    fv = np.maximum(smoother(kind)(v, params), DIVISION_FLOOR)
    if gamma == 0.5:
        return clamp01(v / np.sqrt(fv))
    return clamp01(np.power(v * v / fv, gamma))


def inv_sqrt_clarify(img: RgbImage, kind: str, params, gamma: float = 0.5) -> RgbImage:
    return apply_to_value(img, lambda v: clarify_value(v, kind, params, gamma))


def percentile_stretch(img: RgbImage, lo: float = 1.0, hi: float = 99.0) -> RgbImage:
    """Map each channel's ``lo``/``hi`` percentiles to 0/1 linearly, clamping outside."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    out = []
    for ch in img.channels():
        a = percentile(ch, lo)
        b = percentile(ch, hi)
        if b - a < 1e-6:
            out.append(ch)
        else:
            out.append(clamp01((ch - a) / (b - a)))
    return RgbImage(*out)


def clarify_pipeline(img: RgbImage, params: ClarifyParams = ClarifyParams()) -> RgbImage:
    """Dehaze: edge-aware inverse-sqrt stage, then optionally the guided-filter stage.

    Optional CLAHE runs on the value channel right after the first stage;
    the percentile stretch (when enabled) follows each stage.
    """
    def stage_one(v):
        out = clarify_value(v, "amf", params.edge_aware, params.gamma)
        return clahe(out, params.clahe) if params.use_clahe else out

    out = apply_to_value(img, stage_one)
    if params.stretch:
        out = percentile_stretch(out, params.stretch_lo, params.stretch_hi)
    if params.apply_gf_stage:
        out = inv_sqrt_clarify(out, "gf", params.gf, params.gamma)
        if params.stretch:
            out = percentile_stretch(out, params.stretch_lo, params.stretch_hi)
    return out


def enhance_gf(img: RgbImage, gf: GuidedFilterParams = GuidedFilterParams(),
               stretch: tuple[float, float] | None = (1.0, 99.0)) -> RgbImage:
    """Guided-filter inverse-sqrt enhancement on its own, for already-dehazed images."""
    out = inv_sqrt_clarify(img, "gf", gf)
    if stretch is not None:
        out = percentile_stretch(out, *stretch)
    return out


def psnr(a: RgbImage, b: RgbImage) -> float:
    """Peak signal-to-noise ratio in dB for unit peak; identical images give ``PSNR_CAP``."""
    if a.shape != b.shape:
        raise ValueError(f"images differ in shape: {a.shape} vs {b.shape}")
    mse = float(np.mean((a.to_array() - b.to_array()) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(1.0 / mse))
