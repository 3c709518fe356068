"""Reverse-filtering image enhancement: low-light brightening and haze clarification."""

from ._kernels import available_backends, backend_name, set_backend, use_backend
from .enhance import (
    ClarifyParams,
    GoldState,
    LlieParams,
    auto_p,
    base_detail_decompose,
    clarify_pipeline,
    enhance_gf,
    gold_step,
    im_beam,
    inv_sqrt_clarify,
    percentile_stretch,
    psnr,
    simulate_darkening,
)
from .filters import (
    ClaheParams,
    EdgeAwareParams,
    GuidedFilterParams,
    box_filter,
    clahe,
    edge_aware_smooth,
    gaussian_blur,
    gaussian_range_oracle,
    guided_filter,
)
from .image import HsvImage, RgbImage, clamp01, hsv_to_rgb, mean_value, percentile, rgb_to_hsv
from .io import load_image, save_image

__version__ = "0.1.0"
