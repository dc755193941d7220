"""Green-channel-guided collaborative denoiser for RGB images and video.

The green channel of a Bayer-pattern sensor is sampled twice as densely as
red or blue, so after demosaicing it carries the cleanest structure. This
package exploits that: patch matching is guided by the green plane (falling
back to the channel mean when green is weak), matched patches are stacked
into an R/G/G/B tensor group, filtered by hard thresholding in a learned
separable transform domain, and averaged back into the frame.

Backend selection: the pixel-loop kernels (patch search, patch aggregation)
exist as compiled and pure-numpy twins. Set GCPDENOISE_NUMBA=0 to force the
numpy path, =1 to require the compiled path, or leave unset for automatic
selection; set_backend() switches at runtime.
"""

from ._backend import active_backend, set_backend
from .corpus import synthetic_corpus
from .denoise import (
    denoise_group,
    denoise_image,
    denoise_video,
    hard_threshold,
    threshold_value,
)
from .image import (
    DenoiseConfig,
    Image,
    PatchRef,
    RGGBGroup,
    VideoSequence,
    add_awgn,
    add_awgn_channels,
    build_group,
    extract_patch,
    quantize,
    rgb_to_rggb,
    rggb_to_rgb,
)
from .io import (
    load_image,
    load_png,
    load_ppm,
    load_video,
    save_image,
    save_png,
    save_ppm,
    save_video,
)
from .metrics import MetricsReport, compute_metrics, psnr, snr_per_channel, ssim
from .runner import (
    DenoiseReportRow,
    SearchRateRow,
    run_search_rate,
    run_synth_denoise,
)
from .search import (
    SearchScheme,
    channel_dominance,
    find_similar,
    find_similar_video,
    patch_distance,
    reference_grid,
    success_rate,
)
from .tsvd import (
    CoeffGroup,
    TransformSet,
    bcirc,
    build_transform,
    fft_mode3,
    forward_transform,
    ifft_mode3,
    inverse_transform,
    learn_group_pca,
    learn_slice_bases,
    t_identity,
    t_product,
    t_svd,
    t_transpose,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # backend
    "active_backend",
    "set_backend",
    # data types
    "Image",
    "VideoSequence",
    "PatchRef",
    "RGGBGroup",
    "DenoiseConfig",
    "TransformSet",
    "CoeffGroup",
    "MetricsReport",
    "DenoiseReportRow",
    "SearchRateRow",
    "SearchScheme",
    # patches and noise
    "extract_patch",
    "rgb_to_rggb",
    "rggb_to_rgb",
    "build_group",
    "add_awgn",
    "add_awgn_channels",
    "quantize",
    # tensor algebra and transforms
    "fft_mode3",
    "ifft_mode3",
    "bcirc",
    "t_identity",
    "t_product",
    "t_transpose",
    "t_svd",
    "learn_slice_bases",
    "learn_group_pca",
    "build_transform",
    "forward_transform",
    "inverse_transform",
    # search
    "reference_grid",
    "channel_dominance",
    "patch_distance",
    "find_similar",
    "find_similar_video",
    "success_rate",
    # denoising
    "threshold_value",
    "hard_threshold",
    "denoise_group",
    "denoise_image",
    "denoise_video",
    # metrics
    "psnr",
    "ssim",
    "snr_per_channel",
    "compute_metrics",
    # files
    "load_image",
    "save_image",
    "load_ppm",
    "save_ppm",
    "load_png",
    "save_png",
    "load_video",
    "save_video",
    # benchmark harness
    "synthetic_corpus",
    "run_synth_denoise",
    "run_search_rate",
]
