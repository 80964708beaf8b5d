"""Room impulse response denoising: wavelet thresholding plus dictionary
learning on the approximation band, with decay-time evaluation helpers."""

from rirdenoise._core import (
    __version__,
    decompose,
    default_config,
    default_modal_spec,
    denoise,
    denoise_baseline,
    dynamic_improvement,
    estimate_dt60,
    exact_mode_dt60,
    fit_envelope,
    gen_modal,
    gen_shaped_noise,
    mix_at_snr,
    reconstruct,
    schroeder_edc,
)

__all__ = [
    "__version__",
    "decompose",
    "default_config",
    "default_modal_spec",
    "denoise",
    "denoise_baseline",
    "dynamic_improvement",
    "estimate_dt60",
    "exact_mode_dt60",
    "fit_envelope",
    "gen_modal",
    "gen_shaped_noise",
    "mix_at_snr",
    "reconstruct",
    "schroeder_edc",
]
