"""Directional wavelet-packet and cross-boosted WNNM image denoising."""

import json as _json

from ._core import (
    NOISE_GENERATOR,
    InvalidStateError,
    add_gaussian_noise,
    direction_count,
    psnr,
    qwp2d_block,
    qwp2d_roundtrip,
    qwpdn,
    read_dump,
    read_image,
    set_thread_count,
    ssim,
    ssim_map,
    thread_count,
    wnnm,
    write_pgm,
)
from ._core import denoise as _denoise
from ._core import validate_report as _validate_report


def denoise(clean, method, sigma, seed=0, image_name="image", iterations=3, variant="auto"):
    """Noise `clean`, restore it with `method`; returns (noisy, restored, report dict)."""
    noisy, restored, text = _denoise(clean, method, sigma, seed, image_name, iterations, variant)
    return noisy, restored, _json.loads(text)


def validate_report(report, bench=False):
    """Validation errors of a report dict; an empty list means valid."""
    return _validate_report(_json.dumps(report), bench)


__all__ = [
    "NOISE_GENERATOR",
    "InvalidStateError",
    "add_gaussian_noise",
    "denoise",
    "direction_count",
    "psnr",
    "qwp2d_block",
    "qwp2d_roundtrip",
    "qwpdn",
    "read_dump",
    "read_image",
    "set_thread_count",
    "ssim",
    "ssim_map",
    "thread_count",
    "validate_report",
    "wnnm",
    "write_pgm",
]
