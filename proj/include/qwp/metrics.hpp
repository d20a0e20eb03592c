#pragma once

#include "qwp/grid.hpp"

namespace qwp {

inline constexpr double kPsnrCapDb = 400.0;

struct MetricReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

/// 10 log10(K 255^2 / sum (x - x_hat)^2), K the pixel count; capped at 400 dB.
double psnr(const ImageGrid& x, const ImageGrid& x_hat);

/// Mean SSIM index for 8-bit data: 11 x 11 Gaussian window with sigma 1.5,
/// C1 = (0.01 * 255)^2, C2 = (0.03 * 255)^2, half-sample symmetric padding.
double ssim(const ImageGrid& x, const ImageGrid& x_hat);

/// Local SSIM map underlying ssim().
ImageGrid ssim_map(const ImageGrid& x, const ImageGrid& x_hat);

MetricReport evaluate(const ImageGrid& clean, const ImageGrid& estimate);

}  // namespace qwp
