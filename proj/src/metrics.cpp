#include "qwp/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qwp {
namespace {

constexpr int kRadius = 5;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void require_same(const ImageGrid& a, const ImageGrid& b, const char* who) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(who) + ": image dimensions differ");
    if (a.empty()) throw std::invalid_argument(std::string(who) + ": empty image");
}

std::array<double, 2 * kRadius + 1> gaussian_taps() {
    std::array<double, 2 * kRadius + 1> taps{};
    double total = 0.0;
    for (int i = -kRadius; i <= kRadius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * kWindowSigma * kWindowSigma));
        taps[static_cast<std::size_t>(i + kRadius)] = v;
        total += v;
    }
    for (double& v : taps) v /= total;
    return taps;
}

// Half-sample reflection: -1 -> 0, n -> n-1.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
    const auto len = static_cast<std::ptrdiff_t>(n);
    const std::ptrdiff_t period = 2 * len;
    std::ptrdiff_t r = i % period;
    if (r < 0) r += period;
    if (r >= len) r = period - 1 - r;
    return static_cast<std::size_t>(r);
}

ImageGrid gaussian_filter(const ImageGrid& x) {
    static const auto taps = gaussian_taps();
    const std::size_t rows = x.rows();
    const std::size_t cols = x.cols();
    ImageGrid tmp(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int t = -kRadius; t <= kRadius; ++t) {
                acc += taps[static_cast<std::size_t>(t + kRadius)] *
                       x(r, reflect(static_cast<std::ptrdiff_t>(c) + t, cols));
            }
            tmp(r, c) = acc;
        }
    }
    ImageGrid out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int t = -kRadius; t <= kRadius; ++t) {
                acc += taps[static_cast<std::size_t>(t + kRadius)] *
                       tmp(reflect(static_cast<std::ptrdiff_t>(r) + t, rows), c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

ImageGrid product(const ImageGrid& a, const ImageGrid& b) {
    ImageGrid out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    return out;
}

}  // namespace

double psnr(const ImageGrid& x, const ImageGrid& x_hat) {
    require_same(x, x_hat, "psnr");
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x.data()[i] - x_hat.data()[i];
        sse += d * d;
    }
    if (sse == 0.0) return kPsnrCapDb;
    const double value = 10.0 * std::log10(static_cast<double>(x.size()) * 255.0 * 255.0 / sse);
    return std::min(value, kPsnrCapDb);
}

ImageGrid ssim_map(const ImageGrid& x, const ImageGrid& x_hat) {
    require_same(x, x_hat, "ssim");
    const ImageGrid mu_x = gaussian_filter(x);
    const ImageGrid mu_y = gaussian_filter(x_hat);
    const ImageGrid xx = gaussian_filter(product(x, x));
    const ImageGrid yy = gaussian_filter(product(x_hat, x_hat));
    const ImageGrid xy = gaussian_filter(product(x, x_hat));
    ImageGrid out(x.rows(), x.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double mx = mu_x.data()[i];
        const double my = mu_y.data()[i];
        const double vx = xx.data()[i] - mx * mx;
        const double vy = yy.data()[i] - my * my;
        const double cxy = xy.data()[i] - mx * my;
        const double num = (2.0 * mx * my + kC1) * (2.0 * cxy + kC2);
        const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
        out.data()[i] = num / den;
    }
    return out;
}

double ssim(const ImageGrid& x, const ImageGrid& x_hat) {
    require_same(x, x_hat, "ssim");
    if (x == x_hat) return 1.0;
    const ImageGrid map = ssim_map(x, x_hat);
    double acc = 0.0;
    for (double v : map.data()) acc += v;
    return acc / static_cast<double>(map.size());
}

MetricReport evaluate(const ImageGrid& clean, const ImageGrid& estimate) {
    return {psnr(clean, estimate), ssim(clean, estimate)};
}

}  // namespace qwp
