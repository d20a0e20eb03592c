#pragma once

// Deterministic synthetic inputs and independent reference computations
// shared by the unit tests and the acceptance binary.

#include "qwp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace qwp::testing {

inline RealVec random_signal(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 255.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    RealVec x(n);
    for (auto& v : x) v = dist(rng);
    return x;
}

inline ImageGrid random_image(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 255.0) {
    return ImageGrid(n, n, random_signal(n * n, seed, lo, hi));
}

inline ImageGrid constant_image(std::size_t n, double value) { return ImageGrid(n, n, value); }

/// Ridge pattern whose orientation and frequency drift across the image.
inline ImageGrid ridge_texture(std::size_t n) {
    ImageGrid x(n, n);
    const double s = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const double u = static_cast<double>(k) / s - 0.45;
            const double v = static_cast<double>(m) / s - 0.55;
            const double r = std::hypot(u, v);
            const double phase = 2.0 * std::numbers::pi * (22.0 * r + 6.0 * u * v + 3.0 * std::sin(5.0 * v));
            x(k, m) = 128.0 + 100.0 * std::cos(phase) * std::exp(-1.5 * r * r);
        }
    }
    return x;
}

/// Piecewise-smooth scene: shaded background, a disk, a rectangle and a
/// striped patch.
inline ImageGrid synthetic_scene(std::size_t n) {
    ImageGrid x(n, n);
    const double s = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const double u = static_cast<double>(k) / s;
            const double v = static_cast<double>(m) / s;
            double val = 60.0 + 80.0 * u + 30.0 * std::sin(3.0 * v);
            if (std::hypot(u - 0.35, v - 0.3) < 0.18) val = 200.0;
            if (u > 0.6 && u < 0.85 && v > 0.15 && v < 0.5) val = 30.0;
            if (u > 0.2 && u < 0.8 && v > 0.6 && v < 0.9) {
                val = 128.0 + 70.0 * std::cos(2.0 * std::numbers::pi * (0.11 * static_cast<double>(k) +
                                                                        0.07 * static_cast<double>(m)));
            }
            x(k, m) = val;
        }
    }
    return x;
}

/// Direct O(N^2) DFT, X[n] = sum_k x[k] e^{-2 pi i n k / N}.
inline ComplexVec direct_dft(const ComplexVec& x) {
    const std::size_t n = x.size();
    ComplexVec out(n);
    for (std::size_t f = 0; f < n; ++f) {
        cdouble acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>((f * k) % n) / static_cast<double>(n);
            acc += x[k] * std::polar(1.0, angle);
        }
        out[f] = acc;
    }
    return out;
}

inline double max_abs_diff(const RealVec& a, const RealVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const ImageGrid& a, const ImageGrid& b) { return max_abs_diff(a.data(), b.data()); }

inline double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double energy(const RealVec& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

inline double energy(const ComplexVec& x) {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    return e;
}

inline double energy(const ComplexGrid& x) { return energy(x.data()); }

/// 10 log10(K 255^2 / sum of squared errors) for signals of any length.
inline double signal_psnr(const RealVec& a, const RealVec& b) {
    double sse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sse += (a[i] - b[i]) * (a[i] - b[i]);
    if (sse == 0.0) return 400.0;
    return 10.0 * std::log10(static_cast<double>(a.size()) * 255.0 * 255.0 / sse);
}

inline double image_psnr(const ImageGrid& a, const ImageGrid& b) { return signal_psnr(a.data(), b.data()); }

/// Circular shift: out[k] = x[(k - shift) mod N].
inline RealVec circular_shift(const RealVec& x, std::size_t shift) {
    const std::size_t n = x.size();
    RealVec out(n);
    for (std::size_t k = 0; k < n; ++k) out[(k + shift) % n] = x[k];
    return out;
}

inline double sample_std(const RealVec& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(x.size() - 1));
}

}  // namespace qwp::testing
