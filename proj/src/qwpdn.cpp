#include "qwp/qwpdn.hpp"

#include "qwp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qwp {
namespace {

constexpr double kMadScale = 0.6745;

std::size_t mirror_index(std::ptrdiff_t i, std::size_t n) {
    // Whole-sample symmetric reflection about 0 and n-1.
    const auto period = static_cast<std::ptrdiff_t>(2 * n - 2);
    if (period == 0) return 0;
    std::ptrdiff_t r = i % period;
    if (r < 0) r += period;
    if (r >= static_cast<std::ptrdiff_t>(n)) r = period - r;
    return static_cast<std::size_t>(r);
}

ImageGrid magnitudes(const ComplexGrid& c) {
    ImageGrid out(c.rows(), c.cols());
    for (std::size_t i = 0; i < c.size(); ++i) out.data()[i] = std::abs(c.data()[i]);
    return out;
}

// Box sums along one axis with periodic wrap: out[k] = sum_{t=-h}^{h'} in[k+t].
void periodic_box(std::span<const double> in, std::span<double> out, int window) {
    const auto n = static_cast<std::ptrdiff_t>(in.size());
    const std::ptrdiff_t lo = -window / 2;
    const std::ptrdiff_t hi = window / 2 - 1;
    auto at = [&](std::ptrdiff_t i) { return in[static_cast<std::size_t>(((i % n) + n) % n)]; };
    double acc = 0.0;
    for (std::ptrdiff_t t = lo; t <= hi; ++t) acc += at(t);
    out[0] = acc;
    for (std::ptrdiff_t k = 1; k < n; ++k) {
        acc += at(k + hi) - at(k - 1 + lo);
        out[static_cast<std::size_t>(k)] = acc;
    }
}

}  // namespace

// ---- parameters --------------------------------------------------------------

int DenoiseParams::deepest_level() const {
    if (levels.empty()) throw std::invalid_argument("DenoiseParams: no restoration levels");
    return *std::max_element(levels.begin(), levels.end()) + 1;
}

namespace {
template <typename T>
T per_level(const std::vector<T>& values, const std::vector<int>& levels, int level, const char* what) {
    if (values.size() == 1) return values.front();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == level && i < values.size()) return values[i];
    }
    throw std::invalid_argument(std::string("DenoiseParams: no ") + what + " for level " + std::to_string(level));
}
}  // namespace

int DenoiseParams::window_for(int level) const { return per_level(window_sizes, levels, level, "window size"); }

double DenoiseParams::weight_for(int level) const { return per_level(weights, levels, level, "weight"); }

std::size_t DenoiseParams::margin_for(std::size_t n) const { return margin.value_or(n / 4); }

void DenoiseParams::validate(std::size_t n) const {
    if (spline_order < 1) throw std::invalid_argument("DenoiseParams: spline order must be >= 1");
    if (levels.empty()) throw std::invalid_argument("DenoiseParams: no restoration levels");
    for (int m : levels) {
        if (m < 1) throw std::invalid_argument("DenoiseParams: restoration levels must be >= 1");
    }
    if (window_sizes.size() != 1 && window_sizes.size() != levels.size()) {
        throw std::invalid_argument("DenoiseParams: need one window size or one per level");
    }
    if (weights.size() != 1 && weights.size() != levels.size()) {
        throw std::invalid_argument("DenoiseParams: need one weight or one per level");
    }
    for (int w : window_sizes) {
        if (w < 2 || w % 2 != 0) throw std::invalid_argument("DenoiseParams: window sizes must be even and >= 2");
    }
    for (double a : weights) {
        if (!(a > 0.0)) throw std::invalid_argument("DenoiseParams: weights must be positive");
    }
    if (n == 0 || !is_power_of_two(n)) {
        throw std::invalid_argument("qwpdn: image side must be a power of two, got " + std::to_string(n));
    }
    const std::size_t t = margin_for(n);
    if (t > n / 2) throw std::invalid_argument("DenoiseParams: extension margin exceeds N/2");
    check_decomposable(n + 2 * t, deepest_level(), "qwpdn");
}

// ---- building blocks -----------------------------------------------------------

ImageGrid symmetric_extend(const ImageGrid& x, std::size_t margin) {
    if (x.empty()) throw std::invalid_argument("symmetric_extend: empty image");
    if (margin > x.rows() / 2 || margin > x.cols() / 2) {
        throw std::invalid_argument("symmetric_extend: margin " + std::to_string(margin) + " exceeds half the image side");
    }
    const std::size_t rows = x.rows() + 2 * margin;
    const std::size_t cols = x.cols() + 2 * margin;
    const auto t = static_cast<std::ptrdiff_t>(margin);
    ImageGrid out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t sr = mirror_index(static_cast<std::ptrdiff_t>(r) - t, x.rows());
        for (std::size_t c = 0; c < cols; ++c) {
            out(r, c) = x(sr, mirror_index(static_cast<std::ptrdiff_t>(c) - t, x.cols()));
        }
    }
    return out;
}

ImageGrid crop(const ImageGrid& x, std::size_t margin, std::size_t n) {
    if (margin + n > x.rows() || margin + n > x.cols()) throw std::invalid_argument("crop: window exceeds image");
    ImageGrid out(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out(r, c) = x(r + margin, c + margin);
    return out;
}

double estimate_noise_std(const ComplexGrid& block) {
    if (block.empty()) throw std::invalid_argument("estimate_noise_std: empty block");
    RealVec mags(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) mags[i] = std::abs(block.data()[i]);
    const std::size_t mid = mags.size() / 2;
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid), mags.end());
    double median = mags[mid];
    if (mags.size() % 2 == 0) {
        const double lower = *std::max_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }
    return median / kMadScale;
}

double gray_noise_std(double block_estimate) {
    return block_estimate * kMadScale / (2.0 * std::sqrt(std::numbers::ln2));
}

ImageGrid local_variance(const ImageGrid& c, int window) {
    if (window < 2 || window % 2 != 0) throw std::invalid_argument("local_variance: window must be even and >= 2");
    const std::size_t rows = c.rows();
    const std::size_t cols = c.cols();
    ImageGrid sq(rows, cols);
    for (std::size_t i = 0; i < c.size(); ++i) sq.data()[i] = c.data()[i] * c.data()[i];
    ImageGrid horiz(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) periodic_box(sq.row(r), horiz.row(r), window);
    ImageGrid out(rows, cols);
    RealVec col(rows), sums(rows);
    const double norm = 1.0 / (static_cast<double>(window) * window);
    for (std::size_t q = 0; q < cols; ++q) {
        for (std::size_t r = 0; r < rows; ++r) col[r] = horiz(r, q);
        periodic_box(col, sums, window);
        for (std::size_t r = 0; r < rows; ++r) out(r, q) = std::max(0.0, sums[r] * norm);
    }
    return out;
}

ImageGrid interleave_children(const ImageGrid& c00, const ImageGrid& c01, const ImageGrid& c10,
                              const ImageGrid& c11) {
    if (!c00.same_shape(c01) || !c00.same_shape(c10) || !c00.same_shape(c11)) {
        throw std::invalid_argument("interleave_children: blocks differ in size");
    }
    ImageGrid out(2 * c00.rows(), 2 * c00.cols());
    for (std::size_t k = 0; k < c00.rows(); ++k) {
        for (std::size_t n = 0; n < c00.cols(); ++n) {
            out(2 * k, 2 * n) = c00(k, n);
            out(2 * k, 2 * n + 1) = c01(k, n);
            out(2 * k + 1, 2 * n) = c10(k, n);
            out(2 * k + 1, 2 * n + 1) = c11(k, n);
        }
    }
    return out;
}

Quad deinterleave(const ImageGrid& x) {
    if (x.rows() % 2 != 0 || x.cols() % 2 != 0) throw std::invalid_argument("deinterleave: odd dimensions");
    const std::size_t h = x.rows() / 2;
    const std::size_t w = x.cols() / 2;
    Quad q{ImageGrid(h, w), ImageGrid(h, w), ImageGrid(h, w), ImageGrid(h, w)};
    for (std::size_t k = 0; k < h; ++k) {
        for (std::size_t n = 0; n < w; ++n) {
            q.c00(k, n) = x(2 * k, 2 * n);
            q.c01(k, n) = x(2 * k, 2 * n + 1);
            q.c10(k, n) = x(2 * k + 1, 2 * n);
            q.c11(k, n) = x(2 * k + 1, 2 * n + 1);
        }
    }
    return q;
}

cdouble bivariate_shrink(cdouble c_m, double child_magnitude, double sigma_e, double sigma_marg) {
    if (sigma_e <= 0.0) return c_m;
    if (sigma_marg <= 0.0) return 0.0;
    const double r = std::hypot(std::abs(c_m), child_magnitude);
    if (r <= 0.0) return 0.0;
    const double threshold = std::numbers::sqrt3 * sigma_e * sigma_e / sigma_marg;
    const double gain = std::max(r - threshold, 0.0) / r;
    return gain * c_m;
}

cdouble bivariate_shrink(cdouble c_m, cdouble c_child, double sigma_e, double sigma_marg) {
    return bivariate_shrink(c_m, std::abs(c_child), sigma_e, sigma_marg);
}

ShrinkContext make_shrink_context(const ComplexGrid& block, const ImageGrid& child_magnitudes, double sigma_e,
                                  int window) {
    if (block.rows() != child_magnitudes.rows() || block.cols() != child_magnitudes.cols()) {
        throw std::invalid_argument("make_shrink_context: child array does not match block size");
    }
    ShrinkContext ctx;
    ctx.sigma_e = sigma_e;
    ctx.joint_child = child_magnitudes;
    ctx.marginal_sigma = local_variance(magnitudes(block), window);
    const double noise_var = sigma_e * sigma_e;
    for (double& v : ctx.marginal_sigma.data()) v = std::sqrt(std::max(v - noise_var, 0.0));
    return ctx;
}

LevelSet shrink_level(const LevelSet& level, const LevelSet& children, double sigma_e, int window, bool shrink) {
    if (children.level != level.level + 1 || children.sign != level.sign) {
        throw invalid_state("shrink_level: children must be the next level of the same sign");
    }
    if (children.block_size * 2 != level.block_size) throw invalid_state("shrink_level: child block size mismatch");
    LevelSet out = level;
    const int bands = static_cast<int>(level.bands());
    const double effective_sigma = shrink ? sigma_e : 0.0;
    parallel_for(level.blocks.size(), [&](std::size_t idx) {
        const int j = static_cast<int>(idx) / bands;
        const int l = static_cast<int>(idx) % bands;
        const ImageGrid joint =
            interleave_children(magnitudes(children.at(2 * j, 2 * l)), magnitudes(children.at(2 * j, 2 * l + 1)),
                                magnitudes(children.at(2 * j + 1, 2 * l)), magnitudes(children.at(2 * j + 1, 2 * l + 1)));
        const ComplexGrid& src = level.at(j, l);
        const ShrinkContext ctx = make_shrink_context(src, joint, effective_sigma, window);
        ComplexGrid& dst = out.blocks[idx];
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst.data()[i] = bivariate_shrink(src.data()[i], ctx.joint_child.data()[i], ctx.sigma_e,
                                             ctx.marginal_sigma.data()[i]);
        }
    });
    return out;
}

double coefficient_noise_std(const QwpDecomposition& d) {
    // White noise of STD sigma gives qWP coefficients with E|z|^2 = 4 sigma^2.
    const double block_estimate = estimate_noise_std(d.level(Sign::plus, 1).at(1, 1));
    return 2.0 * gray_noise_std(block_estimate);
}

ImageGrid denoise_single_level(const QwpDecomposition& d, int level, const DenoiseParams& params,
                               const LevelSet& child_plus, const LevelSet& child_minus, double sigma_e,
                               std::size_t margin, std::size_t n) {
    if (!d.has_level(level)) throw invalid_state("denoise_single_level: level " + std::to_string(level) + " missing");
    const int window = params.window_for(level);
    const LevelSet plus = shrink_level(d.level(Sign::plus, level), child_plus, sigma_e, window, params.shrink);
    const LevelSet minus = shrink_level(d.level(Sign::minus, level), child_minus, sigma_e, window, params.shrink);
    return crop(synthesize_level(plus, minus, d.spline_order, d.size), margin, n);
}

ImageGrid denoise_single_level(const QwpDecomposition& d, int level, const DenoiseParams& params,
                               std::size_t margin, std::size_t n) {
    if (!d.has_level(level + 1)) {
        throw invalid_state("denoise_single_level: level " + std::to_string(level + 1) + " missing");
    }
    return denoise_single_level(d, level, params, d.level(Sign::plus, level + 1), d.level(Sign::minus, level + 1),
                                coefficient_noise_std(d), margin, n);
}

QwpdnResult qwpdn_detailed(const ImageGrid& noisy, const DenoiseParams& params) {
    if (!noisy.is_square()) throw std::invalid_argument("qwpdn: image must be square");
    const std::size_t n = noisy.rows();
    params.validate(n);
    const std::size_t margin = params.margin_for(n);
    const int deepest = params.deepest_level();
    const int shallowest = *std::min_element(params.levels.begin(), params.levels.end());

    const ImageGrid extended = symmetric_extend(noisy, margin);
    QwpDecomposition d = qwp2d_analysis(extended, params.spline_order, deepest);
    const double sigma_e = coefficient_noise_std(d);

    QwpdnResult result;
    result.estimated_sigma = sigma_e / 2.0;
    result.per_level.resize(params.levels.size());

    // Deepest first: each level is shrunk against the cleaned next level.
    LevelSet child_plus = d.level(Sign::plus, deepest);
    LevelSet child_minus = d.level(Sign::minus, deepest);
    for (int m = deepest - 1; m >= shallowest; --m) {
        // Unlisted intermediate levels borrow the window of the next listed level.
        int listed = deepest - 1;
        for (int lv : params.levels) {
            if (lv >= m && lv < listed) listed = lv;
        }
        const int window = params.window_for(listed);
        LevelSet plus = shrink_level(d.level(Sign::plus, m), child_plus, sigma_e, window, params.shrink);
        LevelSet minus = shrink_level(d.level(Sign::minus, m), child_minus, sigma_e, window, params.shrink);
        for (std::size_t i = 0; i < params.levels.size(); ++i) {
            if (params.levels[i] == m) {
                result.per_level[i] = crop(synthesize_level(plus, minus, d.spline_order, d.size), margin, n);
            }
        }
        child_plus = std::move(plus);
        child_minus = std::move(minus);
    }

    ImageGrid out(n, n);
    double total = 0.0;
    for (std::size_t i = 0; i < params.levels.size(); ++i) {
        const double a = params.weight_for(params.levels[i]);
        total += a;
        for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] += a * result.per_level[i].data()[k];
    }
    for (double& v : out.data()) v /= total;
    result.image = std::move(out);
    return result;
}

ImageGrid qwpdn(const ImageGrid& noisy, const DenoiseParams& params) { return qwpdn_detailed(noisy, params).image; }

}  // namespace qwp
