#include "qwp/spline_wp.hpp"

#include "qwp/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qwp {

SpectralFilterPair level_filters(int spline_order, std::size_t block_length, int level) {
    if (spline_order < 1) throw std::invalid_argument("level_filters: spline order must be >= 1");
    if (block_length < 2 || block_length % 2 != 0) {
        throw std::invalid_argument("level_filters: block length must be even and >= 2, got " +
                                    std::to_string(block_length));
    }
    const std::size_t len = block_length;
    const std::size_t half = len / 2;
    const double pi = std::numbers::pi;
    const double p2 = 2.0 * spline_order;

    RealVec h(len);
    for (std::size_t n = 0; n < len; ++n) {
        const double angle = pi * static_cast<double>(n) / static_cast<double>(len);
        const double c = std::abs(std::cos(angle));
        const double s = std::abs(std::sin(angle));
        // c^p / sqrt(c^2p + s^2p) evaluated as 1 / sqrt(1 + (s/c)^2p) to avoid
        // underflow of both powers near the stop band.
        if (c >= s) {
            h[n] = std::numbers::sqrt2 / std::sqrt(1.0 + std::pow(s / c, p2));
        } else {
            const double r = std::pow(c / s, static_cast<double>(spline_order));
            h[n] = std::numbers::sqrt2 * r / std::sqrt(r * r + 1.0);
        }
    }
    // The exact zero at the Nyquist bin.
    h[half] = 0.0;

    SpectralFilterPair bank;
    bank.level = level;
    bank.spline_order = spline_order;
    bank.lowpass.resize(len);
    bank.highpass.resize(len);
    for (std::size_t n = 0; n < len; ++n) {
        bank.lowpass[n] = h[n];
        const double angle = -2.0 * pi * static_cast<double>(n) / static_cast<double>(len);
        bank.highpass[n] = std::polar(1.0, angle) * h[(n + half) % len];
    }
    return bank;
}

void split_block(std::span<const cdouble> block, const SpectralFilterPair& bank,
                 std::span<cdouble> low, std::span<cdouble> high) {
    const std::size_t len = block.size();
    const std::size_t half = len / 2;
    if (bank.length() != len || low.size() != half || high.size() != half) {
        throw std::invalid_argument("split_block: size mismatch");
    }
    ComplexVec spec = fft::forward(block);
    ComplexVec lo(half), hi(half);
    for (std::size_t n = 0; n < half; ++n) {
        const cdouble a0 = spec[n];
        const cdouble a1 = spec[n + half];
        lo[n] = 0.5 * (a0 * std::conj(bank.lowpass[n]) + a1 * std::conj(bank.lowpass[n + half]));
        hi[n] = 0.5 * (a0 * std::conj(bank.highpass[n]) + a1 * std::conj(bank.highpass[n + half]));
    }
    fft::inverse(lo, low);
    fft::inverse(hi, high);
}

void merge_block(std::span<const cdouble> low, std::span<const cdouble> high,
                 const SpectralFilterPair& bank, std::span<cdouble> out) {
    const std::size_t half = low.size();
    const std::size_t len = 2 * half;
    if (high.size() != half || bank.length() != len || out.size() != len) {
        throw std::invalid_argument("merge_block: size mismatch");
    }
    ComplexVec lo = fft::forward(low);
    ComplexVec hi = fft::forward(high);
    ComplexVec spec(len);
    for (std::size_t n = 0; n < len; ++n) {
        const std::size_t r = n % half;
        spec[n] = lo[r] * bank.lowpass[n] + hi[r] * bank.highpass[n];
    }
    fft::inverse(spec, out);
}

int waveform_center(int level, int band) {
    const int path = natural_index(band);
    int center = 0;
    for (int i = 1; i <= level; ++i) {
        const int bit = (path >> (level - i)) & 1;
        center += bit << (i - 1);
    }
    return center;
}

void check_decomposable(std::size_t n, int levels, const char* who) {
    if (levels < 0) throw std::invalid_argument(std::string(who) + ": negative level count");
    if (levels >= 62) throw std::invalid_argument(std::string(who) + ": level too deep");
    const std::size_t step = std::size_t{1} << levels;
    if (n == 0 || n % step != 0 || n / step < 2) {
        throw std::invalid_argument(std::string(who) + ": length " + std::to_string(n) +
                                    " does not support " + std::to_string(levels) +
                                    " decomposition levels");
    }
}

WPTree dwp_analysis(std::span<const double> x, int spline_order, int max_level) {
    check_decomposable(x.size(), max_level, "dwp_analysis");
    WPTree tree;
    tree.spline_order = spline_order;
    tree.max_level = max_level;
    tree.length = x.size();
    tree.levels.resize(static_cast<std::size_t>(max_level) + 1);
    tree.levels[0].emplace_back(x.begin(), x.end());

    for (int m = 1; m <= max_level; ++m) {
        const auto& parents = tree.levels[static_cast<std::size_t>(m) - 1];
        const std::size_t len = parents.front().size();
        const SpectralFilterPair bank = level_filters(spline_order, len, m);
        auto& children = tree.levels[static_cast<std::size_t>(m)];
        children.assign(parents.size() * 2, RealVec(len / 2));
        ComplexVec in(len), lo(len / 2), hi(len / 2);
        for (std::size_t l = 0; l < parents.size(); ++l) {
            std::copy(parents[l].begin(), parents[l].end(), in.begin());
            split_block(in, bank, lo, hi);
            const auto [lo_band, hi_band] = child_bands(static_cast<int>(l));
            for (std::size_t k = 0; k < len / 2; ++k) {
                children[static_cast<std::size_t>(lo_band)][k] = lo[k].real();
                children[static_cast<std::size_t>(hi_band)][k] = hi[k].real();
            }
        }
    }
    return tree;
}

RealVec dwp_synthesis(const WPTree& tree, int level) {
    if (level < 0 || level > tree.max_level ||
        tree.levels.size() <= static_cast<std::size_t>(level)) {
        throw invalid_state("dwp_synthesis: level " + std::to_string(level) + " not present");
    }
    const std::size_t bands = std::size_t{1} << level;
    const auto& blocks = tree.levels[static_cast<std::size_t>(level)];
    if (blocks.size() != bands) throw invalid_state("dwp_synthesis: missing blocks");
    const std::size_t block_len = tree.length >> level;
    for (const auto& b : blocks) {
        if (b.size() != block_len) throw invalid_state("dwp_synthesis: block has wrong length");
    }

    std::vector<ComplexVec> current;
    current.reserve(bands);
    for (const auto& b : blocks) current.emplace_back(b.begin(), b.end());

    for (int m = level; m >= 1; --m) {
        const std::size_t parents = std::size_t{1} << (m - 1);
        const std::size_t len = current.front().size() * 2;
        const SpectralFilterPair bank = level_filters(tree.spline_order, len, m);
        std::vector<ComplexVec> next(parents, ComplexVec(len));
        for (std::size_t l = 0; l < parents; ++l) {
            const auto [lo_band, hi_band] = child_bands(static_cast<int>(l));
            merge_block(current[static_cast<std::size_t>(lo_band)],
                        current[static_cast<std::size_t>(hi_band)], bank, next[l]);
        }
        current = std::move(next);
    }
    RealVec out(tree.length);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = current.front()[k].real();
    return out;
}

ComplexVec dwp_waveform_spectrum(int spline_order, std::size_t n, int level, int band) {
    if (level < 0) throw std::invalid_argument("dwp_waveform: negative level");
    if (band < 0 || band >= (1 << level)) {
        throw std::invalid_argument("dwp_waveform: band index " + std::to_string(band) +
                                    " out of range for level " + std::to_string(level));
    }
    check_decomposable(n, level, "dwp_waveform");
    const int path = natural_index(band);
    ComplexVec spec(n, cdouble{1.0, 0.0});
    for (int i = 1; i <= level; ++i) {
        const std::size_t len = n >> (i - 1);
        const SpectralFilterPair bank = level_filters(spline_order, len, i);
        const bool high = ((path >> (level - i)) & 1) != 0;
        const ComplexVec& f = high ? bank.highpass : bank.lowpass;
        for (std::size_t k = 0; k < n; ++k) spec[k] *= f[k % len];
    }
    return spec;
}

RealVec dwp_waveform(int spline_order, std::size_t n, int level, int band) {
    const ComplexVec spec = dwp_waveform_spectrum(spline_order, n, level, band);
    const ComplexVec time = fft::inverse(spec);
    RealVec out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = time[k].real();
    return out;
}

}  // namespace qwp
