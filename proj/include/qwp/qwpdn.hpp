#pragma once

// Multi-level qWP denoiser with interscale bivariate shrinkage.
//
// Pipeline: mirror-extend the image, decompose to level max(levels)+1,
// estimate the noise level from the finest diagonal block, shrink every
// block of levels max(levels)..min(levels) deepest first (each level's
// child magnitudes come from the already cleaned next level), reconstruct
// each requested level, crop, and average with weights alpha_m.

#include "qwp/grid.hpp"
#include "qwp/qwp2d.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace qwp {

struct DenoiseParams {
    int spline_order = kDefaultSplineOrder;
    std::vector<int> levels{2, 3, 4};
    /// Neighborhood side W_m per entry of `levels`; a single entry applies to all.
    std::vector<int> window_sizes{8};
    /// alpha_m per entry of `levels`; a single entry applies to all.
    std::vector<double> weights{1.0};
    /// Extension margin T in pixels; unset means N / 4.
    std::optional<std::size_t> margin;
    /// When false the threshold is forced to zero (pipeline identity check).
    bool shrink = true;

    int deepest_level() const;
    int window_for(int level) const;
    double weight_for(int level) const;
    std::size_t margin_for(std::size_t n) const;

    /// Throws std::invalid_argument when the parameters cannot be applied to
    /// an n x n image.
    void validate(std::size_t n) const;
};

/// Whole-sample mirror: out[T + k] = x[k], out[T - 1 - k] = x[k + 1], ...
ImageGrid symmetric_extend(const ImageGrid& x, std::size_t margin);

/// Central n x n window starting at (margin, margin).
ImageGrid crop(const ImageGrid& x, std::size_t margin, std::size_t n);

/// median(|z|) / 0.6745 over the block.
double estimate_noise_std(const ComplexGrid& block);

/// Gray-level noise STD implied by estimate_noise_std() of a qWP block.
/// A qWP atom has norm 2, so white noise of STD sigma yields complex
/// coefficients with Rayleigh magnitudes of median 2 sqrt(ln 2) sigma.
double gray_noise_std(double block_estimate);

/// Mean of c^2 over the W x W window [k - W/2, k + W/2 - 1] x [n - W/2, n + W/2 - 1],
/// indices wrapped periodically.
ImageGrid local_variance(const ImageGrid& c, int window);

/// out[2k + i][2n + j] = c_ij[k][n].
ImageGrid interleave_children(const ImageGrid& c00, const ImageGrid& c01, const ImageGrid& c10,
                              const ImageGrid& c11);

struct Quad {
    ImageGrid c00, c01, c10, c11;
};

Quad deinterleave(const ImageGrid& x);

/// ((r - sqrt(3) sigma_e^2 / sigma_marg)_+ / r) * c_m, r = sqrt(|c_m|^2 + |c_child|^2).
/// sigma_e = 0 returns c_m; sigma_marg = 0 or r = 0 returns 0.
cdouble bivariate_shrink(cdouble c_m, double child_magnitude, double sigma_e, double sigma_marg);
cdouble bivariate_shrink(cdouble c_m, cdouble c_child, double sigma_e, double sigma_marg);

/// Per-block quantities for one shrinkage pass. sigma_e is the noise STD in
/// coefficient units.
struct ShrinkContext {
    double sigma_e = 0.0;
    ImageGrid marginal_sigma;
    ImageGrid joint_child;
};

ShrinkContext make_shrink_context(const ComplexGrid& block, const ImageGrid& child_magnitudes,
                                  double sigma_e, int window);

/// Shrinks all blocks of one level; children must be the next level of the
/// same sign. Returns the cleaned level.
LevelSet shrink_level(const LevelSet& level, const LevelSet& children, double sigma_e, int window,
                      bool shrink = true);

/// Coefficient-domain noise STD for the decomposition of a noisy image.
double coefficient_noise_std(const QwpDecomposition& d);

/// One restoration level: shrinks both sign sets of level m using the given
/// children, reconstructs, and crops the extension margin.
ImageGrid denoise_single_level(const QwpDecomposition& d, int level, const DenoiseParams& params,
                               const LevelSet& child_plus, const LevelSet& child_minus, double sigma_e,
                               std::size_t margin, std::size_t n);

/// Same with raw children from d and the internally estimated noise level.
ImageGrid denoise_single_level(const QwpDecomposition& d, int level, const DenoiseParams& params,
                               std::size_t margin, std::size_t n);

struct QwpdnResult {
    ImageGrid image;
    double estimated_sigma = 0.0;  // gray levels
    std::vector<ImageGrid> per_level;  // aligned with params.levels
};

QwpdnResult qwpdn_detailed(const ImageGrid& noisy, const DenoiseParams& params);

ImageGrid qwpdn(const ImageGrid& noisy, const DenoiseParams& params);

}  // namespace qwp
