#pragma once

// Weighted nuclear norm minimization denoiser on stacks of similar patches.

#include "qwp/grid.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace qwp {

/// d x K matrix, one vectorized (row-major) patch per column.
using PatchMatrix = Grid<double>;

using PixelPos = std::pair<std::size_t, std::size_t>;  // (row, col) of the top-left corner

enum class WnnmRule {
    /// sigma_i -> (sigma_i - w_i)_+ with w_i = c sqrt(K) s^2 / (sigma^_i + eps).
    soft,
    /// Closed-form fixed point of x = sigma_i - C / (x + eps), C = 2 c sqrt(K) s^2.
    reweighted,
};

enum class PatchCentering {
    /// Subtract the mean patch (per-row mean across the K columns).
    mean_patch,
    /// Subtract each patch's own mean (per-column mean).
    patch_mean,
};

struct WnnmParams {
    std::size_t patch_side = 6;
    /// Candidates are taken within +-search_radius of the reference corner.
    std::size_t search_radius = 30;
    std::size_t patches = 70;
    std::size_t step = 4;
    double c = 2.8284271247461903;
    /// Relative to the leading singular value.
    double eps = 1e-16;
    int iterations = 8;
    double delta = 0.1;
    /// Scale of the residual-noise estimate used from the second iteration on.
    double gamma = 0.4;
    WnnmRule rule = WnnmRule::reweighted;
    PatchCentering centering = PatchCentering::mean_patch;

    /// Defaults for a given input noise STD.
    static WnnmParams for_sigma(double sigma);

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

struct PatchStack {
    PatchMatrix matrix;
    std::vector<PixelPos> positions;  // positions[0] is the reference
    PixelPos reference{0, 0};
};

/// K patches of the search window with the smallest squared distance to the
/// reference, the reference first. Ties go to the earlier position in
/// row-major order. The window is shifted inward at image borders.
PatchStack block_match(const ImageGrid& x, PixelPos reference, const WnnmParams& params);

PatchMatrix extract_patches(const ImageGrid& x, const std::vector<PixelPos>& positions, std::size_t side);

/// Weighted singular value shrinkage of a patch stack.
PatchMatrix wnnm_shrink(const PatchMatrix& y, double sigma, const WnnmParams& params);

/// Singular values of m in decreasing order.
RealVec singular_values(const PatchMatrix& m);

/// Top-left corners of the key patches: stride `step` plus the last valid row/column.
std::vector<std::size_t> key_coordinates(std::size_t n, std::size_t side, std::size_t step);

ImageGrid wnnm_denoise(const ImageGrid& y, double sigma, const WnnmParams& params);

/// Noise level handed to iteration t (1-based) of wnnm_denoise.
double wnnm_iteration_sigma(const ImageGrid& y, const ImageGrid& x_in, double sigma, int iteration,
                            const WnnmParams& params);

}  // namespace qwp
