#pragma once

// Cross-boosting of two denoisers. Each iteration feeds operator Q the
// average of the noisy input and W's latest output, and W the average of
// the noisy input and Q's latest output.

#include "qwp/grid.hpp"
#include "qwp/qwpdn.hpp"
#include "qwp/wnnm.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace qwp {

/// Q(x): self-calibrating denoiser; W(x, sigma): denoiser told the noise level.
using QOperator = std::function<ImageGrid(const ImageGrid&)>;
using WOperator = std::function<ImageGrid(const ImageGrid&, double)>;

struct BoostState {
    ImageGrid y0;
    ImageGrid yq;
    ImageGrid yw;
    int iteration = 1;
    double sigma0 = 0.0;
};

inline constexpr int kDefaultBoostIterations = 3;
inline constexpr double kSigmaDecay = 0.8;

/// Noise level handed to W at iteration i: sigma0 at i = 1, then
/// sigma0 / 2 * 0.8^(i - 2).
double boost_sigma(double sigma0, int iteration);

/// Averages the noisy input with each operator's output and applies the
/// other operator. W receives boost_sigma(sigma0, iteration + 1).
BoostState boost_step(const BoostState& s, const QOperator& q, const WOperator& w);

struct BoostTrace {
    std::vector<double> w_sigmas;  // sigma passed to W, per iteration
};

/// First step Q(y0), W(y0, sigma0), then iterations - 1 boost steps.
BoostState run_crossboost(const ImageGrid& y0, double sigma0, int iterations, const QOperator& q,
                          const WOperator& w, BoostTrace* trace = nullptr);

/// Operators backed by qwpdn and wnnm_denoise. W picks WnnmParams::for_sigma
/// of the sigma it is handed unless fixed parameters are supplied.
QOperator make_q_operator(DenoiseParams params);
WOperator make_w_operator();
WOperator make_w_operator(WnnmParams fixed);

enum class Variant { cbwnnm, cbqwp, hybrid, automatic };

/// Accepts cbwnnm, cbqwp, hybrid, auto (case-insensitive).
Variant parse_variant(std::string_view name);
std::string variant_name(Variant v);

/// auto becomes cbqwp when the image name contains "seismic", else cbwnnm.
Variant resolve_variant(Variant v, std::string_view image_name);

/// cbwnnm -> yw, cbqwp -> yq, hybrid -> (yq + yw) / 2.
ImageGrid final_estimate(const ImageGrid& yq, const ImageGrid& yw, Variant variant);

}  // namespace qwp
