#include "qwp/crossboost.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qwp {
namespace {

ImageGrid average(const ImageGrid& a, const ImageGrid& b) {
    ImageGrid out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = 0.5 * (a.data()[i] + b.data()[i]);
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

double boost_sigma(double sigma0, int iteration) {
    if (iteration <= 1) return sigma0;
    return sigma0 / 2.0 * std::pow(kSigmaDecay, iteration - 2);
}

BoostState boost_step(const BoostState& s, const QOperator& q, const WOperator& w) {
    if (s.iteration < 1) throw std::invalid_argument("boost_step: iteration must be >= 1");
    if (!s.y0.same_shape(s.yq) || !s.y0.same_shape(s.yw)) {
        throw invalid_state("boost_step: state images differ in size");
    }
    const ImageGrid boosted_q = average(s.y0, s.yq);
    const ImageGrid boosted_w = average(s.y0, s.yw);
    BoostState next;
    next.y0 = s.y0;
    next.sigma0 = s.sigma0;
    next.iteration = s.iteration + 1;
    // Q consumes the W-boosted input and W the Q-boosted one.
    next.yq = q(boosted_w);
    next.yw = w(boosted_q, boost_sigma(s.sigma0, next.iteration));
    if (!next.yq.same_shape(s.y0) || !next.yw.same_shape(s.y0)) {
        throw invalid_state("boost_step: operator changed the image size");
    }
    return next;
}

BoostState run_crossboost(const ImageGrid& y0, double sigma0, int iterations, const QOperator& q,
                          const WOperator& w, BoostTrace* trace) {
    if (iterations < 1) throw std::invalid_argument("run_crossboost: iterations must be >= 1");
    BoostState s;
    s.y0 = y0;
    s.sigma0 = sigma0;
    s.iteration = 1;
    s.yq = q(y0);
    s.yw = w(y0, boost_sigma(sigma0, 1));
    if (trace) trace->w_sigmas.push_back(boost_sigma(sigma0, 1));
    while (s.iteration < iterations) {
        s = boost_step(s, q, w);
        if (trace) trace->w_sigmas.push_back(boost_sigma(sigma0, s.iteration));
    }
    return s;
}

QOperator make_q_operator(DenoiseParams params) {
    return [params = std::move(params)](const ImageGrid& x) { return qwpdn(x, params); };
}

WOperator make_w_operator() {
    return [](const ImageGrid& x, double sigma) { return wnnm_denoise(x, sigma, WnnmParams::for_sigma(sigma)); };
}

WOperator make_w_operator(WnnmParams fixed) {
    return [fixed = std::move(fixed)](const ImageGrid& x, double sigma) { return wnnm_denoise(x, sigma, fixed); };
}

Variant parse_variant(std::string_view name) {
    const std::string s = lower(name);
    if (s == "cbwnnm") return Variant::cbwnnm;
    if (s == "cbqwp") return Variant::cbqwp;
    if (s == "hybrid") return Variant::hybrid;
    if (s == "auto") return Variant::automatic;
    throw std::invalid_argument("unknown cross-boost variant: " + std::string(name));
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::cbwnnm: return "cbwnnm";
        case Variant::cbqwp: return "cbqwp";
        case Variant::hybrid: return "hybrid";
        case Variant::automatic: return "auto";
    }
    return "unknown";
}

Variant resolve_variant(Variant v, std::string_view image_name) {
    if (v != Variant::automatic) return v;
    return lower(image_name).find("seismic") != std::string::npos ? Variant::cbqwp : Variant::cbwnnm;
}

ImageGrid final_estimate(const ImageGrid& yq, const ImageGrid& yw, Variant variant) {
    if (!yq.same_shape(yw)) throw std::invalid_argument("final_estimate: images differ in size");
    switch (variant) {
        case Variant::cbwnnm: return yw;
        case Variant::cbqwp: return yq;
        case Variant::hybrid: return average(yq, yw);
        case Variant::automatic: break;
    }
    throw std::invalid_argument("final_estimate: variant must be resolved before use");
}

}  // namespace qwp
