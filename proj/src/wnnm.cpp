#include "qwp/wnnm.hpp"

#include "qwp/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace qwp {
namespace {

using EigenMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMat to_eigen(const PatchMatrix& m) {
    return Eigen::Map<const EigenMat>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                      static_cast<Eigen::Index>(m.cols()));
}

PatchMatrix from_eigen(const EigenMat& m) {
    PatchMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    Eigen::Map<EigenMat>(out.data().data(), m.rows(), m.cols()) = m;
    return out;
}

double shrink_value(double s, double noise, double k, double scale_eps, const WnnmParams& p) {
    const double noise_var = noise * noise;
    if (p.rule == WnnmRule::soft) {
        const double clean = std::sqrt(std::max(s * s - k * noise_var, 0.0));
        const double w = p.c * std::sqrt(k) * noise_var / (clean + scale_eps);
        return std::max(s - w, 0.0);
    }
    const double cc = 2.0 * p.c * std::sqrt(k) * noise_var;
    const double disc = (s - scale_eps) * (s - scale_eps) - 4.0 * (cc - scale_eps * s);
    if (disc <= 0.0) return 0.0;
    return std::clamp((s - scale_eps + std::sqrt(disc)) / 2.0, 0.0, s);
}

}  // namespace

WnnmParams WnnmParams::for_sigma(double sigma) {
    WnnmParams p;
    p.patch_side = sigma <= 40.0 ? 6 : 8;
    if (sigma <= 40.0) {
        p.patches = 70;
        p.iterations = 8;
    } else if (sigma <= 60.0) {
        p.patches = 90;
        p.iterations = 12;
    } else {
        p.patches = 120;
        p.iterations = 14;
    }
    return p;
}

void WnnmParams::validate() const {
    if (patch_side < 2) throw std::invalid_argument("WnnmParams: patch side must be >= 2");
    if (search_radius < patch_side) throw std::invalid_argument("WnnmParams: search window smaller than a patch");
    const std::size_t window_count = (2 * search_radius + 1) * (2 * search_radius + 1);
    if (patches < 1 || patches > window_count) {
        throw std::invalid_argument("WnnmParams: patch count must be in [1, " + std::to_string(window_count) + "]");
    }
    if (step < 1 || step > patch_side) throw std::invalid_argument("WnnmParams: step must be in [1, patch side]");
    if (!(c >= 0.0)) throw std::invalid_argument("WnnmParams: c must be non-negative");
    if (!(eps > 0.0)) throw std::invalid_argument("WnnmParams: eps must be positive");
    if (iterations < 1) throw std::invalid_argument("WnnmParams: iterations must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("WnnmParams: delta must lie in (0, 1)");
    if (!(gamma > 0.0)) throw std::invalid_argument("WnnmParams: gamma must be positive");
}

PatchMatrix extract_patches(const ImageGrid& x, const std::vector<PixelPos>& positions, std::size_t side) {
    PatchMatrix m(side * side, positions.size());
    for (std::size_t col = 0; col < positions.size(); ++col) {
        const auto [r0, c0] = positions[col];
        if (r0 + side > x.rows() || c0 + side > x.cols()) {
            throw std::invalid_argument("extract_patches: patch outside the image");
        }
        for (std::size_t a = 0; a < side; ++a)
            for (std::size_t b = 0; b < side; ++b) m(a * side + b, col) = x(r0 + a, c0 + b);
    }
    return m;
}

PatchStack block_match(const ImageGrid& x, PixelPos reference, const WnnmParams& params) {
    const std::size_t ps = params.patch_side;
    if (x.rows() < ps || x.cols() < ps) throw std::invalid_argument("block_match: image smaller than a patch");
    const auto [rr, rc] = reference;
    if (rr + ps > x.rows() || rc + ps > x.cols()) throw std::invalid_argument("block_match: reference patch outside image");

    auto window = [&](std::size_t center, std::size_t limit) {
        // limit = last valid corner; the window keeps its full width when possible.
        const std::size_t width = 2 * params.search_radius;
        std::size_t lo = center > params.search_radius ? center - params.search_radius : 0;
        std::size_t hi = lo + width;
        if (hi > limit) {
            hi = limit;
            lo = hi > width ? hi - width : 0;
        }
        return std::pair{lo, hi};
    };
    const auto [r_lo, r_hi] = window(rr, x.rows() - ps);
    const auto [c_lo, c_hi] = window(rc, x.cols() - ps);

    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    candidates.reserve((r_hi - r_lo + 1) * (c_hi - c_lo + 1));
    for (std::size_t r = r_lo; r <= r_hi; ++r) {
        for (std::size_t c = c_lo; c <= c_hi; ++c) {
            if (r == rr && c == rc) continue;
            double dist = 0.0;
            for (std::size_t a = 0; a < ps; ++a) {
                const double* p = &x(rr + a, rc);
                const double* q = &x(r + a, c);
                for (std::size_t b = 0; b < ps; ++b) {
                    const double d = p[b] - q[b];
                    dist += d * d;
                }
            }
            candidates.emplace_back(dist, r, c);
        }
    }
    const std::size_t take = std::min(params.patches - 1, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end());

    PatchStack stack;
    stack.reference = reference;
    stack.positions.reserve(take + 1);
    stack.positions.push_back(reference);
    for (std::size_t i = 0; i < take; ++i) {
        stack.positions.emplace_back(std::get<1>(candidates[i]), std::get<2>(candidates[i]));
    }
    stack.matrix = extract_patches(x, stack.positions, ps);
    return stack;
}

RealVec singular_values(const PatchMatrix& m) {
    const EigenMat a = to_eigen(m);
    Eigen::JacobiSVD<EigenMat> svd(a);
    const auto& s = svd.singularValues();
    return RealVec(s.data(), s.data() + s.size());
}

PatchMatrix wnnm_shrink(const PatchMatrix& y, double sigma, const WnnmParams& params) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("wnnm_shrink: sigma must be non-negative");
    // Zero weights leave every singular value in place.
    if (y.empty() || sigma == 0.0 || params.c == 0.0) return y;
    EigenMat a = to_eigen(y);
    const auto k = static_cast<double>(y.cols());

    Eigen::MatrixXd mean;
    if (params.centering == PatchCentering::mean_patch) {
        Eigen::VectorXd row_mean = a.rowwise().mean();
        a.colwise() -= row_mean;
        mean = row_mean.replicate(1, a.cols());
    } else {
        Eigen::RowVectorXd col_mean = a.colwise().mean();
        a.rowwise() -= col_mean;
        mean = col_mean.replicate(a.rows(), 1);
    }

    // Eigen-decompose the smaller Gram matrix; with G = U diag(s^2) U^T the
    // shrunk matrix is U diag(f(s)/s) U^T A (or the transpose form).
    const bool left = a.rows() <= a.cols();
    const Eigen::MatrixXd gram = left ? Eigen::MatrixXd(a * a.transpose()) : Eigen::MatrixXd(a.transpose() * a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
    const double s_max = std::sqrt(lambda.maxCoeff());
    const double cutoff = 1e-12 * s_max;
    const double scale_eps = params.eps * std::max(s_max, 1.0);

    Eigen::VectorXd gain = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double s = std::sqrt(lambda(i));
        if (s <= cutoff || s == 0.0) continue;
        gain(i) = shrink_value(s, sigma, k, scale_eps, params) / s;
    }
    const Eigen::MatrixXd& u = eig.eigenvectors();
    const Eigen::MatrixXd proj = u * gain.asDiagonal() * u.transpose();
    Eigen::MatrixXd out = left ? Eigen::MatrixXd(proj * a) : Eigen::MatrixXd(a * proj);
    out += mean;
    return from_eigen(out);
}

std::vector<std::size_t> key_coordinates(std::size_t n, std::size_t side, std::size_t step) {
    if (n < side) throw std::invalid_argument("key_coordinates: image smaller than a patch");
    std::vector<std::size_t> keys;
    const std::size_t last = n - side;
    for (std::size_t k = 0; k <= last; k += step) keys.push_back(k);
    if (keys.back() != last) keys.push_back(last);
    return keys;
}

double wnnm_iteration_sigma(const ImageGrid& y, const ImageGrid& x_in, double sigma, int iteration,
                            const WnnmParams& params) {
    if (iteration <= 1) return sigma;
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y.data()[i] - x_in.data()[i];
        acc += d * d;
    }
    const double residual = acc / static_cast<double>(y.size());
    return params.gamma * std::sqrt(std::max(sigma * sigma - residual, 0.0));
}

ImageGrid wnnm_denoise(const ImageGrid& y, double sigma, const WnnmParams& params) {
    if (!(sigma > 0.0)) throw std::invalid_argument("wnnm_denoise: sigma must be positive");
    params.validate();
    const std::size_t ps = params.patch_side;
    if (y.rows() < ps || y.cols() < ps) throw std::invalid_argument("wnnm_denoise: image smaller than a patch");

    std::vector<PixelPos> keys;
    for (std::size_t r : key_coordinates(y.rows(), ps, params.step))
        for (std::size_t c : key_coordinates(y.cols(), ps, params.step)) keys.emplace_back(r, c);

    constexpr std::size_t kBatch = 512;
    ImageGrid estimate = y;
    for (int t = 1; t <= params.iterations; ++t) {
        ImageGrid x_in(y.rows(), y.cols());
        for (std::size_t i = 0; i < y.size(); ++i) {
            x_in.data()[i] = estimate.data()[i] + params.delta * (y.data()[i] - estimate.data()[i]);
        }
        const double noise = wnnm_iteration_sigma(y, x_in, sigma, t, params);

        ImageGrid sum(y.rows(), y.cols());
        ImageGrid weight(y.rows(), y.cols());
        std::vector<PatchStack> groups(kBatch);
        std::vector<PatchMatrix> cleaned(kBatch);
        for (std::size_t start = 0; start < keys.size(); start += kBatch) {
            const std::size_t count = std::min(kBatch, keys.size() - start);
            parallel_for(count, [&](std::size_t i) {
                groups[i] = block_match(x_in, keys[start + i], params);
                cleaned[i] = wnnm_shrink(groups[i].matrix, noise, params);
            });
            // Serial aggregation in key order keeps the sums schedule independent.
            for (std::size_t i = 0; i < count; ++i) {
                const auto& pos = groups[i].positions;
                for (std::size_t col = 0; col < pos.size(); ++col) {
                    const auto [r0, c0] = pos[col];
                    for (std::size_t a = 0; a < ps; ++a) {
                        for (std::size_t b = 0; b < ps; ++b) {
                            sum(r0 + a, c0 + b) += cleaned[i](a * ps + b, col);
                            weight(r0 + a, c0 + b) += 1.0;
                        }
                    }
                }
            }
        }
        for (std::size_t i = 0; i < y.size(); ++i) {
            estimate.data()[i] = weight.data()[i] > 0.0 ? sum.data()[i] / weight.data()[i] : x_in.data()[i];
        }
    }
    return estimate;
}

}  // namespace qwp
