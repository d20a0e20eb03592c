#include "qwp/metrics.hpp"
#include "qwp/noise.hpp"
#include "qwp/parallel.hpp"
#include "qwp/wnnm.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

using namespace qwp;
using namespace qwp::testing;

namespace {

PatchMatrix gaussian_matrix(std::size_t d, std::size_t k, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    PatchMatrix m(d, k);
    for (double& v : m.data()) v = g(rng);
    return m;
}

double frobenius(const PatchMatrix& m) { return std::sqrt(energy(m.data())); }

double nuclear(const PatchMatrix& m) {
    const RealVec s = singular_values(m);
    return std::accumulate(s.begin(), s.end(), 0.0);
}

WnnmParams with_rule(WnnmRule rule, PatchCentering centering = PatchCentering::mean_patch) {
    WnnmParams p;
    p.rule = rule;
    p.centering = centering;
    return p;
}

}  // namespace

TEST_CASE("parameter defaults follow the noise bands") {
    const WnnmParams low = WnnmParams::for_sigma(25.0);
    CHECK(low.patch_side == 6);
    CHECK(low.patches == 70);
    CHECK(low.iterations == 8);
    const WnnmParams mid = WnnmParams::for_sigma(50.0);
    CHECK(mid.patch_side == 8);
    CHECK(mid.patches == 90);
    CHECK(mid.iterations == 12);
    const WnnmParams high = WnnmParams::for_sigma(100.0);
    CHECK(high.patches == 120);
    CHECK(high.iterations == 14);
    CHECK(low.c == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("parameter validation") {
    WnnmParams p;
    CHECK_NOTHROW(p.validate());
    p.patches = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = WnnmParams{};
    p.delta = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = WnnmParams{};
    p.step = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = WnnmParams{};
    p.search_radius = 2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("block matching on a constant image takes the first window positions in scan order") {
    const ImageGrid x = constant_image(64, 50.0);
    WnnmParams p;
    p.patches = 5;
    const PatchStack s = block_match(x, {10, 10}, p);
    REQUIRE(s.positions.size() == 5);
    CHECK(s.positions[0] == PixelPos{10, 10});
    CHECK(s.positions[1] == PixelPos{0, 0});
    CHECK(s.positions[2] == PixelPos{0, 1});
    CHECK(s.positions[3] == PixelPos{0, 2});
    CHECK(s.positions[4] == PixelPos{0, 3});
    CHECK(s.matrix.rows() == 36);
    CHECK(s.matrix.cols() == 5);
}

TEST_CASE("block matching finds planted copies of a motif") {
    ImageGrid x = random_image(64, 8, 100.0, 110.0);
    const ImageGrid motif = random_image(6, 9, 0.0, 255.0);
    const std::vector<PixelPos> sites{{20, 20}, {5, 40}, {33, 12}, {45, 45}, {12, 27}};
    for (auto [r, c] : sites)
        for (std::size_t a = 0; a < 6; ++a)
            for (std::size_t b = 0; b < 6; ++b) x(r + a, c + b) = motif(a, b);
    WnnmParams p;
    p.patches = 5;
    const PatchStack s = block_match(x, sites[0], p);
    CHECK(s.positions[0] == sites[0]);
    const std::set<PixelPos> found(s.positions.begin(), s.positions.end());
    CHECK(found == std::set<PixelPos>(sites.begin(), sites.end()));
    for (std::size_t col = 1; col < 5; ++col)
        for (std::size_t i = 0; i < 36; ++i) CHECK(s.matrix(i, col) == s.matrix(i, 0));
}

TEST_CASE("block matching with one patch returns the reference alone") {
    WnnmParams p;
    p.patches = 1;
    const PatchStack s = block_match(random_image(32, 1), {4, 7}, p);
    REQUIRE(s.positions.size() == 1);
    CHECK(s.positions[0] == PixelPos{4, 7});
    CHECK_THROWS_AS(block_match(random_image(32, 1), {28, 0}, p), std::invalid_argument);
}

TEST_CASE("zero weights return the stack unchanged") {
    const PatchMatrix y = gaussian_matrix(36, 70, 1, 10.0);
    WnnmParams p;
    p.c = 0.0;
    CHECK(wnnm_shrink(y, 5.0, p) == y);
    CHECK(wnnm_shrink(y, 0.0, WnnmParams{}) == y);
}

TEST_CASE("rank-one stack shrinks its singular value by the rule's closed form") {
    const std::size_t d = 16;
    const std::size_t k = 20;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Eigen::VectorXd u(d);
    Eigen::VectorXd v(k);
    for (auto& e : u) e = g(rng);
    for (auto& e : v) e = g(rng);
    v.array() -= v.mean();  // zero row means: centering leaves the stack alone
    u.normalize();
    v.normalize();
    const double s1 = 200.0;
    PatchMatrix y(d, k);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < k; ++j)
            y(i, j) = s1 * u(static_cast<Eigen::Index>(i)) * v(static_cast<Eigen::Index>(j));
    const double sigma = 2.0;
    const double sk = std::sqrt(static_cast<double>(k));

    const RealVec soft = singular_values(wnnm_shrink(y, sigma, with_rule(WnnmRule::soft)));
    const double clean = std::sqrt(s1 * s1 - static_cast<double>(k) * sigma * sigma);
    CHECK(soft[0] == doctest::Approx(s1 - 2.0 * std::sqrt(2.0) * sk * sigma * sigma / clean).epsilon(1e-10));
    CHECK(soft[1] < 1e-9);

    const RealVec rw = singular_values(wnnm_shrink(y, sigma, with_rule(WnnmRule::reweighted)));
    const double cc = 2.0 * 2.0 * std::sqrt(2.0) * sk * sigma * sigma;
    CHECK(rw[0] == doctest::Approx((s1 + std::sqrt(s1 * s1 - 4.0 * cc)) / 2.0).epsilon(1e-10));
    // Fixed point x = s - C / x.
    CHECK(rw[0] == doctest::Approx(s1 - cc / rw[0]).epsilon(1e-10));
    CHECK(rw[1] < 1e-9);
}

TEST_CASE("pure-noise stacks are mostly removed") {
    // Monte-Carlo mean over 6x6 patches, K = 70, sigma equal to the true STD.
    double ratio_sum = 0.0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        const PatchMatrix y = gaussian_matrix(36, 70, 100 + static_cast<std::uint64_t>(t));
        ratio_sum += frobenius(wnnm_shrink(y, 1.0, WnnmParams{})) / frobenius(y);
    }
    CHECK(ratio_sum / trials < 0.2);
}

TEST_CASE("shrinkage never increases singular values or the nuclear norm") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> dim(2, 40);
    std::uniform_real_distribution<double> noise(0.0, 3.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = dim(rng);
        const std::size_t k = dim(rng);
        const PatchMatrix y = gaussian_matrix(d, k, 1000 + static_cast<std::uint64_t>(t), 2.0);
        const double sigma = noise(rng);
        for (WnnmRule rule : {WnnmRule::reweighted, WnnmRule::soft}) {
            for (PatchCentering c : {PatchCentering::mean_patch, PatchCentering::patch_mean}) {
                const PatchMatrix x = wnnm_shrink(y, sigma, with_rule(rule, c));
                const RealVec sy = singular_values(y);
                const RealVec sx = singular_values(x);
                for (std::size_t i = 0; i < sy.size(); ++i) REQUIRE(sx[i] <= sy[i] * (1.0 + 1e-10) + 1e-10);
                REQUIRE(nuclear(x) <= nuclear(y) * (1.0 + 1e-10));
            }
        }
    }
}

TEST_CASE("permuting patches permutes the output") {
    const PatchMatrix y = gaussian_matrix(36, 30, 5, 20.0);
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(6));
    PatchMatrix yp(36, 30);
    for (std::size_t i = 0; i < 36; ++i)
        for (std::size_t j = 0; j < 30; ++j) yp(i, j) = y(i, perm[j]);
    const PatchMatrix x = wnnm_shrink(y, 3.0, WnnmParams{});
    const PatchMatrix xp = wnnm_shrink(yp, 3.0, WnnmParams{});
    for (std::size_t i = 0; i < 36; ++i)
        for (std::size_t j = 0; j < 30; ++j) CHECK(std::abs(xp(i, j) - x(i, perm[j])) < 1e-10);
}

TEST_CASE("centering means bypass the shrinkage") {
    PatchMatrix y = gaussian_matrix(16, 25, 8, 5.0);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 25; ++j) y(i, j) += 100.0 + static_cast<double>(i) + 3.0 * static_cast<double>(j);

    const PatchMatrix a = wnnm_shrink(y, 4.0, with_rule(WnnmRule::reweighted, PatchCentering::mean_patch));
    for (std::size_t i = 0; i < 16; ++i) {
        double in = 0.0;
        double out = 0.0;
        for (std::size_t j = 0; j < 25; ++j) {
            in += y(i, j);
            out += a(i, j);
        }
        CHECK(std::abs(in - out) / 25.0 < 1e-10);
    }

    const PatchMatrix b = wnnm_shrink(y, 4.0, with_rule(WnnmRule::reweighted, PatchCentering::patch_mean));
    for (std::size_t j = 0; j < 25; ++j) {
        double in = 0.0;
        double out = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            in += y(i, j);
            out += b(i, j);
        }
        CHECK(std::abs(in - out) / 16.0 < 1e-10);
    }
}

TEST_CASE("key coordinates cover every pixel") {
    CHECK(key_coordinates(20, 6, 4) == std::vector<std::size_t>{0, 4, 8, 12, 14});
    CHECK(key_coordinates(18, 6, 4) == std::vector<std::size_t>{0, 4, 8, 12});
    CHECK(key_coordinates(6, 6, 4) == std::vector<std::size_t>{0});
    CHECK_THROWS_AS(key_coordinates(5, 6, 4), std::invalid_argument);
}

TEST_CASE("iteration noise level starts at sigma and never goes negative") {
    const ImageGrid y = random_image(16, 2);
    const WnnmParams p;
    CHECK(wnnm_iteration_sigma(y, random_image(16, 3), 25.0, 1, p) == 25.0);
    CHECK(wnnm_iteration_sigma(y, random_image(16, 3), 25.0, 2, p) == 0.0);
    CHECK(wnnm_iteration_sigma(y, y, 25.0, 2, p) == doctest::Approx(p.gamma * 25.0));
}

TEST_CASE("a nearly noise-free image passes through") {
    const ImageGrid clean = synthetic_scene(64);
    WnnmParams p = WnnmParams::for_sigma(1.0);
    p.iterations = 2;
    const ImageGrid out = wnnm_denoise(clean, 0.01, p);
    CHECK(psnr(clean, out) > 40.0);
}

TEST_CASE("a flat noisy image is flattened") {
    const ImageGrid noisy = add_gaussian_noise(constant_image(96, 128.0), 25.0, 2);
    const ImageGrid out = wnnm_denoise(noisy, 25.0, WnnmParams::for_sigma(25.0));
    std::size_t close = 0;
    for (double v : out.data()) close += std::abs(v - 128.0) <= 2.0 ? 1 : 0;
    CHECK(static_cast<double>(close) / static_cast<double>(out.size()) > 0.99);
}

TEST_CASE("denoising is deterministic across worker counts") {
    const ImageGrid noisy = add_gaussian_noise(synthetic_scene(64), 20.0, 4);
    WnnmParams p = WnnmParams::for_sigma(20.0);
    p.iterations = 2;
    set_thread_count(1);
    const ImageGrid a = wnnm_denoise(noisy, 20.0, p);
    set_thread_count(4);
    const ImageGrid b = wnnm_denoise(noisy, 20.0, p);
    set_thread_count(0);
    CHECK(a == b);
}

TEST_CASE("denoising rejects bad inputs") {
    CHECK_THROWS_AS(wnnm_denoise(random_image(32, 1), 0.0, WnnmParams{}), std::invalid_argument);
    CHECK_THROWS_AS(wnnm_denoise(random_image(4, 1), 10.0, WnnmParams{}), std::invalid_argument);
    CHECK_THROWS_AS(wnnm_shrink(gaussian_matrix(4, 4, 1), -1.0, WnnmParams{}), std::invalid_argument);
}
