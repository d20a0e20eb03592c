#include "qwp/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qwp {

std::uint64_t splitmix64(std::uint64_t state) {
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t i) {
    const std::uint64_t bits = splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15ull);
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t i) {
    const std::uint64_t pair = i / 2;
    const double u1 = counter_uniform(seed, 2 * pair);
    const double u2 = counter_uniform(seed, 2 * pair + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (i % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

ImageGrid add_gaussian_noise(const ImageGrid& x, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("add_gaussian_noise: sigma must be non-negative");
    ImageGrid out = x;
    if (sigma == 0.0) return out;
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] += sigma * counter_normal(seed, k);
    return out;
}

}  // namespace qwp
