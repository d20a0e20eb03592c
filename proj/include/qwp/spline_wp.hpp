#pragma once

// Orthonormal spline-based wavelet packets (dWPs) on periodic signals.
//
// Every split is executed in the DFT domain. For an input block a of even
// length L with spectrum A[n], the two children of length L/2 are
//
//   C[n] = (A[n] conj(F[n]) + A[n + L/2] conj(F[n + L/2])) / 2,
//
// with F the low- or highpass spectrum, i.e. C holds the inner products of a
// with the 2-sample shifts of the filter. The merge is the exact adjoint.
//
// Band index l is in sequency (frequency-increasing) order. The filter path
// of band l at level m is given by the bits of gray(l) = l ^ (l >> 1), most
// significant bit first (0 = lowpass, 1 = highpass).

#include "qwp/grid.hpp"

#include <span>
#include <utility>
#include <vector>

namespace qwp {

inline constexpr int kDefaultSplineOrder = 9;

/// DFT-domain lowpass/highpass pair for one split of a block of length N_m.
/// Used for the real spline banks H_m and for the complex first-level Q banks.
struct SpectralFilterPair {
    ComplexVec lowpass;
    ComplexVec highpass;
    int level = 0;
    int spline_order = 0;

    std::size_t length() const { return lowpass.size(); }
};

/// Orthonormalized periodic-spline pair for a block of even length N_m:
/// h[n] = sqrt(2) |c|^p / sqrt(c^2p + s^2p), c = cos(pi n / N_m),
/// s = sin(pi n / N_m), and g[n] = e^{-2 pi i n / N_m} conj(h[n + N_m/2]).
SpectralFilterPair level_filters(int spline_order, std::size_t block_length, int level = 0);

/// Splits one block into its low and high children (each half length).
void split_block(std::span<const cdouble> block, const SpectralFilterPair& bank,
                 std::span<cdouble> low, std::span<cdouble> high);

/// Adjoint of split_block; for orthonormal banks also its inverse.
void merge_block(std::span<const cdouble> low, std::span<const cdouble> high,
                 const SpectralFilterPair& bank, std::span<cdouble> out);

/// Sequency indices of the (lowpass, highpass) children of band l.
/// The highpass branch mirrors the spectrum, so for odd l the order flips.
constexpr std::pair<int, int> child_bands(int l) {
    const int flip = l & 1;
    return {2 * l + flip, 2 * l + 1 - flip};
}

/// Natural (filter-path) index of sequency band l.
constexpr int natural_index(int l) { return l ^ (l >> 1); }

/// Spatial point about which the dWP waveform of band (m, l) is symmetric.
/// Every highpass step at level i delays the waveform by 2^(i-1) samples.
int waveform_center(int level, int band);

/// Multilevel dWP decomposition. levels[0] holds the signal itself,
/// levels[m] holds the 2^m blocks of length N / 2^m in sequency order.
struct WPTree {
    int spline_order = kDefaultSplineOrder;
    int max_level = 0;
    std::size_t length = 0;
    std::vector<std::vector<RealVec>> levels;

    const std::vector<RealVec>& level(int m) const { return levels.at(static_cast<std::size_t>(m)); }
};

/// Checks that a signal of length n supports `levels` dyadic splits with at
/// least two samples per deepest block. Throws std::invalid_argument.
void check_decomposable(std::size_t n, int levels, const char* who);

WPTree dwp_analysis(std::span<const double> x, int spline_order, int max_level);

/// Reconstructs the signal from the 2^m blocks of level m.
RealVec dwp_synthesis(const WPTree& tree, int level);

/// Explicit waveform psi_{[m],l}, built as the product of the upsampled
/// filter spectra along the band's path and one inverse DFT.
RealVec dwp_waveform(int spline_order, std::size_t n, int level, int band);

/// DFT of dwp_waveform without the final inverse transform.
ComplexVec dwp_waveform_spectrum(int spline_order, std::size_t n, int level, int band);

}  // namespace qwp
