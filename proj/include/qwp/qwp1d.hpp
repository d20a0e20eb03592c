#pragma once

// Complementary (cWP) and quasi-analytic (qWP) wavelet packets in 1D.

#include "qwp/grid.hpp"
#include "qwp/spline_wp.hpp"

#include <span>

namespace qwp {

enum class Sign : int { plus = 1, minus = -1 };

inline constexpr double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

/// Discrete Hilbert transform: spectrum -i sign(n) X[n], bins 0 and N/2 zeroed.
RealVec hilbert(std::span<const double> x);

/// cWP: Hilbert transform of psi with the DC and Nyquist bins of psi restored,
/// so |phi^[n]| = |psi^[n]| for every n.
RealVec cwp_from_dwp(std::span<const double> psi);

struct QwpWaveform {
    RealVec psi;
    RealVec phi;
    Sign sign = Sign::plus;

    /// psi + i*sign*phi
    ComplexVec complex_view() const;
};

QwpWaveform qwp_waveform(int spline_order, std::size_t n, int level, int band, Sign sign);

/// First-level complex analysis bank Q+ or Q-: the level-1 spline pair
/// windowed to one half-band, i.e. q[n] = w[n] f[n] with w = 2 on the open
/// half-band of the given sign, 1 +/- i on bins 0 and N/2, 0 elsewhere.
/// Deeper levels reuse the real spline banks unchanged.
SpectralFilterPair first_level_bank(int spline_order, std::size_t n, Sign sign);

struct FirstLevelBanks {
    SpectralFilterPair plus;
    SpectralFilterPair minus;
};

FirstLevelBanks first_level_filterbanks(int spline_order, std::size_t n);

}  // namespace qwp
