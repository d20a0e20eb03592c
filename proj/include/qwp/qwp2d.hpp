#pragma once

// Directional 2D quasi-analytic wavelet packet transforms.
//
// Coefficient Z_{+-[m]}^{j,l}[k,n] is the inner product of the image with
// the 2^m-sample shift (k, n) of Psi_{+[m],j}[vertical] * Psi_{+-[m],l}[horizontal].
// The vertical axis (row index) always uses the Q+ bank at level 1; the
// horizontal axis uses Q+ for the plus set and Q- for the minus set. Levels
// m >= 2 apply the real spline bank H_m along both axes of both sets.
//
// Reconstruction: X~ = Re(X+ + X-) / 8, where X+- are the adjoint
// (complex) syntheses of the respective coefficient sets.

#include "qwp/grid.hpp"
#include "qwp/qwp1d.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace qwp {

/// All 4^m blocks of one sign at one level, row-major in (j, l).
struct LevelSet {
    int level = 0;
    Sign sign = Sign::plus;
    std::size_t block_size = 0;
    std::vector<ComplexGrid> blocks;

    std::size_t bands() const { return std::size_t{1} << level; }
    ComplexGrid& at(int j, int l) { return blocks.at(static_cast<std::size_t>(j) * bands() + static_cast<std::size_t>(l)); }
    const ComplexGrid& at(int j, int l) const {
        return blocks.at(static_cast<std::size_t>(j) * bands() + static_cast<std::size_t>(l));
    }
    /// Throws invalid_state unless all 4^m blocks exist with the right size.
    void validate(std::size_t source_size) const;
};

struct CoeffBlock {
    ComplexGrid values;
    int level = 0;
    int row_band = 0;  // j
    int col_band = 0;  // l
    Sign sign = Sign::plus;
};

struct QwpDecomposition {
    int spline_order = kDefaultSplineOrder;
    std::size_t size = 0;  // N_T
    int max_level = 0;
    std::vector<LevelSet> plus;   // plus[m-1] holds level m
    std::vector<LevelSet> minus;

    bool has_level(int m) const;
    const LevelSet& level(Sign s, int m) const;
    LevelSet& level(Sign s, int m);
    CoeffBlock block(Sign s, int m, int j, int l) const;
};

/// Throws std::invalid_argument unless x is square and its side supports
/// max_level splits (side divisible by 2^max_level, deepest blocks >= 2).
QwpDecomposition qwp2d_analysis(const ImageGrid& x, int spline_order, int max_level);

/// Complex adjoint synthesis X+- of one coefficient set.
ComplexGrid synthesize_complex(const LevelSet& set, int spline_order, std::size_t size);

/// Re(X+ + X-) / 8.
ImageGrid combine_frame(const ComplexGrid& x_plus, const ComplexGrid& x_minus);

/// Frame reconstruction from one level of (possibly modified) coefficients.
ImageGrid synthesize_level(const LevelSet& plus, const LevelSet& minus, int spline_order, std::size_t size);

ImageGrid qwp2d_synthesis(const QwpDecomposition& d, int level);

/// Psi_{+[m],j}[k] * Psi_{sign[m],l}[n] as an explicit N x N array.
ComplexGrid qwp2d_waveform(int spline_order, std::size_t n, int level, int j, int l, Sign sign);

/// Number of distinct orientations among the real waveforms theta_{+-[m],j,l}.
int direction_count(int level);

/// Direct evaluation of the coefficient block by explicit inner products with
/// shifted waveforms. O(N^4 / 4^m) per block; meant for verification.
CoeffBlock coeff_oracle(const ImageGrid& x, int spline_order, int level, int j, int l, Sign sign);

// ---- flat binary dump ------------------------------------------------------
// 16-byte header: "QWP2", u32 rows, u32 cols, u32 flags (little-endian),
// followed by row-major float64 samples. flags bit 0 set = complex data
// stored as interleaved (re, im) pairs.

inline constexpr std::uint32_t kDumpComplexFlag = 1u;

void write_dump(const std::filesystem::path& path, const ComplexGrid& values);
void write_dump(const std::filesystem::path& path, const ImageGrid& values);

struct DumpContents {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::uint32_t flags = 0;
    RealVec samples;  // rows*cols, or 2*rows*cols when complex
};

DumpContents read_dump(const std::filesystem::path& path);

}  // namespace qwp
