#pragma once

#include "qwp/grid.hpp"

#include <span>

namespace qwp::fft {

// Unnormalized forward DFT: X[n] = sum_k x[k] e^{-2 pi i n k / N}.
void forward(std::span<const cdouble> in, std::span<cdouble> out);

// Inverse DFT including the 1/N factor, so inverse(forward(x)) == x.
void inverse(std::span<const cdouble> in, std::span<cdouble> out);

ComplexVec forward(std::span<const cdouble> in);
ComplexVec forward(std::span<const double> in);
ComplexVec inverse(std::span<const cdouble> in);

}  // namespace qwp::fft
