#include "qwp/qwp1d.hpp"

#include "qwp/fft.hpp"

#include <stdexcept>

namespace qwp {
namespace {

RealVec real_part(const ComplexVec& v) {
    RealVec out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k].real();
    return out;
}

void require_even(std::size_t n, const char* who) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument(std::string(who) + ": length must be even");
}

}  // namespace

RealVec hilbert(std::span<const double> x) {
    require_even(x.size(), "hilbert");
    const std::size_t n = x.size();
    ComplexVec spec = fft::forward(x);
    const cdouble minus_i{0.0, -1.0};
    spec[0] = 0.0;
    spec[n / 2] = 0.0;
    for (std::size_t k = 1; k < n / 2; ++k) spec[k] *= minus_i;
    for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] *= -minus_i;
    return real_part(fft::inverse(spec));
}

RealVec cwp_from_dwp(std::span<const double> psi) {
    require_even(psi.size(), "cwp_from_dwp");
    const std::size_t n = psi.size();
    const ComplexVec psi_hat = fft::forward(psi);
    const RealVec tau = hilbert(psi);
    ComplexVec spec = fft::forward(tau);
    spec[0] = psi_hat[0];
    spec[n / 2] = psi_hat[n / 2];
    return real_part(fft::inverse(spec));
}

ComplexVec QwpWaveform::complex_view() const {
    const double s = sign_value(sign);
    ComplexVec out(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k) out[k] = {psi[k], s * phi[k]};
    return out;
}

QwpWaveform qwp_waveform(int spline_order, std::size_t n, int level, int band, Sign sign) {
    QwpWaveform w;
    w.psi = dwp_waveform(spline_order, n, level, band);
    w.phi = cwp_from_dwp(w.psi);
    w.sign = sign;
    return w;
}

SpectralFilterPair first_level_bank(int spline_order, std::size_t n, Sign sign) {
    SpectralFilterPair bank = level_filters(spline_order, n, 1);
    const double s = sign_value(sign);
    const cdouble edge{1.0, s};
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < n; ++k) {
        cdouble w;
        if (k == 0 || k == half) {
            w = edge;
        } else {
            const bool positive = k < half;
            w = (positive == (sign == Sign::plus)) ? 2.0 : 0.0;
        }
        bank.lowpass[k] *= w;
        bank.highpass[k] *= w;
    }
    return bank;
}

FirstLevelBanks first_level_filterbanks(int spline_order, std::size_t n) {
    return {first_level_bank(spline_order, n, Sign::plus), first_level_bank(spline_order, n, Sign::minus)};
}

}  // namespace qwp
