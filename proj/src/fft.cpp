#include "qwp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace qwp::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so that the chosen
// codelets never depend on buffer alignment, which keeps results bit-identical
// across calls and threads.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        ComplexVec a(n), b(n);
        auto* in = reinterpret_cast<fftw_complex*>(a.data());
        auto* out = reinterpret_cast<fftw_complex*>(b.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void execute(std::span<const cdouble> in, std::span<cdouble> out, int sign) {
    if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
    if (in.empty()) return;
    fftw_plan plan = cache().get(in.size(), sign);
    // FFTW does not modify the input of an out-of-place complex DFT.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    if (src == dst) {
        ComplexVec copy(in.begin(), in.end());
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(copy.data()), dst);
    } else {
        fftw_execute_dft(plan, src, dst);
    }
}

}  // namespace

void forward(std::span<const cdouble> in, std::span<cdouble> out) {
    execute(in, out, FFTW_FORWARD);
}

void inverse(std::span<const cdouble> in, std::span<cdouble> out) {
    execute(in, out, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
}

ComplexVec forward(std::span<const cdouble> in) {
    ComplexVec out(in.size());
    forward(in, out);
    return out;
}

ComplexVec forward(std::span<const double> in) {
    ComplexVec tmp(in.begin(), in.end());
    return forward(std::span<const cdouble>(tmp));
}

ComplexVec inverse(std::span<const cdouble> in) {
    ComplexVec out(in.size());
    inverse(in, out);
    return out;
}

}  // namespace qwp::fft
