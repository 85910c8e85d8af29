#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

#include "scatter2d/types.hpp"

namespace scatter2d::detail {

// Process-wide cache of FFTW plans, one per (N, direction). Plans are created
// with FFTW_UNALIGNED so they can be executed on any caller buffer via the
// new-array interface, which is the only FFTW entry point that is thread-safe.
class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache cache;
        return cache;
    }

    void execute(int n, int sign, cdouble* in, cdouble* out) {
        if (in == out) throw std::invalid_argument("fft2: in-place transform not supported");
        fftw_plan plan = get(n, sign, in, out);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in),
                         reinterpret_cast<fftw_complex*>(out));
    }

    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

private:
    FftPlanCache() = default;

    fftw_plan get(int n, int sign, cdouble* in, cdouble* out) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        fftw_plan plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in),
                                          reinterpret_cast<fftw_complex*>(out), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fft2: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

// Unnormalized 2-D DFT of an N x N complex array in row-major transform order,
// sign = -1 forward, +1 backward.
inline void fft2(int n, int sign, cdouble* in, cdouble* out) {
    FftPlanCache::instance().execute(n, sign, in, out);
}

}  // namespace scatter2d::detail
