// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "phit/core.hpp"

namespace phit::fft {

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Planning is not thread safe in FFTW; execution on distinct buffers is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_plan plan_for(const std::vector<int>& dims, int sign) {
    static std::map<std::pair<std::vector<int>, int>, PlanPtr> cache;
    std::lock_guard lock(planner_mutex());
    auto key = std::make_pair(dims, sign);
    if (auto it = cache.find(key); it != cache.end()) return it->second.get();
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    std::vector<cplx> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(p != nullptr, "FFTW failed to create a plan");
    cache.emplace(key, PlanPtr(p));
    return p;
}

}  // namespace detail

/// In-place unnormalised DFT over a row-major array whose last listed
/// dimension varies fastest. sign = -1 forward, +1 backward.
inline void transform(std::span<cplx> data, const std::vector<int>& dims, int sign) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    require(data.size() == total, "FFT buffer size does not match its dimensions");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::plan_for(dims, sign), buf, buf);
}

inline void forward(std::span<cplx> data, const std::vector<int>& dims) {
    transform(data, dims, FFTW_FORWARD);
}

/// Backward transform including the 1/size normalisation.
inline void inverse(std::span<cplx> data, const std::vector<int>& dims) {
    transform(data, dims, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
}

}  // namespace phit::fft
