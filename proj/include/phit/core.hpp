// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Shared numerical primitives: error type, the smooth glue function,
// compensated summation, and a small deterministic parallel_for.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace phit {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Raised when an operation's precondition or a numeric contract fails.
/// `what()` always names the violated condition.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& condition)
        : std::invalid_argument(condition), condition_(condition) {}

    [[nodiscard]] const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

inline void require(bool ok, const std::string& condition) {
    if (!ok) throw ContractError(condition);
}

/// Smooth partition ratio g(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}),
/// clamped to 0 for t <= 0 and 1 for t >= 1. Satisfies g(t) + g(1-t) = 1.
inline double glue(double t) noexcept {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double e = 1.0 / t - 1.0 / (1.0 - t);
    if (e > 700.0) return 0.0;
    if (e < -700.0) return 1.0;
    return 1.0 / (1.0 + std::exp(e));
}

/// Neumaier-compensated accumulator.
template <typename T>
class CompensatedSum {
public:
    void add(T x) noexcept {
        if constexpr (std::is_same_v<T, cplx>) {
            double re = sum_.real(), im = sum_.imag();
            double cre = comp_.real(), cim = comp_.imag();
            step(re, cre, x.real());
            step(im, cim, x.imag());
            sum_ = {re, im};
            comp_ = {cre, cim};
        } else {
            double s = sum_, c = comp_;
            step(s, c, x);
            sum_ = s;
            comp_ = c;
        }
    }
    [[nodiscard]] T value() const noexcept { return sum_ + comp_; }

private:
    static void step(double& s, double& c, double x) noexcept {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    T sum_{};
    T comp_{};
};

/// Pairwise summation; error grows as O(log n).
template <typename T>
T pairwise_sum(std::span<const T> xs) {
    if (xs.size() <= 16) {
        T s{};
        for (const auto& x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& xs) {
    return pairwise_sum(std::span<const T>(xs));
}

// Thread count used by parallel_for. Work is split into contiguous index
// blocks, each writing disjoint output, so results do not depend on it.
inline std::atomic<int>& thread_count() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_threads(int n) { thread_count() = std::max(1, n); }

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const auto workers = static_cast<std::size_t>(thread_count().load());
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t used = std::min(workers, count);
    const std::size_t block = (count + used - 1) / used;
    for (std::size_t w = 0; w < used; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(count, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
}

/// Least-squares slope of ys against xs.
inline double fit_slope(std::span<const double> xs, std::span<const double> ys) {
    require(xs.size() == ys.size() && xs.size() >= 2, "slope fit needs at least two paired points");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    require(sxx > 0, "slope fit needs distinct abscissae");
    return sxy / sxx;
}

inline std::int64_t ipow2(int e) { return std::int64_t{1} << e; }

inline double factorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace phit
