// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Directional and iterated Hardy-Littlewood maximal operators on the grid,
// and probes for the vector-valued, Peetre and lattice-sequence inequalities.
//
// Samples are read as a piecewise-constant function, one value per cell.
// Windows are contiguous runs of cells along one axis and do not wrap
// around the torus; for piecewise-constant data the sup over cell-aligned
// windows equals the sup over all real intervals containing the point.

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "phit/grid.hpp"
#include "phit/norms.hpp"

namespace phit {

struct MaximalParams {
    double t = 1.0;
    double tau = 2.0;
    int nu = 0;
    int mu = 0;

    /// t in (0, 1] and tau > n/t (tau >= n/t when `allow_equality`).
    void validate(int n, bool allow_equality = false) const {
        require(t > 0 && t <= 1, "maximal params: 0 < t <= 1");
        const double bound = n / t;
        if (allow_equality)
            require(tau >= bound, "maximal params: tau >= n/t");
        else
            require(tau > bound, "maximal params: tau > n/t (strict)");
    }
};

enum class MaximalAlgorithm {
    exact,  // all windows, O(N^2) per line
    dyadic  // windows of length 2^j only, O(N log N); M/2 <= value <= M
};

namespace detail {

// M on one line of nonnegative values, all windows containing each point.
inline void line_maximal_exact(std::span<const double> v, std::span<double> out) {
    const std::size_t N = v.size();
    std::vector<double> prefix(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) prefix[i + 1] = prefix[i] + v[i];
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> suffix(N);
    for (std::size_t a = 0; a < N; ++a) {
        // suffix[b] = best average over windows [a, b'] with b' >= b.
        double best = 0;
        for (std::size_t b = N; b-- > a;) {
            best = std::max(best, (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1));
            suffix[b] = best;
        }
        for (std::size_t i = a; i < N; ++i) out[i] = std::max(out[i], suffix[i]);
    }
    // The singleton window: keeps M f >= |f| exact despite prefix rounding.
    for (std::size_t i = 0; i < N; ++i) out[i] = std::max(out[i], v[i]);
}

// Sliding windows of length 2^j (and the whole line) containing each point.
inline void line_maximal_dyadic(std::span<const double> v, std::span<double> out) {
    const std::size_t N = v.size();
    std::vector<double> prefix(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) prefix[i + 1] = prefix[i] + v[i];
    for (std::size_t i = 0; i < N; ++i) out[i] = v[i];
    std::vector<std::size_t> lengths;
    for (std::size_t L = 2; L < N; L *= 2) lengths.push_back(L);
    if (N > 1) lengths.push_back(N);
    std::vector<double> avg(N);
    for (const std::size_t L : lengths) {
        const std::size_t starts = N - L + 1;
        for (std::size_t a = 0; a < starts; ++a) avg[a] = (prefix[a + L] - prefix[a]) / static_cast<double>(L);
        // For point i the admissible starts are [max(0, i-L+1), min(i, N-L)].
        std::deque<std::size_t> dq;
        std::size_t next = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t hi = std::min(i, starts - 1);
            while (next <= hi) {
                while (!dq.empty() && avg[dq.back()] <= avg[next]) dq.pop_back();
                dq.push_back(next++);
            }
            const std::size_t lo = i + 1 >= L ? i + 1 - L : 0;
            while (dq.front() < lo) dq.pop_front();
            out[i] = std::max(out[i], avg[dq.front()]);
        }
    }
}

inline std::vector<double> magnitudes(const GridFunction& f) {
    std::vector<double> m(f.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(f[i]);
    return m;
}

inline GridFunction as_grid_function(const GridSpec& spec, const std::vector<double>& v) {
    std::vector<cplx> c(v.begin(), v.end());
    return GridFunction(spec, std::move(c));
}

}  // namespace detail

/// M_k of nonnegative samples along axis k (0-based).
inline std::vector<double> directional_maximal(const GridSpec& spec, std::span<const double> v, int axis,
                                               MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    require(axis >= 0 && axis < spec.n, "directional_maximal: axis in [0, n)");
    require(v.size() == spec.size(), "directional_maximal: sample count matches grid");
    for (double x : v) require(std::isfinite(x) && x >= 0, "directional_maximal: nonnegative finite samples");
    const std::size_t P = spec.points_per_axis();
    const std::size_t lines = spec.size() / P;
    std::vector<double> out(spec.size());
    parallel_for(lines, [&](std::size_t line) {
        std::vector<double> in(P), res(P);
        // axis 0: line = row index i2; axis 1: line = column index i1.
        const std::size_t base = axis == 0 ? line * P : line;
        const std::size_t stride = axis == 0 ? 1 : P;
        for (std::size_t i = 0; i < P; ++i) in[i] = v[base + i * stride];
        if (alg == MaximalAlgorithm::exact)
            detail::line_maximal_exact(in, res);
        else
            detail::line_maximal_dyadic(in, res);
        for (std::size_t i = 0; i < P; ++i) out[base + i * stride] = res[i];
    });
    return out;
}

inline GridFunction directional_maximal(const GridFunction& f, int axis, MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    return detail::as_grid_function(f.spec(), directional_maximal(f.spec(), detail::magnitudes(f), axis, alg));
}

/// M_n ... M_1 of nonnegative samples.
inline std::vector<double> iterated_maximal(const GridSpec& spec, std::vector<double> v,
                                            MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    for (int axis = 0; axis < spec.n; ++axis) v = directional_maximal(spec, v, axis, alg);
    return v;
}

inline GridFunction iterated_maximal(const GridFunction& f, MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    return detail::as_grid_function(f.spec(), iterated_maximal(f.spec(), detail::magnitudes(f), alg));
}

/// (M_n ... M_1 |v|^t)^{1/t}.
inline std::vector<double> powered_maximal(const GridSpec& spec, std::span<const double> v, double t,
                                           MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(std::abs(v[i]), t);
    w = iterated_maximal(spec, std::move(w), alg);
    for (auto& x : w) x = std::pow(x, 1.0 / t);
    return w;
}

/// Average of |f| over the cell-aligned rectangle [lo_a, hi_a) (index ranges).
inline double rectangle_average(const GridFunction& f, std::array<std::size_t, 2> lo, std::array<std::size_t, 2> hi) {
    const auto& spec = f.spec();
    const std::size_t P = spec.points_per_axis();
    if (spec.n == 1) {
        lo[1] = 0;
        hi[1] = 1;
    }
    require(lo[0] < hi[0] && hi[0] <= P && lo[1] < hi[1] && hi[1] <= (spec.n == 2 ? P : 1),
            "rectangle_average: rectangle inside the grid");
    CompensatedSum<double> s;
    for (std::size_t j = lo[1]; j < hi[1]; ++j)
        for (std::size_t i = lo[0]; i < hi[0]; ++i) s.add(std::abs(f[i + P * j]));
    return s.value() / static_cast<double>((hi[0] - lo[0]) * (hi[1] - lo[1]));
}

// ---------------------------------------------------------- FS probe ----

/// LHS/RHS of the vector-valued maximal inequality for a finite family.
inline double fs_inequality_probe(const std::vector<GridFunction>& family, const std::vector<double>& p, double q,
                                  double t, MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    require(!family.empty(), "fs probe: nonempty family");
    const auto& spec = family.front().spec();
    require(static_cast<int>(p.size()) == spec.n, "fs probe: one exponent per axis");
    double pmin = q;
    for (double e : p) pmin = std::min(pmin, e);
    require(t > 0 && t < pmin, "fs probe: 0 < t < min(p_1, ..., p_n, q) violated");
    detail::LevelAggregate lhs(spec.size(), q), rhs(spec.size(), q);
    for (const auto& f : family) {
        require(f.spec() == spec, "fs probe: family on one grid");
        const auto m = detail::magnitudes(f);
        lhs.add(powered_maximal(spec, m, t, alg));
        rhs.add(m);
    }
    const double num = mixed_norm(spec, std::move(lhs).finish(), p);
    const double den = mixed_norm(spec, std::move(rhs).finish(), p);
    require(den > 0, "fs probe: family vanishes");
    return num / den;
}

// ------------------------------------------------------ Peetre probe ----

enum class PeetreMode { bandlimited, piecewise_constant };

inline std::string to_string(PeetreMode m) {
    return m == PeetreMode::bandlimited ? "bandlimited" : "piecewise_constant";
}

/// True when f is constant on every dyadic cube of side 2^-nu.
inline bool piecewise_constant_on(const GridFunction& f, int nu, double tol = 0.0) {
    const auto& spec = f.spec();
    require(nu <= spec.g, "piecewise check: nu <= g");
    const std::size_t P = spec.points_per_axis();
    const auto side = static_cast<std::size_t>(ipow2(spec.g - nu));
    // Cube corners 2^-nu k sit at indices P/2 + k side, so blocks start at multiples of side.
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        const std::size_t i1 = idx % P, i2 = idx / P;
        const std::size_t c = (i1 / side) * side + P * (spec.n == 2 ? (i2 / side) * side : 0);
        if (std::abs(f[idx] - f[c]) > tol) return false;
    }
    return true;
}

/// max_x [sup_y |f(y)| / (1 + 2^nu |y - x|)^tau] / (M_n...M_1 |f|^t)^{1/t}(x).
/// Distances are Euclidean on the box (no wrap), matching the windows of M.
inline double peetre_probe(const GridFunction& f, int nu, double tau, double t, PeetreMode mode,
                           MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    const auto& spec = f.spec();
    require(t > 0, "peetre probe: t > 0");
    if (mode == PeetreMode::bandlimited) {
        require(tau >= spec.n / t, "peetre probe: tau >= n/t (bandlimited mode)");
        const double L = std::ldexp(1.0, nu);
        const double out = out_of_band_energy(f, [L](std::span<const double> xi) {
            for (double v : xi)
                if (std::abs(v) > L * (1 + 1e-12)) return false;
            return true;
        });
        require(out <= 1e-24, "peetre probe: spectrum of f outside [-2^nu, 2^nu]^n (bandlimited mode)");
    } else {
        require(tau > spec.n / t, "peetre probe: tau > n/t strictly (piecewise mode)");
        require(nu <= spec.g, "peetre probe: cubes of side 2^-nu resolved by the grid (nu <= g)");
        require(piecewise_constant_on(f, nu, 1e-14 * std::max(1.0, f.max_abs())),
                "peetre probe: f not constant on cubes of side 2^-nu (piecewise mode)");
    }
    const auto mag = detail::magnitudes(f);
    const auto rhs = powered_maximal(spec, mag, t, alg);
    const std::size_t P = spec.points_per_axis();
    const double scale = std::ldexp(1.0, nu) * spec.spacing();
    // Only samples with |f(y)| > 0 can attain the sup.
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < mag.size(); ++i)
        if (mag[i] > 0) support.push_back(i);
    // Weights by squared index distance d1^2 + d2^2.
    const std::size_t max_d2 = (P - 1) * (P - 1) * static_cast<std::size_t>(spec.n);
    std::vector<double> inv_weight(max_d2 + 1);
    for (std::size_t d2 = 0; d2 <= max_d2; ++d2)
        inv_weight[d2] = std::pow(1.0 + scale * std::sqrt(static_cast<double>(d2)), -tau);
    std::vector<double> ratio(spec.size(), 0.0);
    parallel_for(spec.size(), [&](std::size_t x) {
        const auto x1 = static_cast<std::int64_t>(x % P), x2 = static_cast<std::int64_t>(x / P);
        double sup = 0;
        for (const std::size_t y : support) {
            const std::int64_t d1 = static_cast<std::int64_t>(y % P) - x1, d2 = static_cast<std::int64_t>(y / P) - x2;
            sup = std::max(sup, mag[y] * inv_weight[static_cast<std::size_t>(d1 * d1 + d2 * d2)]);
        }
        ratio[x] = rhs[x] > 0 ? sup / rhs[x] : 0.0;
    });
    return *std::max_element(ratio.begin(), ratio.end());
}

// -------------------------------------------------------- star probe ----

struct StarResult {
    double ratio = 0;  // max over sampled x of LHS / RHS with constant 1
    double lhs = 0;    // at the maximising x
    double rhs = 0;
};

/// Discrete estimate for one level slice a (level mu) and cubes Q
/// of level nu, checked at the grid points `xs` (all points when empty).
inline StarResult star_inequality_probe(const CoefficientField& a, int mu, int nu, double tau, double t,
                                        const std::vector<std::size_t>& xs = {},
                                        MaximalAlgorithm alg = MaximalAlgorithm::exact) {
    const auto& spec = a.spec();
    MaximalParams{t, tau, nu, mu}.validate(spec.n);
    require(mu >= a.window().nu_min && mu <= a.window().nu_max, "star probe: level mu inside the window");
    require(nu <= spec.g && mu <= spec.g, "star probe: levels resolved by the grid (mu, nu <= g)");
    const std::size_t P = spec.points_per_axis();
    const auto half = static_cast<std::int64_t>(P / 2);
    const std::int64_t side = ipow2(spec.g - mu);
    const auto& vals = a.level(mu);
    // Paint sum_P |a_P| 1_P without wrapping.
    std::vector<double> painted(spec.size(), 0.0);
    std::vector<std::array<double, 2>> corners(vals.size());
    for (std::size_t pos = 0; pos < vals.size(); ++pos) {
        const DyadicCube Pc = a.cube(mu, pos);
        corners[pos] = {Pc.corner(0), spec.n == 2 ? Pc.corner(1) : 0.0};
        const std::int64_t b1 = half + Pc.k[0] * side, b2 = spec.n == 2 ? half + Pc.k[1] * side : 0;
        require(b1 >= 0 && b1 + side <= static_cast<std::int64_t>(P) &&
                    (spec.n == 1 || (b2 >= 0 && b2 + side <= static_cast<std::int64_t>(P))),
                "star probe: cube outside the box");
        const double v = std::abs(vals[pos]);
        for (std::int64_t j = 0; j < (spec.n == 2 ? side : 1); ++j)
            for (std::int64_t i = 0; i < side; ++i)
                painted[static_cast<std::size_t>(b1 + i) + P * static_cast<std::size_t>(b2 + j)] = v;
    }
    const auto rhs = powered_maximal(spec, painted, t, alg);
    const double factor = std::pow(2.0, (spec.n / t) * std::max(0, mu - nu));
    const double w = std::ldexp(1.0, std::min(mu, nu));
    std::vector<std::size_t> points = xs;
    if (points.empty()) {
        points.resize(spec.size());
        for (std::size_t i = 0; i < points.size(); ++i) points[i] = i;
    }
    std::vector<StarResult> per(points.size());
    parallel_for(points.size(), [&](std::size_t s) {
        const std::size_t x = points[s];
        require(x < spec.size(), "star probe: sample point inside the grid");
        // x_Q: corner of the level-nu cube containing x.
        std::array<double, 2> xq{};
        for (int ax = 0; ax < spec.n; ++ax) {
            const std::size_t i = ax == 0 ? x % P : x / P;
            xq[ax] = std::ldexp(std::floor(std::ldexp(spec.coordinate(i), nu)), -nu);
        }
        CompensatedSum<double> lhs;
        for (std::size_t pos = 0; pos < vals.size(); ++pos) {
            const double d1 = corners[pos][0] - xq[0], d2 = corners[pos][1] - xq[1];
            lhs.add(std::abs(vals[pos]) * std::pow(1.0 + w * std::sqrt(d1 * d1 + d2 * d2), -tau));
        }
        const double r = factor * rhs[x];
        per[s] = {r > 0 ? lhs.value() / r : 0.0, lhs.value(), r};
    });
    StarResult best;
    for (const auto& r : per)
        if (r.ratio > best.ratio) best = r;
    return best;
}

// ------------------------------------------------------- lattice sums ----

struct LatticeSum {
    double lhs = 0;  // sum over |k_j| <= K of (1 + |k|)^-N
    double rhs = 0;  // (1 + 2 sum_{m=1}^M m^{-N/n})^n
};

inline LatticeSum lattice_sum_bound(int n, double N, std::int64_t K, std::int64_t M) {
    require(n == 1 || n == 2, "lattice sum: n in {1, 2}");
    require(N > n, "lattice sum: N > n");
    require(K >= 0 && M >= 1, "lattice sum: K >= 0, M >= 1");
    // Summation from the smallest terms up.
    CompensatedSum<double> lhs;
    if (n == 1) {
        for (std::int64_t k = K; k >= 1; --k) lhs.add(2.0 * std::pow(1.0 + static_cast<double>(k), -N));
        lhs.add(1.0);
    } else {
        for (std::int64_t k1 = K; k1 >= -K; --k1)
            for (std::int64_t k2 = K; k2 >= -K; --k2) {
                const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
                lhs.add(std::pow(1.0 + r, -N));
            }
    }
    CompensatedSum<double> tail;
    for (std::int64_t m = M; m >= 1; --m) tail.add(std::pow(static_cast<double>(m), -N / n));
    return {lhs.value(), std::pow(1.0 + 2.0 * tail.value(), n)};
}

// --------------------------------------------------------- refinement ----

/// Same piecewise-constant function on the grid with spacing h/2.
inline GridFunction refine_piecewise(const GridFunction& f) {
    const auto& spec = f.spec();
    const GridSpec fine{spec.n, spec.ell, spec.g + 1};
    const std::size_t P = spec.points_per_axis(), Pf = fine.points_per_axis();
    GridFunction out(fine);
    for (std::size_t idx = 0; idx < fine.size(); ++idx) {
        const std::size_t i1 = (idx % Pf) / 2, i2 = (idx / Pf) / 2;
        out[idx] = f[i1 + P * i2];
    }
    return out;
}

}  // namespace phit
