// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Analysis S_phi and synthesis T_psi over finite coefficient windows.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phit/frames.hpp"
#include "phit/grid.hpp"

namespace phit {

/// (S_phi f)_Q = |Q|^{1/2} (phi~_nu * f)(x_Q), one convolution per level.
inline CoefficientField analyze(const GridFunction& f, const SpectralProfile& phi, const CoefficientWindow& window) {
    const auto& spec = f.spec();
    window.validate(spec);
    for (int nu = window.nu_min; nu <= window.nu_max; ++nu) require_level(spec, phi, nu);
    CoefficientField out(spec, window);
    const int levels = window.levels();
    parallel_for(static_cast<std::size_t>(levels), [&](std::size_t l) {
        const int nu = window.nu_min + static_cast<int>(l);
        const GridFunction conv = level_convolve(f, phi, nu, true);
        const double amp = std::pow(2.0, -0.5 * nu * spec.n);
        auto& vals = out.level(nu);
        for (std::size_t p = 0; p < vals.size(); ++p)
            vals[p] = amp * conv[corner_index(spec, out.cube(nu, p))];
    });
    return out;
}

struct EnumerationStrategy {
    enum class Kind { level_major_ascending, level_major_descending, interleaved, random_permutation };
    Kind kind = Kind::level_major_ascending;
    std::uint64_t seed = 0;

    static EnumerationStrategy ascending() { return {Kind::level_major_ascending, 0}; }
    static EnumerationStrategy descending() { return {Kind::level_major_descending, 0}; }
    static EnumerationStrategy interleaved() { return {Kind::interleaved, 0}; }
    static EnumerationStrategy random(std::uint64_t seed) { return {Kind::random_permutation, seed}; }

    static EnumerationStrategy parse(const std::string& s, std::uint64_t seed) {
        if (s == "ascending" || s == "level_major_ascending") return ascending();
        if (s == "descending" || s == "level_major_descending") return descending();
        if (s == "interleaved") return interleaved();
        if (s == "random" || s == "random_permutation") return random(seed);
        throw ContractError("unknown enumeration order '" + s + "'");
    }

    /// Every in-window cube exactly once.
    [[nodiscard]] std::vector<DyadicCube> enumerate(const CoefficientField& a) const {
        std::vector<DyadicCube> cubes = a.cubes();
        switch (kind) {
            case Kind::level_major_ascending:
                break;
            case Kind::level_major_descending:
                std::stable_sort(cubes.begin(), cubes.end(),
                                 [](const DyadicCube& x, const DyadicCube& y) { return x.nu > y.nu; });
                break;
            case Kind::interleaved: {
                std::vector<DyadicCube> out;
                out.reserve(cubes.size());
                const auto& w = a.window();
                for (std::size_t p = 0;; ++p) {
                    bool any = false;
                    for (int nu = w.nu_min; nu <= w.nu_max; ++nu) {
                        if (p < a.level(nu).size()) {
                            out.push_back(a.cube(nu, p));
                            any = true;
                        }
                    }
                    if (!any) break;
                }
                cubes = std::move(out);
                break;
            }
            case Kind::random_permutation: {
                std::mt19937_64 rng(seed);
                std::shuffle(cubes.begin(), cubes.end(), rng);
                break;
            }
        }
        return cubes;
    }
};

enum class SynthesisPath { direct, spectral };

namespace detail {

inline void check_synthesis_levels(const CoefficientField& a, const SpectralProfile& psi, const GridSpec& spec) {
    require(a.spec() == spec, "synthesize: coefficient field belongs to another grid");
    if (a.window().nu_max > spec.g) {
        std::ostringstream os;
        os << "synthesize: nu_max = " << a.window().nu_max << " exceeds g = " << spec.g;
        throw ContractError(os.str());
    }
    for (int nu = a.window().nu_min; nu <= a.window().nu_max; ++nu) require_level(spec, psi, nu);
}

// sum_k a_Q psi_Q at one level: comb of a/h^n times the level multiplier.
inline GridFunction synthesize_level(const CoefficientField& a, const SpectralProfile& psi, int nu) {
    const auto& spec = a.spec();
    GridFunction comb(spec);
    const double w = 1.0 / spec.cell_volume();
    const auto& vals = a.level(nu);
    for (std::size_t p = 0; p < vals.size(); ++p) comb[corner_index(spec, a.cube(nu, p))] += w * vals[p];
    auto s = spectrum(comb);
    const double dil = std::ldexp(1.0, -nu);
    const double amp = std::pow(2.0, -0.5 * nu * spec.n);
    std::array<double, 2> v{};
    for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) {
        for (std::size_t d = 0; d < xi.size(); ++d) v[d] = dil * xi[d];
        s[i] *= amp * psi(std::span<const double>(v.data(), xi.size()));
    });
    return from_spectrum(spec, std::move(s));
}

}  // namespace detail

/// T_psi a = sum_Q a_Q psi_Q. The direct path accumulates shifted copies
/// of psi_{nu,0} in the given enumeration order with compensated
/// summation; the spectral path sums per-level multiplier outputs.
inline GridFunction synthesize(const CoefficientField& a, const SpectralProfile& psi, const GridSpec& spec,
                               const EnumerationStrategy& order = EnumerationStrategy::ascending(),
                               SynthesisPath path = SynthesisPath::direct) {
    detail::check_synthesis_levels(a, psi, spec);
    const auto& w = a.window();
    if (path == SynthesisPath::spectral) {
        std::vector<GridFunction> parts(static_cast<std::size_t>(w.levels()));
        parallel_for(parts.size(), [&](std::size_t l) {
            parts[l] = detail::synthesize_level(a, psi, w.nu_min + static_cast<int>(l));
        });
        GridFunction out(spec);
        for (std::size_t i = 0; i < out.size(); ++i) {
            CompensatedSum<cplx> s;
            for (const auto& p : parts) s.add(p[i]);
            out[i] = s.value();
        }
        return out;
    }
    std::vector<GridFunction> base;
    for (int nu = w.nu_min; nu <= w.nu_max; ++nu) base.push_back(eval_wavelet(psi, DyadicCube{nu, {0, 0}, spec.n}, spec));
    const std::size_t P = spec.points_per_axis();
    std::vector<CompensatedSum<cplx>> acc(spec.size());
    for (const auto& Q : order.enumerate(a)) {
        const cplx c = a.at(Q);
        if (c == cplx{}) continue;
        const auto& b = base[static_cast<std::size_t>(Q.nu - w.nu_min)];
        const auto off = grid_offset(spec, Q);
        if (spec.n == 1) {
            const std::size_t s = wrap_index(off[0], P);
            for (std::size_t i = 0; i < P; ++i) acc[(i + s) % P].add(c * b[i]);
        } else {
            const std::size_t s1 = wrap_index(off[0], P), s2 = wrap_index(off[1], P);
            for (std::size_t i2 = 0; i2 < P; ++i2) {
                const std::size_t r = ((i2 + s2) % P) * P;
                for (std::size_t i1 = 0; i1 < P; ++i1) acc[r + (i1 + s1) % P].add(c * b[i2 * P + i1]);
            }
        }
    }
    GridFunction out(spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i].value();
    return out;
}

/// Radii |xi| in [2^{a-1} outer, 2^{b+1} inner] on which the window's
/// partial reconstruction sum equals the full one.
inline std::pair<double, double> covered_band(const WaveletPair& pair, const CoefficientWindow& w) {
    const auto [inner, outer] = detail::joint_support(pair.phi, pair.psi);
    return {std::ldexp(outer, w.nu_min - 1), std::ldexp(inner, w.nu_max + 1)};
}

namespace detail {
inline void require_in_band(const GridFunction& f, const WaveletPair& pair, const CoefficientWindow& w,
                            const char* what) {
    const auto [lo, hi] = covered_band(pair, w);
    const double e = out_of_band_energy(f, [lo, hi](std::span<const double> xi) {
        const double r = norm_of(xi);
        return r == 0.0 || (r >= lo && r <= hi);
    });
    if (e > 1e-10) {
        std::ostringstream os;
        os << what << ": out-of-band energy " << e << " above 1e-10 (covered band " << lo << " <= |xi| <= " << hi
           << ")";
        throw ContractError(os.str());
    }
}
}  // namespace detail

/// ||T_psi S_phi f - f|| / ||f|| with the xi = 0 mode removed from both.
inline double roundtrip_error(const GridFunction& f, const WaveletPair& pair, const CoefficientWindow& window,
                              SynthesisPath path = SynthesisPath::spectral) {
    const GridFunction f0 = remove_mean(f);
    if (f0.l2_norm() == 0.0) return 0.0;
    detail::require_in_band(f0, pair, window, "roundtrip");
    const auto a = analyze(f0, pair.phi, window);
    const auto back = remove_mean(synthesize(a, pair.psi, f.spec(), EnumerationStrategy::ascending(), path));
    return relative_l2_difference(back, f0);
}

/// <psi_Q, phi_J> on the torus: (1/T^n) sum over lattice frequencies of
/// hat psi_Q conj(hat phi_J).
inline cplx gram_entry(const SpectralProfile& psi, const SpectralProfile& phi, const DyadicCube& Q,
                       const DyadicCube& J, const GridSpec& spec) {
    require(Q.n == spec.n && J.n == spec.n, "gram_entry: cube dimension mismatch");
    require_level(spec, psi, Q.nu);
    require_level(spec, phi, J.nu);
    const double sq = std::ldexp(1.0, -Q.nu), sj = std::ldexp(1.0, -J.nu);
    const double lo = std::max(psi.support_inner() / sq, phi.support_inner() / sj);
    const double hi = std::min(psi.support_outer() / sq, phi.support_outer() / sj);
    if (!(lo < hi)) return 0.0;
    const double amp = std::pow(2.0, -0.5 * (Q.nu + J.nu) * spec.n);
    CompensatedSum<cplx> acc;
    std::array<double, 2> vq{}, vj{};
    for_each_frequency(spec, [&](std::size_t, std::span<const double> xi) {
        const double r = norm_of(xi);
        if (r < lo || r > hi) return;
        double phase = 0;
        for (std::size_t a = 0; a < xi.size(); ++a) {
            vq[a] = sq * xi[a];
            vj[a] = sj * xi[a];
            phase += xi[a] * (Q.corner(static_cast<int>(a)) - J.corner(static_cast<int>(a)));
        }
        const cplx pq = psi(std::span<const double>(vq.data(), xi.size()));
        const cplx pj = phi(std::span<const double>(vj.data(), xi.size()));
        acc.add(pq * std::conj(pj) * std::polar(1.0, -phase));
    });
    return amp * acc.value() / std::pow(spec.period(), spec.n);
}

/// <psi_Q, phi_J> over R^n: (2 pi)^{-n} integral of hat psi_Q conj(hat phi_J)
/// by the trapezoid rule with `nodes` points per axis on the joint support.
inline cplx gram_entry_continuous(const SpectralProfile& psi, const SpectralProfile& phi, const DyadicCube& Q,
                                  const DyadicCube& J, int nodes = 1 << 14) {
    require(Q.n == J.n && psi.dim() == Q.n && phi.dim() == Q.n, "gram_entry: dimension mismatch");
    const int n = Q.n;
    const double sq = std::ldexp(1.0, -Q.nu), sj = std::ldexp(1.0, -J.nu);
    const double lo = std::max(psi.support_inner() / sq, phi.support_inner() / sj);
    const double hi = std::min(psi.support_outer() / sq, phi.support_outer() / sj);
    if (!(lo < hi)) return 0.0;
    const double amp = std::pow(2.0, -0.5 * (Q.nu + J.nu) * n);
    auto term = [&](std::span<const double> xi) {
        std::array<double, 2> vq{}, vj{};
        double phase = 0;
        for (std::size_t a = 0; a < xi.size(); ++a) {
            vq[a] = sq * xi[a];
            vj[a] = sj * xi[a];
            phase += xi[a] * (Q.corner(static_cast<int>(a)) - J.corner(static_cast<int>(a)));
        }
        return psi(std::span<const double>(vq.data(), xi.size())) *
               std::conj(phi(std::span<const double>(vj.data(), xi.size()))) * std::polar(1.0, -phase);
    };
    CompensatedSum<cplx> acc;
    if (n == 1) {
        const double step = (hi - lo) / nodes;
        for (int side = -1; side <= 1; side += 2)
            for (int i = 1; i < nodes; ++i) {
                const double x = side * (lo + i * step);
                acc.add(term(std::span<const double>(&x, 1)));
            }
        return amp * acc.value() * step / (2 * kPi);
    }
    const int m = std::min(nodes, 1024);
    const double step = 2 * hi / m;
    for (int i2 = 0; i2 < m; ++i2)
        for (int i1 = 0; i1 < m; ++i1) {
            const double x[2] = {-hi + i1 * step, -hi + i2 * step};
            acc.add(term(std::span<const double>(x, 2)));
        }
    return amp * acc.value() * step * step / std::pow(2 * kPi, 2);
}

/// S_phi(T_psi a).
inline CoefficientField projection_apply(const CoefficientField& a, const WaveletPair& pair) {
    const auto f = synthesize(a, pair.psi, a.spec(), EnumerationStrategy::ascending(), SynthesisPath::spectral);
    return analyze(f, pair.phi, a.window());
}

struct ParsevalResult {
    cplx lhs;
    cplx rhs;
};

/// lhs = <f, g>, rhs = sum_Q (S_phi f)_Q conj((S_psi g)_Q).
inline ParsevalResult parseval_pair(const GridFunction& f, const GridFunction& g, const WaveletPair& pair,
                                    const CoefficientWindow& window) {
    require(f.spec() == g.spec(), "parseval_pair: inputs on different grids");
    for (const auto* h : {&f, &g}) {
        CompensatedSum<cplx> s;
        for (const auto& v : h->samples()) s.add(v);
        const double mean = std::abs(s.value()) / static_cast<double>(h->size());
        require(mean <= 1e-10 * std::max(h->max_abs(), 1e-300) || h->max_abs() == 0.0,
                "parseval_pair: inputs must have zero mean");
        detail::require_in_band(*h, pair, window, "parseval_pair");
    }
    const auto a = analyze(f, pair.phi, window);
    const auto b = analyze(g, pair.psi, window);
    CompensatedSum<cplx> acc;
    for (int nu = window.nu_min; nu <= window.nu_max; ++nu)
        for (std::size_t i = 0; i < a.level(nu).size(); ++i) acc.add(a.level(nu)[i] * std::conj(b.level(nu)[i]));
    return {inner(f, g), acc.value()};
}

/// Copy of `a` restricted to a smaller window (same grid and levels).
inline CoefficientField restrict_to(const CoefficientField& a, const CoefficientWindow& w) {
    CoefficientField out(a.spec(), w);
    for (int nu = w.nu_min; nu <= w.nu_max; ++nu) {
        auto& vals = out.level(nu);
        for (std::size_t p = 0; p < vals.size(); ++p) vals[p] = a.at(out.cube(nu, p));
    }
    return out;
}

/// Random coefficient field with standard complex normal entries.
inline CoefficientField random_field(const GridSpec& spec, const CoefficientWindow& window, std::uint64_t seed) {
    CoefficientField a(spec, window);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int nu = window.nu_min; nu <= window.nu_max; ++nu)
        for (auto& v : a.level(nu)) {
            const double re = normal(rng);
            v = {re, normal(rng)};
        }
    return a;
}

}  // namespace phit
