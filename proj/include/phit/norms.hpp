// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Mixed Lebesgue norms, Triebel-Lizorkin norms (function and sequence
// versions), the single-coefficient bound and scaling experiments.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phit/frames.hpp"
#include "phit/grid.hpp"

namespace phit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SpaceParams {
    double s = 0.0;
    std::vector<double> p{2.0};
    double q = 2.0;  // kInfinity selects the sup over levels

    [[nodiscard]] int n() const { return static_cast<int>(p.size()); }
    [[nodiscard]] bool q_infinite() const { return std::isinf(q); }
    [[nodiscard]] double inverse_p_sum() const {
        double r = 0;
        for (double v : p) r += 1.0 / v;
        return r;
    }

    void validate() const {
        require(std::isfinite(s), "space params: s finite");
        require(p.size() == 1 || p.size() == 2, "space params: one exponent per dimension (n in {1, 2})");
        for (double v : p) require(std::isfinite(v) && v > 0, "space params: p_j in (0, inf)");
        require(q > 0 && !std::isnan(q), "space params: q in (0, inf]");
    }

    [[nodiscard]] std::string to_string() const {
        std::ostringstream os;
        os.precision(17);
        os << s;
        for (double v : p) os << ',' << v;
        os << ',' << (q_infinite() ? std::string("inf") : std::to_string(q));
        return os.str();
    }
};

/// Parses "s,p1,...,pn,q"; q may be "inf".
inline SpaceParams parse_space(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    require(parts.size() == 3 || parts.size() == 4, "space params: expected s,p1[,p2],q");
    auto num = [](const std::string& t) {
        if (t == "inf" || t == "infinity") return kInfinity;
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        require(used == t.size(), "space params: malformed number '" + t + "'");
        return v;
    };
    SpaceParams sp;
    sp.s = num(parts.front());
    sp.p.clear();
    for (std::size_t i = 1; i + 1 < parts.size(); ++i) sp.p.push_back(num(parts[i]));
    sp.q = num(parts.back());
    sp.validate();
    return sp;
}

// ------------------------------------------------------- mixed norms ----

/// Iterated Riemann sum of |v|: x_1 innermost with p_1, then x_2 with p_2.
inline double mixed_norm(const GridSpec& spec, std::span<const double> v, const std::vector<double>& p) {
    require(static_cast<int>(p.size()) == spec.n, "mixed_norm: one exponent per axis");
    for (double e : p) require(std::isfinite(e) && e > 0, "mixed_norm: p_j in (0, inf)");
    require(v.size() == spec.size(), "mixed_norm: sample count matches grid");
    for (double x : v) require(std::isfinite(x), "mixed_norm: non-finite samples");
    const double h = spec.spacing();
    const std::size_t P = spec.points_per_axis();
    auto row = [&](std::size_t start) {
        CompensatedSum<double> acc;
        for (std::size_t i = 0; i < P; ++i) acc.add(std::pow(std::abs(v[start + i]), p[0]));
        return h * acc.value();
    };
    if (spec.n == 1) return std::pow(row(0), 1.0 / p[0]);
    CompensatedSum<double> outer;
    for (std::size_t i2 = 0; i2 < P; ++i2) outer.add(std::pow(row(i2 * P), p[1] / p[0]));
    return std::pow(h * outer.value(), 1.0 / p[1]);
}

inline double mixed_norm(const GridFunction& f, const std::vector<double>& p) {
    std::vector<double> mag(f.samples().size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(f[i]);
    return mixed_norm(f.spec(), mag, p);
}

/// Single-exponent L_p norm, (h^n sum |v|^p)^{1/p}.
inline double lp_norm(const GridSpec& spec, std::span<const double> v, double p) {
    require(std::isfinite(p) && p > 0, "lp_norm: p in (0, inf)");
    CompensatedSum<double> acc;
    for (double x : v) {
        require(std::isfinite(x), "lp_norm: non-finite samples");
        acc.add(std::pow(std::abs(x), p));
    }
    return std::pow(spec.cell_volume() * acc.value(), 1.0 / p);
}

namespace detail {

// Pointwise l_q combination of per-level magnitudes, in level order.
class LevelAggregate {
public:
    LevelAggregate(std::size_t size, double q) : acc_(size, 0.0), q_(q) {}

    void add(std::span<const double> level) {
        if (std::isinf(q_)) {
            for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] = std::max(acc_[i], level[i]);
        } else {
            for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += std::pow(level[i], q_);
        }
    }

    std::vector<double> finish() && {
        if (!std::isinf(q_))
            for (auto& v : acc_) v = std::pow(v, 1.0 / q_);
        return std::move(acc_);
    }

private:
    std::vector<double> acc_;
    double q_;
};

}  // namespace detail

// ---------------------------------------------------------- F-norms ----

/// Pointwise (sum_nu (2^{nu s}|phi_nu * f|)^q)^{1/q} over levels [lo, hi].
inline std::vector<double> tl_aggregate(const GridFunction& f, const SpectralProfile& phi, const SpaceParams& params,
                                        std::pair<int, int> levels) {
    params.validate();
    const auto& spec = f.spec();
    require(params.n() == spec.n, "tl_norm: exponent count matches dimension");
    require(phi.dim() == spec.n, "tl_norm: profile and grid dimensions differ");
    require(levels.first <= levels.second, "tl_norm: level range invalid (lo <= hi)");
    const int bottom = min_level(spec, phi);
    require(levels.first >= bottom, "tl_norm: level " + std::to_string(levels.first) +
                                        " below the minimal resolved level " + std::to_string(bottom));
    for (int nu = levels.first; nu <= levels.second; ++nu) require_level(spec, phi, nu);
    std::vector<cplx> fhat(f.samples().begin(), f.samples().end());
    fft::forward(fhat, spec.fft_dims());
    const auto count = static_cast<std::size_t>(levels.second - levels.first + 1);
    std::vector<std::vector<double>> mags(count);
    parallel_for(count, [&](std::size_t l) {
        const int nu = levels.first + static_cast<int>(l);
        const double scale = std::ldexp(1.0, -nu);
        std::vector<cplx> t(fhat.size());
        std::array<double, 2> v{};
        for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) {
            for (std::size_t a = 0; a < xi.size(); ++a) v[a] = scale * xi[a];
            t[i] = fhat[i] * phi(std::span<const double>(v.data(), xi.size()));
        });
        fft::inverse(t, spec.fft_dims());
        auto& m = mags[l];
        m.resize(spec.size());
        const double w = std::pow(2.0, nu * params.s);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = w * std::abs(t[i]);
    });
    detail::LevelAggregate agg(spec.size(), params.q);
    for (const auto& m : mags) agg.add(m);
    return std::move(agg).finish();
}

inline double tl_norm(const GridFunction& f, const SpectralProfile& phi, const SpaceParams& params,
                      std::pair<int, int> levels) {
    const auto g = tl_aggregate(f, phi, params, levels);
    return mixed_norm(f.spec(), g, params.p);
}

/// Same, over every level the profile admits on the grid.
inline double tl_norm(const GridFunction& f, const SpectralProfile& phi, const SpaceParams& params) {
    return tl_norm(f, phi, params, level_range(f.spec(), {&phi}));
}

/// Pointwise l_q combination of sum_Q |Q|^{-s/n - 1/2}|a_Q| 1_Q.
inline std::vector<double> seq_aggregate(const CoefficientField& a, const SpaceParams& params) {
    params.validate();
    const auto& spec = a.spec();
    const auto& w = a.window();
    require(params.n() == spec.n, "seq_norm: exponent count matches dimension");
    w.validate(spec);
    const std::size_t P = spec.points_per_axis();
    const auto half = static_cast<std::int64_t>(P / 2);
    detail::LevelAggregate agg(spec.size(), params.q);
    std::vector<double> level(spec.size());
    for (int nu = w.nu_min; nu <= w.nu_max; ++nu) {
        std::fill(level.begin(), level.end(), 0.0);
        const double weight = std::pow(2.0, nu * params.s) * std::pow(2.0, 0.5 * nu * spec.n);
        const std::int64_t side = ipow2(spec.g - nu);
        const auto& vals = a.level(nu);
        for (std::size_t pos = 0; pos < vals.size(); ++pos) {
            const double v = weight * std::abs(vals[pos]);
            if (v == 0) continue;
            const DyadicCube Q = a.cube(nu, pos);
            const std::int64_t b1 = half + Q.k[0] * side;
            if (spec.n == 1) {
                for (std::int64_t i = 0; i < side; ++i) level[wrap_index(b1 + i, P)] = v;
            } else {
                const std::int64_t b2 = half + Q.k[1] * side;
                for (std::int64_t j = 0; j < side; ++j) {
                    const std::size_t r = wrap_index(b2 + j, P) * P;
                    for (std::int64_t i = 0; i < side; ++i) level[r + wrap_index(b1 + i, P)] = v;
                }
            }
        }
        agg.add(level);
    }
    return std::move(agg).finish();
}

inline double seq_norm(const CoefficientField& a, const SpaceParams& params) {
    const auto g = seq_aggregate(a, params);
    return mixed_norm(a.spec(), g, params.p);
}

/// max_Q |a_Q| / (||a|| 2^{-nu(s + n/2 - sum 1/p_j)}); at most 1 for every field.
inline double crude_bound_check(const CoefficientField& a, const SpaceParams& params) {
    const double norm = seq_norm(a, params);
    const double amax = a.max_abs();
    require(std::isfinite(norm), "crude bound: sequence norm finite");
    if (amax == 0) return 0.0;
    require(norm > 0, "crude bound: zero norm with nonzero coefficients");
    const double e = params.s + 0.5 * a.n() - params.inverse_p_sum();
    double worst = 0;
    for (int nu = a.window().nu_min; nu <= a.window().nu_max; ++nu) {
        const double scale = norm * std::pow(2.0, -nu * e);
        for (const auto& v : a.level(nu)) worst = std::max(worst, std::abs(v) / scale);
    }
    return worst;
}

// --------------------------------------------------------- batteries ----

/// Closed range of observed ratios.
struct RatioInterval {
    double lo = kInfinity;
    double hi = 0.0;
    void add(double r) {
        require(std::isfinite(r) && r > 0, "ratio interval: ratio positive and finite");
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    [[nodiscard]] double spread() const { return hi / lo; }
};

/// Seeded real functions with spectra in [2^lo, 2^hi]: member i uses the
/// octave [2^{lo+j}, 2^{lo+j+1}] with j = i mod (hi - lo), every fourth member
/// the whole band.
inline std::vector<GridFunction> norm_battery(const GridSpec& spec, int lo, int hi, int count, std::uint64_t seed) {
    require(lo < hi, "norm battery: lo < hi");
    require(std::ldexp(1.0, lo) > spec.frequency_step() && std::ldexp(1.0, hi) < spec.nyquist(),
            "norm battery: band inside the lattice range");
    std::vector<GridFunction> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int j = i % (hi - lo);
        const bool full = i % 4 == 3;
        const double a = std::ldexp(1.0, full ? lo : lo + j), b = std::ldexp(1.0, full ? hi : lo + j + 1);
        out.push_back(random_annulus(spec, seed + static_cast<std::uint64_t>(i), a, b, true));
    }
    return out;
}

// --------------------------------------------------- scaling witnesses ----

enum class EmbeddingKind { theta_scaling, rho_scaling, sobolev_ratio };

inline std::string to_string(EmbeddingKind k) {
    switch (k) {
        case EmbeddingKind::theta_scaling: return "theta_scaling";
        case EmbeddingKind::rho_scaling: return "rho_scaling";
        case EmbeddingKind::sobolev_ratio: return "sobolev_ratio";
    }
    return "?";
}

inline EmbeddingKind embedding_kind_from_string(const std::string& s) {
    if (s == "theta_scaling") return EmbeddingKind::theta_scaling;
    if (s == "rho_scaling") return EmbeddingKind::rho_scaling;
    if (s == "sobolev_ratio") return EmbeddingKind::sobolev_ratio;
    throw ContractError("unknown embedding experiment '" + s + "'");
}

struct EmbeddingRow {
    int k = 0;  // dyadic parameter, or battery index for sobolev_ratio
    double value = 0;
};

struct EmbeddingTable {
    EmbeddingKind kind{};
    std::vector<EmbeddingRow> rows;
    double slope = 0;     // fitted d log2(value) / dk (scaling kinds)
    double expected = 0;  // predicted slope, or 1 for the tautological ratio
    double max_ratio = 0;  // sobolev_ratio only
};

struct EmbeddingConfig {
    std::optional<GridSpec> grid;       // default chosen per kind and dimension
    std::optional<SpaceParams> source;  // sobolev_ratio: (s, p) side, q forced to infinity
    bool dilate_grid = true;            // rho_scaling only
    int battery = 20;
    std::uint64_t seed = 1;
};

/// Profile for theta witnesses: plateau [0.6, 1.5] against support
/// [0.5, 1.9] leaves a gap (0.95, 1) 2^k seen by level k only.
inline AdmissibilityConstants theta_constants() { return {0.5, 0.6, 1.5, 1.9, 1.0}; }

/// Grid for theta witnesses, or base grid (k = 0) for rho witnesses.
inline GridSpec default_embedding_grid(EmbeddingKind kind, int n) {
    if (kind == EmbeddingKind::rho_scaling) return n == 1 ? GridSpec{1, 12, 3} : GridSpec{2, 7, 1};
    return n == 1 ? GridSpec{1, 10, 5} : GridSpec{2, 3, 5};
}

namespace detail {

inline double bump(double t) { return glue(2.0 * (1.0 - std::abs(t))); }

inline EmbeddingTable fit_table(EmbeddingKind kind, std::vector<EmbeddingRow> rows, double expected) {
    std::vector<double> ks, ys;
    for (const auto& r : rows) {
        require(r.value > 0 && std::isfinite(r.value), "embedding: witness norm positive and finite");
        ks.push_back(r.k);
        ys.push_back(std::log2(r.value));
    }
    EmbeddingTable t{kind, std::move(rows), 0, expected, 0};
    if (ks.size() >= 2) t.slope = fit_slope(ks, ys);
    return t;
}

}  // namespace detail

/// theta_k: fixed bump of radius 0.04 around xi = (0.975 2^k, 0), so that a
/// single level sees it, on the plateau; ||theta_k|| = 2^{sk} ||theta||_p.
inline EmbeddingTable theta_scaling(const SpaceParams& params, std::pair<int, int> k_range, const GridSpec& spec) {
    params.validate();
    spec.validate();
    require(params.n() == spec.n, "theta_scaling: exponent count matches dimension");
    require(k_range.first <= k_range.second, "theta_scaling: k range nonempty");
    const auto c = theta_constants();
    const SpectralProfile phi = make_admissible(c, spec.n);
    const auto levels = level_range(spec, {&phi});
    constexpr double radius = 0.04;
    std::vector<EmbeddingRow> rows;
    for (int k = k_range.first; k <= k_range.second; ++k) {
        const double center = lattice_frequency(spec, 0.975 * std::ldexp(1.0, k));
        const double lo = (center - radius) * std::ldexp(1.0, -k), hi = (center + radius) * std::ldexp(1.0, -k);
        const bool isolated = k >= levels.first && k <= levels.second && lo > c.K1 && hi < c.K1_upper &&
                              hi < 2.0 * c.K0 && lo > 0.5 * c.K0_upper;
        require(isolated, "theta_scaling: witness out of band for k = " + std::to_string(k) +
                              " (levels " + std::to_string(levels.first) + ".." + std::to_string(levels.second) + ")");
        const GridFunction theta = from_fourier(spec, [&](std::span<const double> xi) {
            double d2 = (xi[0] - center) * (xi[0] - center);
            if (xi.size() == 2) d2 += xi[1] * xi[1];
            return cplx(detail::bump(std::sqrt(d2) / radius), 0.0);
        });
        rows.push_back({k, tl_norm(theta, phi, params, levels)});
    }
    return detail::fit_table(EmbeddingKind::theta_scaling, std::move(rows), params.s);
}

/// rho_k(x) = rho(2^k x) with rho^ a radial bump on [0.45, 1.4]; every level
/// meeting supp rho_k^ must lie in the window. With `dilate_grid` the grid
/// for rho_k is (l - k, g + k), so each witness is resolved as well as rho on
/// the base grid; otherwise every k shares the base grid.
inline EmbeddingTable rho_scaling(const SpaceParams& params, std::pair<int, int> k_range, const GridSpec& base,
                                  bool dilate_grid = true) {
    params.validate();
    base.validate();
    require(params.n() == base.n, "rho_scaling: exponent count matches dimension");
    require(k_range.first <= k_range.second, "rho_scaling: k range nonempty");
    const auto c = default_constants();
    const SpectralProfile phi = make_admissible(c, base.n);
    constexpr double a = 0.45, b = 1.4;
    const double w = 0.5 * (b - a);
    std::vector<EmbeddingRow> rows;
    for (int k = k_range.first; k <= k_range.second; ++k) {
        const GridSpec spec = dilate_grid ? GridSpec{base.n, base.ell - k, base.g + k} : base;
        spec.validate();
        const auto levels = level_range(spec, {&phi});
        const double lo = a * std::ldexp(1.0, k), hi = b * std::ldexp(1.0, k);
        const bool covered = std::ldexp(c.K0_upper, levels.first - 1) <= lo &&
                             std::ldexp(c.K0, levels.second + 1) >= hi && hi < spec.nyquist();
        require(covered, "rho_scaling: witness out of band for k = " + std::to_string(k) + " (levels " +
                             std::to_string(levels.first) + ".." + std::to_string(levels.second) + ")");
        const double scale = std::ldexp(1.0, -k);
        const double amp = std::pow(scale, spec.n);
        const GridFunction rho = from_fourier(spec, [&](std::span<const double> xi) {
            const double r = norm_of(xi) * scale;
            return cplx(amp * glue((r - a) / w) * glue((b - r) / w), 0.0);
        });
        rows.push_back({k, tl_norm(rho, phi, params, levels)});
    }
    return detail::fit_table(EmbeddingKind::rho_scaling, std::move(rows), params.s - params.inverse_p_sum());
}

/// max over a seeded battery of ||f||_{F^t_{r,q}} / ||f||_{F^s_{p,inf}}.
inline EmbeddingTable sobolev_ratio(const SpaceParams& source, const SpaceParams& target, const GridSpec& spec,
                                    int battery, std::uint64_t seed) {
    SpaceParams src = source;
    src.q = kInfinity;
    src.validate();
    target.validate();
    spec.validate();
    require(src.n() == spec.n && target.n() == spec.n, "sobolev_ratio: exponent count matches dimension");
    require(target.s <= src.s, "sobolev_ratio: t <= s");
    for (int j = 0; j < spec.n; ++j)
        require(target.p[static_cast<std::size_t>(j)] >= src.p[static_cast<std::size_t>(j)], "sobolev_ratio: r_j >= p_j");
    require(std::abs((target.s - target.inverse_p_sum()) - (src.s - src.inverse_p_sum())) <= 1e-12,
            "sobolev_ratio: t - sum 1/r_j = s - sum 1/p_j");
    require(battery >= 1, "sobolev_ratio: battery size >= 1");
    const SpectralProfile phi = make_admissible(default_constants(), spec.n);
    const auto levels = level_range(spec, {&phi});
    const auto c = default_constants();
    const double lo = std::ldexp(c.K1, levels.first), hi = std::ldexp(c.K1_upper, levels.second);
    std::vector<EmbeddingRow> rows(static_cast<std::size_t>(battery));
    for (int i = 0; i < battery; ++i) {
        const GridFunction f = random_annulus(spec, seed + static_cast<std::uint64_t>(i), lo, hi, true);
        rows[static_cast<std::size_t>(i)] = {i, tl_norm(f, phi, target, levels) / tl_norm(f, phi, src, levels)};
    }
    EmbeddingTable t{EmbeddingKind::sobolev_ratio, std::move(rows), 0, 1.0, 0};
    for (const auto& r : t.rows) t.max_ratio = std::max(t.max_ratio, r.value);
    return t;
}

inline EmbeddingTable embedding_experiment(EmbeddingKind kind, const SpaceParams& params, std::pair<int, int> k_range,
                                           const EmbeddingConfig& cfg = {}) {
    params.validate();
    const GridSpec spec = cfg.grid.value_or(default_embedding_grid(kind, params.n()));
    switch (kind) {
        case EmbeddingKind::theta_scaling: return theta_scaling(params, k_range, spec);
        case EmbeddingKind::rho_scaling: return rho_scaling(params, k_range, spec, cfg.dilate_grid);
        case EmbeddingKind::sobolev_ratio:
            return sobolev_ratio(cfg.source.value_or(params), params, spec, cfg.battery, cfg.seed);
    }
    throw ContractError("unknown embedding experiment");
}

}  // namespace phit
