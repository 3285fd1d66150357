// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Moments and the convolution decay estimates
//   (1 + t|x - x_J|)^N |psi(t(. - x_J)) * phi_s(x)|,  phi_s = s^n phi(s .),
// with the explicit constants of their proof, for dyadic (t = 2^mu, s = 2^nu)
// and arbitrary positive dilations.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "phit/frames.hpp"
#include "phit/grid.hpp"
#include "phit/lpdecomp.hpp"

namespace phit {

// ----------------------------------------------------------------- moments ----

struct MomentValue {
    MultiIndex alpha{0, 0};
    cplx value = 0;
};

namespace detail {

/// Taylor coefficient of u^j in T_k(u).
inline double chebyshev_taylor(int k, int j) {
    if (j > k || ((k - j) & 1)) return 0.0;
    if (k == 0) return 1.0;
    const int m = (k - j) / 2;
    // T_k(u) = (k/2) sum_m (-1)^m (k-m-1)! / (m! (k-2m)!) (2u)^{k-2m}
    return 0.5 * k * ((m & 1) ? -1.0 : 1.0) * std::exp(std::lgamma(k - m) - std::lgamma(m + 1) - std::lgamma(j + 1)) *
           std::ldexp(1.0, j);
}

/// Chebyshev coefficients of samples at the Chebyshev points of the first kind.
inline void chebyshev_coefficients(std::span<const cplx> vals, std::vector<cplx>& out) {
    const int K = static_cast<int>(vals.size());
    out.assign(static_cast<std::size_t>(K), cplx{});
    for (int k = 0; k < K; ++k) {
        cplx c = 0;
        for (int i = 0; i < K; ++i) c += vals[static_cast<std::size_t>(i)] * std::cos(kPi * k * (i + 0.5) / K);
        out[static_cast<std::size_t>(k)] = c * ((k == 0 ? 1.0 : 2.0) / K);
    }
}

}  // namespace detail

/// int x^alpha psi dx = i^{|alpha|} d^alpha psi^(0) for |alpha| <= M, with
/// the derivatives read off a Chebyshev interpolant of psi^ near 0.
inline std::vector<MomentValue> moments(const SpectralProfile& psi, int M) {
    require(M >= 0, "moments: M >= 0");
    const int n = psi.dim();
    std::vector<MomentValue> out;
    const auto alphas = multi_indices(n, M);
    if (psi.support_inner() > 0) {
        // psi^ vanishes on a neighbourhood of 0
        for (const auto& a : alphas) out.push_back({a, 0.0});
        return out;
    }
    const double delta = std::isfinite(psi.support_outer()) ? psi.support_outer() / 4 : 1.0;
    constexpr int K = 32;
    std::vector<double> nodes(K);
    for (int i = 0; i < K; ++i) nodes[static_cast<std::size_t>(i)] = std::cos(kPi * (i + 0.5) / K);
    // tensor coefficients c[k1][k2]
    std::vector<cplx> vals(static_cast<std::size_t>(n == 1 ? K : K * K));
    std::array<double, 2> xi{};
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
        xi[0] = delta * nodes[idx % K];
        xi[1] = n == 2 ? delta * nodes[idx / K] : 0.0;
        vals[idx] = psi(std::span<const double>(xi.data(), static_cast<std::size_t>(n)));
    }
    std::vector<cplx> coef(vals.size());
    std::vector<cplx> tmp;
    if (n == 1) {
        detail::chebyshev_coefficients(vals, tmp);
        coef = tmp;
    } else {
        std::vector<cplx> stage(vals.size());
        for (int r = 0; r < K; ++r) {
            detail::chebyshev_coefficients(std::span<const cplx>(vals.data() + r * K, K), tmp);
            for (int k = 0; k < K; ++k) stage[static_cast<std::size_t>(r * K + k)] = tmp[static_cast<std::size_t>(k)];
        }
        std::vector<cplx> col(K);
        for (int k = 0; k < K; ++k) {
            for (int r = 0; r < K; ++r) col[static_cast<std::size_t>(r)] = stage[static_cast<std::size_t>(r * K + k)];
            detail::chebyshev_coefficients(col, tmp);
            for (int r = 0; r < K; ++r) coef[static_cast<std::size_t>(r * K + k)] = tmp[static_cast<std::size_t>(r)];
        }
    }
    for (const auto& a : alphas) {
        // Taylor coefficient of xi^alpha, times alpha!
        cplx t = 0;
        for (int k1 = a[0]; k1 < K; ++k1) {
            const double w1 = detail::chebyshev_taylor(k1, a[0]);
            if (w1 == 0.0) continue;
            if (n == 1) {
                t += coef[static_cast<std::size_t>(k1)] * w1;
                continue;
            }
            for (int k2 = a[1]; k2 < K; ++k2) {
                const double w2 = detail::chebyshev_taylor(k2, a[1]);
                if (w2 != 0.0) t += coef[static_cast<std::size_t>(k2 * K + k1)] * w1 * w2;
            }
        }
        const double scale = multi_factorial(a) / std::pow(delta, order_of(a));
        cplx ipow = 1.0;
        for (int k = 0; k < order_of(a); ++k) ipow *= cplx(0, 1);
        out.push_back({a, ipow * t * scale});
    }
    return out;
}

/// Riemann sums h^n sum x^alpha psi(x).
inline std::vector<MomentValue> moments(const GridFunction& psi, int M) {
    require(M >= 0, "moments: M >= 0");
    const auto& spec = psi.spec();
    const std::size_t P = spec.points_per_axis();
    std::vector<MomentValue> out;
    for (const auto& a : multi_indices(spec.n, M)) {
        CompensatedSum<cplx> s;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            double w = std::pow(spec.coordinate(i % P), a[0]);
            if (spec.n == 2) w *= std::pow(spec.coordinate(i / P), a[1]);
            s.add(w * psi[i]);
        }
        out.push_back({a, spec.cell_volume() * s.value()});
    }
    return out;
}

/// Largest M' <= M such that all moments of order <= M' vanish within tol
/// relative to max(|moment_0|, reference); -1 if the integral is nonzero.
inline int vanishing_moment_order(std::span<const MomentValue> ms, double reference, double tol = 1e-9) {
    int order = -1;
    int current = 0;
    bool ok = true;
    for (const auto& m : ms) {
        if (order_of(m.alpha) != current) {
            if (!ok) return order;
            order = current;
            current = order_of(m.alpha);
        }
        ok = ok && std::abs(m.value) <= tol * reference;
    }
    return ok ? current : order;
}

// ------------------------------------------------------------ decay checks ----

enum class DecayVariant { base, psi_moments, phi_moments };

inline std::string to_string(DecayVariant v) {
    switch (v) {
        case DecayVariant::base: return "base";
        case DecayVariant::psi_moments: return "psi_moments";
        case DecayVariant::phi_moments: return "phi_moments";
    }
    return "?";
}

inline DecayVariant decay_variant_from_string(const std::string& s) {
    if (s == "base") return DecayVariant::base;
    if (s == "psi_moments" || s == "psi-moments") return DecayVariant::psi_moments;
    if (s == "phi_moments" || s == "phi-moments") return DecayVariant::phi_moments;
    throw ContractError("unknown decay variant '" + s + "' (base | psi_moments | phi_moments)");
}

struct DecayCheck {
    double measured = 0;  // sup_x (1 + t|x - x_J|)^N |psi(t(. - x_J)) * phi_s(x)|
    double bound = 0;     // constant times dilation factor
    double constant = 0;
    double factor = 0;
    [[nodiscard]] double ratio() const { return measured / bound; }
};

namespace detail {

inline GridFunction derivative_samples(const SpectralProfile& p, const GridSpec& spec, const MultiIndex& a) {
    return from_fourier(spec, [&](std::span<const double> xi) { return i_power(xi, a) * p(xi); });
}

inline double radius(const GridSpec& spec, std::size_t i) {
    const std::size_t P = spec.points_per_axis();
    return std::hypot(spec.coordinate(i % P), spec.n == 2 ? spec.coordinate(i / P) : 0.0);
}

/// Whether w(x)|f(x)| over the outer eighth of the box is below rel * sup,
/// allowing for a roundoff floor of 1e-13 max|f| times the weight there.
inline bool edge_negligible(const GridFunction& f, double sup, const std::function<double(std::size_t)>& w,
                            double rel) {
    const auto& spec = f.spec();
    const std::size_t P = spec.points_per_axis();
    const double half = std::ldexp(1.0, spec.ell);
    const double peak = f.max_abs();
    for (std::size_t i = 0; i < f.size(); ++i) {
        double m = std::abs(spec.coordinate(i % P));
        if (spec.n == 2) m = std::max(m, std::abs(spec.coordinate(i / P)));
        if (m < 0.875 * half) continue;
        const double wi = w(i);
        if (wi * std::abs(f[i]) > rel * sup + 1e-13 * peak * wi) return false;
    }
    return true;
}

/// D^alpha p sampled with 4x oversampling on a box grown until
/// (1 + |x|)^W |D^alpha p| is negligible at its edge.
struct WeightedSamples {
    GridFunction f;
    std::vector<double> weighted;  // (1 + |x|)^W |f|
    double sup = 0;
};

inline WeightedSamples weighted_samples(const SpectralProfile& p, const MultiIndex& a, int W) {
    require(std::isfinite(p.support_outer()), "decay check: profile needs bounded spectral support");
    const int n = p.dim();
    const int g = std::max(0, static_cast<int>(std::ceil(std::log2(p.support_outer() / kPi)))) + 2;
    for (int ell = 3; ell <= 8 && n * (ell + g + 1) <= 22; ++ell) {
        const GridSpec spec{n, ell, g};
        WeightedSamples out{derivative_samples(p, spec, a), {}, 0.0};
        out.weighted.resize(out.f.size());
        for (std::size_t i = 0; i < out.f.size(); ++i) {
            out.weighted[i] = std::pow(1 + radius(spec, i), W) * std::abs(out.f[i]);
            out.sup = std::max(out.sup, out.weighted[i]);
        }
        if (edge_negligible(out.f, out.sup, [&](std::size_t i) { return std::pow(1 + radius(spec, i), W); }, 1e-12))
            return out;
    }
    throw ContractError("decay check: profile decays too slowly for the quadrature box");
}

/// sup (1 + |x|)^N |D^alpha p|.
inline double weighted_sup(const SpectralProfile& p, const MultiIndex& a, int N) {
    return weighted_samples(p, a, N).sup;
}

/// int |p| (1 + |w|)^K dw.
inline double weighted_integral(const SpectralProfile& p, int K) {
    const auto ws = weighted_samples(p, {0, 0}, K);
    CompensatedSum<double> s;
    for (double v : ws.weighted) s.add(v);
    return s.value() * ws.f.spec().cell_volume();
}

/// sum_{|alpha| = M+1} sup (1 + |.|)^N |D^alpha p| / alpha!.
inline double derivative_constant(const SpectralProfile& p, int N, int M) {
    double c = 0;
    for (const auto& a : multi_indices(p.dim(), M + 1))
        if (order_of(a) == M + 1) c += weighted_sup(p, a, N) / multi_factorial(a);
    return c;
}

inline void require_moments(const SpectralProfile& p, int M, const char* which) {
    const auto ms = moments(p, M);
    const double ref = std::max(1.0, weighted_integral(p, 0));
    if (vanishing_moment_order(ms, ref) < M) {
        std::ostringstream os;
        os << "decay check: " << which << " lacks a moment condition of order " << M;
        throw ContractError(os.str());
    }
}

}  // namespace detail

/// Grid for one check: Nyquist covering max(t, s) * outer with 4x
/// oversampling and a box holding the wider factor.
inline GridSpec decay_grid(const SpectralProfile& psi, const SpectralProfile& phi, double t, double s) {
    const int n = psi.dim();
    const double outer = std::max(psi.support_outer(), phi.support_outer());
    const int g = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(t, s) * outer / kPi)))) + 2;
    const int ell = std::max(2, static_cast<int>(std::ceil(std::log2(8.0 / std::min(t, s)))));
    return {n, std::min(ell, 26 / n - g - 1), g};
}

/// The estimate for dilations t (of psi, centred at x_J) and s (of phi).
inline DecayCheck real_dilation_check(const SpectralProfile& psi, const SpectralProfile& phi, double t, double s,
                                      int N, DecayVariant variant = DecayVariant::base, int M = 0,
                                      std::array<double, 2> x_J = {0.0, 0.0},
                                      std::optional<GridSpec> grid = std::nullopt) {
    require(psi.dim() == phi.dim(), "decay check: dimension mismatch");
    require(t > 0 && s > 0 && std::isfinite(t) && std::isfinite(s), "decay check: dilations must be positive");
    require(N > 0, "decay check: N > 0");
    require(M >= 0, "decay check: M >= 0");
    const int n = psi.dim();
    if (variant == DecayVariant::psi_moments) detail::require_moments(psi, M, "psi");
    if (variant == DecayVariant::phi_moments) detail::require_moments(phi, M, "phi");

    // measured sup on `spec`; nullopt when the box edge still carries weight
    auto measure = [&](const GridSpec& spec) -> std::optional<double> {
        spec.validate();
        require(spec.n == n, "decay check: grid dimension mismatch");
        const double top = std::max(t * psi.support_outer(), s * phi.support_outer());
        if (top > spec.nyquist()) {
            std::ostringstream os;
            os << "decay check: window violation, spectral extent " << top << " exceeds the Nyquist frequency "
               << spec.nyquist();
            throw ContractError(os.str());
        }
        for (int a = 0; a < n; ++a) {
            const double v = x_J[static_cast<std::size_t>(a)] / spec.spacing();
            require(v == std::floor(v) && std::abs(x_J[static_cast<std::size_t>(a)]) < std::ldexp(1.0, spec.ell - 1),
                    "decay check: x_J must be a grid point in the inner half of the box");
        }
        // F^ = t^-n psi^(xi / t) e^{-i xi x_J} phi^(xi / s)
        std::array<double, 2> u{}, v{};
        const double amp = std::pow(t, -n);
        const auto F = from_fourier(spec, [&](std::span<const double> xi) {
            double phase = 0;
            for (std::size_t a = 0; a < xi.size(); ++a) {
                u[a] = xi[a] / t;
                v[a] = xi[a] / s;
                phase += xi[a] * x_J[a];
            }
            return amp * psi(std::span<const double>(u.data(), xi.size())) *
                   phi(std::span<const double>(v.data(), xi.size())) * std::polar(1.0, -phase);
        });
        const std::size_t P = spec.points_per_axis();
        auto weight = [&](std::size_t i) {
            const double d1 = spec.coordinate(i % P) - x_J[0];
            const double d2 = n == 2 ? spec.coordinate(i / P) - x_J[1] : 0.0;
            return std::pow(1 + t * std::hypot(d1, d2), N);
        };
        double sup = 0;
        for (std::size_t i = 0; i < F.size(); ++i) sup = std::max(sup, weight(i) * std::abs(F[i]));
        if (!detail::edge_negligible(F, sup, weight, 1e-9)) return std::nullopt;
        return sup;
    };

    DecayCheck out;
    std::optional<double> m;
    if (grid) {
        m = measure(*grid);
    } else {
        GridSpec spec = decay_grid(psi, phi, t, s);
        while (!(m = measure(spec)) && n * (spec.ell + spec.g + 2) <= 26) ++spec.ell;
    }
    require(m.has_value(), "decay check: box too small for the decay of the convolution");
    out.measured = *m;

    const double r = t / s;
    const bool psi_narrow = r > 1;  // (mu - nu)_+ > 0
    auto base_constant = [&] {
        return psi_narrow ? detail::weighted_sup(phi, {0, 0}, N) * detail::weighted_integral(psi, N)
                          : detail::weighted_sup(psi, {0, 0}, N) * detail::weighted_integral(phi, N);
    };
    switch (variant) {
        case DecayVariant::base:
            out.constant = base_constant();
            out.factor = psi_narrow ? std::pow(r, N - n) : 1.0;
            break;
        case DecayVariant::psi_moments:
            if (psi_narrow) {
                out.constant = detail::derivative_constant(phi, N, M) * detail::weighted_integral(psi, N + M + 1);
                out.factor = std::pow(r, N - n - (M + 1));
            } else {
                out.constant = base_constant();
                out.factor = 1.0;
            }
            break;
        case DecayVariant::phi_moments:
            if (r < 1) {
                out.constant = detail::derivative_constant(psi, N, M) * detail::weighted_integral(phi, N + M + 1);
                out.factor = std::pow(r, M + 1);
            } else {
                out.constant = base_constant();
                out.factor = psi_narrow ? std::pow(r, N - n) : 1.0;
            }
            break;
    }
    out.bound = out.constant * out.factor;
    return out;
}

/// Dyadic form: t = 2^mu with mu = J.nu and x_J the corner of J, s = 2^nu.
inline DecayCheck conv_decay_check(const SpectralProfile& psi, const SpectralProfile& phi, const DyadicCube& J,
                                   int nu, int N, DecayVariant variant = DecayVariant::base, int M = 0,
                                   std::optional<GridSpec> grid = std::nullopt) {
    require(J.n == psi.dim(), "decay check: cube dimension mismatch");
    std::array<double, 2> x{};
    for (int a = 0; a < J.n; ++a) x[static_cast<std::size_t>(a)] = J.corner(a);
    return real_dilation_check(psi, phi, std::ldexp(1.0, J.nu), std::ldexp(1.0, nu), N, variant, M, x, grid);
}

struct DecaySweepRow {
    int separation = 0;
    DecayCheck check;
};

struct DecaySweep {
    DecayVariant variant = DecayVariant::base;
    std::vector<DecaySweepRow> rows;
    double slope = 0;
    double expected = 0;
    double max_ratio = 0;
};

/// Level separations min_sep..max_sep: mu - nu for base and psi_moments (nu = 0),
/// nu - mu for phi_moments (mu = 0). Slope of log2 measured against the
/// separation; expected N - n, N - n - (M + 1), -(M + 1).
inline DecaySweep decay_sweep(const SpectralProfile& psi, const SpectralProfile& phi, DecayVariant variant, int N,
                              int M, int min_sep, int max_sep) {
    require(min_sep >= 0 && max_sep > min_sep, "decay sweep: 0 <= min_sep < max_sep");
    const int n = psi.dim();
    DecaySweep out;
    out.variant = variant;
    out.rows.resize(static_cast<std::size_t>(max_sep - min_sep + 1));
    parallel_for(out.rows.size(), [&](std::size_t i) {
        const int k = min_sep + static_cast<int>(i);
        const bool phi_side = variant == DecayVariant::phi_moments;
        DyadicCube J;
        J.n = n;
        J.nu = phi_side ? 0 : k;
        out.rows[i] = {k, conv_decay_check(psi, phi, J, phi_side ? k : 0, N, variant, M)};
    });
    std::vector<double> xs, ys;
    for (const auto& r : out.rows) {
        xs.push_back(r.separation);
        ys.push_back(std::log2(r.check.measured));
        out.max_ratio = std::max(out.max_ratio, r.check.ratio());
    }
    out.slope = fit_slope(xs, ys);
    switch (variant) {
        case DecayVariant::base: out.expected = N - n; break;
        case DecayVariant::psi_moments: out.expected = N - n - (M + 1); break;
        case DecayVariant::phi_moments: out.expected = -(M + 1); break;
    }
    return out;
}

}  // namespace phit
