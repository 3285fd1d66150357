// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Homogeneous Littlewood-Paley decomposition with Taylor corrections.
//
// All pairings are evaluated on the frequency side. A distribution either has
// a Fourier density (point masses and their derivatives, compactly supported
// grid functions) or a discrete spectral measure on the torus lattice
// (periodic grid functions). Low-pass integrals use the substitution
// eta = xi / t, so one set of nodes serves every scale.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phit/frames.hpp"
#include "phit/grid.hpp"

namespace phit {

using MultiIndex = std::array<int, 2>;

inline int order_of(const MultiIndex& a) { return a[0] + a[1]; }

/// All multi-indices with |alpha| <= m in dimension n, by increasing order.
inline std::vector<MultiIndex> multi_indices(int n, int m) {
    std::vector<MultiIndex> out;
    for (int k = 0; k <= m; ++k) {
        if (n == 1) {
            out.push_back({k, 0});
        } else {
            for (int a = k; a >= 0; --a) out.push_back({a, k - a});
        }
    }
    return out;
}

inline double multi_factorial(const MultiIndex& a) { return factorial(a[0]) * factorial(a[1]); }

/// (i xi)^alpha.
inline cplx i_power(std::span<const double> xi, const MultiIndex& a) {
    cplx v = 1.0;
    for (std::size_t d = 0; d < xi.size(); ++d)
        for (int k = 0; k < a[d]; ++k) v *= cplx(0.0, xi[d]);
    return v;
}

// --------------------------------------------------------- test functions ----

/// psi(x) = d^k/dx_1^k exp(-|x - c|^2 / (2 sigma^2)). Moments of order < k
/// vanish.
struct TestFunction {
    int n = 1;
    std::array<double, 2> center{0.4, 0.0};
    double sigma = 1.0;
    int derivative = 0;

    void validate() const {
        require(n == 1 || n == 2, "test function: dimension must be 1 or 2");
        require(sigma > 0, "test function: sigma > 0");
        require(derivative >= 0, "test function: derivative order >= 0");
    }

    /// Order M of vanishing moments, -1 if the integral is nonzero.
    [[nodiscard]] int vanishing_moments() const { return derivative - 1; }

    /// D^alpha psi(x), exact.
    [[nodiscard]] double derivative_at(std::span<const double> x, const MultiIndex& alpha) const {
        double v = 1;
        for (int d = 0; d < n; ++d) {
            const int j = alpha[static_cast<std::size_t>(d)] + (d == 0 ? derivative : 0);
            const double u = (x[static_cast<std::size_t>(d)] - center[static_cast<std::size_t>(d)]) / sigma;
            // d^j/dy^j e^{-y^2/2s^2} = (-1/s)^j He_j(y/s) e^{-y^2/2s^2}
            double h0 = 1, h1 = u;
            if (j == 0) h1 = 1;
            for (int k = 1; k < j; ++k) {
                const double h2 = u * h1 - k * h0;
                h0 = h1;
                h1 = h2;
            }
            v *= std::pow(-1.0 / sigma, j) * (j == 0 ? 1.0 : h1) * std::exp(-0.5 * u * u);
        }
        return v;
    }
    [[nodiscard]] double operator()(std::span<const double> x) const { return derivative_at(x, {0, 0}); }

    [[nodiscard]] cplx fourier(std::span<const double> xi) const {
        double r2 = 0, phase = 0;
        for (int d = 0; d < n; ++d) {
            r2 += xi[static_cast<std::size_t>(d)] * xi[static_cast<std::size_t>(d)];
            phase += xi[static_cast<std::size_t>(d)] * center[static_cast<std::size_t>(d)];
        }
        return i_power(xi, {derivative, 0}) * std::pow(2 * kPi * sigma * sigma, 0.5 * n) *
               std::exp(-0.5 * sigma * sigma * r2) * std::polar(1.0, -phase);
    }

    /// int x^alpha psi(x) dx.
    [[nodiscard]] double moment(const MultiIndex& alpha) const {
        // raw moments of the shifted unnormalized Gaussian, per axis
        auto gauss = [&](int j, double c) {
            double m0 = 1, m1 = c;
            if (j == 0) return std::sqrt(2 * kPi) * sigma;
            for (int k = 1; k < j; ++k) {
                const double m2 = c * m1 + k * sigma * sigma * m0;
                m0 = m1;
                m1 = m2;
            }
            return std::sqrt(2 * kPi) * sigma * m1;
        };
        double v = 1;
        for (int d = 0; d < n; ++d) {
            const int j = alpha[static_cast<std::size_t>(d)];
            const double c = center[static_cast<std::size_t>(d)];
            if (d == 0 && derivative > 0) {
                if (j < derivative) return 0.0;
                const double falling = factorial(j) / factorial(j - derivative);
                v *= ((derivative & 1) ? -1.0 : 1.0) * falling * gauss(j - derivative, c);
            } else {
                v *= gauss(j, c);
            }
        }
        return v;
    }

    [[nodiscard]] GridFunction sample(const GridSpec& spec) const {
        return GridFunction::from_function(spec, [this](std::span<const double> x) { return (*this)(x); });
    }
};

/// Test functions with all moments nonzero, then with k = 1, 2 vanishing-moment orders.
inline std::vector<TestFunction> test_battery(int n) {
    std::vector<TestFunction> out;
    for (double c : {0.4, -0.7})
        for (double s : {0.8, 1.3}) out.push_back({n, {c, n == 2 ? 0.25 : 0.0}, s, 0});
    out.push_back({n, {0.3, 0.0}, 1.0, 1});
    out.push_back({n, {-0.2, 0.0}, 0.9, 2});
    return out;
}

// --------------------------------------------------------------- seminorm ----

/// p_d(psi) = max_{|alpha| <= d} sup_x (1 + |x|)^d |D^alpha psi(x)| over the
/// grid, derivatives taken spectrally after 2^oversample_bits refinement.
inline double seminorm_pd(const GridFunction& psi, int d, int oversample_bits = 2) {
    require(d >= 0, "seminorm_pd: d >= 0");
    require(oversample_bits >= 0, "seminorm_pd: oversample_bits >= 0");
    const auto& s = psi.spec();
    const GridSpec fine{s.n, s.ell, s.g + oversample_bits};
    const GridFunction f = oversample_bits == 0 ? psi : spectral_resample(psi, fine);
    const std::size_t P = fine.points_per_axis();
    double best = 0;
    for (const auto& alpha : multi_indices(fine.n, d)) {
        const GridFunction der = order_of(alpha) == 0
                                     ? f
                                     : apply_multiplier(f, [&](std::span<const double> xi) { return i_power(xi, alpha); });
        for (std::size_t i = 0; i < der.size(); ++i) {
            const double x1 = fine.coordinate(i % P), x2 = fine.n == 2 ? fine.coordinate(i / P) : 0.0;
            best = std::max(best, std::pow(1.0 + std::hypot(x1, x2), d) * std::abs(der[i]));
        }
    }
    return best;
}

/// Same seminorm for an analytic test function, sampled on `spec`.
inline double seminorm_pd(const TestFunction& psi, int d, const GridSpec& spec) {
    require(d >= 0, "seminorm_pd: d >= 0");
    require(psi.n == spec.n, "seminorm_pd: dimension mismatch");
    spec.validate();
    const std::size_t P = spec.points_per_axis();
    double best = 0;
    std::array<double, 2> x{};
    for (const auto& alpha : multi_indices(spec.n, d)) {
        for (std::size_t i = 0; i < spec.size(); ++i) {
            x[0] = spec.coordinate(i % P);
            x[1] = spec.n == 2 ? spec.coordinate(i / P) : 0.0;
            const double w = std::pow(1.0 + std::hypot(x[0], x[1]), d);
            best = std::max(best, w * std::abs(psi.derivative_at(std::span<const double>(x.data(), 2), alpha)));
        }
    }
    return best;
}

// ------------------------------------------------------------ distributions ----

struct PointMass {
    std::array<double, 2> location{0.0, 0.0};
    cplx weight = 1.0;
    MultiIndex derivative{0, 0};  // the mass is weight * D^derivative delta_location
};

enum class DistributionKind { grid_function, point_mass, finite_combination };

/// How a grid function is read as a distribution on R^n.
enum class GridModel {
    compact,   // sum_i h^n f_i delta_{x_i}: integrable, order 0
    periodic,  // the torus trigonometric interpolant: bounded, order n + 1
};

class TestDistribution {
public:
    static TestDistribution point_mass(int n, std::array<double, 2> location, cplx weight = 1.0,
                                       MultiIndex derivative = {0, 0}) {
        TestDistribution t;
        t.kind_ = DistributionKind::point_mass;
        t.n_ = n;
        t.masses_ = {{location, weight, derivative}};
        t.order_ = order_of(derivative);
        t.validate();
        return t;
    }
    static TestDistribution finite_combination(int n, std::vector<PointMass> masses) {
        TestDistribution t;
        t.kind_ = DistributionKind::finite_combination;
        t.n_ = n;
        t.masses_ = std::move(masses);
        for (const auto& m : t.masses_) t.order_ = std::max(t.order_, order_of(m.derivative));
        t.validate();
        return t;
    }
    static TestDistribution grid_function(GridFunction f, GridModel model = GridModel::compact) {
        TestDistribution t;
        t.kind_ = DistributionKind::grid_function;
        t.n_ = f.spec().n;
        t.model_ = model;
        t.order_ = model == GridModel::compact ? 0 : t.n_ + 1;
        t.grid_ = std::move(f);
        t.grid_spectrum_ = spectrum(*t.grid_);
        t.validate();
        return t;
    }

    void validate() const {
        require(n_ == 1 || n_ == 2, "distribution: dimension must be 1 or 2");
        if (kind_ == DistributionKind::grid_function) {
            require(grid_.has_value(), "distribution: grid function kind needs samples");
            return;
        }
        require(!masses_.empty(), "distribution: at least one point mass");
        int top = 0;
        for (const auto& m : masses_) {
            require(m.derivative[0] >= 0 && m.derivative[1] >= 0, "distribution: derivative orders >= 0");
            require(n_ == 2 || m.derivative[1] == 0, "distribution: second-axis derivative in dimension 1");
            top = std::max(top, order_of(m.derivative));
        }
        require(order_ == top, "distribution: declared order must equal the highest derivative order");
        if (kind_ == DistributionKind::point_mass)
            require(masses_.size() == 1, "distribution: point_mass kind holds exactly one mass");
    }

    [[nodiscard]] DistributionKind kind() const noexcept { return kind_; }
    [[nodiscard]] int dim() const noexcept { return n_; }
    /// Declared temperate order d (metadata, not inferred).
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] bool discrete_spectrum() const noexcept {
        return kind_ == DistributionKind::grid_function && model_ == GridModel::periodic;
    }
    [[nodiscard]] const std::optional<GridFunction>& grid() const noexcept { return grid_; }

    /// Fourier density; undefined for a discrete spectrum.
    [[nodiscard]] cplx fourier(std::span<const double> xi) const {
        require(!discrete_spectrum(), "distribution: periodic grid functions have a discrete spectrum");
        if (kind_ == DistributionKind::grid_function) {
            const auto& spec = grid_->spec();
            const std::size_t P = spec.points_per_axis();
            CompensatedSum<cplx> s;
            for (std::size_t i = 0; i < grid_->size(); ++i) {
                double ph = xi[0] * spec.coordinate(i % P);
                if (n_ == 2) ph += xi[1] * spec.coordinate(i / P);
                s.add((*grid_)[i] * std::polar(1.0, -ph));
            }
            return spec.cell_volume() * s.value();
        }
        cplx v = 0;
        for (const auto& m : masses_) {
            double ph = 0;
            for (int d = 0; d < n_; ++d) ph += xi[static_cast<std::size_t>(d)] * m.location[static_cast<std::size_t>(d)];
            v += m.weight * i_power(xi, m.derivative) * std::polar(1.0, -ph);
        }
        return v;
    }

    /// Visits the atoms (xi_j, a_j) with (2pi)^-n int F dmu = sum_j a_j F(xi_j).
    template <typename Fn>
    void for_each_atom(Fn&& fn) const {
        require(discrete_spectrum(), "distribution: atoms exist only for a discrete spectrum");
        const auto& spec = grid_->spec();
        const double scale = 1.0 / std::pow(spec.period(), n_);
        for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) {
            if (grid_spectrum_[i] != cplx{}) fn(xi, scale * grid_spectrum_[i]);
        });
    }

    /// Lattice spectrum of the grid samples (grid kinds).
    [[nodiscard]] const std::vector<cplx>& grid_spectrum() const { return grid_spectrum_; }

    /// <f, psi> = int f conj(psi), evaluated directly on the space side.
    [[nodiscard]] cplx pair(const TestFunction& psi) const {
        require(psi.n == n_, "pairing: dimension mismatch");
        if (kind_ == DistributionKind::grid_function) {
            if (model_ == GridModel::compact) {
                const auto& spec = grid_->spec();
                const std::size_t P = spec.points_per_axis();
                std::array<double, 2> x{};
                CompensatedSum<cplx> s;
                for (std::size_t i = 0; i < grid_->size(); ++i) {
                    x[0] = spec.coordinate(i % P);
                    x[1] = n_ == 2 ? spec.coordinate(i / P) : 0.0;
                    s.add((*grid_)[i] * psi(std::span<const double>(x.data(), 2)));
                }
                return spec.cell_volume() * s.value();
            }
            CompensatedSum<cplx> s;
            for_each_atom([&](std::span<const double> xi, cplx a) { s.add(a * std::conj(psi.fourier(xi))); });
            return s.value();
        }
        cplx v = 0;
        for (const auto& m : masses_) {
            const double sign = (order_of(m.derivative) & 1) ? -1.0 : 1.0;
            v += m.weight * sign * psi.derivative_at(std::span<const double>(m.location.data(), 2), m.derivative);
        }
        return v;
    }

private:
    TestDistribution() = default;
    DistributionKind kind_ = DistributionKind::point_mass;
    int n_ = 1;
    int order_ = 0;
    GridModel model_ = GridModel::compact;
    std::vector<PointMass> masses_;
    std::optional<GridFunction> grid_;
    std::vector<cplx> grid_spectrum_;
};

// --------------------------------------------------------------- polynomial ----

struct Monomial {
    MultiIndex alpha{0, 0};
    cplx coefficient = 0.0;
};

/// Degree m >= -1; m = -1 is the empty polynomial.
struct Polynomial {
    int n = 1;
    int degree = -1;
    std::vector<Monomial> terms;

    void validate() const {
        require(degree >= -1, "polynomial: degree >= -1");
        require((degree == -1) == terms.empty(), "polynomial: degree -1 exactly when there are no terms");
        for (const auto& t : terms) require(order_of(t.alpha) <= degree, "polynomial: term above the degree");
    }

    [[nodiscard]] cplx operator()(std::span<const double> x) const {
        cplx v = 0;
        for (const auto& t : terms) {
            double mono = 1;
            for (int d = 0; d < n; ++d) mono *= std::pow(x[static_cast<std::size_t>(d)], t.alpha[static_cast<std::size_t>(d)]);
            v += t.coefficient * mono;
        }
        return v;
    }

    [[nodiscard]] cplx coefficient(const MultiIndex& a) const {
        for (const auto& t : terms)
            if (t.alpha == a) return t.coefficient;
        return 0.0;
    }

    /// <P, psi> through the moments of psi.
    [[nodiscard]] cplx pair(const TestFunction& psi) const {
        cplx v = 0;
        for (const auto& t : terms) v += t.coefficient * psi.moment(t.alpha);
        return v;
    }
};

// ------------------------------------------------------------- quadrature ----

/// Trapezoid nodes on the support box of a compactly supported radial
/// profile, with the profile values folded into the weights.
class ProfileRule {
public:
    ProfileRule(SpectralProfile profile, int nodes_per_axis) : profile_(std::move(profile)) {
        require(nodes_per_axis >= 16, "quadrature: at least 16 nodes per axis");
        require(std::isfinite(profile_.support_outer()) && profile_.support_outer() > 0,
                "quadrature: profile must have bounded support");
        const int n = profile_.dim();
        const double R = profile_.support_outer();
        const double step = 2 * R / nodes_per_axis;
        std::vector<std::array<double, 2>> cand;
        for (int i = 0; i < nodes_per_axis; ++i) {
            const double a = -R + step * i;
            if (n == 1) {
                cand.push_back({a, 0.0});
            } else {
                for (int j = 0; j < nodes_per_axis; ++j) {
                    const double b = -R + step * j;
                    if (a * a + b * b <= R * R) cand.push_back({a, b});
                }
            }
        }
        std::vector<cplx> w(cand.size());
        parallel_for(cand.size(), [&](std::size_t k) {
            w[k] = profile_(std::span<const double>(cand[k].data(), static_cast<std::size_t>(n)));
        });
        const double vol = std::pow(step, n);
        for (std::size_t k = 0; k < cand.size(); ++k) {
            if (w[k] == cplx{}) continue;
            nodes_.push_back(cand[k]);
            weights_.push_back(w[k] * vol);
        }
    }

    [[nodiscard]] const SpectralProfile& profile() const noexcept { return profile_; }

    /// (2pi)^-n int P(xi / t) F(xi) dmu_f(xi) for the spectral measure of f.
    template <typename Fn>
    cplx integrate(const TestDistribution& f, double t, Fn&& F) const {
        const int n = profile_.dim();
        require(f.dim() == n, "quadrature: dimension mismatch");
        CompensatedSum<cplx> s;
        if (f.discrete_spectrum()) {
            const double R = profile_.support_outer() * t;
            std::array<double, 2> eta{};
            f.for_each_atom([&](std::span<const double> xi, cplx a) {
                double r2 = 0;
                for (int d = 0; d < n; ++d) {
                    eta[static_cast<std::size_t>(d)] = xi[static_cast<std::size_t>(d)] / t;
                    r2 += xi[static_cast<std::size_t>(d)] * xi[static_cast<std::size_t>(d)];
                }
                if (r2 > R * R) return;
                const cplx p = profile_(std::span<const double>(eta.data(), static_cast<std::size_t>(n)));
                if (p != cplx{}) s.add(a * p * F(xi));
            });
            return s.value();
        }
        std::array<double, 2> xi{};
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            for (int d = 0; d < n; ++d) xi[static_cast<std::size_t>(d)] = t * nodes_[k][static_cast<std::size_t>(d)];
            const std::span<const double> v(xi.data(), static_cast<std::size_t>(n));
            s.add(weights_[k] * f.fourier(v) * F(v));
        }
        return std::pow(t / (2 * kPi), n) * s.value();
    }

private:
    SpectralProfile profile_;
    std::vector<std::array<double, 2>> nodes_;
    std::vector<cplx> weights_;
};

inline constexpr int kDefaultNodes1D = 4096;
inline constexpr int kDefaultNodes2D = 384;

inline int default_nodes(int n) { return n == 1 ? kDefaultNodes1D : kDefaultNodes2D; }

// ---------------------------------------------------------- decomposition ----

struct CoefficientPerturbation {
    MultiIndex alpha{0, 0};
    cplx delta = 0.1;
};

/// Low-pass and band quadratures for one combined profile.
class LpEngine {
public:
    explicit LpEngine(const SpectralProfile& combined, int nodes_per_axis = 0)
        : combined_(combined),
          low_(low_pass_profile(combined, 0), nodes_per_axis > 0 ? nodes_per_axis : default_nodes(combined.dim())),
          band_(combined, nodes_per_axis > 0 ? nodes_per_axis : default_nodes(combined.dim())) {}

    [[nodiscard]] const SpectralProfile& combined() const noexcept { return combined_; }
    [[nodiscard]] const ProfileRule& low_pass_rule() const noexcept { return low_; }
    [[nodiscard]] const ProfileRule& band_rule() const noexcept { return band_; }

    /// c_{alpha,N} = (1/alpha!) (2pi)^-n int (i xi)^alpha Phi(2^N xi) f^(xi) dxi.
    [[nodiscard]] Polynomial taylor(const TestDistribution& f, int N, int m) const {
        require(m >= -1, "taylor_correction: m >= -1");
        Polynomial p{f.dim(), m, {}};
        const double t = std::ldexp(1.0, -N);
        for (const auto& a : multi_indices(f.dim(), m)) {
            const cplx c = low_.integrate(f, t, [&](std::span<const double> xi) { return i_power(xi, a); });
            p.terms.push_back({a, c / multi_factorial(a)});
        }
        return p;
    }

    /// <Phi_{-N} * f, psi>.
    [[nodiscard]] cplx low_pass_pairing(const TestDistribution& f, int N, const TestFunction& psi) const {
        return low_.integrate(f, std::ldexp(1.0, -N),
                              [&](std::span<const double> xi) { return std::conj(psi.fourier(xi)); });
    }

    /// sum_{nu >= -N} <phi_nu * f, psi>, levels summed until psi^ is negligible.
    [[nodiscard]] cplx band_pairing(const TestDistribution& f, int N, const TestFunction& psi) const {
        // |psi^(xi)| <= C |xi|^k e^{-sigma^2 xi^2 / 2}: stop once below 1e-300 relative
        const double cut = std::sqrt(2 * 700.0) / psi.sigma + 8.0;
        const int top = static_cast<int>(std::ceil(std::log2(cut / combined_.support_inner())));
        CompensatedSum<cplx> s;
        for (int nu = -N; nu <= top; ++nu)
            s.add(band_.integrate(f, std::ldexp(1.0, nu),
                                  [&](std::span<const double> xi) { return std::conj(psi.fourier(xi)); }));
        return s.value();
    }

private:
    SpectralProfile combined_;
    ProfileRule low_;
    ProfileRule band_;
};

/// Phi_{-N} as a profile; see `low_pass_profile`.
inline Polynomial taylor_correction(const TestDistribution& f, const SpectralProfile& combined, int N, int m) {
    require(m >= -1, "taylor_correction: m >= -1");
    if (m == -1) return {f.dim(), -1, {}};
    return LpEngine(combined).taylor(f, N, m);
}

struct LpDecomposition {
    int N = 0;
    GridFunction band_sum;  // levels -N .. max_level on the grid
    Polynomial correction;
    /// <f - band_sum - correction, psi> with the band sum over all levels >= -N.
    std::function<cplx(const TestFunction&)> remainder_pairing;
    std::function<cplx(const TestFunction&)> band_pairing;
};

inline void require_decomposition_window(const GridSpec& spec, const SpectralProfile& combined, int N) {
    const int lo = min_level(spec, combined), hi = max_level(spec, combined);
    if (-N < lo || -N > hi) {
        std::ostringstream os;
        os << "lp_decompose: window exceeded, level " << -N << " outside [" << lo << ", " << hi << "]";
        throw ContractError(os.str());
    }
}

/// The corrected decomposition f = sum_{nu >= -N} phi_nu * f + P_{m,N} + remainder.
inline LpDecomposition lp_decompose(const TestDistribution& f, const SpectralProfile& combined, int N, int m,
                                    const GridSpec& spec, std::optional<CoefficientPerturbation> perturb = {}) {
    require(combined.dim() == f.dim() && spec.n == f.dim(), "lp_decompose: dimension mismatch");
    spec.validate();
    require_decomposition_window(spec, combined, N);
    if (f.kind() == DistributionKind::grid_function)
        require(f.grid()->spec() == spec, "lp_decompose: grid functions decompose on their own grid");

    auto engine = std::make_shared<const LpEngine>(combined);
    LpDecomposition out;
    out.N = N;
    out.correction = engine->taylor(f, N, m);
    if (perturb) {
        require(order_of(perturb->alpha) <= m, "lp_decompose: perturbed coefficient above the degree");
        for (auto& t : out.correction.terms)
            if (t.alpha == perturb->alpha) t.coefficient += perturb->delta;
    }

    std::vector<cplx> s(spec.size());
    if (f.kind() == DistributionKind::grid_function) {
        s = f.grid_spectrum();
    } else {
        for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) { s[i] = f.fourier(xi); });
    }
    const int top = max_level(spec, combined);
    std::array<double, 2> v{};
    for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) {
        CompensatedSum<cplx> w;
        for (int nu = -N; nu <= top; ++nu) {
            for (std::size_t a = 0; a < xi.size(); ++a) v[a] = std::ldexp(xi[a], -nu);
            w.add(combined(std::span<const double>(v.data(), xi.size())));
        }
        s[i] *= w.value();
    });
    out.band_sum = from_spectrum(spec, std::move(s));

    const Polynomial corr = out.correction;
    out.remainder_pairing = [engine, f, N, corr](const TestFunction& psi) {
        return engine->low_pass_pairing(f, N, psi) - corr.pair(psi);
    };
    out.band_pairing = [engine, f, N](const TestFunction& psi) { return engine->band_pairing(f, N, psi); };
    return out;
}

// ---------------------------------------------------------- decay fitting ----

inline constexpr double kPairingFloor = 1e-14;

struct DecayRow {
    double scale = 0;  // N, or log2(1/t)
    double magnitude = 0;
};

struct DecayFit {
    std::vector<DecayRow> rows;
    double slope = 0;
    bool exact = false;          // every magnitude at the precision floor
    double contract_exponent = 0;  // n + m + 1 - d
    double improved_exponent = 0;  // n + max(M, m) + 1 - d for psi with moments vanishing to order M
    [[nodiscard]] bool contract_met(double tol = 0.3) const { return exact || slope <= -contract_exponent + tol; }
    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        if (exact) os << "exact at this precision";
        else os << "slope " << slope << " vs contract " << -contract_exponent;
        return os.str();
    }
};

namespace detail {
inline DecayFit fit_decay(std::vector<DecayRow> rows, double contract, double improved) {
    DecayFit fit{std::move(rows), 0.0, false, contract, improved};
    std::vector<double> xs, ys;
    for (const auto& r : fit.rows) {
        if (r.magnitude <= kPairingFloor) continue;
        xs.push_back(r.scale);
        ys.push_back(std::log2(r.magnitude));
    }
    if (xs.size() < 2) {
        fit.exact = true;
        return fit;
    }
    fit.slope = fit_slope(xs, ys);
    return fit;
}
}  // namespace detail

/// |<remainder_N, psi>| for N in [N_lo, N_hi] and its log2-slope against N.
inline DecayFit remainder_decay_slope(const TestDistribution& f, const LpEngine& engine, const TestFunction& psi,
                                      int m, int N_lo, int N_hi,
                                      std::optional<CoefficientPerturbation> perturb = {}) {
    require(N_hi - N_lo + 1 >= 4, "remainder_decay_slope: at least 4 values of N");
    require(m >= -1, "remainder_decay_slope: m >= -1");
    if (perturb) require(order_of(perturb->alpha) <= m, "remainder_decay_slope: perturbed coefficient above the degree");
    std::vector<DecayRow> rows(static_cast<std::size_t>(N_hi - N_lo + 1));
    parallel_for(rows.size(), [&](std::size_t i) {
        const int N = N_lo + static_cast<int>(i);
        Polynomial p = engine.taylor(f, N, m);
        if (perturb)
            for (auto& t : p.terms)
                if (t.alpha == perturb->alpha) t.coefficient += perturb->delta;
        rows[i] = {static_cast<double>(N), std::abs(engine.low_pass_pairing(f, N, psi) - p.pair(psi))};
    });
    const int n = f.dim(), d = f.order();
    return detail::fit_decay(std::move(rows), n + m + 1 - d, n + std::max(psi.vanishing_moments(), m) + 1 - d);
}

inline DecayFit remainder_decay_slope(const TestDistribution& f, const SpectralProfile& combined,
                                      const TestFunction& psi, int m, int N_lo, int N_hi,
                                      std::optional<CoefficientPerturbation> perturb = {}) {
    return remainder_decay_slope(f, LpEngine(combined), psi, m, N_lo, N_hi, perturb);
}

// ------------------------------------------------------ small-t asymptotics ----

struct AsymptoticsRow {
    double t = 0;
    cplx value_at_zero = 0;  // t^n Phi(t .) * f at 0
    cplx pairing = 0;        // <t^n Phi(t .) * f, psi>
    Polynomial taylor;
    cplx remainder = 0;      // pairing minus <taylor, psi>
};

struct AsymptoticsReport {
    std::vector<AsymptoticsRow> rows;
    DecayFit remainder;
    std::vector<DecayFit> terms;  // |c_alpha| per alpha (in multi_indices order); contract n + |alpha| - d
    std::vector<MultiIndex> alphas;
    [[nodiscard]] bool contracts_met(double tol = 0.3) const {
        if (!remainder.contract_met(tol)) return false;
        for (const auto& t : terms)
            if (!t.contract_met(tol)) return false;
        return true;
    }
};

/// t = k 2^-j with j <= 30 and 0 < t <= 1.
inline void require_dyadic_rational(double t) {
    const double scaled = std::ldexp(t, 30);
    if (!(t > 0 && t <= 1 && scaled == std::floor(scaled))) {
        std::ostringstream os;
        os << "small_t_asymptotics: t = " << t << " is not a dyadic rational in (0, 1]";
        throw ContractError(os.str());
    }
}

/// Convolutions t^n Phi(t .) * f, their degree-m Taylor polynomials at 0 and
/// remainders against psi, with slopes fitted against log2(1/t).
inline AsymptoticsReport small_t_asymptotics(const TestDistribution& f, const SpectralProfile& Phi, int m,
                                             std::span<const double> ts, const TestFunction& psi,
                                             int nodes_per_axis = 0) {
    require(m >= -1, "small_t_asymptotics: m >= -1");
    require(ts.size() >= 4, "small_t_asymptotics: at least 4 values of t");
    require(Phi.dim() == f.dim(), "small_t_asymptotics: dimension mismatch");
    require(std::abs(Phi(0.0) - 1.0) <= 1e-12, "small_t_asymptotics: Phi^(0) = 1 required");
    for (double t : ts) require_dyadic_rational(t);
    const ProfileRule rule(Phi, nodes_per_axis > 0 ? nodes_per_axis : default_nodes(f.dim()));
    AsymptoticsReport rep;
    rep.alphas = multi_indices(f.dim(), m);
    rep.rows.resize(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) {
        auto& r = rep.rows[i];
        r.t = ts[i];
        r.value_at_zero = rule.integrate(f, r.t, [](std::span<const double>) { return cplx(1.0); });
        r.pairing = rule.integrate(f, r.t, [&](std::span<const double> xi) { return std::conj(psi.fourier(xi)); });
        r.taylor = {f.dim(), m, {}};
        for (const auto& a : rep.alphas) {
            const cplx c = rule.integrate(f, r.t, [&](std::span<const double> xi) { return i_power(xi, a); });
            r.taylor.terms.push_back({a, c / multi_factorial(a)});
        }
        r.remainder = r.pairing - r.taylor.pair(psi);
    });
    const int n = f.dim(), d = f.order();
    std::vector<DecayRow> rem;
    for (const auto& r : rep.rows) rem.push_back({-std::log2(r.t), std::abs(r.remainder)});
    rep.remainder = detail::fit_decay(rem, n + m + 1 - d, n + std::max(psi.vanishing_moments(), m) + 1 - d);
    for (std::size_t k = 0; k < rep.alphas.size(); ++k) {
        std::vector<DecayRow> rows;
        for (const auto& r : rep.rows) rows.push_back({-std::log2(r.t), std::abs(r.taylor.terms[k].coefficient)});
        const double e = n + order_of(rep.alphas[k]) - d;
        rep.terms.push_back(detail::fit_decay(std::move(rows), e, e));
    }
    return rep;
}

}  // namespace phit
