// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Spectral profiles: admissible band-pass functions given by their Fourier
// transforms, the reconstruction dual, the Meyer wavelet, and low-pass
// profiles. Every profile is immutable and cheap to copy.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phit/core.hpp"

namespace phit {

/// Support and lower-bound constants (K0, K1, K^1, K^0, c) of an admissible
/// profile: supp in K0 <= |xi| <= K^0, |value| >= c on K1 <= |xi| <= K^1.
struct AdmissibilityConstants {
    double K0 = 0.5;
    double K1 = 0.6;
    double K1_upper = 5.0 / 3.0;
    double K0_upper = 2.0;
    double c_lower = 1.0;

    /// Throws ContractError naming the first violated inequality.
    void validate() const {
        auto fmt = [](double v) {
            std::ostringstream os;
            os.precision(17);
            os << v;
            return os.str();
        };
        require(K0 > 0, "admissibility: K0 > 0 violated (K0 = " + fmt(K0) + ")");
        require(K0 < K1, "admissibility: K0 < K1 violated");
        require(K1 < 1.0, "admissibility: K1 < 1 violated");
        require(1.0 < K1_upper, "admissibility: 1 < K1_upper violated");
        require(K1_upper < K0_upper, "admissibility: K1_upper < K0_upper violated");
        require(2.0 * K1 < K1_upper,
                "admissibility: 2*K1 < K1_upper violated (2*K1 = " + fmt(2 * K1) +
                    ", K1_upper = " + fmt(K1_upper) + ")");
        require(K0_upper < kPi, "admissibility: K0_upper < pi violated (K0_upper = " +
                                    fmt(K0_upper) + ")");
        require(c_lower > 0, "admissibility: c_lower > 0 violated");
    }
};

inline void to_json(nlohmann::json& j, const AdmissibilityConstants& c) {
    j = {{"K0", c.K0}, {"K1", c.K1}, {"K1_upper", c.K1_upper}, {"K0_upper", c.K0_upper},
         {"c_lower", c.c_lower}};
}
inline void from_json(const nlohmann::json& j, AdmissibilityConstants& c) {
    c.K0 = j.at("K0").get<double>();
    c.K1 = j.at("K1").get<double>();
    c.K1_upper = j.at("K1_upper").get<double>();
    c.K0_upper = j.at("K0_upper").get<double>();
    c.c_lower = j.value("c_lower", 1.0);
}

enum class ProfileKind { admissible, dual, meyer, lowpass };

inline std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::admissible: return "admissible";
        case ProfileKind::dual: return "dual";
        case ProfileKind::meyer: return "meyer";
        case ProfileKind::lowpass: return "lowpass";
    }
    return "unknown";
}

inline ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "admissible") return ProfileKind::admissible;
    if (s == "dual") return ProfileKind::dual;
    if (s == "meyer") return ProfileKind::meyer;
    if (s == "lowpass") return ProfileKind::lowpass;
    throw ContractError("unknown profile kind '" + s + "'");
}

/// A function given exactly on the frequency side by an evaluator
/// xi -> hat(xi). `support_inner`/`support_outer` bound the radii where the
/// evaluator can be nonzero.
class SpectralProfile {
public:
    using Evaluator = std::function<cplx(std::span<const double>)>;

    SpectralProfile(ProfileKind kind, int dim, std::optional<AdmissibilityConstants> constants,
                    double support_inner, double support_outer, Evaluator eval,
                    nlohmann::json params)
        : kind_(kind),
          dim_(dim),
          constants_(constants),
          inner_(support_inner),
          outer_(support_outer),
          eval_(std::make_shared<const Evaluator>(std::move(eval))),
          params_(std::move(params)) {
        require(dim == 1 || dim == 2, "profile dimension must be 1 or 2");
    }

    cplx operator()(std::span<const double> xi) const { return (*eval_)(xi); }

    /// Evaluation at xi * e_1.
    cplx operator()(double xi) const {
        const std::array<double, 2> v{xi, 0.0};
        return (*eval_)(std::span<const double>(v.data(), static_cast<std::size_t>(dim_)));
    }

    [[nodiscard]] ProfileKind kind() const noexcept { return kind_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const std::optional<AdmissibilityConstants>& constants() const noexcept {
        return constants_;
    }
    [[nodiscard]] double support_inner() const noexcept { return inner_; }
    [[nodiscard]] double support_outer() const noexcept { return outer_; }
    [[nodiscard]] const nlohmann::json& params() const noexcept { return params_; }

    /// {kind, n, constants, glue, meyer_chi, source}; see profile_from_json.
    [[nodiscard]] nlohmann::json to_json() const {
        require(params_.value("type", std::string{}) != "custom",
                "custom-evaluator profiles are not serializable");
        nlohmann::json j;
        j["kind"] = to_string(kind_);
        j["n"] = dim_;
        j["constants"] = constants_ ? nlohmann::json(*constants_) : nlohmann::json(nullptr);
        j["glue"] = {{"type", "exp_ratio"}};
        j["params"] = params_;
        return j;
    }

private:
    ProfileKind kind_;
    int dim_;
    std::optional<AdmissibilityConstants> constants_;
    double inner_;
    double outer_;
    std::shared_ptr<const Evaluator> eval_;
    nlohmann::json params_;
};

inline double norm_of(std::span<const double> xi) {
    double s = 0;
    for (double v : xi) s += v * v;
    return std::sqrt(s);
}

/// Radial admissible profile g((r-K0)/(K1-K0)) * g((K^0-r)/(K^0-K^1)).
inline SpectralProfile make_admissible(const AdmissibilityConstants& c, int n) {
    c.validate();
    AdmissibilityConstants stored = c;
    stored.c_lower = 1.0;  // the plateau value of the construction
    auto radial = [c](double r) {
        return glue((r - c.K0) / (c.K1 - c.K0)) * glue((c.K0_upper - r) / (c.K0_upper - c.K1_upper));
    };
    return SpectralProfile(
        ProfileKind::admissible, n, stored, c.K0, c.K0_upper,
        [radial](std::span<const double> xi) { return cplx(radial(norm_of(xi)), 0.0); },
        {{"type", "radial_glue"}});
}

/// Admissible profile plus its reconstruction partner and the measured
/// deviation of sum_nu conj(phi)(2^-nu xi) psi(2^-nu xi) from 1.
struct WaveletPair {
    SpectralProfile phi;
    SpectralProfile psi;
    bool reconstruction_verified = false;
    double max_deviation = 0.0;
    double tolerance = 1e-12;
};

namespace detail {

// Radii where both profiles can be nonzero.
inline std::pair<double, double> joint_support(const SpectralProfile& a, const SpectralProfile& b) {
    return {std::max(a.support_inner(), b.support_inner()),
            std::min(a.support_outer(), b.support_outer())};
}

inline double log_spaced(double lo, double hi, std::size_t i, std::size_t count) {
    const double t = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    return lo * std::pow(hi / lo, t);
}

}  // namespace detail

/// Evaluates sum_nu conj(phi(2^-nu xi)) psi(2^-nu xi) with nu restricted to
/// the levels where the joint support can be hit.
inline cplx reconstruction_sum(const SpectralProfile& phi, const SpectralProfile& psi,
                               std::span<const double> xi) {
    const double r = norm_of(xi);
    require(r > 0, "reconstruction identity is only defined for xi != 0");
    const auto [inner, outer] = detail::joint_support(phi, psi);
    if (inner >= outer) return 0.0;
    const int lo = static_cast<int>(std::floor(std::log2(r / outer))) - 1;
    const int hi = static_cast<int>(std::ceil(std::log2(r / inner))) + 1;
    CompensatedSum<cplx> acc;
    std::array<double, 2> scaled{};
    const std::size_t n = xi.size();
    for (int nu = lo; nu <= hi; ++nu) {
        const double s = std::ldexp(1.0, -nu);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = s * xi[i];
        const std::span<const double> v(scaled.data(), n);
        acc.add(std::conj(phi(v)) * psi(v));
    }
    return acc.value();
}

/// max over samples of |sum_nu conj(phi)psi - 1|.
inline double check_reconstruction(const WaveletPair& pair,
                                   const std::vector<std::vector<double>>& xi_samples) {
    require(!xi_samples.empty(), "check_reconstruction needs at least one sample");
    double worst = 0;
    for (const auto& xi : xi_samples) {
        require(norm_of(xi) > 0, "check_reconstruction: sample xi = 0 is not allowed");
        worst = std::max(worst, std::abs(reconstruction_sum(pair.phi, pair.psi, xi) - 1.0));
    }
    return worst;
}

/// `count` radial samples r e_1 with r log-spaced in [lo, hi].
inline std::vector<std::vector<double>> log_spaced_frequencies(int dim, double lo, double hi,
                                                               std::size_t count) {
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> xi(static_cast<std::size_t>(dim), 0.0);
        xi[0] = detail::log_spaced(lo, hi, i, count);
        out.push_back(std::move(xi));
    }
    return out;
}

/// Pairs two profiles without constructing anything; records the deviation
/// over 200 log-spaced frequencies in [1e-3, 1e3].
inline WaveletPair pair_profiles(SpectralProfile phi, SpectralProfile psi,
                                 double tolerance = 1e-12) {
    WaveletPair p{std::move(phi), std::move(psi), false, 0.0, tolerance};
    p.max_deviation = check_reconstruction(p, log_spaced_frequencies(p.phi.dim(), 1e-3, 1e3, 200));
    p.reconstruction_verified = p.max_deviation <= tolerance;
    return p;
}

/// Radii of the enlarged annulus where |phi| > c/2, found by bisection.
struct EnlargedAnnulus {
    double inner;
    double outer;
};

inline EnlargedAnnulus enlarged_annulus(const SpectralProfile& phi, double bisect_tol = 1e-10) {
    require(phi.constants().has_value(), "dual construction needs an admissible profile with constants");
    const auto& c = *phi.constants();
    const double half = 0.5 * c.c_lower;
    auto excess = [&](double r) { return std::abs(phi(r)) - half; };
    require(excess(1.0) > 0, "dual construction: |phi(1)| must exceed c/2");
    auto bisect = [&](double below, double above) {
        // excess(below) <= 0 < excess(above); returns a point with excess > 0
        require(excess(below) <= 0, "dual construction: |phi| does not fall below c/2 at the support edge");
        while (std::abs(above - below) > bisect_tol) {
            const double mid = 0.5 * (below + above);
            (excess(mid) > 0 ? above : below) = mid;
        }
        return above;
    };
    return {bisect(c.K0, 1.0), bisect(c.K0_upper, 1.0)};
}

/// psi(xi) = (h(xi) - h(2 xi)) / conj(phi(xi)) with h = 1 on |xi| <= 2 K~1,
/// h = 0 on |xi| >= K~^1; the pair telescopes to the reconstruction identity.
inline WaveletPair make_dual(const SpectralProfile& phi) {
    require(phi.kind() == ProfileKind::admissible, "make_dual expects an admissible profile");
    const auto annulus = enlarged_annulus(phi);
    const double lo = annulus.inner;
    const double hi = annulus.outer;
    if (!(2.0 * lo < hi)) {
        std::ostringstream os;
        os.precision(12);
        os << "dual construction: enlarged annulus too thin, 2*K1_tilde = " << 2 * lo
           << " >= K1_upper_tilde = " << hi;
        throw ContractError(os.str());
    }
    auto cutoff = [lo, hi](double r) { return glue((hi - r) / (hi - 2.0 * lo)); };
    SpectralProfile phi_copy = phi;
    auto eval = [phi_copy, cutoff](std::span<const double> xi) -> cplx {
        const double r = norm_of(xi);
        const double num = cutoff(r) - cutoff(2.0 * r);
        if (num == 0.0) return 0.0;
        const cplx p = phi_copy(xi);
        if (std::abs(p) == 0.0) return 0.0;
        return num / std::conj(p);
    };
    AdmissibilityConstants c = *phi.constants();
    // lower bound of |psi| on [K1, K^1], sampled
    double cmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
        const double r = c.K1 + (c.K1_upper - c.K1) * i / 2000.0;
        const double xi[2] = {r, 0.0};
        cmin = std::min(cmin, std::abs(eval(std::span<const double>(xi, static_cast<std::size_t>(phi.dim())))));
    }
    c.c_lower = cmin;
    nlohmann::json params = {{"type", "telescoping_dual"},
                             {"source", phi.to_json()},
                             {"annulus_inner", lo},
                             {"annulus_outer", hi}};
    SpectralProfile psi(ProfileKind::dual, phi.dim(), c, lo, hi, eval, std::move(params));
    auto pair = pair_profiles(phi, psi, 1e-12);
    require(pair.reconstruction_verified,
            "dual construction: reconstruction deviation above 1e-12");
    return pair;
}

/// The product conj(phi) psi of a pair, whose dilates sum to 1 away from 0.
inline SpectralProfile combined_profile(const WaveletPair& pair) {
    const auto [inner, outer] = detail::joint_support(pair.phi, pair.psi);
    auto phi = pair.phi;
    auto psi = pair.psi;
    nlohmann::json params = {{"type", "combined"}};
    if (phi.params().value("type", std::string{}) != "custom" &&
        psi.params().value("type", std::string{}) != "custom") {
        params["phi"] = phi.to_json();
        params["psi"] = psi.to_json();
    } else {
        params["type"] = "custom";
    }
    return SpectralProfile(
        ProfileKind::admissible, phi.dim(), std::nullopt, inner, outer,
        [phi, psi](std::span<const double> xi) { return std::conj(phi(xi)) * psi(xi); },
        std::move(params));
}

// ---------------------------------------------------------------- Meyer ----

/// Odd transition chi(eta) = sgn(eta) (g(1/2 + |eta|/(2w)) - 1/2) + offset,
/// constant 1/2 on [w, inf). A nonzero offset breaks oddness and is rejected.
struct MeyerChi {
    double half_width = kPi / 3.0;
    double offset = 0.0;

    [[nodiscard]] double operator()(double eta) const {
        const double a = std::abs(eta);
        const double v = glue(0.5 + a / (2.0 * half_width)) - 0.5;
        return (eta < 0 ? -v : v) + offset;
    }

    void validate() const {
        require(half_width > 0 && half_width <= kPi / 3.0 + 1e-15,
                "meyer chi: half_width must lie in (0, pi/3]");
        for (int i = 0; i <= 64; ++i) {
            const double eta = 1.2 * kPi * i / 64.0;
            require(std::abs((*this)(eta) + (*this)(-eta)) <= 1e-14,
                    "meyer chi: not odd within 1e-14");
            require((*this)(eta) >= -0.5 - 1e-15, "meyer chi: chi >= -1/2 on [0, inf) violated");
        }
        require(std::abs((*this)(kPi / 3.0) - 0.5) <= 1e-15, "meyer chi: chi = 1/2 on [pi/3, inf) violated");
    }
};

inline void to_json(nlohmann::json& j, const MeyerChi& c) {
    j = {{"half_width", c.half_width}, {"offset", c.offset}};
}
inline void from_json(const nlohmann::json& j, MeyerChi& c) {
    c.half_width = j.value("half_width", kPi / 3.0);
    c.offset = j.value("offset", 0.0);
}

/// theta_1(xi)^2 assembled from chi by the two-branch formula.
inline double meyer_theta_squared(const MeyerChi& chi, double xi) {
    const double a = std::abs(xi);
    if (a == 0.0) return 0.0;
    const double v = a <= 4.0 * kPi / 3.0 ? 0.5 + chi(a - kPi) : 0.5 + chi(kPi - a / 2.0);
    return std::max(0.0, v);
}

inline double meyer_theta(const MeyerChi& chi, double xi) {
    return std::sqrt(meyer_theta_squared(chi, xi));
}

/// hat psi(xi) = theta_1(xi) e^{-i xi/2}; supported in 2pi/3 <= |xi| <= 8pi/3.
inline SpectralProfile make_meyer(const MeyerChi& chi = {}) {
    chi.validate();
    nlohmann::json params = {{"type", "meyer"}, {"meyer_chi", chi}};
    return SpectralProfile(
        ProfileKind::meyer, 1, std::nullopt, 2.0 * kPi / 3.0, 8.0 * kPi / 3.0,
        [chi](std::span<const double> xi) {
            const double x = xi[0];
            return meyer_theta(chi, x) * std::polar(1.0, -x / 2.0);
        },
        std::move(params));
}

/// <2^{j1/2} psi(2^{j1} . - k1), 2^{j2/2} psi(2^{j2} . - k2)> by trapezoid
/// quadrature on the frequency support. Entries depend on (j1 - j2) and the
/// relative shift only, which is used for caching.
class MeyerGram {
public:
    explicit MeyerGram(SpectralProfile meyer, int nodes = 1 << 14)
        : meyer_(std::move(meyer)), nodes_(nodes) {
        require(meyer_.kind() == ProfileKind::meyer, "MeyerGram expects a Meyer profile");
        require(nodes_ >= (1 << 14), "MeyerGram needs at least 2^14 quadrature nodes");
    }

    cplx operator()(int j1, std::int64_t k1, int j2, std::int64_t k2) {
        require(std::abs(j1) <= 6 && std::abs(j2) <= 6, "meyer_gram: |j| <= 6 required");
        require(std::abs(k1) <= 32 && std::abs(k2) <= 32, "meyer_gram: |k| <= 32 required");
        const int jm = std::min(j1, j2);
        const int d1 = jm - j1;  // <= 0
        const int d2 = jm - j2;
        const double beta = static_cast<double>(k1) * std::ldexp(1.0, d1) -
                            static_cast<double>(k2) * std::ldexp(1.0, d2);
        const auto key = std::make_tuple(d1, d2, beta);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const cplx v = integrate(d1, d2, beta);
        cache_.emplace(key, v);
        return v;
    }

private:
    cplx integrate(int d1, int d2, double beta) const {
        // psi(2^{d1} eta) is supported in |eta| in 2^{-d1}[2pi/3, 8pi/3]
        const double a = std::max(std::ldexp(2.0 * kPi / 3.0, -d1), std::ldexp(2.0 * kPi / 3.0, -d2));
        const double b = std::min(std::ldexp(8.0 * kPi / 3.0, -d1), std::ldexp(8.0 * kPi / 3.0, -d2));
        if (!(a < b)) return 0.0;
        const double step = (b - a) / nodes_;
        const double s1 = std::ldexp(1.0, d1);
        const double s2 = std::ldexp(1.0, d2);
        CompensatedSum<cplx> acc;
        for (int side = -1; side <= 1; side += 2) {
            for (int i = 1; i < nodes_; ++i) {
                const double eta = side * (a + i * step);
                const cplx v = meyer_(s1 * eta) * std::conj(meyer_(s2 * eta)) *
                               std::polar(1.0, -eta * beta);
                acc.add(v);
            }
        }
        // prefactor 2^{jm} 2^{-(j1+j2)/2} / (2 pi) = 2^{(d1+d2)/2} / (2 pi)
        return acc.value() * step * std::pow(2.0, 0.5 * (d1 + d2)) / (2.0 * kPi);
    }

    SpectralProfile meyer_;
    int nodes_;
    std::map<std::tuple<int, int, double>, cplx> cache_;
};

inline cplx meyer_gram(const SpectralProfile& meyer, int j1, std::int64_t k1, int j2, std::int64_t k2,
                       int nodes = 1 << 14) {
    MeyerGram g(meyer, nodes);
    return g(j1, k1, j2, k2);
}

// ------------------------------------------------------------- low-pass ----

/// hat(xi) = (i xi_1)^order exp(-scale^2 |xi|^2 / 2): the order-th x_1
/// derivative of a normalised Gaussian. Its moments vanish up to order-1.
inline SpectralProfile make_gaussian(int n, int order = 0, double scale = 1.0) {
    require(order >= 0, "gaussian profile: order >= 0");
    require(scale > 0, "gaussian profile: scale > 0");
    // radius beyond which |hat| < 1e-18 relative to its peak scale
    double r = 1.0 / scale;
    while (0.5 * scale * scale * r * r - order * std::log(std::max(r, 1.0)) < 41.5) r *= 1.05;
    nlohmann::json params = {{"type", "gaussian"}, {"order", order}, {"scale", scale}};
    return SpectralProfile(
        ProfileKind::lowpass, n, std::nullopt, 0.0, r,
        [order, scale](std::span<const double> xi) {
            double r2 = 0;
            for (double v : xi) r2 += v * v;
            cplx f = std::exp(-0.5 * scale * scale * r2);
            cplx ix(0.0, xi[0]);
            for (int i = 0; i < order; ++i) f *= ix;
            return f;
        },
        std::move(params));
}

WaveletPair pair_from_json(const nlohmann::json& j);
SpectralProfile profile_from_json(const nlohmann::json& j);

/// hat Phi_{-N}(xi) = 1 - sum_{nu >= -N} combined(2^{-nu} xi). The combined
/// profile must reproduce the partition of unity within 1e-10.
inline SpectralProfile low_pass_profile(const SpectralProfile& combined, int N) {
    require(combined.support_inner() > 0, "low_pass_profile: combined profile must vanish near 0");
    {
        double worst = 0;
        for (const auto& xi : log_spaced_frequencies(combined.dim(), 1e-3, 1e3, 97)) {
            CompensatedSum<cplx> s;
            const double r = xi[0];
            const int lo = static_cast<int>(std::floor(std::log2(r / combined.support_outer()))) - 1;
            const int hi = static_cast<int>(std::ceil(std::log2(r / combined.support_inner()))) + 1;
            for (int nu = lo; nu <= hi; ++nu) s.add(combined(std::ldexp(r, -nu)));
            worst = std::max(worst, std::abs(s.value() - 1.0));
        }
        require(worst <= 1e-10, "low_pass_profile: partition of unity fails beyond 1e-10");
    }
    const double inner = combined.support_inner();
    const double outer = combined.support_outer();
    nlohmann::json params = {{"type", "partition_remainder"}, {"N", N}};
    if (combined.params().value("type", std::string{}) != "custom") params["combined"] = combined.to_json();
    else params["type"] = "custom";
    return SpectralProfile(
        ProfileKind::lowpass, combined.dim(), std::nullopt, 0.0, outer * std::ldexp(1.0, -N - 1),
        [combined, N, inner](std::span<const double> xi) -> cplx {
            const double r = norm_of(xi);
            if (r == 0.0) return 1.0;
            // terms with 2^{-nu} r < inner vanish
            const int top = static_cast<int>(std::ceil(std::log2(r / inner))) + 1;
            CompensatedSum<cplx> s;
            std::array<double, 2> v{};
            for (int nu = -N; nu <= top; ++nu) {
                for (std::size_t i = 0; i < xi.size(); ++i) v[i] = std::ldexp(xi[i], -nu);
                s.add(combined(std::span<const double>(v.data(), xi.size())));
            }
            return 1.0 - s.value();
        },
        std::move(params));
}

/// Rebuilds a profile from `SpectralProfile::to_json` output.
inline SpectralProfile profile_from_json(const nlohmann::json& j) {
    const int n = j.at("n").get<int>();
    const auto& p = j.at("params");
    const std::string type = p.at("type").get<std::string>();
    if (type == "radial_glue") return make_admissible(j.at("constants").get<AdmissibilityConstants>(), n);
    if (type == "telescoping_dual") return make_dual(profile_from_json(p.at("source"))).psi;
    if (type == "meyer") return make_meyer(p.at("meyer_chi").get<MeyerChi>());
    if (type == "gaussian") return make_gaussian(n, p.at("order").get<int>(), p.at("scale").get<double>());
    if (type == "combined") {
        auto phi = profile_from_json(p.at("phi"));
        auto psi = profile_from_json(p.at("psi"));
        return combined_profile(pair_profiles(phi, psi));
    }
    if (type == "partition_remainder")
        return low_pass_profile(profile_from_json(p.at("combined")), p.at("N").get<int>());
    throw ContractError("profile_from_json: unknown profile type '" + type + "'");
}

inline nlohmann::json pair_to_json(const WaveletPair& pair) {
    return {{"phi", pair.phi.to_json()},
            {"psi", pair.psi.to_json()},
            {"reconstruction_verified", pair.reconstruction_verified},
            {"max_deviation", pair.max_deviation}};
}

inline WaveletPair pair_from_json(const nlohmann::json& j) {
    return pair_profiles(profile_from_json(j.at("phi")), profile_from_json(j.at("psi")));
}

/// The default constants (1/2, 3/5, 5/3, 2).
inline AdmissibilityConstants default_constants() { return {0.5, 0.6, 5.0 / 3.0, 2.0, 1.0}; }

}  // namespace phit
