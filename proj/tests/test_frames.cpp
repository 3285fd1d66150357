// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "phit/frames.hpp"

using namespace phit;

namespace {

// Telescoping sum over a fixed, generous level range.
double direct_deviation(const WaveletPair& p, double xi) {
    cplx s = 0;
    for (int nu = -60; nu <= 60; ++nu) {
        const double v = std::ldexp(xi, -nu);
        s += std::conj(p.phi(v)) * p.psi(v);
    }
    return std::abs(s - 1.0);
}

std::string error_of(const AdmissibilityConstants& c) {
    try {
        c.validate();
    } catch (const ContractError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Admissible, DefaultValues) {
    const auto phi = make_admissible(default_constants(), 1);
    EXPECT_DOUBLE_EQ(phi(1.0).real(), 1.0);
    EXPECT_EQ(phi(0.4), cplx(0.0));
    EXPECT_EQ(phi(-1.0), phi(1.0));
    EXPECT_EQ(phi(2.5), cplx(0.0));
    EXPECT_EQ(phi(0.0), cplx(0.0));
}

TEST(Admissible, RejectsNamedInequalities) {
    auto c = default_constants();
    c.K0_upper = 4.0;
    EXPECT_NE(error_of(c).find("K0_upper < pi"), std::string::npos);
    c = default_constants();
    c.K1 = 0.9;
    EXPECT_NE(error_of(c).find("2*K1 < K1_upper"), std::string::npos);
    c = default_constants();
    c.K0 = 0.0;
    EXPECT_NE(error_of(c).find("K0 > 0"), std::string::npos);
    c = default_constants();
    c.K1_upper = 0.95;
    EXPECT_NE(error_of(c).find("1 < K1_upper"), std::string::npos);
    EXPECT_THROW(make_admissible({0.5, 0.6, 1.5, 3.5, 1.0}, 1), ContractError);
}

TEST(Admissible, PlateauLowerBoundAndSupport) {
    for (const auto& c : {default_constants(), AdmissibilityConstants{0.45, 0.7, 1.5, 2.2, 1.0}}) {
        for (int n = 1; n <= 2; ++n) {
            const auto phi = make_admissible(c, n);
            for (int i = 0; i <= 1000; ++i) {
                const double r = c.K1 + (c.K1_upper - c.K1) * i / 1000.0;
                EXPECT_GE(std::abs(phi(r)), c.c_lower);
            }
            for (int i = 0; i <= 200; ++i) {
                const double below = c.K0 * i / 200.0;
                const double above = c.K0_upper * (1.0 + i / 50.0);
                EXPECT_EQ(phi(below), cplx(0.0));
                EXPECT_EQ(phi(above), cplx(0.0));
            }
        }
    }
}

TEST(Admissible, RadialInTwoDimensions) {
    const auto phi = make_admissible(default_constants(), 2);
    const double a[2] = {0.6, 0.8};
    const double b[2] = {-1.0, 0.0};
    EXPECT_NEAR(phi(std::span<const double>(a, 2)).real(), phi(1.0).real(), 1e-15);
    EXPECT_NEAR(phi(std::span<const double>(b, 2)).real(), phi(1.0).real(), 1e-15);
}

TEST(Admissible, FiniteDifferencesBounded) {
    // sup of the fourth difference quotient converges under step refinement,
    // which fails for a profile with a jump or a kink
    const auto phi = make_admissible(default_constants(), 1);
    auto sup_d4 = [&](double h) {
        double worst = 0;
        for (double x = 0.3; x < 2.3; x += 2e-5) {
            const double d4 = phi(x + 2 * h).real() - 4 * phi(x + h).real() + 6 * phi(x).real() -
                              4 * phi(x - h).real() + phi(x - 2 * h).real();
            worst = std::max(worst, std::abs(d4) / std::pow(h, 4));
        }
        return worst;
    };
    const double coarse = sup_d4(1e-3), fine = sup_d4(5e-4);
    EXPECT_TRUE(std::isfinite(fine));
    EXPECT_NEAR(fine / coarse, 1.0, 0.1);
}

TEST(Admissible, NormalisationObstruction) {
    const auto phi = make_admissible(default_constants(), 1);
    const int m = 200000;
    const double a = 0.5, b = 2.0, h = (b - a) / m;
    double s = 0;
    for (int i = 1; i < m; ++i) s += std::norm(phi(a + i * h));
    const double integral = 2 * s * h;  // both half-lines
    EXPECT_LT(integral, 2 * kPi);
}

TEST(Dual, EnlargedAnnulusAtGlueMidpoints) {
    const auto phi = make_admissible(default_constants(), 1);
    const auto ann = enlarged_annulus(phi);
    // g(1/2) = 1/2 puts the crossings at the midpoints of the transitions
    EXPECT_NEAR(ann.inner, 0.55, 1e-9);
    EXPECT_NEAR(ann.outer, 2.0 - 0.5 * (2.0 - 5.0 / 3.0), 1e-9);
}

TEST(Dual, ReconstructionAtReferenceFrequencies) {
    const auto pair = make_dual(make_admissible(default_constants(), 1));
    EXPECT_TRUE(pair.reconstruction_verified);
    for (double xi : {0.1, 1.0, 10.0}) EXPECT_LE(direct_deviation(pair, xi), 1e-12) << xi;
    std::vector<std::vector<double>> samples{{0.1}, {1.0}, {10.0}, {-3.3}};
    EXPECT_LE(check_reconstruction(pair, samples), 1e-12);
}

TEST(Dual, ReconstructionOnLogSample) {
    for (int n = 1; n <= 2; ++n) {
        const auto pair = make_dual(make_admissible(default_constants(), n));
        EXPECT_LE(check_reconstruction(pair, log_spaced_frequencies(n, 1e-3, 1e3, 200)), 1e-10);
    }
    const double xi[2] = {0.3, -2.1};
    const auto pair2 = make_dual(make_admissible(default_constants(), 2));
    EXPECT_NEAR(std::abs(reconstruction_sum(pair2.phi, pair2.psi, std::span<const double>(xi, 2))), 1.0, 1e-12);
}

TEST(Dual, SupportAndPlateau) {
    const auto pair = make_dual(make_admissible(default_constants(), 1));
    for (double xi : {2.0001, 2.5, 10.0, -3.0}) EXPECT_EQ(pair.psi(xi), cplx(0.0));
    EXPECT_NEAR(pair.psi(1.0).real(), 1.0, 1e-15);
    EXPECT_NEAR(pair.psi(1.0).imag(), 0.0, 1e-15);
}

TEST(Dual, RejectsThinAnnulus) {
    // declared constants claim a wide plateau but the evaluator is narrow
    AdmissibilityConstants c{0.5, 0.6, 1.25, 2.0, 1.0};
    SpectralProfile narrow(
        ProfileKind::admissible, 1, c, 0.5, 2.0,
        [](std::span<const double> xi) {
            const double r = std::abs(xi[0]);
            return cplx(glue((r - 0.7) / 0.1) * glue((1.3 - r) / 0.1), 0.0);
        },
        {{"type", "custom"}});
    try {
        make_dual(narrow);
        FAIL() << "expected a construction failure";
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("2*K1_tilde"), std::string::npos);
    }
}

TEST(Dual, SelfPairFails) {
    const auto phi = make_admissible(default_constants(), 1);
    const auto p = pair_profiles(phi, phi);
    EXPECT_FALSE(p.reconstruction_verified);
    EXPECT_GT(check_reconstruction(p, log_spaced_frequencies(1, 0.1, 10, 50)), 0.01);
}

TEST(Dual, ConcurrentEvaluationIsPure) {
    const auto pair = make_dual(make_admissible(default_constants(), 1));
    std::vector<double> serial(64), threaded(64);
    for (int i = 0; i < 64; ++i) serial[i] = std::abs(pair.psi(0.5 + i * 0.025));
    {
        std::vector<std::jthread> ts;
        for (int t = 0; t < 4; ++t)
            ts.emplace_back([&, t] {
                for (int i = t; i < 64; i += 4) threaded[i] = std::abs(pair.psi(0.5 + i * 0.025));
            });
    }
    EXPECT_EQ(serial, threaded);
}

TEST(Meyer, ThetaValues) {
    const MeyerChi chi;
    EXPECT_EQ(meyer_theta(chi, kPi / 2), 0.0);
    EXPECT_NEAR(meyer_theta_squared(chi, kPi), 0.5, 1e-15);
    for (double xi : {2.2, 3.0, 4.0})
        EXPECT_LE(std::abs(meyer_theta_squared(chi, xi) + meyer_theta_squared(chi, 2 * xi) - 1.0), 1e-14);
    EXPECT_EQ(meyer_theta(chi, 8 * kPi / 3 + 1e-9), 0.0);
    EXPECT_EQ(meyer_theta(chi, 2 * kPi / 3 - 1e-9), 0.0);
}

TEST(Meyer, EnergyPartition) {
    const MeyerChi chi;
    for (double xi = 0.5; xi <= 50.0; xi *= 1.01) {
        double s = 0;
        for (int nu = -8; nu <= 8; ++nu) s += meyer_theta_squared(chi, std::ldexp(xi, -nu));
        EXPECT_NEAR(s, 1.0, 1e-12) << xi;
    }
    const auto psi = make_meyer();
    const auto p = pair_profiles(psi, psi);
    EXPECT_LE(check_reconstruction(p, log_spaced_frequencies(1, 0.01, 100, 200)), 1e-12);
}

TEST(Meyer, RejectsNonOddChi) {
    EXPECT_THROW(make_meyer(MeyerChi{kPi / 3, 1e-3}), ContractError);
    EXPECT_THROW(make_meyer(MeyerChi{2.0, 0.0}), ContractError);
    EXPECT_NO_THROW(make_meyer(MeyerChi{0.8, 0.0}));
}

TEST(Meyer, GramReferenceEntries) {
    const auto psi = make_meyer();
    MeyerGram gram(psi);
    EXPECT_NEAR(std::abs(gram(0, 0, 0, 0) - 1.0), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(gram(0, 0, 0, 5)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(gram(0, 0, 3, 0)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(gram(0, 0, 1, 1)), 0.0, 1e-8);
    EXPECT_THROW(gram(7, 0, 0, 0), ContractError);
    EXPECT_THROW(gram(0, 33, 0, 0), ContractError);
}

TEST(Meyer, GramIsIdentityOnFullWindow) {
    MeyerGram gram(make_meyer());
    double worst = 0;
    for (int j1 = -6; j1 <= 6; ++j1)
        for (int k1 = -32; k1 <= 32; ++k1)
            for (int j2 = -6; j2 <= 6; ++j2)
                for (int k2 = -32; k2 <= 32; ++k2) {
                    const cplx want = (j1 == j2 && k1 == k2) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(gram(j1, k1, j2, k2) - want));
                }
    EXPECT_LE(worst, 1e-7);
}

TEST(Serialization, ProfilesRoundTrip) {
    const auto pair = make_dual(make_admissible(AdmissibilityConstants{0.45, 0.7, 1.5, 2.2, 1.0}, 2));
    const std::vector<SpectralProfile> profiles{pair.phi, pair.psi, make_meyer(MeyerChi{0.9, 0.0}),
                                                make_gaussian(1, 2, 0.7), combined_profile(pair)};
    for (const auto& p : profiles) {
        const auto j = p.to_json();
        const auto q = profile_from_json(nlohmann::json::parse(j.dump()));
        EXPECT_EQ(q.kind(), p.kind());
        EXPECT_EQ(q.dim(), p.dim());
        for (double xi = -3; xi <= 3; xi += 0.013) EXPECT_EQ(q(xi), p(xi)) << xi;
    }
    SpectralProfile custom(ProfileKind::lowpass, 1, std::nullopt, 0, 1, [](std::span<const double>) { return cplx(1); },
                           {{"type", "custom"}});
    EXPECT_THROW(custom.to_json(), ContractError);
}
