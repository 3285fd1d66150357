// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "phit/norms.hpp"
#include "phit/transforms.hpp"

namespace phit {
namespace {

GridFunction indicator(const GridSpec& spec, double a1, double b1, double a2, double b2) {
    return GridFunction::from_function(spec, [&](std::span<const double> x) {
        bool in = x[0] >= a1 && x[0] < b1;
        if (x.size() == 2) in = in && x[1] >= a2 && x[1] < b2;
        return in ? 1.0 : 0.0;
    });
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------- mixed norm ----

TEST(MixedNorm, UnitCubeIndicatorIsOne) {
    const GridSpec spec{2, 2, 3};
    const auto f = indicator(spec, 0, 1, 0, 1);
    for (auto p : {std::vector<double>{1, 1}, {2, 3}, {0.5, 4}, {7, 1.25}})
        EXPECT_NEAR(mixed_norm(f, p), 1.0, 1e-14);
}

TEST(MixedNorm, RectangleIteratedIntegral) {
    const GridSpec spec{2, 2, 3};
    EXPECT_NEAR(mixed_norm(indicator(spec, 0, 2, 0, 1), {1, 2}), 2.0, 1e-14);
    // Swapping the rectangle's axes changes the value: x_1 is integrated first.
    EXPECT_NEAR(mixed_norm(indicator(spec, 0, 1, 0, 2), {1, 2}), std::sqrt(2.0), 1e-14);
}

TEST(MixedNorm, DilationOfBlockFunctions) {
    for (int n : {1, 2}) {
        const GridSpec spec{n, 3, 3};
        const std::size_t P = spec.points_per_axis();
        std::mt19937_64 rng(11 + n);
        std::uniform_real_distribution<double> u(-1, 1);
        // Constant on aligned pairs of samples, supported in the middle half.
        std::vector<double> block((P / 2) * (n == 2 ? P / 2 : 1));
        for (auto& v : block) v = u(rng);
        auto inside = [&](std::size_t i) { return i >= P / 4 && i < 3 * P / 4; };
        GridFunction f(spec), g(spec);
        for (std::size_t idx = 0; idx < spec.size(); ++idx) {
            const std::size_t i1 = idx % P, i2 = idx / P;
            if (!inside(i1) || (n == 2 && !inside(i2))) continue;
            f[idx] = block[(i1 / 2) + (n == 2 ? (i2 / 2) * (P / 2) : 0)];
        }
        for (std::size_t idx = 0; idx < spec.size(); ++idx) {
            const std::int64_t j1 = 2 * static_cast<std::int64_t>(idx % P) - static_cast<std::int64_t>(P / 2);
            const std::int64_t j2 = 2 * static_cast<std::int64_t>(idx / P) - static_cast<std::int64_t>(P / 2);
            const auto Ps = static_cast<std::int64_t>(P);
            if (j1 < 0 || j1 >= Ps || (n == 2 && (j2 < 0 || j2 >= Ps))) continue;
            g[idx] = f[static_cast<std::size_t>(j1 + (n == 2 ? j2 * Ps : 0))];
        }
        for (auto p : {std::vector<double>{1.0, 2.0}, {0.7, 3.0}, {2.5, 1.5}}) {
            p.resize(static_cast<std::size_t>(n));
            double expo = 0;
            for (double e : p) expo += 1.0 / e;
            EXPECT_LT(rel(mixed_norm(g, p) / mixed_norm(f, p), std::pow(2.0, -expo)), 1e-12);
        }
    }
}

TEST(MixedNorm, EqualExponentsMatchIsotropicPath) {
    const GridSpec spec{2, 2, 3};
    const auto f = random_cube_band(spec, 4, 5.0);
    std::vector<double> mag(spec.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(f[i]);
    for (double p : {0.6, 1.0, 2.0, 3.3}) EXPECT_LT(rel(mixed_norm(f, {p, p}), lp_norm(spec, mag, p)), 1e-12);
}

TEST(MixedNorm, RejectsNonFiniteSamplesAndBadExponents) {
    const GridSpec spec{1, 2, 2};
    std::vector<double> v(spec.size(), 1.0);
    v[3] = std::nan("");
    EXPECT_THROW(mixed_norm(spec, v, {2.0}), ContractError);
    std::vector<double> ok(spec.size(), 1.0);
    EXPECT_THROW(mixed_norm(spec, ok, {0.0}), ContractError);
    EXPECT_THROW(mixed_norm(spec, ok, {1.0, 2.0}), ContractError);
}

// ------------------------------------------------------------- F-norm ----

TEST(TLNorm, ZeroFunction) {
    const GridSpec spec{1, 4, 3};
    const auto phi = make_admissible(default_constants(), 1);
    EXPECT_EQ(tl_norm(GridFunction(spec), phi, SpaceParams{0.5, {2.0}, 2.0}), 0.0);
}

TEST(TLNorm, SingleModeClosedForm) {
    for (int n : {1, 2}) {
        const GridSpec spec{n, 4, 3};
        const auto phi = make_admissible(default_constants(), n);
        const double xi0 = lattice_frequency(spec, 1.2);
        const auto f = GridFunction::from_function(spec, [&](std::span<const double> x) {
            return std::polar(1.0, xi0 * x[0]);
        });
        const auto levels = level_range(spec, {&phi});
        for (double q : {0.5, 1.0, 2.0, kInfinity}) {
            SpaceParams sp{0.8, n == 1 ? std::vector<double>{1.5} : std::vector<double>{1.0, 2.0}, q};
            double agg = 0;
            int contributing = 0;
            for (int nu = levels.first; nu <= levels.second; ++nu) {
                const double m = std::pow(2.0, nu * sp.s) * std::abs(phi(std::ldexp(xi0, -nu)));
                if (m > 0) ++contributing;
                agg = std::isinf(q) ? std::max(agg, m) : agg + std::pow(m, q);
            }
            if (!std::isinf(q)) agg = std::pow(agg, 1.0 / q);
            ASSERT_EQ(contributing, 2);  // the plateau level and one ramp level
            const double expected = agg * std::pow(spec.period(), sp.inverse_p_sum());
            // For q < 1, roundoff of size 1e-16 at levels that should vanish
            // enters as (1e-16)^q.
            const double tol = q >= 1 ? 1e-12 : 1e-6;
            EXPECT_LT(rel(tl_norm(f, phi, sp, levels), expected), tol) << "n=" << n << " q=" << q;
        }
    }
}

TEST(TLNorm, MonotoneInQ) {
    const GridSpec spec{2, 3, 3};
    const auto phi = make_admissible(default_constants(), 2);
    const auto battery = norm_battery(spec, 0, 3, 8, 100);
    for (const auto& f : battery) {
        double prev = kInfinity;
        for (double q : {0.5, 1.0, 2.0, 4.0, kInfinity}) {
            const double v = tl_norm(f, phi, SpaceParams{0.5, {1.0, 2.0}, q});
            EXPECT_LE(v, prev * (1 + 1e-14));
            prev = v;
        }
    }
}

TEST(TLNorm, LevelOutsideValidRangeIsRejected) {
    const GridSpec spec{1, 4, 3};
    const auto phi = make_admissible(default_constants(), 1);
    const auto f = random_annulus(spec, 1, 1.0, 4.0, true);
    EXPECT_THROW(tl_norm(f, phi, SpaceParams{}, {0, max_level(spec, phi) + 1}), ContractError);
    EXPECT_THROW(tl_norm(f, phi, SpaceParams{}, {min_level(spec, phi) - 1, 0}), ContractError);
    EXPECT_THROW(tl_norm(f, phi, SpaceParams{}, {2, 1}), ContractError);
}

// ----------------------------------------------------------- f-norm ----

TEST(SeqNorm, UnitCubeCoefficient) {
    const GridSpec spec{2, 3, 2};
    CoefficientField a(spec, CoefficientWindow::full(spec, 0, 0));
    a.at(DyadicCube{0, {0, 0}, 2}) = 1.0;
    for (auto p : {std::vector<double>{1, 1}, {2, 0.5}, {3, 7}})
        for (double q : {0.5, 2.0, kInfinity}) EXPECT_NEAR(seq_norm(a, SpaceParams{0.0, p, q}), 1.0, 1e-14);
}

TEST(SeqNorm, SingleCoefficientClosedForm) {
    const GridSpec spec{2, 3, 3};
    const SpaceParams sp{0.7, {1.5, 3.0}, 0.8};
    for (const DyadicCube Q : {DyadicCube{-1, {1, -2}, 2}, DyadicCube{2, {3, 1}, 2}, DyadicCube{3, {-64, 63}, 2}}) {
        CoefficientField a(spec, CoefficientWindow::full(spec, -2, 3));
        a.at(Q) = cplx(0.0, -1.0);
        const double side = Q.side();
        const double expected = std::pow(Q.measure(), -sp.s / 2 - 0.5) * std::pow(side, 1 / 1.5) * std::pow(side, 1 / 3.0);
        EXPECT_LT(rel(seq_norm(a, sp), expected), 1e-12) << "nu=" << Q.nu;
        EXPECT_NEAR(crude_bound_check(a, sp), 1.0, 1e-12);
    }
}

TEST(SeqNorm, EqualExponentsMatchIsotropicPath) {
    const GridSpec spec{2, 3, 3};
    const auto a = random_field(spec, CoefficientWindow::full(spec, -1, 3), 5);
    for (double q : {1.0, kInfinity}) {
        const SpaceParams sp{0.3, {1.7, 1.7}, q};
        EXPECT_LT(rel(seq_norm(a, sp), lp_norm(spec, seq_aggregate(a, sp), 1.7)), 1e-12);
    }
}

TEST(SeqNorm, MonotoneInQ) {
    const GridSpec spec{2, 3, 3};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = random_field(spec, CoefficientWindow::full(spec, -2, 3), seed);
        double prev = kInfinity;
        for (double q : {0.5, 1.0, 2.0, 4.0, kInfinity}) {
            const double v = seq_norm(a, SpaceParams{-0.4, {0.8, 2.0}, q});
            EXPECT_LE(v, prev * (1 + 1e-14));
            prev = v;
        }
    }
}

TEST(CrudeBound, RandomAndZeroFields) {
    const GridSpec spec{1, 5, 4};
    const auto w = CoefficientWindow::full(spec, -3, 4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = random_field(spec, w, seed);
        for (const SpaceParams& sp : {SpaceParams{0.0, {1.0}, 1.0}, SpaceParams{1.5, {0.6}, kInfinity},
                                      SpaceParams{-2.0, {4.0}, 0.5}}) {
            const double r = crude_bound_check(a, sp);
            EXPECT_LE(r, 1.0 + 1e-12);
            EXPECT_GT(r, 0.0);
        }
    }
    EXPECT_EQ(crude_bound_check(CoefficientField(spec, w), SpaceParams{}), 0.0);
}

// ------------------------------------------- triangle and homogeneity ----

TEST(NormAxioms, TriangleAndHomogeneity) {
    const GridSpec spec{2, 3, 3};
    const auto phi = make_admissible(default_constants(), 2);
    const auto w = CoefficientWindow::full(spec, -1, 3);
    const cplx lambda(-2.5, 1.0);
    for (const SpaceParams& sp : {SpaceParams{0.0, {1.0, 2.0}, 1.0}, SpaceParams{1.0, {2.0, 1.5}, kInfinity},
                                  SpaceParams{0.4, {0.5, 0.8}, 0.6}}) {
        double r = std::min({1.0, sp.p[0], sp.p[1], sp.q});
        for (std::uint64_t t = 0; t < 4; ++t) {
            const auto f = random_cube_band(spec, 10 + t, 9.0, true);
            const auto g = random_cube_band(spec, 20 + t, 9.0, true);
            auto check = [&](double sum, double a, double b, const char* what) {
                EXPECT_LE(std::pow(sum, r), (std::pow(a, r) + std::pow(b, r)) * (1 + 1e-12)) << what;
            };
            check(mixed_norm(f + g, sp.p), mixed_norm(f, sp.p), mixed_norm(g, sp.p), "mixed");
            check(tl_norm(f + g, phi, sp), tl_norm(f, phi, sp), tl_norm(g, phi, sp), "tl");
            const auto a = random_field(spec, w, 30 + t), b = random_field(spec, w, 40 + t);
            check(seq_norm(a + b, sp), seq_norm(a, sp), seq_norm(b, sp), "seq");

            EXPECT_LT(rel(mixed_norm(lambda * f, sp.p), std::abs(lambda) * mixed_norm(f, sp.p)), 1e-12);
            EXPECT_LT(rel(tl_norm(lambda * f, phi, sp), std::abs(lambda) * tl_norm(f, phi, sp)), 1e-12);
            EXPECT_LT(rel(seq_norm(lambda * a, sp), std::abs(lambda) * seq_norm(a, sp)), 1e-12);
        }
    }
}

// ------------------------------------------------------- equivalence ----

TEST(NormEquivalence, BoundedAndStableUnderRefinement) {
    const GridSpec coarse{2, 3, 3}, fine{2, 3, 4};
    const auto pair = make_dual(make_admissible(default_constants(), 2));
    const SpaceParams sp{0.0, {1.0, 2.0}, 2.0};
    const auto battery = norm_battery(coarse, 0, 3, 50, 7000);
    auto interval = [&](const GridSpec& spec) {
        const auto w = default_window(spec, pair);
        RatioInterval iv;
        for (const auto& f0 : battery) {
            const auto f = spec == coarse ? f0 : spectral_resample(f0, spec);
            iv.add(seq_norm(analyze(f, pair.phi, w), sp) / tl_norm(f, pair.phi, sp, {w.nu_min, w.nu_max}));
        }
        return iv;
    };
    const auto a = interval(coarse), b = interval(fine);
    EXPECT_LE(a.spread(), 50.0) << a.lo << " .. " << a.hi;
    EXPECT_LT(rel(b.lo, a.lo), 0.10);
    EXPECT_LT(rel(b.hi, a.hi), 0.10);
}

TEST(NormEquivalence, ProfileIndependence) {
    const GridSpec spec{2, 3, 3};
    const auto phi1 = make_admissible(default_constants(), 2);
    const auto phi2 = make_admissible({0.45, 0.7, 1.5, 2.2, 1.0}, 2);
    const auto battery = norm_battery(spec, 0, 3, 50, 9000);
    for (const SpaceParams& sp : {SpaceParams{0.0, {1.0, 2.0}, 2.0}, SpaceParams{1.0, {2.0, 2.0}, kInfinity}}) {
        RatioInterval iv;
        for (const auto& f : battery) iv.add(tl_norm(f, phi1, sp) / tl_norm(f, phi2, sp));
        EXPECT_LE(iv.spread(), 20.0) << iv.lo << " .. " << iv.hi;
    }
}

// --------------------------------------------------------- embedding ----

TEST(Embedding, ThetaSlopeEqualsSmoothness) {
    for (const SpaceParams& sp : {SpaceParams{1.0, {2.0}, 2.0}, SpaceParams{-0.5, {1.5}, kInfinity}}) {
        const auto t = embedding_experiment(EmbeddingKind::theta_scaling, sp, {1, 5});
        ASSERT_EQ(t.rows.size(), 5u);
        EXPECT_NEAR(t.slope, sp.s, 0.05);
        // A single level sees each witness, so consecutive norms differ by 2^s.
        for (std::size_t i = 1; i < t.rows.size(); ++i)
            EXPECT_NEAR(t.rows[i].value / t.rows[i - 1].value, std::pow(2.0, sp.s), 1e-9);
    }
}

TEST(Embedding, ThetaOutOfBandIsRejected) {
    EXPECT_THROW(embedding_experiment(EmbeddingKind::theta_scaling, SpaceParams{1.0, {2.0}, 2.0}, {1, 6}),
                 ContractError);
}

TEST(Embedding, RhoSlopeInTwoDimensions) {
    const SpaceParams sp{0.0, {1.0, 1.0}, 2.0};
    const auto t = embedding_experiment(EmbeddingKind::rho_scaling, sp, {1, 5});
    EXPECT_NEAR(t.expected, -2.0, 1e-15);
    EXPECT_NEAR(t.slope, -2.0, 0.05);
}

TEST(Embedding, RhoWitnessNormConvergesWithTheBox) {
    // Doubling the box barely moves ||rho_1||: the grid values approximate the norm on R^2.
    const SpaceParams sp{0.0, {1.0, 1.0}, 2.0};
    const double a = rho_scaling(sp, {1, 1}, GridSpec{2, 7, 1}).rows[0].value;
    const double b = rho_scaling(sp, {1, 1}, GridSpec{2, 8, 1}).rows[0].value;
    EXPECT_LT(rel(a, b), 0.01);
}

TEST(Embedding, RhoSlopeOnFixedGridInOneDimension) {
    const SpaceParams sp{0.5, {1.5}, 1.0};
    EmbeddingConfig cfg;
    cfg.grid = GridSpec{1, 8, 7};
    cfg.dilate_grid = false;
    const auto t = embedding_experiment(EmbeddingKind::rho_scaling, sp, {1, 5}, cfg);
    EXPECT_NEAR(t.slope, 0.5 - 1 / 1.5, 0.05);
}

TEST(Embedding, RhoFixedGridTooSmallIsRejected) {
    EmbeddingConfig cfg;
    cfg.grid = GridSpec{2, 3, 5};
    cfg.dilate_grid = false;
    EXPECT_THROW(embedding_experiment(EmbeddingKind::rho_scaling, SpaceParams{0.0, {1.0, 1.0}, 2.0}, {1, 5}, cfg),
                 ContractError);
}

TEST(Embedding, SobolevTautology) {
    EmbeddingConfig cfg;
    cfg.grid = GridSpec{1, 6, 4};
    cfg.source = SpaceParams{1.0, {2.0}, kInfinity};
    const auto t = embedding_experiment(EmbeddingKind::sobolev_ratio, SpaceParams{1.0, {2.0}, kInfinity}, {0, 0}, cfg);
    for (const auto& r : t.rows) EXPECT_EQ(r.value, 1.0);
    EXPECT_EQ(t.max_ratio, 1.0);
}

TEST(Embedding, SobolevRatioBoundedOnBattery) {
    EmbeddingConfig cfg;
    cfg.grid = GridSpec{1, 6, 4};
    cfg.source = SpaceParams{1.0, {2.0}, kInfinity};
    cfg.battery = 30;
    const auto t = embedding_experiment(EmbeddingKind::sobolev_ratio, SpaceParams{0.75, {4.0}, 2.0}, {0, 0}, cfg);
    ASSERT_EQ(t.rows.size(), 30u);
    EXPECT_TRUE(std::isfinite(t.max_ratio));
    EXPECT_GT(t.max_ratio, 0.0);
}

TEST(Embedding, SobolevRelationIsEnforced) {
    EmbeddingConfig cfg;
    cfg.grid = GridSpec{1, 6, 4};
    cfg.source = SpaceParams{1.0, {2.0}, kInfinity};
    EXPECT_THROW(embedding_experiment(EmbeddingKind::sobolev_ratio, SpaceParams{0.5, {4.0}, 2.0}, {0, 0}, cfg),
                 ContractError);
    EXPECT_THROW(embedding_experiment(EmbeddingKind::sobolev_ratio, SpaceParams{1.5, {1.0}, 2.0}, {0, 0}, cfg),
                 ContractError);
}

TEST(SpaceParams, ParseAndValidate) {
    const auto sp = parse_space("1.5,1,2,inf");
    EXPECT_EQ(sp.s, 1.5);
    EXPECT_EQ(sp.p, (std::vector<double>{1.0, 2.0}));
    EXPECT_TRUE(sp.q_infinite());
    EXPECT_EQ(parse_space("0,3,0.5").q, 0.5);
    EXPECT_THROW(parse_space("0,1"), ContractError);
    EXPECT_THROW(parse_space("0,-1,2"), ContractError);
    EXPECT_THROW(parse_space("0,1x,2"), ContractError);
    EXPECT_THROW(parse_space("0,1,0"), ContractError);
}

}  // namespace
}  // namespace phit
